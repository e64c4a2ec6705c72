// Versioned key-value experiment configuration. A config plus a code
// version fully determines every output, so it is serialized next to each
// report.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "klab/audit.hpp"

namespace klab {

struct ExperimentConfig {
    LabConfig lab;
    std::string store_dir = ".";
    std::string out_dir = "out";
    uint32_t audit_n_max = 12;
    uint32_t audit_b_max = 3;
    uint32_t sample_len = 8;
    uint64_t rng_seed = 1;

    std::string serialize() const;
    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    void save(const std::string& path) const;
    // Applies "key=value"; unknown keys are an error.
    void set(const std::string& key, const std::string& value);
};

}  // namespace klab
