#include "klab/config.hpp"

#include <fstream>
#include <sstream>

namespace klab {

namespace {
std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}
}  // namespace

std::string ExperimentConfig::serialize() const {
    std::ostringstream os;
    os << "version = 1\n";
    os << "store_dir = " << store_dir << "\n";
    os << "out_dir = " << out_dir << "\n";
    os << "plain_cap = " << lab.plain_cap << "\n";
    os << "prefix_cap = " << lab.prefix_cap << "\n";
    os << "cv_cap = " << lab.cv_cap << "\n";
    os << "cond_cap = " << lab.cond_cap << "\n";
    os << "rounds = " << lab.rounds << "\n";
    os << "cond_rounds = " << lab.cond_rounds << "\n";
    os << "plain_seed_len = " << lab.plain_seed_len << "\n";
    os << "prefix_seed_len = " << lab.prefix_seed_len << "\n";
    os << "prefix_seed_pow_max = " << lab.prefix_seed_pow_max << "\n";
    os << "witness_fuel = " << lab.witness_fuel << "\n";
    os << "fuel_cap = " << lab.schedule.fuel_cap << "\n";
    os << "audit_n_max = " << audit_n_max << "\n";
    os << "audit_b_max = " << audit_b_max << "\n";
    os << "sample_len = " << sample_len << "\n";
    os << "rng_seed = " << rng_seed << "\n";
    return os.str();
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    auto as_u32 = [&]() { return static_cast<uint32_t>(std::stoul(value)); };
    auto as_u64 = [&]() { return std::stoull(value); };
    if (key == "version") {
        if (value != "1") throw std::runtime_error("unsupported config version: " + value);
    } else if (key == "store_dir") store_dir = value;
    else if (key == "out_dir") out_dir = value;
    else if (key == "plain_cap") lab.plain_cap = as_u32();
    else if (key == "prefix_cap") lab.prefix_cap = as_u32();
    else if (key == "cv_cap") lab.cv_cap = as_u32();
    else if (key == "cond_cap") lab.cond_cap = as_u32();
    else if (key == "rounds") lab.rounds = as_u32();
    else if (key == "cond_rounds") lab.cond_rounds = as_u32();
    else if (key == "plain_seed_len") lab.plain_seed_len = as_u32();
    else if (key == "prefix_seed_len") lab.prefix_seed_len = as_u32();
    else if (key == "prefix_seed_pow_max") lab.prefix_seed_pow_max = as_u32();
    else if (key == "witness_fuel") lab.witness_fuel = as_u64();
    else if (key == "fuel_cap") lab.schedule.fuel_cap = as_u64();
    else if (key == "audit_n_max") audit_n_max = as_u32();
    else if (key == "audit_b_max") audit_b_max = as_u32();
    else if (key == "sample_len") sample_len = as_u32();
    else if (key == "rng_seed") rng_seed = as_u64();
    else throw std::runtime_error("unknown config key: " + key);
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    bool saw_version = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (!saw_version && key != "version")
            throw std::runtime_error("config must start with 'version = 1'");
        cfg.set(key, value);
        if (key == "version") saw_version = true;
    }
    if (!saw_version) throw std::runtime_error("config missing 'version = 1'");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_text(text);
}

void ExperimentConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << serialize();
}

}  // namespace klab
