// Fair dovetailed enumeration of programs under a machine kind, with a
// persistent store of (program -> output, steps) facts. Queries over a
// store are anytime upper bounds: sound at every round, non-increasing as
// rounds grow.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "klab/bitstring.hpp"
#include "klab/bitvm.hpp"
#include "klab/dyadic.hpp"

namespace klab {

enum class MachineTag : uint8_t {
    Plain = 0,        // universal_plain(program)
    Prefix = 1,       // universal_prefix(program)
    Conditional = 2,  // universal_conditional(program, condition)
    Custom = 3,       // registered runner, keyed by name
};

struct MachineKind {
    MachineTag tag = MachineTag::Plain;
    BitString condition;      // Conditional only
    std::string custom_name;  // Custom only

    static MachineKind plain() { return {MachineTag::Plain, {}, {}}; }
    static MachineKind prefix() { return {MachineTag::Prefix, {}, {}}; }
    static MachineKind conditional(BitString cond) {
        return {MachineTag::Conditional, std::move(cond), {}};
    }
    static MachineKind custom(std::string name) {
        return {MachineTag::Custom, {}, std::move(name)};
    }

    bool operator==(const MachineKind&) const = default;
};

// Runner for Custom kinds. Must be a pure function of (program, fuel).
using CustomRunner = std::function<ExecOutcome(const BitString&, uint64_t)>;

// Process-wide registry used by Custom stores and by snapshot loading.
void register_custom_machine(const std::string& name, CustomRunner runner);
bool custom_machine_registered(const std::string& name);

struct FuelSchedule {
    uint64_t fuel_cap = 1'000'000;
    // Hard ceiling; a schedule asking for more is a configuration error.
    static constexpr uint64_t kGlobalFuelLimit = uint64_t(1) << 40;

    uint64_t fuel_for_round(uint32_t round) const {
        if (fuel_cap > kGlobalFuelLimit)
            throw std::invalid_argument("fuel schedule exceeds the global fuel limit");
        if (round >= 63) return fuel_cap;
        uint64_t f = uint64_t(1) << round;
        return f > fuel_cap ? fuel_cap : f;
    }

    bool operator==(const FuelSchedule&) const = default;
};

struct Fact {
    BitString output;
    uint64_t steps = 0;
    bool operator==(const Fact&) const = default;
};

class ResultStore {
public:
    ResultStore() = default;
    ResultStore(MachineKind kind, uint32_t length_cap, FuelSchedule schedule = {})
        : kind_(std::move(kind)), length_cap_(length_cap), schedule_(schedule) {}

    const MachineKind& kind() const { return kind_; }
    uint32_t round() const { return round_; }
    uint32_t length_cap() const { return length_cap_; }
    const FuelSchedule& schedule() const { return schedule_; }
    const std::map<BitString, Fact>& facts() const { return facts_; }

    // Runs one fair round: every program of length <= min(round, cap) gets
    // fuel_for_round(round) steps; newly halted programs become facts.
    void dovetail_round();
    void run_rounds(uint32_t target_round);

    // Replays a specific program and records the fact if it halts. Lets the
    // store hold constructions longer than the enumeration cap. Returns
    // true when the program halted (fact present afterwards).
    bool seed_witness(const BitString& program, uint64_t fuel);

    // Anytime upper bound: min program length producing x, if any.
    std::optional<uint64_t> complexity_upper(const BitString& x) const;
    // The witness achieving it (shortest, then first in length-lex order).
    std::optional<BitString> shortest_program(const BitString& x) const;
    // Every string some halted program produces, in length-lex order.
    std::vector<BitString> distinct_outputs() const;

    // Round at which the fair schedule first covers a fact (length
    // eligibility and fuel); used as the canonical enumeration key.
    uint32_t discovery_round(const BitString& program) const;

    // Exact sum of 2^-|p| over halted programs.
    DyadicSum kraft_sum() const;

    ExecOutcome run_program(const BitString& program, uint64_t fuel) const;

    bool operator==(const ResultStore& other) const {
        return kind_ == other.kind_ && round_ == other.round_ &&
               length_cap_ == other.length_cap_ && schedule_ == other.schedule_ &&
               facts_ == other.facts_;
    }

    // Snapshot access.
    void restore(uint32_t round, std::map<BitString, Fact> facts);

private:
    void note_fact(const BitString& program, Fact fact);

    MachineKind kind_;
    uint32_t round_ = 0;
    uint32_t length_cap_ = 14;
    FuelSchedule schedule_;
    std::map<BitString, Fact> facts_;  // length-lex ordered, append-only

    // Derived, not serialized.
    std::map<BitString, std::pair<uint64_t, BitString>> best_by_output_;
    std::set<BitString> known_diverged_;
};

// Snapshot file format, little-endian throughout:
//   magic "KLAB", version u8 (=1), machine tag u8,
//   Conditional: condition bit-length u16 + packed condition bytes,
//   Custom: name byte-length u16 + name bytes,
//   round u32, then per fact: program bit-length u16, packed program,
//   output bit-length u16, packed output, steps u64.
void snapshot_save(const ResultStore& store, const std::string& path);
ResultStore snapshot_load(const std::string& path, uint32_t length_cap = 14,
                          FuelSchedule schedule = {});

struct SnapshotInfo {
    MachineKind kind;
    uint32_t round;
    std::size_t fact_count;
};
SnapshotInfo snapshot_peek(const std::string& path);

// A complexity-like function under audit, presented as an anytime upper
// approximation. Either plain (query) or conditional (query_cond).
struct AnytimeFunctor {
    std::string name;
    bool conditional = false;
    std::function<std::optional<uint64_t>(const BitString&)> query;
    std::function<std::optional<uint64_t>(const BitString&, const BitString&)> query_cond;
};

// Builds the store-backed functor for a machine kind.
AnytimeFunctor make_functor(std::shared_ptr<const ResultStore> store);

}  // namespace klab
