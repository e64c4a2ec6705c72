#include "klab/dovetail.hpp"

#include <mutex>

namespace klab {

namespace {
std::map<std::string, CustomRunner>& custom_registry() {
    static std::map<std::string, CustomRunner> registry;
    return registry;
}
std::mutex registry_mutex;
}  // namespace

void register_custom_machine(const std::string& name, CustomRunner runner) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    custom_registry()[name] = std::move(runner);
}

bool custom_machine_registered(const std::string& name) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    return custom_registry().count(name) > 0;
}

ExecOutcome ResultStore::run_program(const BitString& program, uint64_t fuel) const {
    switch (kind_.tag) {
        case MachineTag::Plain:
            return universal_plain(program, {fuel});
        case MachineTag::Prefix:
            return universal_prefix(program, {fuel});
        case MachineTag::Conditional:
            return universal_conditional(program, kind_.condition, {fuel});
        case MachineTag::Custom: {
            std::lock_guard<std::mutex> lock(registry_mutex);
            auto it = custom_registry().find(kind_.custom_name);
            if (it == custom_registry().end())
                throw std::runtime_error("unknown custom machine: " + kind_.custom_name);
            return it->second(program, fuel);
        }
    }
    throw std::logic_error("unreachable machine tag");
}

void ResultStore::note_fact(const BitString& program, Fact fact) {
    auto best = best_by_output_.find(fact.output);
    if (best == best_by_output_.end() ||
        std::make_pair(program.size(), program) <
            std::make_pair(std::size_t(best->second.first), best->second.second)) {
        best_by_output_[fact.output] = {program.size(), program};
    }
    facts_.emplace(program, std::move(fact));
}

void ResultStore::dovetail_round() {
    uint32_t r = round_ + 1;
    uint64_t fuel = schedule_.fuel_for_round(r);
    uint32_t max_len = std::min<uint32_t>(r, length_cap_);
    for_each_string_up_to(max_len, [&](const BitString& program) {
        if (facts_.count(program) || known_diverged_.count(program)) return;
        ExecOutcome out = run_program(program, fuel);
        if (out.halted()) {
            note_fact(program, Fact{out.output, out.steps});
        } else if (out.diverged()) {
            known_diverged_.insert(program);
        }
    });
    round_ = r;
}

void ResultStore::run_rounds(uint32_t target_round) {
    while (round_ < target_round) dovetail_round();
}

bool ResultStore::seed_witness(const BitString& program, uint64_t fuel) {
    if (facts_.count(program)) return true;
    ExecOutcome out = run_program(program, fuel);
    if (!out.halted()) return false;
    note_fact(program, Fact{out.output, out.steps});
    return true;
}

std::optional<uint64_t> ResultStore::complexity_upper(const BitString& x) const {
    auto it = best_by_output_.find(x);
    if (it == best_by_output_.end()) return std::nullopt;
    return it->second.first;
}

std::optional<BitString> ResultStore::shortest_program(const BitString& x) const {
    auto it = best_by_output_.find(x);
    if (it == best_by_output_.end()) return std::nullopt;
    return it->second.second;
}

std::vector<BitString> ResultStore::distinct_outputs() const {
    std::vector<BitString> out;
    out.reserve(best_by_output_.size());
    for (const auto& [output, best] : best_by_output_) out.push_back(output);
    return out;
}

uint32_t ResultStore::discovery_round(const BitString& program) const {
    auto it = facts_.find(program);
    if (it == facts_.end()) throw std::invalid_argument("discovery_round: not a fact");
    uint32_t r = static_cast<uint32_t>(program.size());
    if (r == 0) r = 1;
    while (schedule_.fuel_for_round(r) < it->second.steps) ++r;
    return r;
}

DyadicSum ResultStore::kraft_sum() const {
    DyadicSum sum;
    for (const auto& [program, fact] : facts_) sum.add_pow2_inverse(program.size());
    return sum;
}

void ResultStore::restore(uint32_t round, std::map<BitString, Fact> facts) {
    round_ = round;
    facts_ = std::move(facts);
    best_by_output_.clear();
    known_diverged_.clear();
    for (const auto& [program, fact] : facts_) {
        auto best = best_by_output_.find(fact.output);
        if (best == best_by_output_.end() ||
            std::make_pair(program.size(), program) <
                std::make_pair(std::size_t(best->second.first), best->second.second)) {
            best_by_output_[fact.output] = {program.size(), program};
        }
    }
}

AnytimeFunctor make_functor(std::shared_ptr<const ResultStore> store) {
    AnytimeFunctor f;
    switch (store->kind().tag) {
        case MachineTag::Plain:
            f.name = "C";
            break;
        case MachineTag::Prefix:
            f.name = "K";
            break;
        case MachineTag::Conditional:
            f.name = "C(.|" + store->kind().condition.str() + ")";
            break;
        case MachineTag::Custom:
            f.name = "C_" + store->kind().custom_name;
            break;
    }
    f.query = [store](const BitString& x) { return store->complexity_upper(x); };
    return f;
}

}  // namespace klab
