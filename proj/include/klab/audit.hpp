// Axiom-system auditors: empirical checks of complexity-functor properties
// against dovetail stores. Combinatorially exact checks (counting, Kraft)
// pass or fail with no tolerance; O(1)-style claims are reported as
// constants measured on the probed range, with monotone growth flagged as
// a trend rather than asserted as a limit statement.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "klab/bitstring.hpp"
#include "klab/dovetail.hpp"
#include "klab/orders.hpp"
#include "klab/pcode.hpp"

namespace klab {

enum class Verdict { ExactPass, BoundedWithConstant, ViolationTrend };

std::string verdict_name(Verdict v);

struct AuditReport {
    std::string audit_id;
    std::string functor;
    Verdict verdict = Verdict::BoundedWithConstant;
    int64_t constant = 0;  // the measured constant for BoundedWithConstant
    uint32_t round_stamp = 0;
    std::vector<std::string> evidence_header;
    std::vector<std::vector<std::string>> evidence;
    std::string note;
};

// Library of test functions used by the stability audits. Entries carry a
// direct evaluator and, when one exists in the machine model, a machine
// index; p_safe marks indices small enough to appear in P codes.
struct FnEntry {
    std::string name;
    bool total = true;
    std::optional<uint64_t> machine_index;
    std::function<std::optional<BitString>(const BitString&)> eval;
    bool p_safe = false;
};

std::vector<FnEntry> fn_library();

// Steps of the prefix reference machine on nat_to_str(n), if it halts
// within the budget. The partial library entry behind the exploratory
// alpha-growth experiment.
std::optional<uint64_t> time_of_computation(uint64_t n, ExecBudget budget);

// --- Core audits -----------------------------------------------------------

// Hypothesis "A(x) <= |x| + O(1)": reports c = max A_t(x) - |x| over the
// sample; monotone growth of the per-length maxima is a trend.
AuditReport audit_upper_bound(const AnytimeFunctor& functor,
                              const std::vector<BitString>& sample);

// Hypothesis "|{x : A(x) <= n}| = O(2^n)": exact counting against
// 2^{n+1} - 1 over the given universe. two_sided additionally reports the
// best c with counts in [2^{n-c}, 2^{n+c}].
AuditReport audit_counting(const AnytimeFunctor& functor,
                           const std::vector<BitString>& universe, uint32_t n_max,
                           bool two_sided = false);

// Hypothesis "A(f(x)) <= A(x) + c_f": one report per library entry.
std::vector<AuditReport> audit_stability(const AnytimeFunctor& functor,
                                         const std::vector<FnEntry>& library,
                                         const std::vector<BitString>& sample);

// Variant audits (no pass/fail contract): "A(f(x)) <= |x| + c_f" and the
// shifted counting "|{x : A(x) <= n-k}| = O(2^{n-k})".
AuditReport audit_stability_vs_length(const AnytimeFunctor& functor, const FnEntry& entry,
                                      const std::vector<BitString>& sample);
AuditReport audit_shifted_counting(const AnytimeFunctor& functor,
                                   const std::vector<BitString>& universe, uint32_t n_max,
                                   uint32_t k);

// --- Rank codec (the constructive half of the plain characterization) ------

// Fixed enumeration of S_n = {x : A_t(x) <= n} by (discovery round of the
// witness, then length-lex), frozen against one store state. Encoding maps
// y to its (A_t(y) + d)-bit big-endian rank; decoding inverts it.
class RankCodec {
public:
    RankCodec(std::shared_ptr<const ResultStore> store, uint32_t d);

    std::optional<BitString> encode(const BitString& y) const;
    std::optional<BitString> decode(const BitString& code) const;
    uint32_t margin() const { return d_; }

    // Smallest d with |S_n| < 2^{n+d} for every populated n.
    static uint32_t margin_from_counting(const ResultStore& store);

private:
    void ensure_fresh() const;
    std::shared_ptr<const ResultStore> store_;
    uint32_t d_;
    uint32_t round_stamp_;
    std::size_t fact_stamp_;
    // per n: ordered S_n and the inverse index
    std::map<uint64_t, std::vector<BitString>> sets_;
    std::map<uint64_t, std::map<BitString, uint64_t>> ranks_;
};

// --- Prefix and conditional suites ------------------------------------------

struct PrefixSuiteReport {
    AuditReport kraft;   // sum over programs and over outputs, both exact
    AuditReport upper;   // c4 = max A(x) - |x| - A(nat_to_str(|x|))
    AuditReport tail;    // counting within each length class at depth b
};

PrefixSuiteReport audit_prefix_suite(const AnytimeFunctor& functor,
                                     const ResultStore* program_store,
                                     const std::vector<BitString>& sample, uint32_t b_max);

struct ConditionalSuiteReport {
    AuditReport upper;     // max B(x|y) - |x|
    AuditReport counting;  // exact, per fixed y
    std::vector<AuditReport> stability;
    AuditReport pairing;   // max B(<x,y>|y) - B(x|y)
    AuditReport diagonal;  // max B(x|x)
};

ConditionalSuiteReport audit_conditional_suite(
    const AnytimeFunctor& functor, const std::vector<BitString>& xs,
    const std::vector<BitString>& ys, const std::vector<BitString>& diagonal_ys,
    const std::vector<FnEntry>& library,
    const std::function<std::vector<BitString>(const BitString&)>& universe_for);

// --- The assembled laboratory ------------------------------------------------

struct LabConfig {
    uint32_t plain_cap = 14;
    uint32_t prefix_cap = 14;
    uint32_t cv_cap = 14;
    uint32_t cond_cap = 10;
    uint32_t rounds = 20;
    uint32_t cond_rounds = 12;
    uint32_t plain_seed_len = 12;      // pair-encoded copier witnesses up to here
    uint32_t prefix_seed_len = 8;      // writer programs for every string up to here
    uint32_t prefix_seed_pow_max = 16; // writers for nat_to_str(2^k), k up to here
    uint64_t witness_fuel = 1'000'000;
    FuelSchedule schedule;
};

// Builds and owns the reference stores, seeds the constructive witnesses,
// and exposes the built-in functors the audits run against.
class Lab {
public:
    explicit Lab(LabConfig cfg = {});

    void build();

    const LabConfig& config() const { return cfg_; }
    std::shared_ptr<ResultStore> plain_store() { return plain_; }
    std::shared_ptr<ResultStore> prefix_store() { return prefix_; }
    std::shared_ptr<ResultStore> cv_store() { return cv_; }
    ResultStore& conditional_store(const BitString& y);

    uint64_t copier_index() const;           // e_id
    uint64_t c_id() const;                   // 2 |copier code| + 1
    uint64_t c_copy() const;                 // 2 |conditional copier code| + 1
    std::optional<uint64_t> alpha_threshold() const { return alpha_p_; }

    AnytimeFunctor functor_C();
    AnytimeFunctor functor_K();
    AnytimeFunctor functor_CV();
    AnytimeFunctor functor_2C();
    AnytimeFunctor functor_zero();
    AnytimeFunctor functor_length();
    AnytimeFunctor functor_Ccond();
    AnytimeFunctor functor_Bmin();
    AnytimeFunctor functor_K_alpha_star();

    AnytimeFunctor functor_by_name(const std::string& name);
    std::vector<std::string> functor_names() const;

    std::vector<BitString> conditional_universe(const BitString& y);

private:
    void seed_conditional(ResultStore& store, const BitString& y);

    LabConfig cfg_;
    bool built_ = false;
    std::shared_ptr<ResultStore> plain_, prefix_, cv_;
    std::map<BitString, std::shared_ptr<ResultStore>> conditionals_;
    std::optional<uint64_t> alpha_p_;
};

// The auditor's own validation: every built-in functor must reproduce its
// declared verdict pattern. Returns all reports plus the mismatches.
struct SelfTestResult {
    bool ok = true;
    std::vector<AuditReport> reports;
    std::vector<std::string> failures;
};

SelfTestResult run_self_test(Lab& lab);

}  // namespace klab
