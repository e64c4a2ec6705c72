// Order functions (total, non-decreasing, unbounded), the star operator
// that counts iterations down to a threshold, and the anytime approximation
// of the alpha function alpha(n) = min{ K(i) : i > n } over a prefix store.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "klab/dovetail.hpp"

namespace klab {

struct OrderSpec {
    std::string name;
    std::function<uint64_t(uint64_t)> eval;
    // Promise: eval(n) < n for all n >= sublinear_from. Checked by probing.
    uint64_t sublinear_from = 1;
};

// max{ n < sublinear_from : f(n) >= n }, validating the sub-linearity
// promise on the probed range. Throws std::domain_error when a probe at or
// beyond sublinear_from has f(n) >= n.
uint64_t compute_pf(const OrderSpec& f);

// Least k with f^(k)(n) <= p; f^(0) is the identity. Throws
// std::runtime_error past the iteration cap (a non-shrinking order).
uint64_t star(const OrderSpec& f, uint64_t p, uint64_t n, uint32_t iteration_cap = 64);

// Comparison-only variant: least k with f^(k)(n) == f^(k+1)(n).
uint64_t star_fixpoint(const OrderSpec& f, uint64_t n, uint32_t iteration_cap = 64);

// Anytime upper bound on alpha(n): min program length in the prefix store
// whose output, read as a natural, exceeds n. Absent when nothing above n
// has been enumerated yet.
std::optional<uint64_t> alpha_upper(const ResultStore& prefix_store, uint64_t n);

// Frozen view of a prefix store for repeated alpha queries: sorted distinct
// outputs with suffix minima of their complexity bounds.
class AlphaIndex {
public:
    explicit AlphaIndex(const ResultStore& prefix_store);
    std::optional<uint64_t> query(uint64_t n) const;
    // Star of the indexed alpha at threshold p.
    std::optional<uint64_t> star_from(uint64_t p, uint64_t n, uint32_t iteration_cap = 64) const;

private:
    std::vector<BitString> outputs_;     // length-lex ascending
    std::vector<uint64_t> suffix_min_;   // min K_t over outputs_[i..]
};

// Star of the anytime alpha at threshold p. Absent when the iterate chain
// leaves the enumerated range.
std::optional<uint64_t> alpha_star_upper(const ResultStore& prefix_store, uint64_t p, uint64_t n,
                                         uint32_t iteration_cap = 64);

// Smallest threshold that makes every alpha-star chain from the probe
// points terminate: the largest stall value of the anytime alpha.
std::optional<uint64_t> suggest_alpha_threshold(const ResultStore& prefix_store,
                                                const std::vector<uint64_t>& probes);

struct OrderLemmaReport {
    // max |alpha_t(h(n)) - alpha_t(n)| over the range (shift constant).
    uint64_t max_shift = 0;
    // max(alpha_t(n) - h(n)) over the range, 0 when alpha stays below h.
    int64_t max_excess = 0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;  // points where alpha_t was undefined
};

// Desk-scale surrogate of the order lemma: observed constants for a
// computable order h against the anytime alpha. Upper-approximation
// statistics, not a proof.
OrderLemmaReport check_order_lemma(const OrderSpec& h, const ResultStore& prefix_store,
                                   uint64_t n_from, uint64_t n_to);

struct WidgetReport {
    int64_t max_diff = 0;  // max alpha_t(alpha_t(f(n))) - alpha_t(n)
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

// Surrogate for the double-alpha stability of partial functions: observed
// maximum of alpha_t(alpha_t(f(n))) - alpha_t(n) over the range, skipping
// points where f or the alpha chain is undefined.
WidgetReport check_widget_lemma(const ResultStore& prefix_store,
                                const std::function<std::optional<uint64_t>(uint64_t)>& f,
                                uint64_t n_from, uint64_t n_to);

// Built-in computable sub-linear orders used by the test suites.
std::vector<OrderSpec> library_orders();
OrderSpec order_log2p1();  // floor(log2(n+1))
OrderSpec order_half();    // n / 2
OrderSpec order_isqrt();   // floor(sqrt(n))

}  // namespace klab
