#include "klab/orders.hpp"

#include <algorithm>
#include <stdexcept>

namespace klab {

uint64_t compute_pf(const OrderSpec& f) {
    // Probe a margin past the promise point; a violation there falsifies
    // the caller's sub-linearity claim.
    uint64_t probe_to = f.sublinear_from + std::min<uint64_t>(f.sublinear_from, 1024) + 16;
    uint64_t p = 0;
    for (uint64_t n = 0; n <= probe_to; ++n) {
        if (f.eval(n) >= n) {
            if (n >= f.sublinear_from)
                throw std::domain_error("order '" + f.name + "' is not sub-linear: f(" +
                                        std::to_string(n) + ") >= n");
            p = n;
        }
    }
    return p;
}

uint64_t star(const OrderSpec& f, uint64_t p, uint64_t n, uint32_t iteration_cap) {
    uint64_t v = n;
    for (uint32_t k = 0; k <= iteration_cap; ++k) {
        if (v <= p) return k;
        uint64_t next = f.eval(v);
        if (next >= v)
            throw std::runtime_error("star: order '" + f.name + "' does not shrink at " +
                                     std::to_string(v));
        v = next;
    }
    throw std::runtime_error("star: iteration cap reached for order '" + f.name + "'");
}

uint64_t star_fixpoint(const OrderSpec& f, uint64_t n, uint32_t iteration_cap) {
    uint64_t v = n;
    for (uint32_t k = 0; k <= iteration_cap; ++k) {
        uint64_t next = f.eval(v);
        if (next == v) return k;
        v = next;
    }
    throw std::runtime_error("star_fixpoint: iteration cap reached for order '" + f.name + "'");
}

AlphaIndex::AlphaIndex(const ResultStore& prefix_store) {
    for (const BitString& output : prefix_store.distinct_outputs()) {
        outputs_.push_back(output);  // already length-lex sorted
    }
    suffix_min_.assign(outputs_.size(), 0);
    uint64_t running = UINT64_MAX;
    for (std::size_t i = outputs_.size(); i-- > 0;) {
        running = std::min(running, *prefix_store.complexity_upper(outputs_[i]));
        suffix_min_[i] = running;
    }
}

std::optional<uint64_t> AlphaIndex::query(uint64_t n) const {
    BitString bound = nat_to_str(n);
    auto it = std::upper_bound(outputs_.begin(), outputs_.end(), bound);
    if (it == outputs_.end()) return std::nullopt;
    return suffix_min_[static_cast<std::size_t>(it - outputs_.begin())];
}

std::optional<uint64_t> alpha_upper(const ResultStore& prefix_store, uint64_t n) {
    return AlphaIndex(prefix_store).query(n);
}

std::optional<uint64_t> AlphaIndex::star_from(uint64_t p, uint64_t n,
                                              uint32_t iteration_cap) const {
    uint64_t v = n;
    for (uint32_t k = 0; k <= iteration_cap; ++k) {
        if (v <= p) return k;
        auto next = query(v);
        if (!next) return std::nullopt;  // undefined iterate
        if (*next >= v) return std::nullopt;  // stalled above the threshold
        v = *next;
    }
    return std::nullopt;
}

std::optional<uint64_t> alpha_star_upper(const ResultStore& prefix_store, uint64_t p, uint64_t n,
                                         uint32_t iteration_cap) {
    return AlphaIndex(prefix_store).star_from(p, n, iteration_cap);
}

std::optional<uint64_t> suggest_alpha_threshold(const ResultStore& prefix_store,
                                                const std::vector<uint64_t>& probes) {
    AlphaIndex index(prefix_store);
    std::optional<uint64_t> worst;
    for (uint64_t n : probes) {
        uint64_t v = n;
        for (uint32_t k = 0; k < 128; ++k) {
            auto next = index.query(v);
            if (!next) return std::nullopt;  // range not enumerated
            if (*next >= v) break;  // stalled: v is the first non-shrinking value
            v = *next;
        }
        if (!worst || v > *worst) worst = v;
    }
    return worst;
}

OrderLemmaReport check_order_lemma(const OrderSpec& h, const ResultStore& prefix_store,
                                   uint64_t n_from, uint64_t n_to) {
    OrderLemmaReport report;
    AlphaIndex index(prefix_store);
    for (uint64_t n = n_from; n <= n_to; ++n) {
        auto at_n = index.query(n);
        auto at_hn = index.query(h.eval(n));
        if (!at_n || !at_hn) {
            ++report.skipped;
            continue;
        }
        uint64_t shift = *at_n > *at_hn ? *at_n - *at_hn : *at_hn - *at_n;
        report.max_shift = std::max(report.max_shift, shift);
        int64_t excess = static_cast<int64_t>(*at_n) - static_cast<int64_t>(h.eval(n));
        report.max_excess = std::max(report.max_excess, excess);
        ++report.evaluated;
    }
    return report;
}

WidgetReport check_widget_lemma(const ResultStore& prefix_store,
                                const std::function<std::optional<uint64_t>(uint64_t)>& f,
                                uint64_t n_from, uint64_t n_to) {
    WidgetReport report;
    AlphaIndex index(prefix_store);
    for (uint64_t n = n_from; n <= n_to; ++n) {
        auto fn = f(n);
        auto at_n = index.query(n);
        if (!fn || !at_n) {
            ++report.skipped;
            continue;
        }
        auto a1 = index.query(*fn);
        if (!a1) {
            ++report.skipped;
            continue;
        }
        auto a2 = index.query(*a1);
        if (!a2) {
            ++report.skipped;
            continue;
        }
        report.max_diff = std::max(report.max_diff,
                                   static_cast<int64_t>(*a2) - static_cast<int64_t>(*at_n));
        ++report.evaluated;
    }
    return report;
}

OrderSpec order_log2p1() {
    OrderSpec f;
    f.name = "log2p1";
    f.eval = [](uint64_t n) {
        uint64_t v = n + 1, r = 0;
        while (v >>= 1) ++r;
        return r;
    };
    f.sublinear_from = 2;
    return f;
}

OrderSpec order_half() {
    return {"half", [](uint64_t n) { return n / 2; }, 1};
}

OrderSpec order_isqrt() {
    OrderSpec f;
    f.name = "isqrt";
    f.eval = [](uint64_t n) {
        uint64_t r = 0;
        while ((r + 1) * (r + 1) <= n) ++r;
        return r;
    };
    f.sublinear_from = 2;
    return f;
}

std::vector<OrderSpec> library_orders() { return {order_log2p1(), order_half(), order_isqrt()}; }

}  // namespace klab
