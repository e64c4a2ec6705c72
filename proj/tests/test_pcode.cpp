#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "klab/pcode.hpp"

using namespace klab;

static BitString bs(const std::string& s) { return *BitString::parse(s); }

TEST_CASE("grammar examples") {
    CHECK(p_encode({{1}}) == bs("101"));
    CHECK(p_encode({{2, 3}}) == bs("1100011101"));
    CHECK(p_encode({{1, 1, 1}}) == bs("10001000101"));
}

TEST_CASE("encoded length formula") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        PCode code;
        std::size_t k = 1 + rng() % 5;
        for (std::size_t i = 0; i < k; ++i) code.exps.push_back(1 + rng() % 40);
        CHECK(p_encode(code).size() == p_encoded_length(code));
    }
}

TEST_CASE("encode rejects bad exponent lists") {
    CHECK_THROWS_AS(p_encode({{}}), std::invalid_argument);
    CHECK_THROWS_AS(p_encode({{2, 0}}), std::invalid_argument);
}

TEST_CASE("decode examples") {
    auto d = p_decode(bs("1010110"));
    REQUIRE(d.has_value());
    CHECK(d->first == PCode{{1}});
    CHECK(d->second == bs("0110"));

    d = p_decode(bs("1100011101"));
    REQUIRE(d.has_value());
    CHECK(d->first == PCode{{2, 3}});
    CHECK(d->second == bs(""));

    CHECK_FALSE(p_decode(bs("0110")).has_value());   // must start with 1
    CHECK_FALSE(p_decode(bs("11")).has_value());     // no terminator
    CHECK_FALSE(p_decode(bs("1001")).has_value());   // "00" not followed by "0"
    CHECK_FALSE(p_decode(bs("110001")).has_value()); // separator then truncation
}

TEST_CASE("random codes re-split exactly and are mutually prefix-free") {
    std::mt19937_64 rng(4242);
    std::vector<BitString> encodings;
    for (int iter = 0; iter < 1000; ++iter) {
        PCode code;
        std::size_t k = 1 + rng() % 4;
        for (std::size_t i = 0; i < k; ++i) code.exps.push_back(1 + rng() % 12);
        BitString enc = p_encode(code);
        BitString rest;
        std::size_t lr = rng() % 12;
        for (std::size_t i = 0; i < lr; ++i) rest.push_back(rng() & 1);
        BitString joined = enc;
        joined.append(rest);
        auto d = p_decode(joined);
        REQUIRE(d.has_value());
        CHECK(d->first == code);
        CHECK(d->second == rest);
        encodings.push_back(enc);
    }
    auto is_prefix = [](const BitString& a, const BitString& b) {
        if (a.size() >= b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.bit(i) != b.bit(i)) return false;
        return true;
    };
    std::size_t violations = 0;
    for (const auto& a : encodings)
        for (const auto& b : encodings)
            if (is_prefix(a, b)) ++violations;
    CHECK(violations == 0);
}

TEST_CASE("composition applies rightmost first") {
    uint64_t e_id = machines::index_of(machines::plain_copier());
    auto out = phi_tau({{e_id}}, bs("0110"), {1000000});
    REQUIRE(out.halted());
    CHECK(out.output == bs("0110"));

    out = phi_tau({{e_id, e_id}}, bs("0110"), {1000000});
    REQUIRE(out.halted());
    CHECK(out.output == bs("0110"));

    // stutter after const_one: expect stutter("1") = "11"
    uint64_t e_st = machines::index_of(machines::stutter());
    out = phi_tau({{e_st, 69}}, bs(""), {10000000});
    REQUIRE(out.halted());
    CHECK(out.output == bs("11"));

    out = phi_tau({{machines::index_of(machines::looper())}}, bs(""), {100000});
    CHECK(out.out_of_fuel());
}

TEST_CASE("V halts only when the whole gate has converged") {
    // psi_1 is the empty machine: total, constant empty output.
    BitString s = p_encode({{1}});
    s.append(bs("01"));
    VOutcome v = run_V(s, {100000});
    REQUIRE(v.outcome.halted());
    CHECK(v.gate == VOutcome::Gate::AllShorterConverged);
    CHECK(v.outcome.output == bs(""));
}

TEST_CASE("V with the identity index copies its argument") {
    uint64_t e_id = machines::index_of(machines::plain_copier());
    BitString s = p_encode({{e_id}});
    s.append(bs("101"));
    VOutcome v = run_V(s, {uint64_t(1) << 34});
    REQUIRE(v.outcome.halted());
    CHECK(v.gate == VOutcome::Gate::AllShorterConverged);
    CHECK(v.outcome.output == bs("101"));
}

TEST_CASE("V diverges on strings outside the code set") {
    CHECK(run_V(bs("00"), {1000}).outcome.diverged());
    CHECK(run_V(bs(""), {1000}).outcome.diverged());
}

TEST_CASE("a structurally diverging stage blocks the gate forever") {
    // psi_8 executes LEFT at cell 0, a structural divergence.
    BitString s = p_encode({{8}});
    VOutcome v = run_V(s, {1000000});
    CHECK(v.outcome.diverged());
    CHECK(v.gate == VOutcome::Gate::PendingShorter);
}

TEST_CASE("a looping stage exhausts fuel with the gate pending") {
    BitString s = p_encode({{machines::index_of(machines::looper())}});
    VOutcome v = run_V(s, {100000});
    CHECK(v.outcome.out_of_fuel());
    CHECK(v.gate == VOutcome::Gate::PendingShorter);
    REQUIRE(v.pending_count >= 1);
    CHECK(v.pending.front() == bs(""));
}

TEST_CASE("V never halts while a shorter input is unresolved") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 300; ++iter) {
        BitString s;
        std::size_t l = 1 + rng() % 12;
        for (std::size_t i = 0; i < l; ++i) s.push_back(rng() & 1);
        VOutcome v = run_V(s, {2000});
        if (v.outcome.halted()) CHECK(v.gate == VOutcome::Gate::AllShorterConverged);
        if (v.gate == VOutcome::Gate::PendingShorter) CHECK_FALSE(v.outcome.halted());
    }
}

TEST_CASE("prepending a total machine grows the description by e + 3") {
    PCode tau{{3}};
    PCode grown = prepend_total(2, tau);
    CHECK(grown == PCode{{2, 3}});
    CHECK(p_encoded_length(grown) == p_encoded_length(tau) + 2 + 3);
    CHECK_THROWS_AS(prepend_total(0, tau), std::invalid_argument);

    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 100; ++iter) {
        PCode code;
        std::size_t k = 1 + rng() % 4;
        for (std::size_t i = 0; i < k; ++i) code.exps.push_back(1 + rng() % 30);
        uint64_t e = 1 + rng() % 50;
        CHECK(p_encoded_length(prepend_total(e, code)) == p_encoded_length(code) + e + 3);
    }
}

TEST_CASE("prepending the identity preserves the V output") {
    BitString s = p_encode({{1}});
    s.append(bs("1"));
    VOutcome base = run_V(s, {100000});
    REQUIRE(base.outcome.halted());

    uint64_t e_id = machines::index_of(machines::plain_copier());
    BitString grown = p_encode(prepend_total(e_id, {{1}}));
    grown.append(bs("1"));
    CHECK(grown.size() == s.size() + e_id + 3);
    VOutcome lifted = run_V(grown, {uint64_t(1) << 34});
    REQUIRE(lifted.outcome.halted());
    CHECK(lifted.outcome.output == base.outcome.output);
}

TEST_CASE("prepending const_one maps every V output to 1") {
    BitString s = p_encode({{1}});
    s.append(bs("0"));
    BitString grown = p_encode(prepend_total(69, {{1}}));
    grown.append(bs("0"));
    VOutcome lifted = run_V(grown, {1000000});
    REQUIRE(lifted.outcome.halted());
    CHECK(lifted.outcome.output == bs("1"));
    CHECK(grown.size() == s.size() + 69 + 3);
}

TEST_CASE("the code set wastes unboundedly many bits against binary coding") {
    // |p_encode([p])| vs 2 log p + 2: the unary toll keeps growing.
    int64_t prev = -1;
    for (uint64_t j = 2; j <= 16; ++j) {
        PCode code{{uint64_t(1) << j}};
        int64_t unary = static_cast<int64_t>(p_encoded_length(code));
        int64_t binaryish = static_cast<int64_t>(2 * j + 2);
        int64_t waste = unary - binaryish;
        CHECK(waste > prev);
        prev = waste;
    }
}

TEST_CASE("the V machine registers as a custom dovetail kind") {
    MachineKind kind = register_v_machine();
    CHECK(kind.tag == MachineTag::Custom);
    CHECK(custom_machine_registered("V"));
    ResultStore store(kind, 8);
    store.run_rounds(10);
    CHECK(store.facts().size() > 0);
    // every fact replays to the same outcome
    for (const auto& [program, fact] : store.facts()) {
        auto v = run_V(program, {store.schedule().fuel_for_round(store.round())});
        REQUIRE(v.outcome.halted());
        CHECK(v.outcome.output == fact.output);
    }
}
