#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "klab/bitvm.hpp"

using namespace klab;

static BitString bs(const std::string& s) {
    auto v = BitString::parse(s);
    REQUIRE(v.has_value());
    return *v;
}

TEST_CASE("empty program halts with empty output") {
    auto out = run_plain(MachineCode::from_bits(bs("")), bs(""), {10});
    CHECK(out.halted());
    CHECK(out.output == bs(""));
    CHECK(out.steps == 0);
}

TEST_CASE("flip-write-halt writes a single 1") {
    auto out = run_plain(MachineCode::from_bits(bs("000110111")), bs(""), {10});
    CHECK(out.halted());
    CHECK(out.output == bs("1"));
    CHECK(out.steps == 3);
}

TEST_CASE("loop skipped on a zero cell costs one opcode plus one hop") {
    auto out = run_plain(MachineCode::from_bits(bs("011100")), bs(""), {10});
    CHECK(out.halted());
    CHECK(out.output == bs(""));
    CHECK(out.steps == 2);
}

TEST_CASE("plain READ at end of input halts with the output so far") {
    // READ, WRITE, HALT on empty input: the very first READ ends the run.
    auto out = run_plain(MachineCode::from_ops({Op::Read, Op::Write, Op::Halt}), bs(""), {10});
    CHECK(out.halted());
    CHECK(out.output == bs(""));
}

TEST_CASE("LEFT at cell 0 diverges") {
    auto out = run_plain(MachineCode::from_ops({Op::Left}), bs(""), {10});
    CHECK(out.diverged());
}

TEST_CASE("unmatched brackets diverge structurally") {
    CHECK(run_plain(MachineCode::from_ops({Op::LoopStart}), bs(""), {10}).diverged());
    auto out = run_plain(MachineCode::from_ops({Op::Flip, Op::LoopEnd}), bs(""), {10});
    CHECK(out.diverged());
}

TEST_CASE("prefix semantics") {
    auto out = run_prefix(MachineCode::from_ops({Op::Flip, Op::Write, Op::Halt}), bs(""), {10});
    CHECK(out.halted());
    CHECK(out.output == bs("1"));
    CHECK(out.consumed_input == 0);

    CHECK(run_prefix(MachineCode::from_ops({Op::Read, Op::Halt}), bs(""), {10}).diverged());

    out = run_prefix(MachineCode::from_ops({Op::Read, Op::Write, Op::Halt}), bs("1"), {10});
    CHECK(out.halted());
    CHECK(out.output == bs("1"));
    CHECK(out.consumed_input == 1);
}

TEST_CASE("conditional semantics preload the tape") {
    auto out = run_conditional(MachineCode::from_bits(bs("")), bs(""), bs("101"), {10});
    CHECK(out.halted());
    CHECK(out.output == bs(""));

    out = run_conditional(MachineCode::from_ops({Op::Write, Op::Halt}), bs(""), bs("1"), {10});
    CHECK(out.halted());
    CHECK(out.output == bs("1"));  // cell 0 holds the unary marker

    out = run_conditional(MachineCode::from_ops({Op::Read, Op::Write, Op::Halt}), bs(""), bs(""),
                          {10});
    CHECK(out.halted());
    CHECK(out.output == bs(""));
}

TEST_CASE("psi(0) runs the empty machine") {
    auto out = psi(0, bs("1010"), {10});
    CHECK(out.halted());
    CHECK(out.output == bs(""));
}

TEST_CASE("psi of the copier index is the identity") {
    uint64_t e_id = machines::index_of(machines::plain_copier());
    auto out = psi(e_id, bs("0110"), {100000});
    CHECK(out.halted());
    CHECK(out.output == bs("0110"));
}

TEST_CASE("psi of the looper exhausts any finite budget") {
    uint64_t e_loop = machines::index_of(machines::looper());
    CHECK(e_loop == 539);
    auto out = psi(e_loop, bs(""), {1000000});
    CHECK(out.out_of_fuel());
}

TEST_CASE("universal plain machine") {
    auto out = universal_plain(pair_encode(bs(""), bs("1101")), {10});
    CHECK(out.halted());
    CHECK(out.output == bs(""));

    out = universal_plain(pair_encode(machines::plain_copier().raw, bs("01")), {100000});
    CHECK(out.halted());
    CHECK(out.output == bs("01"));

    CHECK(universal_plain(BitString::ones(12), {10}).diverged());
}

TEST_CASE("universal prefix machine requires exact consumption") {
    CHECK(universal_prefix(bs("0"), {10}).halted());
    CHECK(universal_prefix(bs("01"), {10}).diverged());

    BitString s = pair_encode(ops_to_bits({Op::Read, Op::Write, Op::Halt}), bs("1"));
    auto out = universal_prefix(s, {100});
    CHECK(out.halted());
    CHECK(out.output == bs("1"));
}

TEST_CASE("conditional copier emits the condition for every length up to 10") {
    MachineCode cc = machines::cond_copier();
    CHECK(cc.raw.size() == 87);
    for (std::size_t len = 0; len <= 10; ++len) {
        for_each_string_of_length(len, [&](const BitString& y) {
            auto out = run_conditional(cc, bs(""), y, {200000});
            REQUIRE(out.halted());
            if (out.output != y) {
                CAPTURE(y.str());
                CHECK(out.output == y);
            }
        });
    }
}

TEST_CASE("the tape-agnostic input copier echoes its input under any condition") {
    MachineCode cic = machines::cond_input_copier();
    for (const char* cond : {"", "1", "0110", "11111111"}) {
        for (const char* in : {"", "0", "10", "0101"}) {
            auto out = run_conditional(cic, bs(in), bs(cond), {10000});
            REQUIRE(out.halted());
            CHECK(out.output == bs(in));
        }
    }
    // and it still works as a plain machine
    auto out = run_plain(cic, bs("110"), {10000});
    REQUIRE(out.halted());
    CHECK(out.output == bs("110"));
}

TEST_CASE("stutter machine prepends the first bit") {
    MachineCode st = machines::stutter();
    auto out = run_plain(st, bs("101"), {10000});
    CHECK(out.halted());
    CHECK(out.output == bs("1101"));
    out = run_plain(st, bs(""), {10000});
    CHECK(out.halted());
    CHECK(out.output == bs(""));
    out = run_plain(st, bs("01"), {10000});
    CHECK(out.halted());
    CHECK(out.output == bs("001"));
}

TEST_CASE("flipper complements the input") {
    auto out = run_plain(machines::flipper(), bs("0110"), {10000});
    CHECK(out.halted());
    CHECK(out.output == bs("1001"));
}

TEST_CASE("writer emits its target and nothing else") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        BitString s;
        std::size_t l = rng() % 16;
        for (std::size_t i = 0; i < l; ++i) s.push_back(rng() & 1);
        auto out = run_plain(machines::writer(s), bs(""), {10000});
        REQUIRE(out.halted());
        CHECK(out.output == s);
        auto pre = universal_prefix(machines::prefix_writer_program(s), {10000});
        REQUIRE(pre.halted());
        CHECK(pre.output == s);
    }
}

TEST_CASE("determinism: identical inputs give identical outcomes") {
    std::mt19937_64 rng(4242);
    for (int iter = 0; iter < 400; ++iter) {
        BitString code, input;
        std::size_t lc = rng() % 24, li = rng() % 8;
        for (std::size_t i = 0; i < lc; ++i) code.push_back(rng() & 1);
        for (std::size_t i = 0; i < li; ++i) input.push_back(rng() & 1);
        MachineCode mc = MachineCode::from_bits(code);
        auto a = run_plain(mc, input, {500});
        auto b = run_plain(mc, input, {500});
        CHECK(a.kind == b.kind);
        CHECK(a.output == b.output);
        CHECK(a.steps == b.steps);
        CHECK(a.consumed_input == b.consumed_input);
    }
}

TEST_CASE("fuel monotonicity: a halted run never changes with more fuel") {
    std::mt19937_64 rng(777);
    for (int iter = 0; iter < 400; ++iter) {
        BitString code, input;
        std::size_t lc = rng() % 24, li = rng() % 8;
        for (std::size_t i = 0; i < lc; ++i) code.push_back(rng() & 1);
        for (std::size_t i = 0; i < li; ++i) input.push_back(rng() & 1);
        MachineCode mc = MachineCode::from_bits(code);
        auto low = run_plain(mc, input, {40});
        auto high = run_plain(mc, input, {4000});
        if (low.halted()) {
            CHECK(high.halted());
            CHECK(high.output == low.output);
            CHECK(high.steps == low.steps);
        }
        if (low.diverged()) CHECK(high.diverged());
    }
}

TEST_CASE("EOF-halt soundness: unread suffix bits never change a full-consumption run") {
    std::mt19937_64 rng(31337);
    for (int iter = 0; iter < 400; ++iter) {
        BitString code, input, extra;
        std::size_t lc = rng() % 24, li = rng() % 6, le = 1 + rng() % 4;
        for (std::size_t i = 0; i < lc; ++i) code.push_back(rng() & 1);
        for (std::size_t i = 0; i < li; ++i) input.push_back(rng() & 1);
        for (std::size_t i = 0; i < le; ++i) extra.push_back(rng() & 1);
        MachineCode mc = MachineCode::from_bits(code);
        auto base = run_plain(mc, input, {2000});
        if (!base.halted() || base.consumed_input < input.size()) continue;
        BitString longer = input;
        longer.append(extra);
        auto again = run_plain(mc, longer, {2000});
        // The original run consumed everything; with appended bits the
        // execution prefix agrees, so a halt without touching the suffix
        // must reproduce the output.
        if (again.halted() && again.consumed_input == input.size())
            CHECK(again.output == base.output);
    }
}

TEST_CASE("prefix-freeness of the universal prefix machine's halting set") {
    // Enumerate all s up to 14 bits at fuel 10^4 and check no halted
    // program is a proper prefix of another halted program.
    std::vector<BitString> halted;
    for_each_string_up_to(14, [&](const BitString& s) {
        if (universal_prefix(s, {10000}).halted()) halted.push_back(s);
    });
    REQUIRE(halted.size() > 0);
    auto is_prefix = [](const BitString& a, const BitString& b) {
        if (a.size() >= b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.bit(i) != b.bit(i)) return false;
        return true;
    };
    std::size_t violations = 0;
    for (const auto& a : halted)
        for (const auto& b : halted)
            if (is_prefix(a, b)) ++violations;
    CHECK(violations == 0);
}

TEST_CASE("golden trace of flip-write-halt") {
    std::ostringstream os;
    TraceFn trace = [&](std::size_t pc, uint64_t head, int cellv, uint64_t fuel) {
        os << "pc=" << pc << " head=" << head << " cell=" << cellv << " fuel=" << fuel << "\n";
    };
    auto out = run_plain(MachineCode::from_bits(bs("000110111")), bs(""), {10}, trace);
    CHECK(out.halted());
    CHECK(os.str() ==
          "pc=0 head=0 cell=0 fuel=9\n"
          "pc=1 head=0 cell=1 fuel=8\n"
          "pc=2 head=0 cell=1 fuel=7\n");
}
