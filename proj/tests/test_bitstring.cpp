#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "klab/bitstring.hpp"

using namespace klab;

static BitString bs(const std::string& s) {
    auto v = BitString::parse(s);
    REQUIRE(v.has_value());
    return *v;
}

TEST_CASE("length-lex ranks of the first strings") {
    CHECK(str_to_nat(bs("")) == 0);
    CHECK(str_to_nat(bs("0")) == 1);
    CHECK(str_to_nat(bs("1")) == 2);
    CHECK(str_to_nat(bs("00")) == 3);
    CHECK(str_to_nat(bs("01")) == 4);
    CHECK(str_to_nat(bs("10")) == 5);
    CHECK(str_to_nat(bs("11")) == 6);
}

TEST_CASE("nat_to_str inverts the rank") {
    CHECK(nat_to_str(0) == bs(""));
    CHECK(nat_to_str(3) == bs("00"));
    CHECK(nat_to_str(6) == bs("11"));
}

TEST_CASE("bijection round trip over the first 2^20 naturals") {
    for (uint64_t n = 0; n < (uint64_t(1) << 20); ++n) {
        if (str_to_nat(nat_to_str(n)) != n) {
            REQUIRE(str_to_nat(nat_to_str(n)) == n);
        }
    }
}

TEST_CASE("string length under the bijection is floor(log2(n+1))") {
    for (uint64_t n = 0; n < 4096; ++n) {
        std::size_t len = nat_to_str(n).size();
        CHECK((uint64_t(1) << len) - 1 <= n);
        CHECK(n < (uint64_t(1) << (len + 1)) - 1);
    }
}

TEST_CASE("pairing examples") {
    CHECK(pair_encode(bs(""), bs("")) == bs("0"));
    CHECK(pair_encode(bs("01"), bs("1")) == bs("110011"));
    CHECK(pair_encode(bs("1"), bs("")) == bs("101"));

    auto d = pair_decode(bs("0"));
    REQUIRE(d.has_value());
    CHECK(d->first == bs(""));
    CHECK(d->second == bs(""));

    d = pair_decode(bs("110011"));
    REQUIRE(d.has_value());
    CHECK(d->first == bs("01"));
    CHECK(d->second == bs("1"));

    CHECK_FALSE(pair_decode(bs("111")).has_value());
    CHECK_FALSE(pair_decode(bs("")).has_value());
    CHECK_FALSE(pair_decode(bs("110")).has_value());  // payload shorter than the unary count
}

TEST_CASE("pairing round trip on random strings up to 64 bits") {
    std::mt19937_64 rng(12345);
    for (int iter = 0; iter < 2000; ++iter) {
        BitString x, y;
        std::size_t lx = rng() % 65, ly = rng() % 65;
        for (std::size_t i = 0; i < lx; ++i) x.push_back(rng() & 1);
        for (std::size_t i = 0; i < ly; ++i) y.push_back(rng() & 1);
        BitString enc = pair_encode(x, y);
        CHECK(enc.size() == 2 * lx + ly + 1);
        auto dec = pair_decode(enc);
        REQUIRE(dec.has_value());
        CHECK(dec->first == x);
        CHECK(dec->second == y);
    }
}

TEST_CASE("length-lex order is total and respects length") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 2000; ++iter) {
        BitString x, y;
        std::size_t lx = rng() % 20, ly = rng() % 20;
        for (std::size_t i = 0; i < lx; ++i) x.push_back(rng() & 1);
        for (std::size_t i = 0; i < ly; ++i) y.push_back(rng() & 1);
        if (x == y) continue;
        CHECK((x < y) != (y < x));
        if (x.size() < y.size()) CHECK(x < y);
    }
}

TEST_CASE("byte packing round trip") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 500; ++iter) {
        BitString x;
        std::size_t lx = rng() % 100;
        for (std::size_t i = 0; i < lx; ++i) x.push_back(rng() & 1);
        CHECK(unpack_bits(pack_bits(x), x.size()) == x);
    }
}
