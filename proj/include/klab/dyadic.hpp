// Exact dyadic rationals num / 2^k with an arbitrary-precision numerator.
// Used for Kraft sums, where "<= 1" has to hold exactly, not to rounding.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace klab {

// Little-endian base-2^64 unsigned integer. Only what the dyadic sums need.
class BigUint {
public:
    BigUint() = default;
    explicit BigUint(uint64_t v) {
        if (v) limbs_.push_back(v);
    }

    static BigUint power_of_two(uint64_t exponent);

    void add(const BigUint& other);
    void shift_left(uint64_t bits);

    // -1, 0, +1 against other.
    int compare(const BigUint& other) const;

    bool is_zero() const { return limbs_.empty(); }

    // Hex rendering, most significant digit first.
    std::string hex() const;

    // Approximate double value of this / 2^shift.
    double to_double_scaled(uint64_t shift) const;

private:
    void trim();
    std::vector<uint64_t> limbs_;
};

// Accumulates sums of 2^{-e} exactly.
class DyadicSum {
public:
    void add_pow2_inverse(uint64_t e);

    // Exact comparison of the sum against 1.
    bool exceeds_one() const;

    double approx() const;
    std::string ratio_string() const;  // "num/2^k" in hex

private:
    BigUint num_;
    uint64_t log2_den_ = 0;
};

}  // namespace klab
