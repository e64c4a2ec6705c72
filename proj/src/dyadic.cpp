#include "klab/dyadic.hpp"

#include <cmath>

namespace klab {

BigUint BigUint::power_of_two(uint64_t exponent) {
    BigUint out;
    out.limbs_.assign(exponent / 64 + 1, 0);
    out.limbs_.back() = uint64_t(1) << (exponent % 64);
    return out;
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

void BigUint::add(const BigUint& other) {
    if (other.limbs_.size() > limbs_.size()) limbs_.resize(other.limbs_.size(), 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        unsigned __int128 sum = carry + limbs_[i];
        if (i < other.limbs_.size()) sum += other.limbs_[i];
        limbs_[i] = static_cast<uint64_t>(sum);
        carry = sum >> 64;
    }
    if (carry) limbs_.push_back(static_cast<uint64_t>(carry));
}

void BigUint::shift_left(uint64_t bits) {
    if (is_zero() || bits == 0) return;
    uint64_t limb_shift = bits / 64, bit_shift = bits % 64;
    std::vector<uint64_t> out(limbs_.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        out[i + limb_shift] |= limbs_[i] << bit_shift;
        if (bit_shift) out[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
    }
    limbs_ = std::move(out);
    trim();
}

int BigUint::compare(const BigUint& other) const {
    if (limbs_.size() != other.limbs_.size())
        return limbs_.size() < other.limbs_.size() ? -1 : 1;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != other.limbs_[i]) return limbs_[i] < other.limbs_[i] ? -1 : 1;
    }
    return 0;
}

std::string BigUint::hex() const {
    if (is_zero()) return "0";
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        for (int nib = 15; nib >= 0; --nib) {
            int d = static_cast<int>((limbs_[i] >> (nib * 4)) & 0xf);
            if (out.empty() && d == 0) continue;
            out.push_back(digits[d]);
        }
    }
    return out.empty() ? "0" : out;
}

double BigUint::to_double_scaled(uint64_t shift) const {
    double acc = 0.0;
    for (std::size_t i = limbs_.size(); i-- > 0;) acc = acc * 18446744073709551616.0 + double(limbs_[i]);
    return acc * std::pow(2.0, -double(shift));
}

void DyadicSum::add_pow2_inverse(uint64_t e) {
    if (e > log2_den_) {
        num_.shift_left(e - log2_den_);
        log2_den_ = e;
    }
    num_.add(BigUint::power_of_two(log2_den_ - e));
}

bool DyadicSum::exceeds_one() const {
    return num_.compare(BigUint::power_of_two(log2_den_)) > 0;
}

double DyadicSum::approx() const { return num_.to_double_scaled(log2_den_); }

std::string DyadicSum::ratio_string() const {
    return "0x" + num_.hex() + "/2^" + std::to_string(log2_den_);
}

}  // namespace klab
