// Binary strings with the length-lexicographic string<->natural bijection
// and the unary-length-prefix pairing code used by the universal machines.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace klab {

// A finite string over {0,1}. Doubles as a natural number through the
// length-lexicographic bijection ("" = 0, "0" = 1, "1" = 2, "00" = 3, ...).
// operator< is that order, so ordered containers enumerate canonically.
class BitString {
public:
    BitString() = default;

    static BitString zeros(std::size_t n) { return BitString(std::vector<uint8_t>(n, 0)); }
    static BitString ones(std::size_t n) { return BitString(std::vector<uint8_t>(n, 1)); }

    // Parses an ASCII '0'/'1' rendering. Rejects anything else.
    static std::optional<BitString> parse(const std::string& text);

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }

    uint8_t bit(std::size_t i) const { return bits_[i]; }
    uint8_t operator[](std::size_t i) const { return bits_[i]; }

    void push_back(uint8_t b) { bits_.push_back(b ? 1 : 0); }
    void append(const BitString& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    }

    BitString slice(std::size_t pos, std::size_t len) const {
        BitString out;
        out.bits_.assign(bits_.begin() + pos, bits_.begin() + pos + len);
        return out;
    }

    std::string str() const {
        std::string s;
        s.reserve(bits_.size());
        for (uint8_t b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    bool operator==(const BitString& other) const = default;

    // Length-lexicographic total order.
    bool operator<(const BitString& other) const {
        if (bits_.size() != other.bits_.size()) return bits_.size() < other.bits_.size();
        return bits_ < other.bits_;
    }

    const std::vector<uint8_t>& raw() const { return bits_; }

private:
    explicit BitString(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}
    std::vector<uint8_t> bits_;
};

// Rank of x in length-lexicographic order. Defined for |x| <= 63.
uint64_t str_to_nat(const BitString& x);

// Inverse of str_to_nat: binary expansion of n+1 with the leading 1 dropped.
BitString nat_to_str(uint64_t n);

// True when str_to_nat(x) > n, valid for strings of any length.
bool nat_value_exceeds(const BitString& x, uint64_t n);

// 1^{|x|} 0 x y. Self-delimiting in x; the decoder returns the tail as y.
BitString pair_encode(const BitString& x, const BitString& y);

// Inverse of pair_encode. Empty result on a missing 0 terminator or a
// truncated payload.
std::optional<std::pair<BitString, BitString>> pair_decode(const BitString& s);

// MSB-first byte packing, final partial byte zero-padded in the low bits.
std::vector<uint8_t> pack_bits(const BitString& s);
BitString unpack_bits(const std::vector<uint8_t>& bytes, std::size_t bit_count);

// Enumerates all strings of the given length in lexicographic order and
// applies fn; used by the dovetailer and the audits.
template <typename Fn>
void for_each_string_of_length(std::size_t len, Fn&& fn) {
    if (len == 0) {
        fn(BitString{});
        return;
    }
    if (len >= 64) throw std::length_error("for_each_string_of_length: length too large");
    BitString s = BitString::zeros(len);
    for (uint64_t v = 0;; ++v) {
        BitString cur;
        for (std::size_t i = 0; i < len; ++i)
            cur.push_back(static_cast<uint8_t>((v >> (len - 1 - i)) & 1));
        fn(cur);
        if (v + 1 == (uint64_t(1) << len)) break;
    }
}

template <typename Fn>
void for_each_string_up_to(std::size_t max_len, Fn&& fn) {
    for (std::size_t len = 0; len <= max_len; ++len) for_each_string_of_length(len, fn);
}

}  // namespace klab
