#include "klab/bitstring.hpp"

namespace klab {

std::optional<BitString> BitString::parse(const std::string& text) {
    BitString out;
    for (char c : text) {
        if (c == '0') out.push_back(0);
        else if (c == '1') out.push_back(1);
        else return std::nullopt;
    }
    return out;
}

uint64_t str_to_nat(const BitString& x) {
    if (x.size() > 63) throw std::overflow_error("str_to_nat: string longer than 63 bits");
    uint64_t value = 0;
    for (std::size_t i = 0; i < x.size(); ++i) value = (value << 1) | x.bit(i);
    return ((uint64_t(1) << x.size()) - 1) + value;
}

BitString nat_to_str(uint64_t n) {
    if (n == UINT64_MAX) throw std::overflow_error("nat_to_str: value out of range");
    uint64_t m = n + 1;
    int top = 63;
    while (!((m >> top) & 1)) --top;
    BitString out;
    for (int i = top - 1; i >= 0; --i) out.push_back(static_cast<uint8_t>((m >> i) & 1));
    return out;
}

bool nat_value_exceeds(const BitString& x, uint64_t n) {
    BitString bound = nat_to_str(n);
    return bound < x;
}

BitString pair_encode(const BitString& x, const BitString& y) {
    BitString out = BitString::ones(x.size());
    out.push_back(0);
    out.append(x);
    out.append(y);
    return out;
}

std::optional<std::pair<BitString, BitString>> pair_decode(const BitString& s) {
    std::size_t k = 0;
    while (k < s.size() && s.bit(k) == 1) ++k;
    if (k == s.size()) return std::nullopt;  // all 1s, no terminator
    std::size_t payload = k + 1;
    if (s.size() - payload < k) return std::nullopt;  // truncated left part
    BitString left = s.slice(payload, k);
    BitString right = s.slice(payload + k, s.size() - payload - k);
    return std::make_pair(std::move(left), std::move(right));
}

std::vector<uint8_t> pack_bits(const BitString& s) {
    std::vector<uint8_t> bytes((s.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.bit(i)) bytes[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    return bytes;
}

BitString unpack_bits(const std::vector<uint8_t>& bytes, std::size_t bit_count) {
    BitString out;
    for (std::size_t i = 0; i < bit_count; ++i)
        out.push_back((bytes[i / 8] >> (7 - i % 8)) & 1);
    return out;
}

}  // namespace klab
