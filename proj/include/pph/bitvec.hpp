#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pph {

// Fixed-length packed bit string. Bit i lives at word i/64, position i%64.
// Storage past `size()` bits is kept zero so word-wise comparison and
// popcount need no masking.
class BitVector {
public:
    BitVector() = default;

    explicit BitVector(std::size_t length)
        : length_(length), words_((length + 63) / 64, 0) {
        if (length == 0) throw std::invalid_argument("BitVector: length must be >= 1");
    }

    // Parse from a string of '0'/'1' characters, index 0 = first character.
    static BitVector from_string(const std::string& s) {
        BitVector v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') {
                v.set(i, true);
            } else if (s[i] != '0') {
                throw std::invalid_argument("BitVector::from_string: invalid character");
            }
        }
        return v;
    }

    std::size_t size() const { return length_; }

    bool get(std::size_t i) const {
        check_index(i);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool value) {
        check_index(i);
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    void flip(std::size_t i) {
        check_index(i);
        words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
    }

    std::size_t popcount() const {
        std::size_t total = 0;
        for (std::uint64_t w : words_) total += std::popcount(w);
        return total;
    }

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.length_ == b.length_ && a.words_ == b.words_;
    }
    friend bool operator!=(const BitVector& a, const BitVector& b) { return !(a == b); }

    const std::vector<std::uint64_t>& words() const { return words_; }

    // Hex encoding of ceil(length/8) bytes, byte k = bits [8k, 8k+8),
    // high nibble first within a byte. Length travels separately.
    std::string to_hex() const {
        static const char digits[] = "0123456789abcdef";
        const std::size_t n_bytes = (length_ + 7) / 8;
        std::string out;
        out.reserve(2 * n_bytes);
        for (std::size_t k = 0; k < n_bytes; ++k) {
            const auto byte = static_cast<unsigned>((words_[k >> 3] >> ((k & 7) * 8)) & 0xff);
            out.push_back(digits[byte >> 4]);
            out.push_back(digits[byte & 0xf]);
        }
        return out;
    }

    static BitVector from_hex(std::size_t length, const std::string& hex) {
        BitVector v(length);
        const std::size_t n_bytes = (length + 7) / 8;
        if (hex.size() != 2 * n_bytes) {
            throw std::invalid_argument("BitVector::from_hex: hex length does not match bit length");
        }
        for (std::size_t k = 0; k < n_bytes; ++k) {
            const int hi = hex_digit(hex[2 * k]);
            const int lo = hex_digit(hex[2 * k + 1]);
            const auto byte = static_cast<std::uint64_t>((hi << 4) | lo);
            v.words_[k >> 3] |= byte << ((k & 7) * 8);
        }
        // Reject encodings whose padding bits are nonzero; canonical form only.
        if (length % 8 != 0) {
            const std::uint64_t tail = v.words_.back() >> (((length - 1) % 64) + 1);
            if (tail != 0 || (v.words_.back() & ~word_mask(length)) != 0) {
                throw std::invalid_argument("BitVector::from_hex: nonzero padding bits");
            }
        }
        return v;
    }

private:
    static int hex_digit(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("BitVector::from_hex: invalid hex digit");
    }

    static std::uint64_t word_mask(std::size_t length) {
        const std::size_t rem = length % 64;
        return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
    }

    void check_index(std::size_t i) const {
        if (i >= length_) throw std::out_of_range("BitVector: index out of range");
    }

    std::size_t length_ = 0;
    std::vector<std::uint64_t> words_;
};

// Number of positions where a and b differ.
inline std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hamming_distance: length mismatch");
    }
    std::size_t total = 0;
    const auto& wa = a.words();
    const auto& wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) {
        total += std::popcount(wa[i] ^ wb[i]);
    }
    return total;
}

}  // namespace pph
