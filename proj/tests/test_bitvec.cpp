#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "pph/bitvec.hpp"
#include "pph/rng.hpp"
#include "pph/sampling.hpp"

using namespace pph;

TEST_CASE("hamming distance basics") {
    const auto a = BitVector::from_string("10110");
    CHECK(hamming_distance(a, a) == 0);

    const auto zeros = BitVector::from_string("00000");
    const auto ones = BitVector::from_string("11111");
    CHECK(hamming_distance(zeros, ones) == 5);

    CHECK(hamming_distance(BitVector::from_string("1010"), BitVector::from_string("0011")) == 2);

    CHECK_THROWS_AS(hamming_distance(a, BitVector::from_string("1011")), std::invalid_argument);
}

TEST_CASE("hamming distance is a metric on small vectors") {
    // All 256 vectors of length 8: symmetry, identity, triangle inequality.
    const std::size_t n = 8;
    std::vector<BitVector> all;
    for (std::size_t v = 0; v < (1u << n); ++v) {
        BitVector x(n);
        for (std::size_t i = 0; i < n; ++i) {
            if ((v >> i) & 1) x.set(i, true);
        }
        all.push_back(x);
    }
    std::vector<std::vector<std::size_t>> d(all.size(), std::vector<std::size_t>(all.size()));
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = 0; j < all.size(); ++j) {
            d[i][j] = hamming_distance(all[i], all[j]);
        }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(d[i][i] == 0);
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            CHECK(d[i][j] == d[j][i]);
        }
    }
    bool triangle_ok = true;
    for (std::size_t i = 0; i < all.size() && triangle_ok; ++i) {
        for (std::size_t j = 0; j < all.size() && triangle_ok; ++j) {
            for (std::size_t k = 0; k < all.size(); ++k) {
                if (d[i][k] > d[i][j] + d[j][k]) {
                    triangle_ok = false;
                    break;
                }
            }
        }
    }
    CHECK(triangle_ok);
}

TEST_CASE("bit accessors keep storage canonical") {
    BitVector v(70);
    v.set(69, true);
    v.set(3, true);
    CHECK(v.popcount() == 2);
    CHECK(v.get(69));
    v.flip(69);
    CHECK_FALSE(v.get(69));
    CHECK(v.popcount() == 1);
    CHECK_THROWS_AS(v.get(70), std::out_of_range);
    CHECK_THROWS_AS(v.set(70, true), std::out_of_range);
    CHECK_THROWS_AS(BitVector(0), std::invalid_argument);
}

TEST_CASE("hex round trip") {
    Rng rng(42);
    for (std::size_t length : {1u, 7u, 8u, 9u, 63u, 64u, 65u, 130u}) {
        BitVector v(length);
        for (std::size_t i = 0; i < length; ++i) {
            if (rng.next_bit()) v.set(i, true);
        }
        const auto hex = v.to_hex();
        CHECK(BitVector::from_hex(length, hex) == v);
    }
    CHECK_THROWS_AS(BitVector::from_hex(4, "zz"), std::invalid_argument);
    CHECK_THROWS_AS(BitVector::from_hex(8, "ab12"), std::invalid_argument);
    // 0x80 sets bit 7, which does not exist in a 7-bit vector.
    CHECK_THROWS_AS(BitVector::from_hex(7, "80"), std::invalid_argument);
    CHECK_THROWS_AS(BitVector::from_string("10x"), std::invalid_argument);
}

TEST_CASE("uniform sampling is deterministic and unbiased") {
    const auto a = sample(InputDistribution::uniform(), 8, 1234);
    const auto b = sample(InputDistribution::uniform(), 8, 1234);
    CHECK(a == b);
    CHECK(a != sample(InputDistribution::uniform(), 8, 1235));

    // 1000 samples of n = 10^4 bits: mean weight within 3 sigma of n/2.
    const std::size_t n = 10000;
    const std::size_t samples = 1000;
    double total = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        total += static_cast<double>(sample(InputDistribution::uniform(), n, 900 + i).popcount());
    }
    const double mean_weight = total / static_cast<double>(samples);
    const double sigma = std::sqrt(n / 4.0) / std::sqrt(static_cast<double>(samples));
    CHECK(std::abs(mean_weight - 5000.0) <= 3.0 * sigma);
}

TEST_CASE("per-bit bias sampling") {
    // Degenerate all-ones bias.
    const auto ones = sample(InputDistribution::per_bit_bias({1.0, 1.0, 1.0, 1.0}), 4, 7);
    CHECK(ones == BitVector::from_string("1111"));

    // Frequencies track the declared biases.
    const std::vector<double> biases = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7,
                                        0.8,  0.9, 0.95, 0.25, 0.75, 0.33, 0.66, 0.5};
    const auto dist = InputDistribution::per_bit_bias(biases);
    const std::size_t samples = 4000;
    std::vector<std::size_t> counts(biases.size(), 0);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto x = sample(dist, biases.size(), 5000 + s);
        for (std::size_t i = 0; i < biases.size(); ++i) {
            if (x.get(i)) ++counts[i];
        }
    }
    for (std::size_t i = 0; i < biases.size(); ++i) {
        const double f = static_cast<double>(counts[i]) / static_cast<double>(samples);
        const double band =
            3.9 * std::sqrt(biases[i] * (1.0 - biases[i]) / static_cast<double>(samples)) +
            1.0 / static_cast<double>(samples);
        CHECK(std::abs(f - biases[i]) <= band);
    }
}

TEST_CASE("input distribution validation") {
    CHECK_THROWS_AS(InputDistribution::per_bit_bias({1.2}), std::invalid_argument);
    CHECK_THROWS_AS(InputDistribution::per_bit_bias({-0.1}), std::invalid_argument);

    // lambda = 10 caps Pr[x_i = b] at 1 - 2^-10 for both b.
    const double cap = 1.0 - std::pow(2.0, -10.0);
    CHECK_NOTHROW(InputDistribution::per_bit_bias({cap}, 10.0));
    CHECK_THROWS_AS(InputDistribution::per_bit_bias({cap + 1e-6}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(InputDistribution::per_bit_bias({1.0 - cap - 1e-6}, 10.0),
                    std::invalid_argument);

    // Bias list length must match n at sample time.
    const auto dist = InputDistribution::per_bit_bias({0.5, 0.5});
    CHECK_THROWS_AS(sample(dist, 3, 1), std::invalid_argument);
}

TEST_CASE("flip_k plants exact distances") {
    const auto x = sample(InputDistribution::uniform(), 40, 99);

    CHECK(flip_k(x, 0, 1) == x);

    BitVector complement = x;
    for (std::size_t i = 0; i < x.size(); ++i) complement.flip(i);
    CHECK(flip_k(x, x.size(), 1) == complement);

    CHECK(hamming_distance(x, flip_k(x, 3, 5)) == 3);
    CHECK(flip_k(x, 3, 5) == flip_k(x, 3, 5));
    CHECK_THROWS_AS(flip_k(x, x.size() + 1, 1), std::invalid_argument);

    // Property: distance is exactly k for random (x, k).
    Rng rng(2024);
    for (int round = 0; round < 200; ++round) {
        const std::size_t n = 1 + rng.next_below(300);
        const std::size_t k = rng.next_below(n + 1);
        const auto v = sample(InputDistribution::uniform(), n, rng.next_u64());
        CHECK(hamming_distance(v, flip_k(v, k, rng.next_u64())) == k);
    }
}
