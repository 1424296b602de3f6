#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pph/bitvec.hpp"
#include "pph/rng.hpp"

namespace pph {

// Input source for experiments: either uniform bits or independent per-bit
// biases p_i = Pr[x_i = 1]. An optional min-entropy parameter lambda caps the
// per-bit bias at Pr[x_i = b] <= 1 - 2^-lambda for both b.
struct InputDistribution {
    enum class Kind { Uniform, PerBitBias };

    Kind kind = Kind::Uniform;
    std::vector<double> biases;
    std::optional<double> lambda;

    static InputDistribution uniform() { return {}; }

    static InputDistribution per_bit_bias(std::vector<double> biases,
                                          std::optional<double> lambda = std::nullopt) {
        InputDistribution d;
        d.kind = Kind::PerBitBias;
        d.biases = std::move(biases);
        d.lambda = lambda;
        d.validate();
        return d;
    }

    // Bias p = 1/2 + 2^-lambda on every bit: the per-bit deviation from
    // uniform is exactly 2^-lambda, the quantity the hybrid bound in
    // security.hpp charges per coordinate. Satisfies the cap rule for
    // lambda >= 2.
    static InputDistribution bias_for_lambda(std::size_t n, double lambda) {
        return per_bit_bias(std::vector<double>(n, 0.5 + std::pow(2.0, -lambda)), lambda);
    }

    void validate() const {
        if (kind == Kind::Uniform) return;
        for (double p : biases) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("InputDistribution: bias outside [0,1]");
            }
            if (lambda) {
                const double cap = 1.0 - std::pow(2.0, -*lambda);
                if (p > cap || 1.0 - p > cap) {
                    throw std::invalid_argument(
                        "InputDistribution: bias violates min-entropy bound 1 - 2^-lambda");
                }
            }
        }
    }
};

// Deterministic sample of n bits given (dist, n, seed).
inline BitVector sample(const InputDistribution& dist, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    BitVector x(n);
    Rng rng(seed);
    if (dist.kind == InputDistribution::Kind::Uniform) {
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.next_bit()) x.set(i, true);
        }
        return x;
    }
    if (dist.biases.size() != n) {
        throw std::invalid_argument("sample: biases length does not match n");
    }
    dist.validate();
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.next_double() < dist.biases[i]) x.set(i, true);
    }
    return x;
}

// y at exact Hamming distance k from x; flipped positions are a uniform
// k-subset chosen by partial Fisher-Yates.
inline BitVector flip_k(const BitVector& x, std::size_t k, std::uint64_t seed) {
    const std::size_t n = x.size();
    if (k > n) throw std::invalid_argument("flip_k: k exceeds length");
    BitVector y = x;
    if (k == 0) return y;
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(idx[i], idx[j]);
        y.flip(idx[i]);
    }
    return y;
}

}  // namespace pph
