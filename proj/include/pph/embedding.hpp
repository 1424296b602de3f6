#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "pph/bitvec.hpp"
#include "pph/rng.hpp"
#include "pph/sampling.hpp"

namespace pph {

enum class AlphaSource { Analytic, Calibrated };

inline const char* to_string(AlphaSource s) {
    return s == AlphaSource::Analytic ? "analytic" : "calibrated";
}

// Public mapping families for the distance-embedding hash. Each input
// coordinate i owns two disjoint r-subsets of [m]: zero_map(i) receives the
// insertions when x_i = 0, one_map(i) when x_i = 1. rho is the expected
// fraction of a coordinate's positions that other coordinates also touch,
// and alpha = 2r(1 - rho) is the expected symmetric-difference mass per
// differing input bit.
struct PublicParams {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t r = 0;
    std::uint64_t seed = 0;
    double rho = 0.0;
    double alpha = 0.0;
    AlphaSource alpha_source = AlphaSource::Analytic;

    // Flat layout: coordinate i occupies slots [2ri, 2ri + 2r); first r are
    // the zero side, last r the one side.
    std::vector<std::uint32_t> maps;

    const std::uint32_t* zero_map(std::size_t i) const { return maps.data() + 2 * r * i; }
    const std::uint32_t* one_map(std::size_t i) const { return maps.data() + 2 * r * i + r; }

    std::string id() const {
        std::uint64_t h = mix64(mix64(mix64(mix64(seed, n), m), r), 0x70706172616d73ULL);
        static const char digits[] = "0123456789abcdef";
        std::string out(16, '0');
        for (int k = 15; k >= 0; --k) {
            out[static_cast<std::size_t>(k)] = digits[h & 0xf];
            h >>= 4;
        }
        return out;
    }
};

struct HashOutput {
    BitVector bits;
    std::string params_id;
};

inline std::size_t recommended_r(std::size_t n) {
    std::size_t r = 0;
    while ((std::size_t{1} << r) < n) ++r;  // ceil(log2 n)
    return std::max<std::size_t>(r, 1);
}

inline std::size_t recommended_m(std::size_t n, std::size_t r) { return 4 * n * r; }

// Probability that a position used by one coordinate is also touched by at
// least one of the other n-1 coordinates on its active side, under
// independent uniform placement: 1 - (1 - r/m)^(n-1).
inline double analytic_rho(std::size_t n, std::size_t m, std::size_t r) {
    const double q = static_cast<double>(r) / static_cast<double>(m);
    return 1.0 - std::pow(1.0 - q, static_cast<double>(n - 1));
}

inline double analytic_alpha(std::size_t n, std::size_t m, std::size_t r) {
    return 2.0 * static_cast<double>(r) * (1.0 - analytic_rho(n, m, r));
}

// Draw the mapping families: per coordinate, 2r distinct positions sampled
// uniformly from [m], split into the zero side (first r) and one side
// (last r). Disjointness is by construction.
inline PublicParams setup(std::size_t n, std::size_t m, std::size_t r, std::uint64_t seed) {
    if (n == 0 || r == 0) throw std::invalid_argument("setup: n and r must be >= 1");
    if (m < 2 * r) throw std::invalid_argument("setup: m must be at least 2r");

    PublicParams params;
    params.n = n;
    params.m = m;
    params.r = r;
    params.seed = seed;
    params.maps.resize(2 * r * n);

    Rng rng(mix64(seed, 0x6d617073ULL));
    std::vector<std::uint32_t> chosen;
    chosen.reserve(2 * r);
    for (std::size_t i = 0; i < n; ++i) {
        chosen.clear();
        while (chosen.size() < 2 * r) {
            const auto candidate = static_cast<std::uint32_t>(rng.next_below(m));
            if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end()) {
                chosen.push_back(candidate);
            }
        }
        std::copy(chosen.begin(), chosen.end(), params.maps.begin() + 2 * r * i);
    }

    params.rho = analytic_rho(n, m, r);
    params.alpha = 2.0 * static_cast<double>(r) * (1.0 - params.rho);
    params.alpha_source = AlphaSource::Analytic;
    return params;
}

// OR-superposition hash: output bit j is set iff some coordinate i maps to j
// through the side selected by x_i. O(nr) time.
inline HashOutput hash(const PublicParams& params, const BitVector& x) {
    if (x.size() != params.n) throw std::invalid_argument("hash: input length != params.n");
    BitVector out(params.m);
    for (std::size_t i = 0; i < params.n; ++i) {
        const std::uint32_t* side = x.get(i) ? params.one_map(i) : params.zero_map(i);
        for (std::size_t j = 0; j < params.r; ++j) {
            out.set(side[j], true);
        }
    }
    return HashOutput{std::move(out), params.id()};
}

// Raw symmetric difference D = popcount(ha XOR hb).
inline std::size_t symmetric_difference_count(const HashOutput& ha, const HashOutput& hb) {
    if (ha.params_id != hb.params_id || ha.bits.size() != hb.bits.size()) {
        throw std::invalid_argument("symmetric_difference_count: hash outputs from different params");
    }
    return hamming_distance(ha.bits, hb.bits);
}

inline double estimate_rho(const PublicParams& params) {
    return analytic_rho(params.n, params.m, params.r);
}

// Distance estimate D / alpha; approximately unbiased for the input Hamming
// distance in the recommended regime.
inline double dist_estimate(const PublicParams& params, const HashOutput& ha,
                            const HashOutput& hb) {
    return static_cast<double>(symmetric_difference_count(ha, hb)) / params.alpha;
}

// Integer convenience form: round half away from zero, clamp to [0, n].
inline std::uint64_t rounded_estimate(const PublicParams& params, double estimate) {
    const double rounded = std::floor(estimate + 0.5);
    if (rounded <= 0.0) return 0;
    const auto v = static_cast<std::uint64_t>(rounded);
    return std::min<std::uint64_t>(v, params.n);
}

// Unbiased cheap variant: XOR disagreements over s positions sampled without
// replacement (Floyd's algorithm, O(s)), rescaled by m/s.
inline double subsampled_estimate(const PublicParams& params, const HashOutput& ha,
                                  const HashOutput& hb, std::size_t s, std::uint64_t seed) {
    if (ha.params_id != hb.params_id) {
        throw std::invalid_argument("subsampled_estimate: hash outputs from different params");
    }
    if (s == 0 || s > params.m) {
        throw std::invalid_argument("subsampled_estimate: s must be in [1, m]");
    }
    Rng rng(seed);
    std::unordered_set<std::uint32_t> picked;
    picked.reserve(s * 2);
    std::size_t disagreements = 0;
    for (std::size_t i = params.m - s; i < params.m; ++i) {
        auto j = static_cast<std::uint32_t>(rng.next_below(i + 1));
        if (!picked.insert(j).second) {
            j = static_cast<std::uint32_t>(i);
            picked.insert(j);
        }
        if (ha.bits.get(j) != hb.bits.get(j)) ++disagreements;
    }
    const double scale = static_cast<double>(params.m) / static_cast<double>(s);
    return static_cast<double>(disagreements) * scale / params.alpha;
}

// Empirical alpha: plant pairs at known small distances d (uniform over
// {1..max(1, n/8)}, the regime where the per-bit response is linear), and
// average D/d. Monte Carlo fallback for the analytic overlap approximation.
inline double calibrate_alpha(const PublicParams& params, std::size_t trials,
                              std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("calibrate_alpha: trials must be >= 1");
    const std::size_t d_max = std::max<std::size_t>(1, params.n / 8);
    double sum = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t stream = mix64(seed, trial);
        Rng rng(mix64(stream, 0));
        const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(d_max));
        const BitVector x = sample(InputDistribution::uniform(), params.n, mix64(stream, 1));
        const BitVector y = flip_k(x, d, mix64(stream, 2));
        const auto hx = hash(params, x);
        const auto hy = hash(params, y);
        sum += static_cast<double>(symmetric_difference_count(hx, hy)) / static_cast<double>(d);
    }
    return sum / static_cast<double>(trials);
}

// Copy of params with the measured alpha swapped in.
inline PublicParams with_calibrated_alpha(PublicParams params, double calibrated) {
    if (!(calibrated > 0.0)) {
        throw std::invalid_argument("with_calibrated_alpha: alpha must be positive");
    }
    params.alpha = calibrated;
    params.alpha_source = AlphaSource::Calibrated;
    return params;
}

}  // namespace pph
