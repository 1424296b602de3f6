#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pph/embedding.hpp"
#include "pph/rng.hpp"
#include "pph/sampling.hpp"
#include "pph/stats.hpp"

namespace pph {

// A concrete adversary: looks at one hash output, guesses which input
// distribution produced it (1 = the challenge distribution, 0 = uniform).
struct Distinguisher {
    std::string name;
    std::function<bool(const HashOutput&)> decide;
};

// One round of the indistinguishability game per trial: flip a fair bit b,
// hash a fresh input drawn from uniform (b=0) or the challenge distribution
// (b=1), and hand the hash to the adversary.
struct GameConfig {
    PublicParams params;
    InputDistribution challenge_dist;
    std::size_t trials = 0;
    std::uint64_t seed = 0;

    void validate() const {
        if (trials == 0) throw std::invalid_argument("GameConfig: trials must be >= 1");
        challenge_dist.validate();
        if (challenge_dist.kind == InputDistribution::Kind::PerBitBias &&
            challenge_dist.biases.size() != params.n) {
            throw std::invalid_argument("GameConfig: challenge bias length != params.n");
        }
    }
};

struct AdvantageReport {
    double empirical_advantage = 0.0;
    std::size_t trials = 0;
    double confidence_halfwidth = 0.0;
    std::string distinguisher_name;
};

inline AdvantageReport run_game(const GameConfig& config, const Distinguisher& adversary) {
    config.validate();
    std::size_t correct = 0;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
        const bool b = (mix64(config.seed, 2 * trial) & 1) != 0;
        const std::uint64_t x_seed = mix64(config.seed, 2 * trial + 1);
        const BitVector x = b ? sample(config.challenge_dist, config.params.n, x_seed)
                              : sample(InputDistribution::uniform(), config.params.n, x_seed);
        const HashOutput h = hash(config.params, x);
        if (adversary.decide(h) == b) ++correct;
    }
    const double success = static_cast<double>(correct) / static_cast<double>(config.trials);
    AdvantageReport report;
    report.empirical_advantage = std::abs(success - 0.5);
    report.trials = config.trials;
    report.confidence_halfwidth = binomial_halfwidth(success, config.trials, kZ995);
    report.distinguisher_name = adversary.name;
    return report;
}

// Guess "challenge" iff the hash weight reaches the threshold.
inline Distinguisher weight_threshold_distinguisher(std::size_t threshold) {
    return Distinguisher{
        "weight_threshold(" + std::to_string(threshold) + ")",
        [threshold](const HashOutput& h) { return h.bits.popcount() >= threshold; }};
}

namespace detail {

inline std::vector<std::size_t> training_weights(const PublicParams& params,
                                                 const InputDistribution& dist,
                                                 std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> weights;
    weights.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const BitVector x = sample(dist, params.n, mix64(seed, i));
        weights.push_back(hash(params, x).bits.popcount());
    }
    return weights;
}

}  // namespace detail

// Sweep all candidate thresholds on training samples drawn outside the game
// and return the one with the largest empirical separation between the
// challenge and uniform weight distributions.
inline std::size_t tuned_weight_threshold(const PublicParams& params,
                                          const InputDistribution& challenge,
                                          std::size_t training_samples, std::uint64_t seed) {
    const auto wu = detail::training_weights(params, InputDistribution::uniform(),
                                             training_samples, mix64(seed, 0xa0));
    const auto wc = detail::training_weights(params, challenge, training_samples,
                                             mix64(seed, 0xa1));
    const std::size_t lo = std::min(*std::min_element(wu.begin(), wu.end()),
                                    *std::min_element(wc.begin(), wc.end()));
    const std::size_t hi = std::max(*std::max_element(wu.begin(), wu.end()),
                                    *std::max_element(wc.begin(), wc.end()));
    std::size_t best_t = lo;
    double best_gap = -1.0;
    for (std::size_t t = lo; t <= hi + 1; ++t) {
        const auto above = [t](const std::vector<std::size_t>& ws) {
            std::size_t c = 0;
            for (std::size_t w : ws)
                if (w >= t) ++c;
            return static_cast<double>(c) / static_cast<double>(ws.size());
        };
        const double gap = std::abs(above(wc) - above(wu));
        if (gap > best_gap) {
            best_gap = gap;
            best_t = t;
        }
    }
    return best_t;
}

// Naive-Bayes scorer over hash positions: learns smoothed per-position set
// frequencies under both input distributions from training samples, then
// guesses "challenge" iff the log-likelihood ratio of the observed hash is
// positive.
inline Distinguisher frequency_scorer_distinguisher(const PublicParams& params,
                                                    const InputDistribution& challenge,
                                                    std::size_t training_samples,
                                                    std::uint64_t seed) {
    const std::size_t m = params.m;
    std::vector<std::uint32_t> count_u(m, 0);
    std::vector<std::uint32_t> count_c(m, 0);
    for (std::size_t i = 0; i < training_samples; ++i) {
        const BitVector xu =
            sample(InputDistribution::uniform(), params.n, mix64(seed, 2 * i));
        const BitVector xc = sample(challenge, params.n, mix64(seed, 2 * i + 1));
        const HashOutput hu = hash(params, xu);
        const HashOutput hc = hash(params, xc);
        for (std::size_t j = 0; j < m; ++j) {
            if (hu.bits.get(j)) ++count_u[j];
            if (hc.bits.get(j)) ++count_c[j];
        }
    }
    std::vector<double> w_set(m), w_clear(m);
    const double denom = static_cast<double>(training_samples) + 2.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double pu = (static_cast<double>(count_u[j]) + 1.0) / denom;
        const double pc = (static_cast<double>(count_c[j]) + 1.0) / denom;
        w_set[j] = std::log(pc / pu);
        w_clear[j] = std::log((1.0 - pc) / (1.0 - pu));
    }
    return Distinguisher{
        "frequency_scorer",
        [w_set = std::move(w_set), w_clear = std::move(w_clear), m](const HashOutput& h) {
            double llr = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                llr += h.bits.get(j) ? w_set[j] : w_clear[j];
            }
            return llr > 0.0;
        }};
}

struct TvEstimate {
    double tv = 0.0;
    std::size_t bucket_count = 0;
};

// Empirical total variation distance between the bucketed images of two
// sample sets. By data processing this lower-bounds the TV distance of the
// underlying hash distributions (up to sampling noise).
inline TvEstimate tv_lower_bound(const std::vector<HashOutput>& samples_p,
                                 const std::vector<HashOutput>& samples_q,
                                 const std::function<std::int64_t(const HashOutput&)>& statistic) {
    if (samples_p.empty() || samples_q.empty()) {
        throw std::invalid_argument("tv_lower_bound: empty sample set");
    }
    std::map<std::int64_t, std::pair<std::size_t, std::size_t>> buckets;
    for (const auto& h : samples_p) ++buckets[statistic(h)].first;
    for (const auto& h : samples_q) ++buckets[statistic(h)].second;
    double tv = 0.0;
    for (const auto& [bucket, counts] : buckets) {
        const double p = static_cast<double>(counts.first) / static_cast<double>(samples_p.size());
        const double q = static_cast<double>(counts.second) / static_cast<double>(samples_q.size());
        tv += std::abs(p - q);
    }
    return TvEstimate{tv / 2.0, buckets.size()};
}

// Per-coordinate hybrid substitution cost r * 2^-lambda.
inline double hybrid_per_bit_bound(std::size_t r, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("hybrid_per_bit_bound: lambda must be > 0");
    return static_cast<double>(r) * std::pow(2.0, -lambda);
}

// Summed over all n hybrids: n * r * 2^-lambda.
inline double hybrid_total_bound(std::size_t n, std::size_t r, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("hybrid_total_bound: lambda must be > 0");
    return static_cast<double>(n) * static_cast<double>(r) * std::pow(2.0, -lambda);
}

}  // namespace pph
