#pragma once

#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pph/oracle.hpp"

namespace pph {

// Anything that answers majority-voted threshold queries over [0, n].
// Satisfied by OracleSession and by the embedding-backed oracle in
// experiments.hpp.
template <typename O>
concept ThresholdOracle = requires(O o, const O co, std::uint64_t t, std::uint64_t k) {
    { o.majority_eval(t, k) } -> std::convertible_to<bool>;
    { co.n() } -> std::convertible_to<std::uint64_t>;
};

// Outcome of one binary-search run: the returned estimate plus query
// accounting. oracle_calls == reps_per_threshold * thresholds_visited.size().
struct SearchReport {
    std::uint64_t estimate = 0;
    std::uint64_t oracle_calls = 0;
    std::vector<std::uint64_t> thresholds_visited;
    std::uint64_t reps_per_threshold = 1;
};

// ceil(log2(n+1)), the maximum number of thresholds one search can visit.
inline std::uint64_t search_depth_bound(std::uint64_t n) {
    return static_cast<std::uint64_t>(std::bit_width(n));
}

// Bisection over t in [0, n]: query "d > t_mid?" with `reps` majority votes,
// move t_min past t_mid on a 1-answer, pull t_max down to t_mid on a 0-answer,
// return t_min when the interval collapses. With an error-free oracle the
// result is the hidden distance exactly; with a noisy one it is whatever the
// answers imply (wrong runs are not detectable from inside).
template <ThresholdOracle O>
SearchReport binary_search_distance(O& oracle, std::uint64_t n, std::uint64_t reps) {
    if (reps == 0 || reps % 2 == 0) {
        throw std::invalid_argument("binary_search_distance: reps must be a positive odd integer");
    }
    if (oracle.n() != n) {
        throw std::invalid_argument("binary_search_distance: oracle domain does not match n");
    }
    SearchReport report;
    report.reps_per_threshold = reps;
    std::uint64_t t_min = 0;
    std::uint64_t t_max = n;
    while (t_min < t_max) {
        const std::uint64_t t_mid = (t_min + t_max) / 2;
        report.thresholds_visited.push_back(t_mid);
        if (oracle.majority_eval(t_mid, reps)) {
            t_min = t_mid + 1;
        } else {
            t_max = t_mid;
        }
    }
    report.estimate = t_min;
    report.oracle_calls = reps * report.thresholds_visited.size();
    return report;
}

// Repetition count that drives the per-threshold majority error low enough
// for a union bound over the <= log n search levels to stay under epsilon:
// the smallest odd k with k >= (ln ln n + ln(1/epsilon)) / (2 (1/2 - delta)^2).
inline std::uint64_t amplification_reps(double delta, double epsilon, std::uint64_t n) {
    if (!(delta >= 0.0 && delta < 0.5)) {
        throw std::invalid_argument("amplification_reps: delta must be in [0, 1/2)");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("amplification_reps: epsilon must be in (0, 1)");
    }
    if (n < 4) throw std::invalid_argument("amplification_reps: n must be >= 4");
    const double margin = 0.5 - delta;
    const double rhs =
        (std::log(std::log(static_cast<double>(n))) + std::log(1.0 / epsilon)) /
        (2.0 * margin * margin);
    auto k = static_cast<std::uint64_t>(std::ceil(rhs));
    if (k < 1) k = 1;
    if (k % 2 == 0) ++k;
    return k;
}

template <ThresholdOracle O>
SearchReport amplified_search(O& oracle, std::uint64_t n, double delta, double epsilon) {
    return binary_search_distance(oracle, n, amplification_reps(delta, epsilon, n));
}

// Same control flow with a fixed constant repetition count; total calls are
// at most k * ceil(log2(n+1)).
template <ThresholdOracle O>
SearchReport constant_rep_search(O& oracle, std::uint64_t n, std::uint64_t k) {
    return binary_search_distance(oracle, n, k);
}

// Dominant term of the constant-repetition failure bound,
// 2 tau exp(-2 k gamma^2). The band is visited O(1) times; far thresholds
// contribute a lower-order term that is not reported. Note the bound is
// vacuous (> 1) for small k, e.g. tau = 2, k = 5, gamma = 1/4 gives
// 4 exp(-5/8) ~ 2.14; it only bites once k is large enough.
inline double constant_rep_failure_bound(std::uint64_t tau, std::uint64_t k, double gamma) {
    if (!(gamma > 0.0 && gamma <= 0.5)) {
        throw std::invalid_argument("constant_rep_failure_bound: gamma must be in (0, 1/2]");
    }
    if (k == 0) throw std::invalid_argument("constant_rep_failure_bound: k must be >= 1");
    return 2.0 * static_cast<double>(tau) *
           std::exp(-2.0 * static_cast<double>(k) * gamma * gamma);
}

}  // namespace pph
