#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "pph/rng.hpp"

namespace pph {

// Piecewise per-threshold error rates for the simulated threshold oracle:
// a query at t errs with probability delta_max inside the transition band
// |t - d| <= tau and with probability delta_far outside it. The flat model
// is the special case tau >= n, delta_far = delta_max.
struct ErrorModel {
    double delta_max = 0.0;
    double delta_far = 0.0;
    std::uint64_t tau = 0;

    static ErrorModel flat(double delta) {
        return ErrorModel{delta, delta, ~std::uint64_t{0}};
    }

    static ErrorModel piecewise(double delta_max, double delta_far, std::uint64_t tau) {
        return ErrorModel{delta_max, delta_far, tau};
    }

    double gamma() const { return 0.5 - delta_max; }

    void validate() const {
        if (!(delta_max >= 0.0 && delta_max < 0.5)) {
            throw std::invalid_argument("ErrorModel: delta_max must be in [0, 1/2)");
        }
        if (!(delta_far >= 0.0 && delta_far <= delta_max)) {
            throw std::invalid_argument("ErrorModel: requires 0 <= delta_far <= delta_max");
        }
    }
};

// One instance of the threshold predicate over a hidden distance. Answers
// "is d > t?" wrongly with probability delta(t); per-call randomness is a
// pure function of (seed, query_count), so replaying the same query sequence
// replays the same answers. The hidden distance is never exposed beyond the
// one-bit returns.
class OracleSession {
public:
    static OracleSession exact(std::uint64_t n, std::uint64_t true_distance) {
        return OracleSession(n, true_distance, true, ErrorModel{}, 0);
    }

    static OracleSession noisy(std::uint64_t n, std::uint64_t true_distance,
                               const ErrorModel& model, std::uint64_t seed) {
        model.validate();
        return OracleSession(n, true_distance, false, model, seed);
    }

    // One-bit threshold query: correct answer 1_{d > t}, flipped with
    // probability delta(t).
    bool eval(std::uint64_t t) {
        if (t > n_) throw std::out_of_range("OracleSession::eval: t out of range");
        const bool correct = true_distance_ > t;
        const std::uint64_t call = query_count_++;
        if (exact_) return correct;
        const std::uint64_t gap =
            true_distance_ > t ? true_distance_ - t : t - true_distance_;
        const double delta = gap <= model_.tau ? model_.delta_max : model_.delta_far;
        const double u = u64_to_unit_double(mix64(seed_, call));
        return u < delta ? !correct : correct;
    }

    // Majority vote over k independent eval calls. k must be odd so there is
    // no tie to break.
    bool majority_eval(std::uint64_t t, std::uint64_t k) {
        if (k == 0 || k % 2 == 0) {
            throw std::invalid_argument("majority_eval: k must be a positive odd integer");
        }
        std::uint64_t ones = 0;
        for (std::uint64_t i = 0; i < k; ++i) {
            if (eval(t)) ++ones;
        }
        return ones > k / 2;
    }

    std::uint64_t n() const { return n_; }
    std::uint64_t query_count() const { return query_count_; }

private:
    OracleSession(std::uint64_t n, std::uint64_t true_distance, bool exact,
                  const ErrorModel& model, std::uint64_t seed)
        : n_(n), true_distance_(true_distance), exact_(exact), model_(model), seed_(seed) {
        if (true_distance > n) {
            throw std::invalid_argument("OracleSession: true_distance exceeds n");
        }
    }

    std::uint64_t n_;
    std::uint64_t true_distance_;
    bool exact_;
    ErrorModel model_;
    std::uint64_t seed_;
    std::uint64_t query_count_ = 0;
};

// Error probability of a k-wide majority vote over independent calls that
// each err with probability delta: exp(-2k(1/2 - delta)^2).
inline double chernoff_amplified_error(double delta, std::uint64_t k) {
    if (!(delta >= 0.0 && delta < 0.5)) {
        throw std::invalid_argument("chernoff_amplified_error: delta must be in [0, 1/2)");
    }
    if (k == 0) throw std::invalid_argument("chernoff_amplified_error: k must be >= 1");
    const double margin = 0.5 - delta;
    return std::exp(-2.0 * static_cast<double>(k) * margin * margin);
}

}  // namespace pph
