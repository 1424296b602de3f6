#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pph {

// Two-sided 99% and one-sided 99% normal quantiles.
inline constexpr double kZ995 = 2.5758293035489004;
inline constexpr double kZ99 = 2.3263478740408408;

inline double binomial_halfwidth(double p, std::size_t trials, double z = kZ995) {
    if (trials == 0) throw std::invalid_argument("binomial_halfwidth: trials must be >= 1");
    return z * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 samples");
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return ss / static_cast<double>(xs.size() - 1);
}

// Coefficient of determination of the least-squares line y = a + b x.
inline double r_squared(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw std::invalid_argument("r_squared: need >= 3 paired samples");
    }
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("r_squared: degenerate sample");
    return (sxy * sxy) / (sxx * syy);
}

}  // namespace pph
