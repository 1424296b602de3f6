#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "pph/oracle.hpp"

using namespace pph;

namespace {

// Exact binomial upper tail P[Bin(k, p) >= threshold].
double binomial_upper_tail(std::uint64_t k, double p, std::uint64_t threshold) {
    double tail = 0.0;
    for (std::uint64_t i = threshold; i <= k; ++i) {
        double term = 1.0;
        for (std::uint64_t j = 0; j < i; ++j) {
            term *= static_cast<double>(k - j) / static_cast<double>(i - j);
        }
        term *= std::pow(p, static_cast<double>(i)) *
                std::pow(1.0 - p, static_cast<double>(k - i));
        tail += term;
    }
    return tail;
}

}  // namespace

TEST_CASE("exact oracle answers the strict threshold predicate") {
    auto session = OracleSession::exact(10, 5);
    CHECK(session.eval(4) == true);   // 5 > 4
    CHECK(session.eval(5) == false);  // strict inequality
    CHECK(session.eval(0) == true);
    CHECK(session.eval(10) == false);
    CHECK(session.query_count() == 4);
    CHECK_THROWS_AS(session.eval(11), std::out_of_range);
}

TEST_CASE("zero-error noisy model behaves exactly") {
    const std::uint64_t n = 32;
    for (std::uint64_t d : {std::uint64_t{0}, std::uint64_t{13}, n}) {
        auto noisy = OracleSession::noisy(n, d, ErrorModel::piecewise(0.0, 0.0, 3), 77);
        auto exact = OracleSession::exact(n, d);
        for (std::uint64_t t = 0; t <= n; ++t) {
            CHECK(noisy.eval(t) == exact.eval(t));
        }
    }
}

TEST_CASE("error model validation") {
    CHECK_THROWS_AS(OracleSession::noisy(8, 2, ErrorModel::piecewise(0.5, 0.1, 1), 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(OracleSession::noisy(8, 2, ErrorModel::piecewise(0.2, 0.3, 1), 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(OracleSession::noisy(8, 9, ErrorModel::flat(0.1), 1), std::invalid_argument);
    CHECK(ErrorModel::piecewise(0.25, 0.0, 2).gamma() == doctest::Approx(0.25));
}

TEST_CASE("empirical error frequency matches the far-band rate") {
    // delta_far = 0.1, tau = 0, query far from the hidden distance.
    const std::size_t trials = 100000;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        auto session = OracleSession::noisy(64, 5, ErrorModel::piecewise(0.3, 0.1, 0), 9000 + i);
        if (session.eval(20) != false) ++errors;  // correct answer is 0
    }
    const double rate = static_cast<double>(errors) / static_cast<double>(trials);
    const double sigma = std::sqrt(0.1 * 0.9 / static_cast<double>(trials));
    CHECK(std::abs(rate - 0.1) <= 3.0 * sigma);
}

TEST_CASE("empirical error frequency matches the piecewise profile") {
    // d = 50, tau = 2: thresholds at gap <= 2 err at delta_max, further ones
    // at delta_far. The band condition is inclusive.
    const auto model = ErrorModel::piecewise(0.25, 0.01, 2);
    const std::uint64_t d = 50;
    const std::size_t trials = 100000;
    struct Probe {
        std::uint64_t t;
        double expected;
    };
    const std::vector<Probe> probes = {{49, 0.25}, {48, 0.25}, {52, 0.25},
                                       {47, 0.01}, {10, 0.01}, {90, 0.01}};
    for (const auto& probe : probes) {
        std::size_t errors = 0;
        const bool correct = d > probe.t;
        for (std::size_t i = 0; i < trials; ++i) {
            auto session = OracleSession::noisy(100, d, model, mix64(31337, i));
            if (session.eval(probe.t) != correct) ++errors;
        }
        const double rate = static_cast<double>(errors) / static_cast<double>(trials);
        const double sigma =
            std::sqrt(probe.expected * (1.0 - probe.expected) / static_cast<double>(trials));
        CHECK(std::abs(rate - probe.expected) <= 3.9 * sigma);
    }
}

TEST_CASE("noisy sessions replay deterministically") {
    const auto model = ErrorModel::piecewise(0.3, 0.05, 1);
    const std::vector<std::uint64_t> queries = {3, 9, 1, 7, 7, 0, 12, 5, 5, 5};
    std::vector<bool> first;
    {
        auto session = OracleSession::noisy(12, 6, model, 4242);
        for (auto t : queries) first.push_back(session.eval(t));
    }
    auto session = OracleSession::noisy(12, 6, model, 4242);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        CHECK(session.eval(queries[i]) == first[i]);
    }
}

TEST_CASE("majority vote requires odd k and accounts queries") {
    auto session = OracleSession::exact(16, 9);
    CHECK_THROWS_AS(session.majority_eval(4, 2), std::invalid_argument);
    CHECK_THROWS_AS(session.majority_eval(4, 0), std::invalid_argument);

    const auto before = session.query_count();
    CHECK(session.majority_eval(4, 7) == true);
    CHECK(session.query_count() == before + 7);
    CHECK(session.majority_eval(9, 5) == false);
}

TEST_CASE("majority with k = 1 reproduces single eval answers") {
    const auto model = ErrorModel::flat(0.3);
    auto a = OracleSession::noisy(20, 8, model, 555);
    auto b = OracleSession::noisy(20, 8, model, 555);
    for (std::uint64_t t = 0; t <= 20; ++t) {
        CHECK(a.majority_eval(t, 1) == b.eval(t));
    }
}

TEST_CASE("majority vote error rate is Chernoff-bounded") {
    // Per-call error 0.25, k = 15. The Chernoff expression gives
    // exp(-2*15*(1/4)^2) ~ 0.1534; the exact binomial tail is far smaller.
    const double delta = 0.25;
    const std::uint64_t k = 15;
    const std::size_t trials = 100000;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        auto session = OracleSession::noisy(64, 5, ErrorModel::flat(delta), mix64(777, i));
        if (session.majority_eval(20, k) != false) ++errors;
    }
    const double rate = static_cast<double>(errors) / static_cast<double>(trials);
    const double bound = chernoff_amplified_error(delta, k);
    CHECK(bound == doctest::Approx(std::exp(-1.875)));
    CHECK(rate <= bound);

    // And the frequency agrees with the exact tail P[Bin(15, 1/4) >= 8].
    const double exact_tail = binomial_upper_tail(k, delta, k / 2 + 1);
    const double sigma = std::sqrt(exact_tail * (1.0 - exact_tail) / static_cast<double>(trials));
    CHECK(std::abs(rate - exact_tail) <= 3.9 * sigma);
}

TEST_CASE("chernoff_amplified_error values and domain") {
    CHECK(chernoff_amplified_error(0.25, 10) == doctest::Approx(std::exp(-1.25)));
    for (std::uint64_t k = 1; k <= 5; ++k) {
        CHECK(chernoff_amplified_error(0.0, k) ==
              doctest::Approx(std::exp(-static_cast<double>(k) / 2.0)));
    }
    // The k = 5 factor, to high precision.
    const double v = chernoff_amplified_error(0.25, 5);
    CHECK(std::abs(v / std::exp(-5.0 / 8.0) - 1.0) < 1e-12);

    CHECK_THROWS_AS(chernoff_amplified_error(0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_amplified_error(-0.1, 3), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_amplified_error(0.25, 0), std::invalid_argument);
}

TEST_CASE("amplified error strictly decreases in k") {
    for (double delta : {0.0, 0.1, 0.25, 0.4, 0.49}) {
        double previous = 1.0;
        for (std::uint64_t k = 1; k <= 100; ++k) {
            const double value = chernoff_amplified_error(delta, k);
            CHECK(value < previous);
            previous = value;
        }
    }
}
