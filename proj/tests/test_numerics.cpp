#include <doctest.h>

#include <cmath>
#include <vector>

#include "cylstab/numerics.hpp"

using namespace cylstab;

TEST_CASE("wrap_to_pi maps into (-pi, pi]") {
    CHECK(wrap_to_pi(0.0) == doctest::Approx(0.0));
    CHECK(wrap_to_pi(2.0 * M_PI + 0.1) == doctest::Approx(0.1));
    CHECK(wrap_to_pi(-2.0 * M_PI - 0.1) == doctest::Approx(-0.1));
    CHECK(wrap_to_pi(3.0 * M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_to_pi(M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("periodic trapezoid rule") {
    const int n = 64;
    const double period = 2.0 * M_PI;
    std::vector<double> ones(n, 2.5), sines(n);
    for (int i = 0; i < n; ++i) sines[i] = std::sin(period * i / n);
    CHECK(trapezoid_periodic(period / n, ones) == doctest::Approx(2.5 * period).epsilon(1e-14));
    CHECK(std::abs(trapezoid_periodic(period / n, sines)) < 1e-13);
}

TEST_CASE("periodic central derivative is second order") {
    auto max_error = [](int n) {
        const double period = 2.0 * M_PI;
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::sin(period * i / n);
        const auto d = periodic_central_derivative(period / n, v);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(d[i] - std::cos(period * i / n)));
        }
        return worst;
    };
    const double e1 = max_error(64);
    const double e2 = max_error(128);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("periodic cubic spline") {
    const double period = 2.0 * M_PI;
    auto build = [&](int n) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::sin(period * i / n) + 0.3 * std::cos(2.0 * period * i / n);
        return PeriodicCubicSpline(period, std::move(v));
    };

    SUBCASE("reproduces nodes") {
        const int n = 48;
        const PeriodicCubicSpline sp = build(n);
        for (int i = 0; i < n; ++i) {
            const double s = period * i / n;
            CHECK(sp(s) == doctest::Approx(std::sin(s) + 0.3 * std::cos(2 * s)).epsilon(1e-12));
        }
    }

    SUBCASE("resample to the same size is the identity") {
        const int n = 48;
        const PeriodicCubicSpline sp = build(n);
        const auto back = sp.resample(n);
        for (int i = 0; i < n; ++i) {
            CHECK(back[i] == doctest::Approx(std::sin(period * i / n) +
                                             0.3 * std::cos(2.0 * period * i / n))
                                 .epsilon(1e-15));
        }
    }

    SUBCASE("fourth-order convergence on a smooth function") {
        auto max_error = [&](int n) {
            const PeriodicCubicSpline sp = build(n);
            double worst = 0.0;
            for (int j = 0; j < 1000; ++j) {
                const double s = period * j / 1000.0;
                worst = std::max(worst, std::abs(sp(s) - (std::sin(s) + 0.3 * std::cos(2 * s))));
            }
            return worst;
        };
        const double ratio = max_error(32) / max_error(64);
        CHECK(ratio > 10.0);
        CHECK(ratio < 24.0);
    }

    SUBCASE("evaluation wraps periodically") {
        const PeriodicCubicSpline sp = build(48);
        CHECK(sp(0.5 - period) == doctest::Approx(sp(0.5)).epsilon(1e-13));
        CHECK(sp(0.5 + 3 * period) == doctest::Approx(sp(0.5)).epsilon(1e-13));
    }
}

TEST_CASE("cubic hermite reproduces cubics exactly") {
    auto p = [](double t) { return t * t * t - 2.0 * t * t + 3.0 * t - 1.0; };
    auto dp = [](double t) { return 3.0 * t * t - 4.0 * t + 3.0; };
    const double s0 = 0.3, s1 = 0.9;
    for (const double s : {0.35, 0.5, 0.62, 0.89}) {
        CHECK(hermite_value(s, s0, s1, p(s0), p(s1), dp(s0), dp(s1)) ==
              doctest::Approx(p(s)).epsilon(1e-14));
        CHECK(hermite_derivative(s, s0, s1, p(s0), p(s1), dp(s0), dp(s1)) ==
              doctest::Approx(dp(s)).epsilon(1e-13));
    }
}
