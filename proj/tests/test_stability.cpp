#include <doctest.h>

#include <cmath>

#include "cylstab/curve.hpp"
#include "cylstab/report_json.hpp"
#include "cylstab/stability.hpp"

using namespace cylstab;

namespace {

const SolverConfig kConfig;

SolverConfig fast_config() {
    SolverConfig c;
    c.n_t = 48;
    c.n_s = 128;
    return c;
}

CurveScalars unit_circle_scalars() { return curve_scalars(circle_curve(1.0, 0.0, 256)); }

// Raw quadratic form u^T (-Delta - q) u h_t h_s assembled directly with
// difference stencils; independent of the gradient-form code path.
double phi_raw_form(const CylinderColumn& column, const Eigen::MatrixXd& u,
                    const std::vector<double>& q) {
    const int n_t = static_cast<int>(u.rows()) - 1;
    const int n_s = static_cast<int>(u.cols());
    const double ht = column.column_length / n_t;
    const double hs = column.curve.length / n_s;
    double sum = 0.0;
    for (int j = 1; j < n_t; ++j) {
        for (int i = 0; i < n_s; ++i) {
            const double up = j + 1 <= n_t ? u(j + 1, i) : 0.0;
            const double um = j - 1 >= 0 ? u(j - 1, i) : 0.0;
            const double lap_t = (2.0 * u(j, i) - up - um) / (ht * ht);
            const double lap_s = (2.0 * u(j, i) - u(j, (i + 1) % n_s) -
                                  u(j, (i + n_s - 1) % n_s)) / (hs * hs);
            sum += u(j, i) * (lap_t + lap_s - q[i] * u(j, i));
        }
    }
    return ht * hs * sum;
}

}  // namespace

TEST_CASE("theorem1_bound") {
    const CurveScalars s = unit_circle_scalars();
    CHECK(*theorem1_bound(s, 1.0) == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(*theorem1_bound(s, 2.0) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
    CHECK_FALSE(theorem1_bound(s, 0.0).has_value());
    CHECK_FALSE(theorem1_bound(s, -0.5).has_value());
}

TEST_CASE("theorem2_bound") {
    const CurveScalars s = unit_circle_scalars();
    CHECK(*theorem2_bound(s, 0.0, 1.0) == doctest::Approx(2 * M_PI).epsilon(1e-12));
    CHECK(*theorem2_bound(s, 0.1, 0.9) ==
          doctest::Approx(2 * M_PI / std::sqrt(1.01)).epsilon(1e-12));
    CHECK_FALSE(theorem2_bound(s, 0.1, 0.0).has_value());
    CHECK_FALSE(theorem2_bound(s, 0.1, -1.0).has_value());
    CHECK_FALSE(theorem2_bound(s, -0.1, 1.0).has_value());
}

TEST_CASE("bound_comparison") {
    const CurveScalars s = unit_circle_scalars();
    SUBCASE("theorem2 wins below the crossover") {
        CHECK(bound_comparison(s, 0.1, 0.9) == BoundComparison::Theorem2Stronger);
        CHECK(*theorem2_bound(s, 0.1, 0.9) == doctest::Approx(6.25200).epsilon(1e-5));
        CHECK(*theorem1_bound(s, 0.1) == doctest::Approx(7.02481).epsilon(1e-5));
    }
    SUBCASE("theorem1 wins above the crossover") {
        CHECK(bound_comparison(s, 0.3, 0.7) == BoundComparison::Theorem1Stronger);
    }
    SUBCASE("exact tie at a/b^2 = L / (12 |Omega|) = 1/6") {
        const double a = 4.0 - std::sqrt(15.0);
        const double b = 1.0 - a;
        CHECK(a / (b * b) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
        CHECK(bound_comparison(s, a, b) == BoundComparison::Tie);
        CHECK(std::abs(*theorem1_bound(s, a) - *theorem2_bound(s, a, b)) < 1e-10);
    }
    SUBCASE("requires both bounds") {
        CHECK_THROWS_AS(bound_comparison(s, 0.0, 1.0), InvalidArgument);
        CHECK_THROWS_AS(bound_comparison(s, 1.0, 0.0), InvalidArgument);
    }
}

TEST_CASE("mode_threshold on circles (Fourier oracle)") {
    SUBCASE("a=1: the constrained m=1 mode reproduces the theorem1 bound") {
        const PlanarCurve c = circle_curve(1.0, 1.0, 512);
        const ModeAnalysis m1 = mode_threshold(c, 1, 512);
        CHECK(m1.constrained);
        CHECK(m1.eigenvalue == doctest::Approx(-2.0).epsilon(1e-4));
        CHECK(m1.threshold_length == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-4));
        const CurveScalars s = curve_scalars(c);
        CHECK(m1.threshold_length == doctest::Approx(*theorem1_bound(s, 1.0)).epsilon(1e-4));
    }
    SUBCASE("a=0: odd mode is neutral, even mode gives the Rayleigh length") {
        const PlanarCurve c = circle_curve(1.0, 0.0, 512);
        const ModeAnalysis m1 = mode_threshold(c, 1, 512);
        CHECK(std::abs(m1.eigenvalue) < 1e-4);
        CHECK(std::isinf(m1.threshold_length));
        const ModeAnalysis m2 = mode_threshold(c, 2, 512);
        CHECK_FALSE(m2.constrained);
        CHECK(m2.eigenvalue == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(m2.threshold_length == doctest::Approx(2 * M_PI).epsilon(1e-9));
    }
    SUBCASE("mode index validation") {
        CHECK_THROWS_AS(mode_threshold(circle_curve(1.0, 0.0, 128), 0, 128), InvalidArgument);
    }
}

TEST_CASE("per_mode_critical_length") {
    int governing = 0;
    SUBCASE("a=1 governed by m=1") {
        const double crit =
            per_mode_critical_length(circle_curve(1.0, 1.0, 512), 8, 512, &governing);
        CHECK(crit == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-4));
        CHECK(governing == 1);
    }
    SUBCASE("a=0 governed by m=2 at the Rayleigh length") {
        const double crit =
            per_mode_critical_length(circle_curve(1.0, 0.0, 512), 8, 512, &governing);
        CHECK(crit == doctest::Approx(2 * M_PI).epsilon(1e-9));
        CHECK(governing == 2);
    }
    SUBCASE("mixed case a=0.1, b=0.9 governed by m=2") {
        const double crit =
            per_mode_critical_length(circle_curve(1.0, 0.1, 512), 8, 512, &governing);
        CHECK(crit == doctest::Approx(2 * M_PI / std::sqrt(1.2)).epsilon(1e-4));
        CHECK(governing == 2);
    }
    SUBCASE("m_max validation") {
        CHECK_THROWS_AS(per_mode_critical_length(circle_curve(1.0, 0.0, 128), 1, 128),
                        InvalidArgument);
    }
}

TEST_CASE("phi_evaluate") {
    SUBCASE("zero function") {
        const CylinderColumn col{circle_curve(1.0, 1.0, 256), 3.0};
        CHECK(phi_evaluate(col, Eigen::MatrixXd::Zero(65, 128)) == 0.0);
    }
    SUBCASE("closed form: a=1 circle, l=3, u = sin(pi t/l) g1") {
        const double l = 3.0;
        const CylinderColumn col{circle_curve(1.0, 1.0, 512), l};
        const double exact = 0.5 * l * M_PI * (M_PI * M_PI / (l * l) - 2.0);
        CHECK(exact == doctest::Approx(-4.2573).epsilon(1e-4));
        auto eval = [&](int n_t, int n_s) {
            Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_t + 1, n_s);
            for (int j = 1; j < n_t; ++j) {
                for (int i = 0; i < n_s; ++i) {
                    const double s = 2 * M_PI * i / n_s;
                    u(j, i) = std::sin(M_PI * j / n_t) * (-std::sin(s));
                }
            }
            return phi_evaluate(col, u);
        };
        const double coarse = eval(128, 256);
        const double fine = eval(256, 512);
        CHECK(coarse == doctest::Approx(exact).epsilon(5e-4));
        // Second-order convergence toward the closed form.
        const double ratio = std::abs(coarse - exact) / std::abs(fine - exact);
        CHECK(ratio > 3.2);
        CHECK(ratio < 4.8);
    }
    SUBCASE("closed form: a=0 circle, l=pi, u = sin(pi t/l) sin(s)") {
        const double l = M_PI;
        const CylinderColumn col{circle_curve(1.0, 0.0, 512), l};
        const double exact = M_PI * M_PI / 2.0;
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(129, 256);
        for (int j = 1; j < 128; ++j) {
            for (int i = 0; i < 256; ++i) {
                u(j, i) = std::sin(M_PI * j / 128.0) * std::sin(2 * M_PI * i / 256.0);
            }
        }
        CHECK(phi_evaluate(col, u) == doctest::Approx(exact).epsilon(5e-4));
    }
    SUBCASE("gradient form equals the raw operator form") {
        const CylinderColumn col{circle_curve(1.0, 0.7, 256), 2.0};
        const int n_t = 40, n_s = 64;
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_t + 1, n_s);
        for (int j = 1; j < n_t; ++j) {
            for (int i = 0; i < n_s; ++i) {
                const double t = 2.0 * j / n_t;
                const double s = 2 * M_PI * i / n_s;
                u(j, i) = std::sin(M_PI * j / n_t) * (0.3 + std::cos(s)) +
                          0.2 * std::sin(2 * M_PI * j / n_t) * std::sin(3 * s + 0.4) * t;
            }
        }
        const std::vector<double> q = q_profile(circle_curve(1.0, 0.7, n_s));
        const double grad_form = phi_evaluate(col, u);
        const double raw_form = phi_raw_form(col, u, q);
        CHECK(grad_form == doctest::Approx(raw_form).epsilon(1e-12));
    }
    SUBCASE("parallelogram law (Phi is a quadratic form)") {
        const CylinderColumn col{circle_curve(1.0, 0.5, 256), 2.5};
        const int n_t = 32, n_s = 64;
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_t + 1, n_s);
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n_t + 1, n_s);
        for (int j = 1; j < n_t; ++j) {
            for (int i = 0; i < n_s; ++i) {
                u(j, i) = std::sin(M_PI * j / n_t) * std::cos(2 * M_PI * i / n_s);
                v(j, i) = std::sin(2 * M_PI * j / n_t) * std::sin(4 * M_PI * i / n_s + 0.7);
            }
        }
        const double lhs = phi_evaluate(col, u + v) + phi_evaluate(col, u - v);
        const double rhs = 2.0 * (phi_evaluate(col, u) + phi_evaluate(col, v));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
    SUBCASE("nonzero boundary rows rejected") {
        const CylinderColumn col{circle_curve(1.0, 1.0, 256), 3.0};
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(33, 64);
        u(0, 5) = 0.1;
        CHECK_THROWS_AS(phi_evaluate(col, u), InvalidArgument);
    }
}

TEST_CASE("proof_witness") {
    SUBCASE("sum matches the closed-form identity (Richardson limit)") {
        // Phi(u1) + Phi(u2) = (l/2) (pi^2 L / l^2 - 2 a moment); the
        // quadrature converges to it at O(h^2), so the h->0 limit of two
        // nested grids must hit the identity to 1e-6.
        const PlanarCurve c = circle_curve(1.0, 1.0, 512);
        const CurveScalars s = curve_scalars(c);
        const double l = 3.0;
        const CylinderColumn col{c, l};
        const double exact =
            0.5 * l * (M_PI * M_PI * s.length / (l * l) - 2.0 * c.params.a * s.moment);
        const auto [c1, c2] = proof_witness(col, 256, 256);
        const auto [f1, f2] = proof_witness(col, 512, 512);
        const double coarse = c1 + c2;
        const double fine = f1 + f2;
        const double extrapolated = fine + (fine - coarse) / 3.0;
        CHECK(std::abs(extrapolated - exact) < 1e-6);
        CHECK(coarse == doctest::Approx(exact).epsilon(2e-3));
    }
    SUBCASE("sign flips across the theorem1 bound (a=1 circle)") {
        const PlanarCurve c = circle_curve(1.0, 1.0, 512);
        const auto [s1, s2] = proof_witness({c, 1.0}, 128, 256);
        CHECK(s1 + s2 > 0.0);
        const auto [u1, u2] = proof_witness({c, 3.0}, 128, 256);
        CHECK(u1 + u2 < 0.0);
    }
    SUBCASE("negative just past the bound for the lobed curve") {
        const PlanarCurve c = shoot_closed_curve({1.4, -0.5, 2, 1}, {1.10, 1.30}, kConfig);
        const CurveScalars s = curve_scalars(c);
        const double bound = *theorem1_bound(s, c.params.a);
        const auto [w1, w2] = proof_witness({c, 1.01 * bound}, 128, 256);
        CHECK(w1 + w2 < 0.0);
    }
}

TEST_CASE("full_form_min") {
    const PlanarCurve flat = circle_curve(1.0, 0.0, 512);
    SUBCASE("stable below and unstable above the Rayleigh length") {
        CHECK(full_form_min({flat, M_PI}, 32, 64) > 0.5);
        CHECK(full_form_min({flat, 7.0}, 32, 64) < -0.1);
    }
    SUBCASE("marginal at the rotating threshold") {
        const PlanarCurve c = circle_curve(1.0, 1.0, 512);
        CHECK(std::abs(full_form_min({c, M_PI / std::sqrt(2.0)}, 64, 256)) < 2e-3);
    }
    SUBCASE("diagnostics populate and the Richardson estimate is small") {
        FullFormDiagnostics diag;
        const double v = full_form_min({flat, M_PI}, 64, 128, &diag);
        CHECK(diag.value == v);
        CHECK(diag.coarse_value == doctest::Approx(v).epsilon(0.05));
        CHECK(std::abs(diag.richardson_error) < 0.01);
        CHECK_FALSE(diag.resolution_warning);
    }
    SUBCASE("non-increasing in l at fixed grid density per unit length") {
        const PlanarCurve c = circle_curve(1.0, 1.0, 256);
        double prev = kInfinity;
        for (const double l : {1.5, 2.0, 2.5, 3.0, 3.5}) {
            const int n_t = static_cast<int>(std::lround(32.0 * l / 1.5));
            const double v = full_form_min({c, l}, n_t, 128);
            CHECK(v <= prev + 1e-10);
            prev = v;
        }
    }
    SUBCASE("grid preconditions") {
        CHECK_THROWS_AS(full_form_min({flat, 1.0}, 16, 64), InvalidArgument);
        CHECK_THROWS_AS(full_form_min({flat, 1.0}, 32, 32), InvalidArgument);
    }
}

TEST_CASE("oracle_critical_length on circles") {
    const SolverConfig fast = fast_config();
    SUBCASE("Rayleigh: a=0, b=1 gives 2 pi") {
        const double crit = oracle_critical_length(circle_curve(1.0, 0.0, 512), fast);
        CHECK(crit == doctest::Approx(2 * M_PI).epsilon(0.01));
    }
    SUBCASE("rotating: a=1, b=0 gives pi / sqrt 2") {
        const double crit = oracle_critical_length(circle_curve(1.0, 1.0, 512), fast);
        CHECK(crit == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(0.01));
    }
    SUBCASE("mixed: a=0.1, b=0.9 gives 2 pi / sqrt 1.2") {
        const double crit = oracle_critical_length(circle_curve(1.0, 0.1, 512), fast);
        CHECK(crit == doctest::Approx(2 * M_PI / std::sqrt(1.2)).epsilon(0.01));
    }
    SUBCASE("infinite when no instability below l_max") {
        SolverConfig capped = fast;
        capped.l_max = 3.0;  // Rayleigh length 2 pi is out of reach
        CHECK(std::isinf(oracle_critical_length(circle_curve(1.0, 0.0, 512), capped)));
    }
}

TEST_CASE("build_report") {
    const SolverConfig fast = fast_config();
    SUBCASE("a=1, b=0, l=3: unstable rotating but Rayleigh-stable") {
        const PlanarCurve c = circle_curve(1.0, 1.0, 512);
        const StabilityReport rep = build_report(c, 3.0, fast);
        REQUIRE(rep.verdict.has_value());
        CHECK(*rep.verdict == Verdict::Unstable);
        CHECK(*rep.theorem1 == doctest::Approx(2.221441).epsilon(1e-6));
        CHECK_FALSE(rep.theorem2.has_value());
        CHECK(rep.stronger_bound == "theorem1");
        CHECK(3.0 < 2 * M_PI);  // the same column is CMC-stable
        CHECK(*rep.margin < 0.0);
    }
    SUBCASE("a=0, b=1, l=3: stable") {
        const StabilityReport rep = build_report(circle_curve(1.0, 0.0, 512), 3.0, fast);
        CHECK(*rep.verdict == Verdict::Stable);
        CHECK(*rep.theorem2 == doctest::Approx(2 * M_PI).epsilon(1e-9));
        CHECK(*rep.margin > 0.0);
    }
    SUBCASE("a=1, l at the threshold: marginal") {
        const StabilityReport rep = build_report(circle_curve(1.0, 1.0, 512), 2.2214, fast);
        CHECK(*rep.verdict == Verdict::Marginal);
    }
    SUBCASE("oracle never exceeds the per-mode estimate") {
        for (const double a : {0.0, 0.1, 1.0}) {
            const StabilityReport rep = build_report(circle_curve(1.0, a, 512), std::nullopt, fast);
            REQUIRE(rep.oracle_critical.has_value());
            CHECK(*rep.oracle_critical <= rep.per_mode_critical * 1.02);
            CHECK(std::abs(*rep.oracle_critical - rep.per_mode_critical) <=
                  2e-2 * rep.per_mode_critical);
        }
    }
    SUBCASE("without a queried length there is no verdict") {
        const StabilityReport rep = build_report(circle_curve(1.0, 0.0, 512), std::nullopt, fast);
        CHECK_FALSE(rep.verdict.has_value());
        CHECK_FALSE(rep.margin.has_value());
    }
}

TEST_CASE("report JSON encoding") {
    const SolverConfig fast = fast_config();
    const PlanarCurve c = circle_curve(1.0, 0.0, 512);
    const StabilityReport rep = build_report(c, 3.0, fast);
    const nlohmann::ordered_json j = report_to_json(rep);

    // Exactly the documented keys, in order.
    const std::vector<std::string> keys = {"scalars",  "params",           "theorem1",
                                           "theorem2", "stronger_bound",   "modes",
                                           "per_mode_critical", "oracle_critical",
                                           "verdict",  "margin"};
    REQUIRE(j.size() == keys.size());
    std::size_t idx = 0;
    for (const auto& [key, value] : j.items()) {
        CHECK(key == keys[idx++]);
    }

    CHECK(j["theorem1"].is_null());                       // a = 0: not applicable
    CHECK(j["modes"][0]["threshold_length"] == "inf");    // neutral odd mode
    CHECK(j["verdict"] == "stable");
    CHECK(j["params"]["a"] == 0.0);

    // Serialization is deterministic.
    const StabilityReport rep2 = build_report(c, 3.0, fast);
    CHECK(report_to_json(rep2).dump() == j.dump());
}
