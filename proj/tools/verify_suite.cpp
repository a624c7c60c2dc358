#include "verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "cylstab/curve.hpp"
#include "cylstab/curve_io.hpp"
#include "cylstab/numerics.hpp"
#include "cylstab/spectral.hpp"
#include "cylstab/stability.hpp"

namespace fs = std::filesystem;
using namespace cylstab;

namespace {

struct Tally {
    int passed = 0;
    int failed = 0;

    void report(const std::string& name, bool ok, double measured, double required,
                const char* relation = "<=") {
        std::printf("[%s] %-46s measured=%-13.6g required %s %.6g\n", ok ? "PASS" : "FAIL",
                    name.c_str(), measured, relation, required);
        ok ? ++passed : ++failed;
    }
    void report_msg(const std::string& name, bool ok, const std::string& detail) {
        std::printf("[%s] %-46s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
        ok ? ++passed : ++failed;
    }
};

struct CorpusEntry {
    std::string label;
    PlanarCurve curve;
    bool circle = false;
};

double shoelace_area(const PlanarCurve& curve) {
    double sum = 0.0;
    const int n = curve.n_samples;
    for (int i = 0; i < n; ++i) {
        sum += cross(curve.points[i], curve.points[(i + 1) % n]);
    }
    return 0.5 * sum;
}

PlanarCurve subsample_half(const PlanarCurve& curve) {
    PlanarCurve half = curve;
    half.n_samples = curve.n_samples / 2;
    half.points.clear();
    half.theta.clear();
    half.kappa.clear();
    for (int i = 0; i < curve.n_samples; i += 2) {
        half.points.push_back(curve.points[i]);
        half.theta.push_back(curve.theta[i]);
        half.kappa.push_back(curve.kappa[i]);
    }
    return half;
}

double tangent_deriv_error(const PlanarCurve& curve) {
    const auto [g1, g2] = tangent_components(curve);
    const double h = curve.length / curve.n_samples;
    const auto d1 = periodic_central_derivative(h, g1);
    const auto d2 = periodic_central_derivative(h, g2);
    double worst = 0.0;
    for (int i = 0; i < curve.n_samples; ++i) {
        worst = std::max(worst, std::abs(d1[i] * d1[i] + d2[i] * d2[i] -
                                         curve.kappa[i] * curve.kappa[i]));
    }
    return worst;
}

bool bitwise_equal(const PlanarCurve& a, const PlanarCurve& b) {
    if (a.n_samples != b.n_samples || a.length != b.length) return false;
    for (int i = 0; i < a.n_samples; ++i) {
        if (a.points[i].x != b.points[i].x || a.points[i].y != b.points[i].y ||
            a.theta[i] != b.theta[i] || a.kappa[i] != b.kappa[i]) {
            return false;
        }
    }
    return true;
}

void dump_spectrum_csv(const SLOperator& op, const std::string& path) {
    const int count = std::min(16, op.n_grid);
    const SpectrumSlice slice = eigen_spectrum(op, count);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open '" + path + "' for writing");
    f << "index,eigenvalue";
    for (int i = 0; i < op.n_grid; ++i) f << ",v" << i;
    f << "\n";
    char buf[40];
    for (int j = 0; j < count; ++j) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g", j, slice.eigenvalues[j]);
        f << buf;
        for (int i = 0; i < op.n_grid; ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", slice.eigenvectors(i, j));
            f << buf;
        }
        f << "\n";
    }
}

}  // namespace

bool run_verify_suite(const SolverConfig& config, const std::string& corpus_dir,
                      const std::string& dump_spectrum_path, bool fast) {
    Tally tally;

    std::vector<CorpusEntry> corpus;
    const std::vector<std::pair<double, double>> circle_specs = {
        {1.0, 0.0}, {1.0, 1.0}, {1.0, 0.1}, {2.0, 0.25}, {0.8, 0.5}};
    for (const auto& [r, a] : circle_specs) {
        char label[64];
        std::snprintf(label, sizeof(label), "circle r=%g a=%g", r, a);
        corpus.push_back({label, circle_curve(r, a, config.n_samples), true});
    }
    try {
        PlanarCurve lobed = shoot_closed_curve({1.4, -0.5, 2, 1}, {1.10, 1.30}, config);
        corpus.push_back({"lobed k=2 a=1.4 b=-0.5", std::move(lobed), false});
    } catch (const std::exception& e) {
        tally.report_msg("solve lobed corpus curve", false, e.what());
    }
    if (!corpus_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(corpus_dir)) {
            if (entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            try {
                PlanarCurve loaded = read_curve_csv(file.string(), config);
                double rmin = kInfinity, rmax = 0.0;
                for (const Vec2& p : loaded.points) {
                    const double r = std::hypot(p.x, p.y);
                    rmin = std::min(rmin, r);
                    rmax = std::max(rmax, r);
                }
                corpus.push_back({file.filename().string(), std::move(loaded),
                                  rmax - rmin <= 1e-6 * rmax});
                tally.report_msg("load " + file.filename().string(), true, "ok");
            } catch (const std::exception& e) {
                tally.report_msg("load " + file.filename().string(), false, e.what());
            }
        }
    }

    for (const CorpusEntry& entry : corpus) {
        const std::string tag = "[" + entry.label + "]";
        try {
            validate_curve(entry.curve, config);
            tally.report_msg("curve invariants " + tag, true, "ok");
        } catch (const std::exception& e) {
            tally.report_msg("curve invariants " + tag, false, e.what());
            continue;
        }

        const CurveScalars scalars = curve_scalars(entry.curve);
        tally.report("moment = 2 area " + tag, std::abs(scalars.moment - 2 * scalars.area) <= 1e-6,
                     std::abs(scalars.moment - 2 * scalars.area), 1e-6);
        const double sl = shoelace_area(entry.curve);
        tally.report("area vs shoelace " + tag, std::abs(scalars.area - sl) <= 1e-3,
                     std::abs(scalars.area - sl), 1e-3);
        tally.report("isoperimetric " + tag,
                     scalars.length * scalars.length >= 4 * M_PI * scalars.area - 1e-9,
                     scalars.length * scalars.length - 4 * M_PI * scalars.area, 0.0, ">=");

        const auto [g1, g2] = tangent_components(entry.curve);
        double unit_err = 0.0;
        for (int i = 0; i < entry.curve.n_samples; ++i) {
            unit_err = std::max(unit_err, std::abs(g1[i] * g1[i] + g2[i] * g2[i] - 1.0));
        }
        tally.report("g1^2+g2^2 = 1 " + tag, unit_err <= 1e-12, unit_err, 1e-12);
        const double h = entry.curve.length / entry.curve.n_samples;
        const double mean_err =
            std::max(std::abs(trapezoid_periodic(h, g1)), std::abs(trapezoid_periodic(h, g2)));
        tally.report("zero tangent mean " + tag, mean_err <= 1e-8, mean_err, 1e-8);

        if (entry.curve.n_samples % 2 == 0) {
            const double err_full = tangent_deriv_error(entry.curve);
            const double err_half = tangent_deriv_error(subsample_half(entry.curve));
            const double order = std::log2(err_half / err_full);
            tally.report("g'^2 identity order " + tag, order >= 1.8, order, 1.8, ">=");
        }

        if (entry.circle) {
            double cx = 0, cy = 0;
            for (const Vec2& p : entry.curve.points) {
                cx += p.x;
                cy += p.y;
            }
            cx /= entry.curve.n_samples;
            cy /= entry.curve.n_samples;
            if (std::hypot(cx, cy) < 1e-9) {
                const double res = jacobi_field_residual(entry.curve, 128);
                tally.report("jacobi residual (circle) " + tag, res <= 1e-12, res, 1e-12);
            }
        } else {
            const double r128 = jacobi_field_residual(entry.curve, 128);
            const double r256 = jacobi_field_residual(entry.curve, 256);
            const double ratio = r128 / r256;
            tally.report_msg("jacobi residual order " + tag, ratio >= 3.2 && ratio <= 4.8,
                             "ratio=" + std::to_string(ratio) + " required in [3.2, 4.8]");
        }

        const SLOperator op = assemble_sl_operator(entry.curve, config.n_grid);
        const double lam_con = constrained_min_eigenvalue(op);
        const double lam_unc = eigen_spectrum(op, 1).eigenvalues[0];
        tally.report("constrained >= unconstrained " + tag, lam_con >= lam_unc - 1e-12,
                     lam_con - lam_unc, 0.0, ">=");
    }

    // Constant-potential spectral oracle.
    {
        const int n = 256;
        const double period = 2.0 * M_PI;
        const double hh = period / n;
        for (const double c : {0.0, 1.0, 3.0}) {
            const SLOperator op = make_sl_operator(period, std::vector<double>(n, c));
            const SpectrumSlice slice = eigen_spectrum(op, n / 2);
            std::vector<double> expected;
            expected.push_back(-c);
            for (int k = 1; expected.size() < slice.eigenvalues.size(); ++k) {
                const double lam = 4.0 * std::sin(M_PI * k / n) * std::sin(M_PI * k / n) /
                                       (hh * hh) - c;
                expected.push_back(lam);
                expected.push_back(lam);
            }
            std::sort(expected.begin(), expected.end());
            double worst = 0.0;
            for (int j = 0; j < n / 4; ++j) {
                worst = std::max(worst, std::abs(slice.eigenvalues[j] - expected[j]));
            }
            char name[64];
            std::snprintf(name, sizeof(name), "dispersion law q=%g", c);
            tally.report(name, worst <= 1e-10, worst, 1e-10);
        }

        const SLOperator op0 = make_sl_operator(period, std::vector<double>(n, 0.0));
        const SLOperator op3 = make_sl_operator(period, std::vector<double>(n, 3.0));
        const SpectrumSlice s0 = eigen_spectrum(op0, 32);
        const SpectrumSlice s3 = eigen_spectrum(op3, 32);
        double shift_err = 0.0;
        for (int j = 0; j < 32; ++j) {
            shift_err = std::max(shift_err, std::abs(s3.eigenvalues[j] - (s0.eigenvalues[j] - 3.0)));
        }
        tally.report("shift covariance", shift_err <= 1e-10, shift_err, 1e-10);
    }

    // Shooting returns the right circle for a = 0.
    for (const double r : {0.7, 1.3}) {
        try {
            const PlanarCurve shot =
                shoot_closed_curve({0.0, 1.0 / r, 1, 1}, {0.5 * r, 1.9 * r}, config);
            double cx = 0, cy = 0;
            for (const Vec2& p : shot.points) {
                cx += p.x;
                cy += p.y;
            }
            cx /= shot.n_samples;
            cy /= shot.n_samples;
            double worst = 0.0;
            for (const Vec2& p : shot.points) {
                worst = std::max(worst, std::abs(std::hypot(p.x - cx, p.y - cy) - r));
            }
            char name[64];
            std::snprintf(name, sizeof(name), "shoot a=0 gives circle r=%g", r);
            tally.report(name, worst <= 1e-6, worst, 1e-6);
        } catch (const std::exception& e) {
            tally.report_msg("shoot a=0 circle", false, e.what());
        }
    }

    // Determinism and file round-trip.
    {
        const PlanarCurve c1 = circle_curve(1.0, 0.3, config.n_samples);
        const PlanarCurve c2 = circle_curve(1.0, 0.3, config.n_samples);
        tally.report_msg("determinism (analytic circle)", bitwise_equal(c1, c2),
                         "bit-identical resamples");
        const PlanarCurve s1 = shoot_closed_curve({1.0, 0.0, 1, 1}, {0.5, 2.0}, config);
        const PlanarCurve s2 = shoot_closed_curve({1.0, 0.0, 1, 1}, {0.5, 2.0}, config);
        tally.report_msg("determinism (shooting)", bitwise_equal(s1, s2), "bit-identical solves");

        const fs::path tmp = fs::temp_directory_path() / "cylstab_verify_roundtrip.csv";
        write_curve_csv(s1, tmp.string());
        const PlanarCurve back = read_curve_csv(tmp.string(), config);
        fs::remove(tmp);
        tally.report_msg("curve file round-trip", bitwise_equal(s1, back), "bit-identical reload");
    }

    // Crossover of the two bounds on the unit circle.
    {
        const double a_star = 4.0 - std::sqrt(15.0);  // a/b^2 = 1/6 with b = 1 - a
        int flips = 0;
        int flip_index = -1;
        std::string prev;
        for (int i = 0; i < 10; ++i) {
            const double a = 0.05 + 0.45 * i / 9.0;
            const PlanarCurve circ = circle_curve(1.0, a, 256);
            const CurveScalars sc = curve_scalars(circ);
            const BoundComparison cmp = bound_comparison(sc, a, circ.params.b);
            const std::string s = cmp == BoundComparison::Theorem2Stronger ? "th2" : "th1";
            if (!prev.empty() && s != prev) {
                ++flips;
                flip_index = i;
            }
            prev = s;
        }
        const double grid_step = 0.45 / 9.0;
        const int predicted = static_cast<int>(std::ceil((a_star - 0.05) / grid_step));
        tally.report_msg("crossover flip",
                         flips == 1 && flip_index == predicted,
                         "flip at sweep index " + std::to_string(flip_index) + ", predicted " +
                             std::to_string(predicted));

        const PlanarCurve tie_circ = circle_curve(1.0, a_star, 256);
        const CurveScalars tie_sc = curve_scalars(tie_circ);
        const double th1 = *theorem1_bound(tie_sc, a_star);
        const double th2 = *theorem2_bound(tie_sc, a_star, tie_circ.params.b);
        tally.report("bounds tie at a/b^2 = 1/6", std::abs(th1 - th2) <= 1e-6,
                     std::abs(th1 - th2), 1e-6);
    }

    if (!fast) {
        for (const CorpusEntry& entry : corpus) {
            const std::string tag = "[" + entry.label + "]";
            if (!is_embedded(entry.curve)) continue;
            const CurveScalars sc = curve_scalars(entry.curve);
            const auto th1 = theorem1_bound(sc, entry.curve.params.a);
            const auto th2 = theorem2_bound(sc, entry.curve.params.a, entry.curve.params.b);
            if (!th1 && !th2) continue;

            const double oracle = oracle_critical_length(entry.curve, config);
            if (th1) {
                tally.report("oracle <= theorem1 bound " + tag, oracle <= *th1 * 1.01,
                             oracle / *th1, 1.01);
            }
            if (th2) {
                tally.report("oracle <= theorem2 bound " + tag, oracle <= *th2 * 1.01,
                             oracle / *th2, 1.01);
            }
            if (entry.circle) {
                const double pm = per_mode_critical_length(entry.curve, config.m_max,
                                                           config.n_grid);
                tally.report("oracle vs per-mode (circle) " + tag,
                             std::abs(oracle - pm) <= 2e-2 * pm, std::abs(oracle - pm) / pm,
                             2e-2);
            }
            if (th1) {
                const double l_wit = 1.01 * *th1;
                const auto [p1, p2] = proof_witness({entry.curve, l_wit}, 256, 256);
                tally.report("witness sum < 0 " + tag, p1 + p2 < 0.0, p1 + p2, 0.0, "<");
                const double ffm = full_form_min({entry.curve, l_wit}, config.n_t, config.n_s);
                tally.report("full form min < 0 past bound " + tag, ffm < 0.0, ffm, 0.0, "<");
            }
        }

        // Monotonicity of the form minimum in l at fixed density per unit length.
        {
            const PlanarCurve circ = circle_curve(1.0, 1.0, 256);
            double prev = kInfinity;
            bool monotone = true;
            for (const double l : {1.5, 2.0, 2.5, 3.0}) {
                const int n_t = static_cast<int>(std::lround(32.0 * l / 1.5));
                const double v = full_form_min({circ, l}, n_t, 128);
                if (v > prev + 1e-10) monotone = false;
                prev = v;
            }
            tally.report_msg("form minimum non-increasing in l", monotone,
                             "checked l in {1.5, 2, 2.5, 3}");
        }
    }

    if (!dump_spectrum_path.empty()) {
        const SLOperator op = assemble_sl_operator(circle_curve(1.0, 1.0, config.n_samples),
                                                   config.n_grid);
        dump_spectrum_csv(op, dump_spectrum_path);
        std::printf("spectrum written to %s\n", dump_spectrum_path.c_str());
    }

    std::printf("%d passed, %d failed\n", tally.passed, tally.failed);
    return tally.failed == 0;
}
