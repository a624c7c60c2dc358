// cylstab: generating curves of rotating cylindrical surfaces and the
// stability analysis of their columns.
//
// Subcommands: circle, solve, analyze, sweep, verify. Exit codes:
//   0 success, 1 usage, 2 numeric failure, 3 invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cylstab/curve.hpp"
#include "cylstab/curve_io.hpp"
#include "cylstab/report_json.hpp"
#include "cylstab/spectral.hpp"
#include "cylstab/stability.hpp"
#include "verify_suite.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace cylstab;

namespace {

struct RunConfig {
    SolverConfig solver;
    std::string output_dir = ".";
};

void apply_config_file(RunConfig& rc, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("config file '" + path + "': " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "h_ode") rc.solver.h_ode = value.get<double>();
            else if (key == "closure_tol") rc.solver.closure_tol = value.get<double>();
            else if (key == "law_tol") rc.solver.law_tol = value.get<double>();
            else if (key == "shoot_tol") rc.solver.shoot_tol = value.get<double>();
            else if (key == "n_grid") rc.solver.n_grid = value.get<int>();
            else if (key == "n_t") rc.solver.n_t = value.get<int>();
            else if (key == "n_s") rc.solver.n_s = value.get<int>();
            else if (key == "m_max") rc.solver.m_max = value.get<int>();
            else if (key == "bisection_tol") rc.solver.bisection_tol = value.get<double>();
            else if (key == "l_max") rc.solver.l_max = value.get<double>();
            else if (key == "output_dir") rc.output_dir = value.get<std::string>();
            else throw InvalidArgument("config file: unknown key '" + key + "'");
        } catch (const nlohmann::json::exception&) {
            throw InvalidArgument("config file: bad value for '" + key + "'");
        }
    }
    if (rc.solver.h_ode <= 0 || rc.solver.closure_tol <= 0 || rc.solver.law_tol <= 0 ||
        rc.solver.shoot_tol <= 0 || rc.solver.bisection_tol <= 0 || rc.solver.l_max <= 0) {
        throw InvalidArgument("config file: tolerances must be positive");
    }
    if (rc.solver.n_grid < 32 || rc.solver.n_t < 32 || rc.solver.n_s < 64 ||
        rc.solver.m_max < 2) {
        throw InvalidArgument("config file: grids out of range (n_grid>=32, n_t>=32, n_s>=64, "
                              "m_max>=2)");
    }
}

std::string resolve(const RunConfig& rc, const std::string& name) {
    fs::path p(name);
    if (p.is_absolute()) return name;
    return (fs::path(rc.output_dir) / p).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw InvalidArgument("write failed for '" + path + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Detect a circle (all samples equidistant from their centroid) so analyze
// can print the constant-mean-curvature comparison for it.
std::optional<double> circle_radius(const PlanarCurve& curve) {
    double cx = 0, cy = 0;
    for (const Vec2& p : curve.points) {
        cx += p.x;
        cy += p.y;
    }
    cx /= curve.n_samples;
    cy /= curve.n_samples;
    double rmin = kInfinity, rmax = 0.0;
    for (const Vec2& p : curve.points) {
        const double r = std::hypot(p.x - cx, p.y - cy);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    if (rmax - rmin <= 1e-6 * rmax) return 0.5 * (rmin + rmax);
    return std::nullopt;
}

int cmd_circle(const RunConfig& rc, double r, double a, int n_samples, const std::string& out) {
    PlanarCurve curve = circle_curve(r, a, n_samples);
    validate_curve(curve, rc.solver);
    write_curve_csv(curve, resolve(rc, out));
    std::printf("wrote %s (b = %.17g, L = %.17g)\n", resolve(rc, out).c_str(), curve.params.b,
                curve.length);
    return 0;
}

int cmd_solve(const RunConfig& rc, double a, double b, int k, double r0_min, double r0_max,
              int n_samples, const std::string& prefix, const std::string& summary_name) {
    GeneratingParams params{a, b, k, 1};
    validate_params(params);
    if (!(r0_min > 0) || !(r0_max > r0_min)) {
        throw InvalidArgument("solve: need 0 < r0_min < r0_max");
    }
    SolverConfig config = rc.solver;
    config.n_samples = n_samples;

    constexpr int kScanPoints = 64;
    ordered_json summary;
    summary["a"] = a;
    summary["b"] = b;
    summary["k"] = k;
    ordered_json scan = ordered_json::array();

    std::vector<double> r0s(kScanPoints);
    std::vector<std::optional<double>> res(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
        r0s[i] = r0_min + (r0_max - r0_min) * i / (kScanPoints - 1);
        try {
            res[i] = shooting_residual(params, r0s[i], config);
        } catch (const NumericFailure&) {
            res[i] = std::nullopt;
        }
        scan.push_back({{"r0", r0s[i]},
                        {"residual", res[i] ? ordered_json(*res[i]) : ordered_json(nullptr)}});
    }
    summary["scan"] = scan;

    ordered_json curves = ordered_json::array();
    std::vector<std::array<double, 3>> seen;  // (L, rmin, rmax) of accepted curves
    int found = 0;
    for (int i = 0; i + 1 < kScanPoints; ++i) {
        const bool root_here =
            res[i] && (std::abs(*res[i]) <= config.shoot_tol ||
                       (res[i + 1] && (*res[i] < 0) != (*res[i + 1] < 0)));
        if (!root_here) continue;
        PlanarCurve curve;
        try {
            curve = shoot_closed_curve(params, {r0s[i], r0s[i + 1]}, config);
        } catch (const NumericFailure&) {
            continue;
        }
        const CurveScalars scalars = curve_scalars(curve);
        double rmin = kInfinity, rmax = 0.0;
        for (const Vec2& p : curve.points) {
            const double r = std::hypot(p.x, p.y);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        bool duplicate = false;
        for (const auto& s : seen) {
            if (std::abs(s[0] - scalars.length) < 1e-6 && std::abs(s[1] - rmin) < 1e-6 &&
                std::abs(s[2] - rmax) < 1e-6) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        seen.push_back({scalars.length, rmin, rmax});
        const std::string file = resolve(rc, prefix + std::to_string(found) + ".csv");
        write_curve_csv(curve, file);
        curves.push_back({{"file", file},
                          {"length", scalars.length},
                          {"area", scalars.area},
                          {"r_min", rmin},
                          {"r_max", rmax},
                          {"closure_residual", curve.closure_residual},
                          {"embedded", is_embedded(curve)}});
        ++found;
    }
    summary["curves"] = curves;
    write_text(resolve(rc, summary_name), summary.dump(2) + "\n");

    if (found == 0) {
        std::printf("no closed curve found in [%.17g, %.17g]; see %s\n", r0_min, r0_max,
                    resolve(rc, summary_name).c_str());
        throw NumericFailure("no_sign_change", "shooting residual has no root in the scan range");
    }
    std::printf("found %d closed curve(s); summary in %s\n", found,
                resolve(rc, summary_name).c_str());
    return 0;
}

int cmd_analyze(const RunConfig& rc, const std::string& curve_file, std::optional<double> l,
                const std::string& out, const std::string& scan_out, int scan_points) {
    const PlanarCurve curve = read_curve_csv(curve_file, rc.solver);
    const StabilityReport report = build_report(curve, l, rc.solver);
    const ordered_json j = report_to_json(report);
    write_text(resolve(rc, out), j.dump(2) + "\n");

    // Plot-ready scan of the 2D form minimum around the critical length.
    const double center = report.oracle_critical && std::isfinite(*report.oracle_critical)
                              ? *report.oracle_critical
                              : (std::isfinite(report.per_mode_critical)
                                     ? report.per_mode_critical
                                     : rc.solver.l_max / 2.0);
    std::string csv = "l,min_eigenvalue\n";
    for (int i = 0; i < scan_points; ++i) {
        const double li = center * (0.5 + 1.0 * i / (scan_points - 1));
        const double ev = full_form_min({curve, li}, rc.solver.n_t, rc.solver.n_s);
        csv += format_double(li) + "," + format_double(ev) + "\n";
    }
    write_text(resolve(rc, scan_out), csv);

    std::printf("%s\n", j.dump(2).c_str());
    if (l) {
        if (const auto r = circle_radius(curve)) {
            const double rayleigh = 2.0 * M_PI * *r;
            std::printf("note: as a constant-mean-curvature cylinder (radius %.6g) this column "
                        "is %s: l = %.6g %s 2 pi r = %.6g\n",
                        *r, *l < rayleigh ? "stable" : "unstable", *l,
                        *l < rayleigh ? "<" : ">=", rayleigh);
        }
    }
    return 0;
}

int cmd_sweep(const RunConfig& rc, double a_min, double a_max, int steps, double r,
              const std::string& out) {
    if (steps < 1) throw InvalidArgument("sweep: steps must be >= 1");
    if (!(r > 0)) throw InvalidArgument("sweep: radius must be positive");
    if (!(a_max >= a_min)) throw InvalidArgument("sweep: need a_max >= a_min");

    std::string csv = "a,b,theorem1,theorem2,stronger,per_mode_critical,oracle_critical\n";
    for (int i = 0; i < steps; ++i) {
        const double a = steps == 1 ? a_min : a_min + (a_max - a_min) * i / (steps - 1);
        const PlanarCurve curve = circle_curve(r, a, rc.solver.n_samples);
        const StabilityReport rep = build_report(curve, std::nullopt, rc.solver);
        auto cell = [](const std::optional<double>& v) {
            if (!v) return std::string("n/a");
            return std::isfinite(*v) ? format_double(*v) : std::string("inf");
        };
        csv += format_double(a) + "," + format_double(curve.params.b) + "," +
               cell(rep.theorem1) + "," + cell(rep.theorem2) + "," + rep.stronger_bound + "," +
               (std::isfinite(rep.per_mode_critical) ? format_double(rep.per_mode_critical)
                                                     : std::string("inf")) +
               "," + cell(rep.oracle_critical) + "\n";
    }
    write_text(resolve(rc, out), csv);
    std::printf("wrote %s\n", resolve(rc, out).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generating curves of rotating cylindrical surfaces and column stability"};
    app.require_subcommand(1);

    RunConfig rc;
    // The config file seeds the defaults; explicit flags then override them,
    // so the file has to be located and applied before CLI11 parses.
    std::string config_file;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) {
            config_file = argv[i + 1];
        } else if (std::strncmp(argv[i], "--config=", 9) == 0) {
            config_file = argv[i] + 9;
        }
    }
    try {
        if (!config_file.empty()) apply_config_file(rc, config_file);
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::string config_sink;
    app.add_option("--config", config_sink, "JSON config file (RunConfig keys)");
    app.add_option("--output-dir", rc.output_dir, "directory for output files");
    app.add_option("--h-ode", rc.solver.h_ode, "RK4 step cap");
    app.add_option("--closure-tol", rc.solver.closure_tol, "closure tolerance");
    app.add_option("--law-tol", rc.solver.law_tol, "curvature-law tolerance");
    app.add_option("--shoot-tol", rc.solver.shoot_tol, "shooting angle tolerance");
    app.add_option("--n-grid", rc.solver.n_grid, "1D spectral grid");
    app.add_option("--n-t", rc.solver.n_t, "2D oracle axial grid");
    app.add_option("--n-s", rc.solver.n_s, "2D oracle periodic grid");
    app.add_option("--m-max", rc.solver.m_max, "axial modes scanned");
    app.add_option("--bisection-tol", rc.solver.bisection_tol,
                   "relative tolerance of the critical-length bisection");
    app.add_option("--l-max", rc.solver.l_max, "critical-length scan cap");

    auto* circle = app.add_subcommand("circle", "write an analytic circle curve file");
    circle->fallthrough();
    double c_r = 1.0, c_a = 0.0;
    int c_n = 512;
    std::string c_out = "circle.csv";
    circle->add_option("--r", c_r, "radius")->required();
    circle->add_option("--a", c_a, "rotation coefficient a");
    circle->add_option("--n", c_n, "number of samples");
    circle->add_option("--out", c_out, "output file");

    auto* solve = app.add_subcommand("solve", "find closed generating curves by shooting");
    solve->fallthrough();
    double s_a = 0.0, s_b = 0.0;
    int s_k = 1, s_n = 512;
    std::string s_r0 = "0.5:2.0", s_prefix = "curve_", s_summary = "solve_summary.json";
    solve->add_option("--a", s_a, "rotation coefficient a")->required();
    solve->add_option("--b", s_b, "curvature offset b")->required();
    solve->add_option("--k", s_k, "dihedral symmetry order");
    solve->add_option("--r0", s_r0, "start-radius bracket lo:hi")->required();
    solve->add_option("--n", s_n, "samples per written curve");
    solve->add_option("--prefix", s_prefix, "output file prefix");
    solve->add_option("--summary", s_summary, "summary JSON file");

    auto* analyze = app.add_subcommand("analyze", "stability report for a curve file");
    analyze->fallthrough();
    std::string a_curve, a_out = "report.json", a_scan = "scan.csv";
    double a_l = 0.0;
    int a_scan_points = 9;
    bool a_has_l = false;
    analyze->add_option("--curve", a_curve, "curve CSV file")->required();
    auto* a_l_opt = analyze->add_option("--l", a_l, "column length to judge");
    analyze->add_option("--out", a_out, "report JSON file");
    analyze->add_option("--scan-out", a_scan, "l,min_eigenvalue CSV file");
    analyze->add_option("--scan-points", a_scan_points, "points in the scan CSV")
        ->check(CLI::Range(2, 1000));

    auto* sweep = app.add_subcommand("sweep", "bound comparison across a for circles");
    sweep->fallthrough();
    double w_amin = 0.0, w_amax = 0.0, w_r = 1.0;
    int w_steps = 0;
    std::string w_out = "sweep.csv";
    sweep->add_option("--a-min", w_amin, "first a value")->required();
    sweep->add_option("--a-max", w_amax, "last a value")->required();
    sweep->add_option("--steps", w_steps, "number of rows")->required();
    sweep->add_option("--r", w_r, "circle radius");
    sweep->add_option("--out", w_out, "output CSV");

    auto* verify = app.add_subcommand("verify", "run the invariant suite over the corpus");
    verify->fallthrough();
    std::string v_corpus, v_dump;
    bool v_fast = false;
    verify->add_option("--corpus", v_corpus, "directory of extra curve CSV files");
    verify->add_option("--dump-spectrum", v_dump, "write the reference spectrum CSV here");
    verify->add_flag("--fast", v_fast, "skip the expensive 2D-oracle checks");

    try {
        app.parse(argc, argv);
        if (*circle) return cmd_circle(rc, c_r, c_a, c_n, c_out);
        if (*solve) {
            const auto colon = s_r0.find(':');
            if (colon == std::string::npos) {
                throw InvalidArgument("solve: --r0 expects lo:hi");
            }
            const double lo = std::stod(s_r0.substr(0, colon));
            const double hi = std::stod(s_r0.substr(colon + 1));
            return cmd_solve(rc, s_a, s_b, s_k, lo, hi, s_n, s_prefix, s_summary);
        }
        if (*analyze) {
            a_has_l = a_l_opt->count() > 0;
            return cmd_analyze(rc, a_curve, a_has_l ? std::optional<double>(a_l) : std::nullopt,
                               a_out, a_scan, a_scan_points);
        }
        if (*sweep) return cmd_sweep(rc, w_amin, w_amax, w_steps, w_r, w_out);
        if (*verify) return run_verify_suite(rc.solver, v_corpus, v_dump, v_fast) ? 0 : 3;
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const NumericFailure& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 2;
    } catch (const InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
