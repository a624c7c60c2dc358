#include "cylstab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cylstab/numerics.hpp"

namespace cylstab {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct OdeState {
    double s, x1, x2, theta, phi;
};

OdeState derivatives(const GeneratingParams& p, const OdeState& st) {
    const double r2 = st.x1 * st.x1 + st.x2 * st.x2;
    if (r2 < 1e-16) {
        throw NumericFailure("origin_singularity", "arc passed through the rotation axis");
    }
    const double c = std::cos(st.theta);
    const double sn = std::sin(st.theta);
    return {1.0, c, sn, p.a * r2 + p.b, (st.x1 * sn - st.x2 * c) / r2};
}

OdeState rk4_step(const GeneratingParams& p, const OdeState& st, double h) {
    auto add = [](const OdeState& a, double c, const OdeState& d) {
        return OdeState{a.s + c * d.s, a.x1 + c * d.x1, a.x2 + c * d.x2, a.theta + c * d.theta,
                        a.phi + c * d.phi};
    };
    const OdeState k1 = derivatives(p, st);
    const OdeState k2 = derivatives(p, add(st, 0.5 * h, k1));
    const OdeState k3 = derivatives(p, add(st, 0.5 * h, k2));
    const OdeState k4 = derivatives(p, add(st, h, k3));
    OdeState out = st;
    out.s += h;
    out.x1 += h / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1);
    out.x2 += h / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2);
    out.theta += h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
    out.phi += h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    return out;
}

ArcState to_arc_state(const OdeState& st) { return {st.s, st.x1, st.x2, st.theta, st.phi}; }

/// Fixed-step RK4 with event localization; never throws for a missing event.
OpenArc integrate_impl(const GeneratingParams& params, double start_radius, double max_arclength,
                       const SolverConfig& config) {
    validate_params(params);
    if (!(start_radius > 0.0)) throw InvalidArgument("integrate_arc: start_radius must be > 0");
    if (!(max_arclength > 0.0)) throw InvalidArgument("integrate_arc: max_arclength must be > 0");

    const double h = std::min(config.h_ode, 2.0 * M_PI * std::max(start_radius, 0.1) * 1e-4);
    if (!(h > 1e-12)) throw NumericFailure("step_underflow", "ODE step collapsed to " + fmt(h));
    const double target = M_PI / params.symmetry_order;
    const double escape2 = config.escape_radius * config.escape_radius;

    OpenArc arc;
    OdeState st{0.0, start_radius, 0.0, M_PI / 2.0, 0.0};
    arc.states.push_back(to_arc_state(st));

    while (st.s < max_arclength) {
        const double step = std::min(h, max_arclength - st.s);
        if (step < 1e-14) break;
        OdeState next = rk4_step(params, st, step);
        if (next.x1 * next.x1 + next.x2 * next.x2 > escape2) {
            throw NumericFailure("escape", "arc left the bounding radius " +
                                               fmt(config.escape_radius) + " at s = " + fmt(next.s));
        }
        if (next.phi >= target) {
            // Localize the crossing inside [0, step] by bisection on a single
            // RK4 step from st; the one-step map is smooth in the step size.
            double lo = 0.0, hi = step;
            OdeState ev = next;
            for (int it = 0; it < 60 && (hi - lo) > 1e-16 * (1.0 + step); ++it) {
                const double mid = 0.5 * (lo + hi);
                const OdeState trial = rk4_step(params, st, mid);
                if (trial.phi >= target) {
                    hi = mid;
                    ev = trial;
                } else {
                    lo = mid;
                }
            }
            arc.states.push_back(to_arc_state(ev));
            arc.event = to_arc_state(ev);
            return arc;
        }
        arc.states.push_back(to_arc_state(next));
        st = next;
    }
    return arc;  // no event
}

/// Piecewise-cubic view of the fundamental arc with exact ODE derivatives
/// at the sample points.
class FundamentalArc {
public:
    FundamentalArc(const GeneratingParams& params, std::vector<ArcState> states)
        : params_(params), states_(std::move(states)) {}

    double end_s() const { return states_.back().s; }
    double end_theta() const { return states_.back().theta; }

    // (x1, x2, theta, kappa) at arc length t in [0, end_s].
    void eval(double t, double& x, double& y, double& th, double& ka) const {
        t = std::clamp(t, 0.0, end_s());
        const auto it = std::upper_bound(
            states_.begin(), states_.end(), t,
            [](double v, const ArcState& st) { return v < st.s; });
        std::size_t i = static_cast<std::size_t>(std::distance(states_.begin(), it));
        if (i == 0) i = 1;
        if (i >= states_.size()) i = states_.size() - 1;
        const ArcState& a = states_[i - 1];
        const ArcState& b = states_[i];
        const double ca = std::cos(a.theta), sa = std::sin(a.theta);
        const double cb = std::cos(b.theta), sb = std::sin(b.theta);
        const double kaa = params_.a * (a.x1 * a.x1 + a.x2 * a.x2) + params_.b;
        const double kab = params_.a * (b.x1 * b.x1 + b.x2 * b.x2) + params_.b;
        x = hermite_value(t, a.s, b.s, a.x1, b.x1, ca, cb);
        y = hermite_value(t, a.s, b.s, a.x2, b.x2, sa, sb);
        th = hermite_value(t, a.s, b.s, a.theta, b.theta, kaa, kab);
        ka = hermite_derivative(t, a.s, b.s, a.theta, b.theta, kaa, kab);
    }

private:
    GeneratingParams params_;
    std::vector<ArcState> states_;
};

/// Evaluate the assembled closed curve (reflections across the symmetry
/// lines plus rotations of the doubled piece) at global arc length s.
class AssembledCurve {
public:
    AssembledCurve(const GeneratingParams& params, FundamentalArc fund)
        : k_(params.symmetry_order),
          beta_(M_PI / params.symmetry_order),
          fund_(std::move(fund)) {
        s_star_ = fund_.end_s();
        piece_ = 2.0 * s_star_;
        length_ = k_ * piece_;
        theta_join_ = 2.0 * fund_.end_theta();
        const double c2b = std::cos(2.0 * beta_), s2b = std::sin(2.0 * beta_);
        rxx_ = c2b;
        rxy_ = s2b;
        ryx_ = s2b;
        ryy_ = -c2b;
    }

    double length() const { return length_; }

    void eval(double s, double& x, double& y, double& th, double& ka) const {
        int p = static_cast<int>(std::floor(s / piece_));
        p = std::clamp(p, 0, k_ - 1);
        const double tau = s - p * piece_;
        if (tau <= s_star_) {
            fund_.eval(tau, x, y, th, ka);
        } else {
            double xr, yr, thr;
            fund_.eval(piece_ - tau, xr, yr, thr, ka);
            x = rxx_ * xr + rxy_ * yr;
            y = ryx_ * xr + ryy_ * yr;
            th = theta_join_ - thr;
        }
        if (p > 0) {
            const double ang = 2.0 * beta_ * p;
            const double c = std::cos(ang), sn = std::sin(ang);
            const double xo = x, yo = y;
            x = c * xo - sn * yo;
            y = sn * xo + c * yo;
            th += ang;
        }
    }

private:
    int k_;
    double beta_;
    FundamentalArc fund_;
    double s_star_{}, piece_{}, length_{}, theta_join_{};
    double rxx_{}, rxy_{}, ryx_{}, ryy_{};
};

double residual_from_event(const GeneratingParams& params, const ArcState& event) {
    const double expected = M_PI / params.symmetry_order + M_PI / 2.0;
    return wrap_to_pi(event.theta - expected);
}

PlanarCurve assemble_closed_curve(const GeneratingParams& params, double r0,
                                  const SolverConfig& config) {
    OpenArc arc = integrate_impl(params, r0, config.max_arclength, config);
    if (!arc.event) {
        throw NumericFailure("no_event", "symmetry line not reached during assembly");
    }
    AssembledCurve assembled(params, FundamentalArc(params, std::move(arc.states)));

    const int n = config.n_samples;
    PlanarCurve curve;
    curve.params = params;
    curve.n_samples = n;
    curve.length = assembled.length();
    curve.points.resize(n);
    curve.theta.resize(n);
    curve.kappa.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = curve.length * i / n;
        double x, y, th, ka;
        assembled.eval(s, x, y, th, ka);
        curve.points[i] = {x, y};
        curve.theta[i] = th;
        curve.kappa[i] = ka;
    }
    double xe, ye, the, kae;
    assembled.eval(curve.length, xe, ye, the, kae);
    curve.closure_residual = std::hypot(xe - r0, ye - 0.0);

    validate_curve(curve, config);
    return curve;
}

}  // namespace

void validate_params(const GeneratingParams& params) {
    if (!std::isfinite(params.a) || !std::isfinite(params.b)) {
        throw InvalidArgument("GeneratingParams: a and b must be finite");
    }
    if (params.a == 0.0 && params.b == 0.0) {
        throw InvalidArgument("GeneratingParams: kappa == 0 admits no closed curve");
    }
    if (params.symmetry_order < 1) throw InvalidArgument("GeneratingParams: symmetry_order >= 1");
    if (params.rotation_index < 1) throw InvalidArgument("GeneratingParams: rotation_index >= 1");
}

PlanarCurve circle_curve(double r, double a, int n_samples) {
    if (!(r > 0.0)) throw InvalidArgument("circle_curve: radius must be positive");
    if (n_samples < 16) throw InvalidArgument("circle_curve: n_samples must be at least 16");
    if (!std::isfinite(a)) throw InvalidArgument("circle_curve: a must be finite");

    PlanarCurve curve;
    curve.params = {a, 1.0 / r - a * r * r, 1, 1};
    curve.n_samples = n_samples;
    curve.length = 2.0 * M_PI * r;
    curve.points.resize(n_samples);
    curve.theta.resize(n_samples);
    curve.kappa.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double phi = 2.0 * M_PI * i / n_samples;
        curve.points[i] = {r * std::cos(phi), r * std::sin(phi)};
        curve.theta[i] = phi + M_PI / 2.0;
        curve.kappa[i] = 1.0 / r;
    }
    curve.closure_residual = 0.0;
    return curve;
}

OpenArc integrate_arc(const GeneratingParams& params, double start_radius, double max_arclength,
                      const SolverConfig& config) {
    OpenArc arc = integrate_impl(params, start_radius, max_arclength, config);
    if (!arc.event) {
        throw NumericFailure("no_event", "max_arclength " + fmt(max_arclength) +
                                             " reached before the symmetry-line crossing");
    }
    return arc;
}

double shooting_residual(const GeneratingParams& params, double r0, const SolverConfig& config) {
    OpenArc arc = integrate_impl(params, r0, config.max_arclength, config);
    if (!arc.event) {
        throw NumericFailure("no_event", "no symmetry-line crossing for r0 = " + fmt(r0));
    }
    return residual_from_event(params, *arc.event);
}

PlanarCurve shoot_closed_curve(const GeneratingParams& params,
                               std::pair<double, double> r0_bracket, const SolverConfig& config) {
    validate_params(params);
    if (params.a == 0.0 && params.b <= 0.0) {
        throw InvalidArgument("shoot_closed_curve: a = 0 requires b > 0");
    }
    double lo = r0_bracket.first, hi = r0_bracket.second;
    if (!(lo > 0.0) || !(hi > lo)) {
        throw InvalidArgument("shoot_closed_curve: bracket must satisfy 0 < lo < hi");
    }

    auto try_residual = [&](double r0) -> std::optional<double> {
        try {
            return shooting_residual(params, r0, config);
        } catch (const NumericFailure&) {
            return std::nullopt;
        }
    };

    // Bracketed root finding: bisection to isolate, secant to polish.
    auto refine = [&](double a, double fa, double b, double fb) {
        for (int it = 0; it < 40 && (b - a) > 1e-13 * (1.0 + b); ++it) {
            const double mid = 0.5 * (a + b);
            const auto fm = try_residual(mid);
            if (!fm) {
                // Event lost inside the bracket; shrink toward the endpoint
                // that still produces one.
                b = mid;
                continue;
            }
            if (std::abs(*fm) <= config.shoot_tol) return mid;
            if ((fa < 0.0) != (*fm < 0.0)) {
                b = mid;
                fb = *fm;
            } else {
                a = mid;
                fa = *fm;
            }
        }
        double x0 = a, f0 = fa, x1 = b, f1 = fb;
        for (int it = 0; it < 12; ++it) {
            if (std::abs(f1) <= config.shoot_tol) return x1;
            const double denom = f1 - f0;
            if (denom == 0.0) break;
            double x2 = x1 - f1 * (x1 - x0) / denom;
            if (!(x2 > a && x2 < b)) x2 = 0.5 * (a + b);
            const auto f2 = try_residual(x2);
            if (!f2) break;
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = *f2;
        }
        if (std::abs(f1) > config.shoot_tol) {
            throw NumericFailure("no_convergence",
                                 "shooting residual stalled at " + fmt(f1) + " for r0 = " + fmt(x1));
        }
        return x1;
    };

    const auto f_lo = try_residual(lo);
    const auto f_hi = try_residual(hi);
    if (f_lo && std::abs(*f_lo) <= config.shoot_tol) return assemble_closed_curve(params, lo, config);
    if (f_hi && std::abs(*f_hi) <= config.shoot_tol) return assemble_closed_curve(params, hi, config);
    if (f_lo && f_hi && (*f_lo < 0.0) != (*f_hi < 0.0)) {
        return assemble_closed_curve(params, refine(lo, *f_lo, hi, *f_hi), config);
    }

    // Endpoints do not straddle a root; scan the interior before giving up.
    const int scan_points = 33;
    double prev_r = lo;
    std::optional<double> prev_f = f_lo;
    for (int j = 1; j < scan_points; ++j) {
        const double r = lo + (hi - lo) * j / (scan_points - 1);
        const auto f = try_residual(r);
        if (f && std::abs(*f) <= config.shoot_tol) return assemble_closed_curve(params, r, config);
        if (f && prev_f && (*prev_f < 0.0) != (*f < 0.0)) {
            return assemble_closed_curve(params, refine(prev_r, *prev_f, r, *f), config);
        }
        prev_r = r;
        prev_f = f;
    }
    throw NumericFailure("no_sign_change", "no root of the shooting residual in [" + fmt(lo) +
                                               ", " + fmt(hi) + "]");
}

CurveScalars curve_scalars(const PlanarCurve& curve) {
    const int n = curve.n_samples;
    if (n < 3 || static_cast<int>(curve.points.size()) != n) {
        throw InvalidArgument("curve_scalars: malformed curve");
    }
    const double h = curve.length / n;
    double moment_sum = 0.0, kappa2_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tx = std::cos(curve.theta[i]);
        const double ty = std::sin(curve.theta[i]);
        moment_sum += curve.points[i].x * ty - curve.points[i].y * tx;
        kappa2_sum += curve.kappa[i] * curve.kappa[i];
    }
    CurveScalars scalars;
    scalars.length = curve.length;
    scalars.moment = h * moment_sum;
    scalars.area = 0.5 * scalars.moment;
    scalars.total_sq_curvature = h * kappa2_sum;
    if (!(scalars.area > 0.0)) {
        throw InvariantViolation("orientation",
                                 "signed area " + fmt(scalars.area) + " is not positive");
    }
    if (scalars.length * scalars.length < 4.0 * M_PI * scalars.area * (1.0 - 1e-12)) {
        throw InvariantViolation("isoperimetric", "length^2 < 4 pi area");
    }
    return scalars;
}

std::vector<double> q_profile(const PlanarCurve& curve) {
    const int n = curve.n_samples;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) {
        const double tx = std::cos(curve.theta[i]);
        const double ty = std::sin(curve.theta[i]);
        const double wedge = curve.points[i].x * ty - curve.points[i].y * tx;
        q[i] = curve.kappa[i] * curve.kappa[i] + 2.0 * curve.params.a * wedge;
    }
    return q;
}

std::vector<double> rotation_field(const PlanarCurve& curve) {
    const int n = curve.n_samples;
    std::vector<double> psi(n);
    for (int i = 0; i < n; ++i) {
        psi[i] = curve.points[i].x * std::cos(curve.theta[i]) +
                 curve.points[i].y * std::sin(curve.theta[i]);
    }
    return psi;
}

std::pair<std::vector<double>, std::vector<double>> tangent_components(const PlanarCurve& curve) {
    const int n = curve.n_samples;
    std::vector<double> g1(n), g2(n);
    for (int i = 0; i < n; ++i) {
        g1[i] = std::cos(curve.theta[i]);
        g2[i] = std::sin(curve.theta[i]);
    }
    return {std::move(g1), std::move(g2)};
}

void validate_curve(const PlanarCurve& curve, const SolverConfig& config) {
    validate_params(curve.params);
    const int n = curve.n_samples;
    if (n < 16 || static_cast<int>(curve.points.size()) != n ||
        static_cast<int>(curve.theta.size()) != n || static_cast<int>(curve.kappa.size()) != n) {
        throw InvalidArgument("PlanarCurve: inconsistent sample arrays");
    }
    if (!(curve.length > 0.0)) throw InvalidArgument("PlanarCurve: length must be positive");

    const double h = curve.length / n;

    // Uniform arc-length spacing, wrapping around the seam (this is also the
    // sample-level closure check).
    const double spacing_tol = 10.0 * h * h;
    for (int i = 0; i < n; ++i) {
        const Vec2 d = curve.points[(i + 1) % n] - curve.points[i];
        const double chord = std::hypot(d.x, d.y);
        if (std::abs(chord - h) > spacing_tol * h) {
            throw InvariantViolation("arc_spacing", "chord " + fmt(chord) + " vs step " + fmt(h) +
                                                        " at sample " + std::to_string(i));
        }
    }

    if (!(curve.closure_residual <= config.closure_tol)) {
        throw InvariantViolation("closure", "residual " + fmt(curve.closure_residual) +
                                                " exceeds " + fmt(config.closure_tol));
    }

    // CCW orientation via the polygon shoelace sum.
    double shoelace = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& p = curve.points[i];
        const Vec2& q = curve.points[(i + 1) % n];
        shoelace += cross(p, q);
    }
    if (!(shoelace > 0.0)) {
        throw InvariantViolation("orientation", "signed area is not positive (clockwise curve?)");
    }

    double worst_law = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r2 = dot(curve.points[i], curve.points[i]);
        worst_law = std::max(worst_law,
                             std::abs(curve.kappa[i] - (curve.params.a * r2 + curve.params.b)));
    }
    if (worst_law > config.law_tol) {
        throw InvariantViolation("curvature_law", "max residual " + fmt(worst_law) + " exceeds " +
                                                      fmt(config.law_tol));
    }

    // Turning number: theta(L) - theta(0), the last interval closed with a
    // trapezoid step of the stored curvature.
    const double turn = (curve.theta[n - 1] - curve.theta[0]) +
                        0.5 * h * (curve.kappa[n - 1] + curve.kappa[0]);
    const double expected = 2.0 * M_PI * curve.params.rotation_index;
    if (std::abs(turn - expected) > 1e-6) {
        throw InvariantViolation("turning", "total turning " + fmt(turn) + " vs expected " +
                                                fmt(expected));
    }
}

bool is_embedded(const PlanarCurve& curve) {
    const int n = curve.n_samples;
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        return cross(b - a, c - a);
    };
    auto segments_cross = [&](int i, int j) {
        const Vec2 a = curve.points[i], b = curve.points[(i + 1) % n];
        const Vec2 c = curve.points[j], d = curve.points[(j + 1) % n];
        const double o1 = orient(a, b, c), o2 = orient(a, b, d);
        const double o3 = orient(c, d, a), o4 = orient(c, d, b);
        return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent across the seam
            if (segments_cross(i, j)) return false;
        }
    }
    return true;
}

}  // namespace cylstab
