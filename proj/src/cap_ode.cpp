#include "pcone/cap_ode.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dopri5.hpp"
#include "pcone/errors.hpp"

namespace pcone {

using detail::Dopri5;
using detail::Dopri5Options;
using detail::State;
using detail::StepStatus;

const char* to_string(Backend b) { return b == Backend::Shooting ? "shooting" : "ergodic"; }

Backend parse_backend(const std::string& s) {
    if (s == "shooting") return Backend::Shooting;
    if (s == "ergodic") return Backend::Ergodic;
    throw DomainError("unknown backend '" + s + "' (expected shooting|ergodic)");
}

double exponent_shift(double p, int d, Branch branch) {
    return branch == Branch::Singular ? p - d - 1.0 : d + 1.0 - p;
}

double branch_K(double p, int d, Branch branch, double gamma) {
    return gamma * (gamma * (p - 1.0) + exponent_shift(p, d, branch));
}

void ShootSpec::validate() const {
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    if (d < 1) throw DomainError("d must be >= 1");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(series_start_theta > 0.0 && series_start_theta <= 1e-3))
        throw DomainError("series_start_theta must lie in (0, 1e-3]");
    if (!(max_theta > series_start_theta && max_theta < std::numbers::pi))
        throw DomainError("max_theta must lie in (series_start_theta, pi)");
    if (!(rk_tol > 0.0)) throw DomainError("rk_tol must be positive");
    if (!(amplitude > 0.0)) throw DomainError("amplitude must be positive");
}

double series_coefficient(const ShootSpec& spec) { return -spec.K / (2.0 * spec.d); }

ShootState series_start(const ShootSpec& spec) {
    spec.validate();
    double a2 = series_coefficient(spec);
    double t = spec.series_start_theta;
    return {t, spec.amplitude * (1.0 + a2 * t * t), spec.amplitude * 2.0 * a2 * t};
}

double omega_second_derivative(const ShootSpec& s, double theta, double w, double dw) {
    const double g2 = s.gamma * s.gamma;
    const double W = g2 * w * w + dw * dw;
    const double den = g2 * w * w + (s.p - 1.0) * dw * dw;
    double num = s.K * W * w + (s.p - 2.0) * g2 * w * dw * dw;
    if (s.d > 1) num += (s.d - 1) * (std::cos(theta) / std::sin(theta)) * W * dw;
    return -num / den;
}

namespace {

struct Rhs {
    const ShootSpec* spec;
    mutable double weight_floor_theta = -1.0;
    State operator()(double t, const State& y) const {
        const double g2 = spec->gamma * spec->gamma;
        double W = g2 * y[0] * y[0] + y[1] * y[1];
        double a2 = spec->amplitude * spec->amplitude;
        if (W < 1e-14 * a2 && weight_floor_theta < 0.0) weight_floor_theta = t;
        return {y[1], omega_second_derivative(*spec, t, y[0], y[1])};
    }
};

Dopri5Options make_options(const ShootSpec& s) {
    Dopri5Options o;
    o.rtol = s.rk_tol;
    o.atol = s.rk_tol * s.amplitude;
    o.h_init = s.series_start_theta;
    o.h_max = 0.05;
    o.h_min = 1e-14;
    return o;
}

[[noreturn]] void integration_failure(StepStatus st, double theta, double weight_theta) {
    std::ostringstream os;
    os << "profile integration failed at theta=" << theta;
    if (st == StepStatus::StepUnderflow) os << " (step-size underflow)";
    if (st == StepStatus::MaxSteps) os << " (step budget exhausted)";
    if (st == StepStatus::NonFinite) os << " (non-finite state)";
    if (weight_theta >= 0.0) os << "; degenerate weight below 1e-14 from theta=" << weight_theta;
    throw NumericalError(os.str());
}

}  // namespace

ShootOutcome shoot_first_zero(const ShootSpec& spec) {
    ShootState s0 = series_start(spec);
    ShootOutcome out;
    // with K <= 0 the flux is nondecreasing from zero, so omega never decreases
    if (spec.K <= 0.0) return out;
    Rhs rhs{&spec};
    Dopri5<Rhs> ode(rhs, make_options(spec));
    double t = s0.theta;
    State y{s0.omega, s0.domega};
    double t0 = t, t1 = t;
    State y0 = y, y1 = y;
    bool crossed = false;
    long steps = 0;
    auto st = ode.integrate(t, y, spec.max_theta, [&](double ta, const State& ya, double tb,
                                                      const State& yb) {
        ++steps;
        if (yb[0] <= 0.0) {
            t0 = ta;
            y0 = ya;
            t1 = tb;
            y1 = yb;
            crossed = true;
            return true;
        }
        return false;
    });
    out.steps = steps;
    if (st != StepStatus::Reached && st != StepStatus::Stopped)
        integration_failure(st, t, ode.rhs().weight_floor_theta);
    if (!crossed) return out;
    if (y1[0] == 0.0) {
        out.theta_star = t1;
        out.domega_at_zero = y1[1];
        return out;
    }
    auto f = [&](double th) { return th == t0 ? y0[0] : ode.step(t0, y0, th - t0)[0]; };
    boost::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a)); };
    auto [lo, hi] = boost::math::tools::toms748_solve(f, t0, t1, y0[0], y1[0], tol, iters);
    double fl = f(lo), fh = f(hi);
    double ts = std::abs(fl) < std::abs(fh) ? lo : hi;
    State ys = ts == t0 ? y0 : ode.step(t0, y0, ts - t0);
    out.theta_star = ts;
    out.omega_at_zero = ys[0];
    out.domega_at_zero = ys[1];
    return out;
}

std::vector<std::array<double, 2>> integrate_profile_from(const ShootSpec& spec, double theta0,
                                                          std::array<double, 2> state,
                                                          const std::vector<double>& thetas) {
    Rhs rhs{&spec};
    auto opt = make_options(spec);
    opt.h_init = 1e-4;
    Dopri5<Rhs> ode(rhs, opt);
    std::vector<std::array<double, 2>> out;
    out.reserve(thetas.size());
    double t = theta0;
    State y = state;
    for (double target : thetas) {
        if (target > t) {
            auto st = ode.integrate(t, y, target, [](double, const State&, double, const State&) {
                return false;
            });
            if (st != StepStatus::Reached) integration_failure(st, t, ode.rhs().weight_floor_theta);
        }
        out.push_back(y);
    }
    return out;
}

Profile shoot_profile(const ShootSpec& spec, double theta_end, int n_points) {
    if (n_points < 3) throw DomainError("n_points must be >= 3");
    ShootState s0 = series_start(spec);
    const double a2 = series_coefficient(spec);
    const double h = theta_end / (n_points - 1);
    Profile prof;
    prof.theta.resize(n_points);
    prof.omega.resize(n_points);
    prof.domega.resize(n_points);
    std::vector<double> later;
    for (int i = 0; i < n_points; ++i) {
        double th = i == n_points - 1 ? theta_end : i * h;
        prof.theta[i] = th;
        if (th <= s0.theta) {
            prof.omega[i] = spec.amplitude * (1.0 + a2 * th * th);
            prof.domega[i] = spec.amplitude * 2.0 * a2 * th;
        } else {
            later.push_back(th);
        }
    }
    auto vals = integrate_profile_from(spec, s0.theta, {s0.omega, s0.domega}, later);
    std::size_t first = n_points - later.size();
    for (std::size_t k = 0; k < later.size(); ++k) {
        prof.omega[first + k] = vals[k][0];
        prof.domega[first + k] = vals[k][1];
    }
    prof.center_value = spec.amplitude;
    return prof;
}

double divergence_residual(const Profile& prof, double p, int d, double gamma, double K) {
    const std::size_t n = prof.size();
    if (n < 5) throw DomainError("residual needs at least 5 nodes");
    const double h = prof.theta[1] - prof.theta[0];
    const double g2 = gamma * gamma;
    const double m = 0.5 * (p - 2.0);
    std::vector<double> flux(n), source(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = d == 1 ? 1.0 : std::pow(std::sin(prof.theta[i]), d - 1);
        double W = g2 * prof.omega[i] * prof.omega[i] + prof.domega[i] * prof.domega[i];
        double Wm = std::pow(W, m);
        flux[i] = w * Wm * prof.domega[i];
        source[i] = K * w * Wm * prof.omega[i];
    }
    double r = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        double dF = (-flux[i + 2] + 8.0 * flux[i + 1] - 8.0 * flux[i - 1] + flux[i - 2]) / (12.0 * h);
        r = std::max(r, std::abs(-dF - source[i]));
    }
    return r;
}

namespace {

ShootSpec make_spec(double p, int d, double gamma, double K, const ShootingOptions& opt) {
    ShootSpec s;
    s.p = p;
    s.d = d;
    s.gamma = gamma;
    s.K = K;
    s.series_start_theta = opt.series_start_theta;
    s.rk_tol = opt.rk_tol;
    s.max_theta = opt.max_theta;
    s.amplitude = opt.amplitude;
    return s;
}

// theta*(x) - alpha, with "no zero" folded in as +infinity
double miss(const ShootOutcome& o, double alpha) {
    return o.theta_star ? *o.theta_star - alpha : std::numeric_limits<double>::infinity();
}

std::string scan_table(const std::vector<ScanRow>& rows) {
    std::ostringstream os;
    for (const auto& r : rows) os << "\n  " << r.x << "  " << (r.finite ? std::to_string(r.value) : "no-zero");
    return os.str();
}

}  // namespace

ExponentResult exponent_by_shooting(double p, int d, double alpha, Branch branch, double tol,
                                    const ShootingOptions& opt) {
    CapDomain dom(d, alpha);
    if (!(tol > 0.0)) throw DomainError("tol must be positive");
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    auto eval = [&](double g) {
        return miss(shoot_first_zero(make_spec(p, d, g, branch_K(p, d, branch, g), opt)), alpha);
    };
    double glo = opt.bracket_lo > 0.0 ? opt.bracket_lo : opt.gamma_min;
    double ghi = opt.bracket_hi > 0.0 ? opt.bracket_hi : opt.gamma_max;
    auto scan_range = [&](double a, double b, int n, std::vector<ScanRow>& rows) {
        for (int k = 0; k < n; ++k) {
            double g = a * std::pow(b / a, static_cast<double>(k) / (n - 1));
            double v = eval(g);
            rows.push_back({g, v, std::isfinite(v)});
        }
    };
    std::vector<ScanRow> rows;
    scan_range(glo, ghi, opt.scan_points, rows);
    // theta* decreases in gamma; check that the scan is monotone where defined
    int crossing = -1, changes = 0;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        double a = rows[k].value, b = rows[k + 1].value;
        if (std::isfinite(a) && std::isfinite(b) && b > a + 1e-12)
            throw RangeError("first-zero map is not monotone in gamma; scan:" + scan_table(rows), rows);
        if (a > 0.0 && b <= 0.0) {
            crossing = static_cast<int>(k);
            ++changes;
        }
    }
    if (changes != 1) throw RangeError("no single crossing of theta*=alpha in the gamma scan:" + scan_table(rows), rows);
    double lo = rows[crossing].x, hi = rows[crossing + 1].x;
    double flo = rows[crossing].value, fhi = rows[crossing + 1].value;
    {
        std::vector<ScanRow> fine;
        scan_range(lo, hi, 10, fine);
        for (std::size_t k = 0; k + 1 < fine.size(); ++k)
            if (fine[k].value > 0.0 && fine[k + 1].value <= 0.0) {
                lo = fine[k].x;
                hi = fine[k + 1].x;
                flo = fine[k].value;
                fhi = fine[k + 1].value;
                break;
            }
    }
    int iters = 0;
    while (hi - lo > tol && iters < 200) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = eval(mid);
        ++iters;
        if (fm > flo || fm < fhi)
            throw NumericalError("first-zero map lost monotonicity during bisection at gamma=" +
                                 std::to_string(mid));
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    ExponentResult res;
    res.branch = branch;
    res.backend = Backend::Shooting;
    res.gamma = 0.5 * (lo + hi);
    res.bisection_iterations = iters;
    double K = branch_K(p, d, branch, res.gamma);
    res.lambda = K / res.gamma;
    ShootSpec spec = make_spec(p, d, res.gamma, K, opt);
    ShootOutcome o = shoot_first_zero(spec);
    if (!o.theta_star) throw NumericalError("profile at the solved gamma has no zero");
    res.profile = shoot_profile(spec, *o.theta_star, opt.profile_points);
    res.profile.omega.back() = 0.0;
    res.residual = divergence_residual(res.profile, p, d, res.gamma, K);
    res.boundary_flux = res.profile.domega.back();
    return res;
}

LambdaPoint lambda_by_shooting(double p, int d, double alpha, double gamma, double tol,
                               const ShootingOptions& opt) {
    CapDomain dom(d, alpha);
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(tol > 0.0)) throw DomainError("tol must be positive");
    auto eval = [&](double K) { return miss(shoot_first_zero(make_spec(p, d, gamma, K, opt)), alpha); };
    std::vector<ScanRow> rows;
    double lo = 1.0, hi = 1.0;
    double f = eval(1.0);
    rows.push_back({1.0, f, std::isfinite(f)});
    double flo = f, fhi = f;
    if (f > 0.0) {
        while (fhi > 0.0) {
            lo = hi;
            flo = fhi;
            hi *= 2.0;
            fhi = eval(hi);
            rows.push_back({hi, fhi, std::isfinite(fhi)});
            if (hi > 1e12) throw RangeError("no eigenvalue bracket found", rows);
        }
    } else {
        while (flo <= 0.0) {
            hi = lo;
            fhi = flo;
            lo *= 0.5;
            flo = eval(lo);
            rows.push_back({lo, flo, std::isfinite(flo)});
            if (lo < 1e-12) throw RangeError("no eigenvalue bracket found", rows);
        }
    }
    int iters = 0;
    double best = hi, fbest = fhi;
    while (iters < 200) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = eval(mid);
        ++iters;
        if (std::abs(fm) < std::abs(fbest)) {
            best = mid;
            fbest = fm;
        }
        if (std::abs(fm) <= tol) break;
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    LambdaPoint pt;
    pt.gamma = gamma;
    pt.lambda = best / gamma;
    pt.backend = Backend::Shooting;
    pt.residual = std::abs(fbest);
    pt.iterations = iters;
    return pt;
}

}  // namespace pcone
