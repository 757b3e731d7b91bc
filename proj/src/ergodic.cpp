#include "pcone/ergodic.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcone/errors.hpp"

namespace pcone {

namespace {

constexpr double kRhoMinRel = 1e-9;
constexpr double kLayerRel = 1e-5;
constexpr double kUnit = std::numeric_limits<double>::epsilon();

}  // namespace

void PenalizedSpec::validate() const {
    CapDomain dom(d, alpha);
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    if (grid_size < 64) throw DomainError("grid_size must be >= 64");
    if (!(newton_tol > 0.0)) throw DomainError("newton_tol must be positive");
    if (max_newton < 1) throw DomainError("max_newton must be >= 1");
    if (!std::isfinite(boundary_value)) throw DomainError("boundary value must be finite");
}

double dirichlet_layer_cut(double alpha) { return kLayerRel * alpha; }

ErgodicGrid make_ergodic_grid(double alpha, int grid_size) {
    if (grid_size < 64) throw DomainError("grid_size must be >= 64");
    ErgodicGrid g;
    g.alpha = alpha;
    g.c = std::min(0.05, alpha / 4.0);
    g.rho_min = kRhoMinRel * alpha;
    const double Xi = alpha - g.rho_min + g.c * std::log(alpha / g.rho_min);
    g.dxi = Xi / (grid_size + 0.5);
    const int total = grid_size + 2;
    g.rho.resize(total);
    g.theta.resize(total);
    g.xt.resize(total);
    g.xtt.resize(total);
    const double s_lo = std::log(g.rho_min) - 2.0, s_hi = std::log(2.0 * alpha + 1.0);
    for (int k = 0; k < total; ++k) {
        double r;
        if (k == total - 1) {
            r = g.rho_min;
        } else {
            double xi = (k - 0.5) * g.dxi;
            // solve alpha - e^s + c (ln alpha - s) = xi for s = ln rho
            auto f = [&](double s) {
                double e = std::exp(s);
                return std::make_pair(alpha - e + g.c * (std::log(alpha) - s) - xi, -e - g.c);
            };
            double guess = xi > alpha ? std::log(alpha) - (xi - alpha) / g.c : std::log(std::max(alpha - xi, 1e-300));
            guess = std::clamp(guess, s_lo, s_hi);
            boost::uintmax_t it = 200;
            r = std::exp(boost::math::tools::newton_raphson_iterate(f, guess, s_lo, s_hi, 52, it));
        }
        g.rho[k] = r;
        g.theta[k] = alpha - r;
        g.xt[k] = 1.0 + g.c / r;
        g.xtt[k] = g.c / (r * r);
    }
    const double tg = g.theta[0], t0 = g.theta[1], t1 = g.theta[2];
    g.ghost_weight = (tg * tg - t0 * t0) / (t1 * t1 - t0 * t0);
    return g;
}

double rho_tilde(double alpha, double rho) {
    // cos(alpha - rho) - cos(alpha) written without cancellation
    return 2.0 * std::sin(alpha - 0.5 * rho) * std::sin(0.5 * rho) / std::sin(alpha);
}

double barrier_upper_value(double rt, double gamma, const BarrierParams& b, double eps) {
    return -std::log(rt) / gamma - b.M0 * rt + b.M1 / eps;
}

double barrier_lower_value(double rt, double gamma, const BarrierParams& b, double eps) {
    return -std::log(rt) / gamma + b.M0 * rt - b.M1 / eps;
}

namespace {

// Operator applied to -ln(rt)/gamma - sigma*M0*rt, without the M1/eps constant,
// expanded so that the 1/rho^2 parts cancel analytically.
double barrier_operator(double p, int d, double alpha, double gamma, double M0, double sigma,
                        double eps, double theta, double rho) {
    const double rt = rho_tilde(alpha, rho);
    const double sa = std::sin(alpha);
    const double r1 = -std::sin(theta) / sa, r2 = -std::cos(theta) / sa;
    const double s = 1.0 + sigma * gamma * M0 * rt;
    const double up = -s * r1 / (gamma * rt);
    const double upp = r1 * r1 / (gamma * rt * rt) - s * r2 / (gamma * rt);
    const double q2 = up * up;
    double F = (p - 1.0) * r1 * r1 * sigma * M0 * (2.0 + sigma * gamma * M0 * rt) / rt +
               (p - 1.0) * s * r2 / (gamma * rt) + (p - 2.0) * upp / (1.0 + q2) -
               (d - 1.0) * std::cos(theta) * s / (sa * gamma * rt);
    F += eps * (-std::log(rt) / gamma - sigma * M0 * rt);
    return F;
}

}  // namespace

BarrierParams default_barrier_params(double p, int d, double alpha, double gamma,
                                     const std::vector<double>& eps_values, const ErgodicGrid& grid) {
    BarrierParams b;
    // sup |Laplacian of rho_tilde| = d / sin(alpha)
    b.M0 = (1.0 + d / (std::sin(alpha) * gamma)) * std::max(1.0, 1.0 / (2.0 * (p - 1.0)));
    double e_lo = *std::min_element(eps_values.begin(), eps_values.end());
    double e_hi = *std::max_element(eps_values.begin(), eps_values.end());
    double need = 0.0;
    for (std::size_t k = 1; k < grid.rho.size(); ++k) {
        for (double e : {e_lo, e_hi}) {
            double fu = barrier_operator(p, d, alpha, gamma, b.M0, 1.0, e, grid.theta[k], grid.rho[k]);
            double fl = barrier_operator(p, d, alpha, gamma, b.M0, -1.0, e, grid.theta[k], grid.rho[k]);
            need = std::max({need, -fu, fl});
        }
    }
    // the lower barrier must not exceed the boundary value at the boundary node
    double rt_min = rho_tilde(alpha, grid.rho_min);
    need = std::max(need, 0.5 * e_hi * (-std::log(rt_min) / gamma + b.M0 * rt_min));
    b.M1 = std::max(1.0, 1.25 * need);
    b.Mstar = 1.0;
    return b;
}

namespace {

VProfile blank_profile(const PenalizedSpec& spec, const ErgodicGrid& g) {
    VProfile vp;
    const int N = g.unknowns();
    vp.theta.assign(g.theta.begin() + 1, g.theta.end());
    vp.rho.assign(g.rho.begin() + 1, g.rho.end());
    vp.v.assign(N + 1, 0.0);
    vp.dv.assign(N + 1, 0.0);
    vp.p = spec.p;
    vp.d = spec.d;
    vp.alpha = spec.alpha;
    vp.eps = spec.eps;
    vp.gamma = spec.gamma;
    vp.boundary_value = spec.boundary_value;
    return vp;
}

// fills dv and v_center from v (unknowns plus boundary node)
void finish_profile(VProfile& vp, const ErgodicGrid& g) {
    const int N = g.unknowns();
    const double gw = g.ghost_weight;
    auto node = [&](int k) {  // grid index k -> value
        if (k == 0) return vp.v[0] + (vp.v[1] - vp.v[0]) * gw;
        return vp.v[k - 1];
    };
    for (int k = 1; k <= N; ++k) {
        double vx = (node(k + 1) - node(k - 1)) / (2.0 * g.dxi);
        vp.dv[k - 1] = vx * g.xt[k];
    }
    double xi_N = (N - 0.5) * g.dxi;
    double Xi = g.alpha - g.rho_min + g.c * std::log(g.alpha / g.rho_min);
    vp.dv[N] = (vp.v[N] - vp.v[N - 1]) / (Xi - xi_N) * g.xt[N + 1];
    const double t0 = g.theta[1], t1 = g.theta[2];
    vp.v_center = vp.v[0] - (vp.v[1] - vp.v[0]) * t0 * t0 / (t1 * t1 - t0 * t0);
}

struct Context {
    const PenalizedSpec& s;
    const ErgodicGrid& g;
    std::vector<double> cot;  // (d-1) cot(theta) at grid nodes
};

struct System {
    std::vector<double> R, lo, di, up, q, a;
};

void assemble(const Context& ctx, const std::vector<double>& v, const std::vector<char>& flags,
              System& sys) {
    const auto& s = ctx.s;
    const auto& g = ctx.g;
    const int N = g.unknowns();
    const double dx = g.dxi, gw = g.ghost_weight;
    const double n = s.boundary_value;
    const double kq = s.gamma * (s.p - 1.0);
    sys.R.resize(N);
    sys.lo.assign(N, 0.0);
    sys.di.assign(N, 0.0);
    sys.up.assign(N, 0.0);
    sys.q.resize(N);
    sys.a.resize(N);
    for (int j = 0; j < N; ++j) {
        const int k = j + 1;
        const double vc = v[j];
        const double vm = j == 0 ? v[0] + (v[1] - v[0]) * gw : v[j - 1];
        const double vp = j == N - 1 ? n : v[j + 1];
        const double xt = g.xt[k], xtt = g.xtt[k];
        const double vx = (vp - vm) / (2.0 * dx);
        const double vxx = (vp - 2.0 * vc + vm) / (dx * dx);
        const double q = vx * xt;
        const double vtt = vxx * xt * xt + vx * xtt;
        const double q2 = q * q;
        const double a = (1.0 + (s.p - 1.0) * q2) / (1.0 + q2);
        const double da = (s.p - 2.0) * 2.0 * q / ((1.0 + q2) * (1.0 + q2));
        double Q = q;
        double dQm = -xt / (2.0 * dx), dQc = 0.0, dQp = xt / (2.0 * dx);
        if (flags[j]) {
            if (q > 0.0) {
                Q = (vc - vm) / dx * xt;
                dQm = -xt / dx;
                dQc = xt / dx;
                dQp = 0.0;
            } else {
                Q = (vp - vc) / dx * xt;
                dQm = 0.0;
                dQc = -xt / dx;
                dQp = xt / dx;
            }
        }
        const double inv = 1.0 / (xt * xt);
        const double cot = ctx.cot[k];
        sys.R[j] = (-a * vtt - cot * q + kq * Q * Q + s.eps * vc) * inv;
        sys.q[j] = q;
        sys.a[j] = a;
        const double dqm = -xt / (2.0 * dx), dqp = xt / (2.0 * dx);
        const double dvm = xt * xt / (dx * dx) - xtt / (2.0 * dx);
        const double dvc = -2.0 * xt * xt / (dx * dx);
        const double dvp = xt * xt / (dx * dx) + xtt / (2.0 * dx);
        const double Dm = (-da * dqm * vtt - a * dvm - cot * dqm + 2.0 * kq * Q * dQm) * inv;
        const double Dc = (-a * dvc + 2.0 * kq * Q * dQc + s.eps) * inv;
        const double Dp = (-da * dqp * vtt - a * dvp - cot * dqp + 2.0 * kq * Q * dQp) * inv;
        sys.di[j] = Dc;
        if (j == 0) {
            // ghost value is (1-gw) v0 + gw v1
            sys.di[j] += Dm * (1.0 - gw);
            sys.up[j] = Dp + Dm * gw;
        } else {
            sys.lo[j] = Dm;
            if (j < N - 1) sys.up[j] = Dp;
        }
    }
}

bool thomas(const System& sys, double shift, std::vector<double>& x) {
    const int N = static_cast<int>(sys.di.size());
    std::vector<double> c(N), dd(N);
    double b0 = sys.di[0] + shift;
    if (b0 == 0.0) return false;
    c[0] = sys.up[0] / b0;
    dd[0] = -sys.R[0] / b0;
    for (int j = 1; j < N; ++j) {
        double m = sys.di[j] + shift - sys.lo[j] * c[j - 1];
        if (m == 0.0 || !std::isfinite(m)) return false;
        c[j] = sys.up[j] / m;
        dd[j] = (-sys.R[j] - sys.lo[j] * dd[j - 1]) / m;
    }
    x.resize(N);
    x[N - 1] = dd[N - 1];
    for (int j = N - 2; j >= 0; --j) x[j] = dd[j] - c[j] * x[j + 1];
    for (double e : x)
        if (!std::isfinite(e)) return false;
    return true;
}

double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double e : x) m = std::max(m, std::abs(e));
    return m;
}

double sum_sq(const std::vector<double>& x) {
    double m = 0.0;
    for (double e : x) m += e * e;
    return m;
}

bool all_finite(const std::vector<double>& x) {
    for (double e : x)
        if (!std::isfinite(e)) return false;
    return true;
}

// cell Peclet number of the gradient term above one selects the upwind slope
bool peclet_flag(const Context& ctx, const System& sys, int j) {
    const double kq = ctx.s.gamma * (ctx.s.p - 1.0);
    return kq * ctx.g.dxi * std::abs(sys.q[j]) / (sys.a[j] * ctx.g.xt[j + 1]) > 1.0;
}

double rounding_floor(const Context& ctx, const std::vector<double>& v) {
    double scale = std::max(max_abs(v), std::abs(ctx.s.boundary_value));
    return 64.0 * kUnit * scale / (ctx.g.dxi * ctx.g.dxi);
}

struct LevelOutcome {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

// damped Newton; grow=true adds upwind flags as the iterate develops steep slopes
LevelOutcome newton(const Context& ctx, std::vector<double>& v, std::vector<char>& flags, bool grow,
                    int max_it) {
    const int N = ctx.g.unknowns();
    System sys, trial;
    std::vector<double> step, vn(N);
    LevelOutcome out;
    for (int it = 0; it < max_it; ++it) {
        assemble(ctx, v, flags, sys);
        if (grow) {
            bool changed = false;
            for (int j = 0; j < N; ++j)
                if (!flags[j] && peclet_flag(ctx, sys, j)) flags[j] = changed = true;
            if (changed) assemble(ctx, v, flags, sys);
        }
        out.residual = max_abs(sys.R);
        out.iterations = it;
        if (!all_finite(sys.R)) return out;
        if (out.residual < std::max(ctx.s.newton_tol, rounding_floor(ctx, v))) {
            out.converged = true;
            return out;
        }
        if (!thomas(sys, 0.0, step)) return out;
        const double f0 = sum_sq(sys.R);
        double t = 1.0;
        bool accepted = false;
        while (t >= 0x1p-20) {
            for (int j = 0; j < N; ++j) vn[j] = v[j] + t * step[j];
            assemble(ctx, vn, flags, trial);
            if (all_finite(trial.R) && sum_sq(trial.R) <= (1.0 - 1e-4 * t) * f0) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // a Newton correction at rounding level means the residual cannot drop further
            if (max_abs(step) <= 1e-11 * std::max(1.0, max_abs(v))) out.converged = true;
            return out;
        }
        v.swap(vn);
    }
    assemble(ctx, v, flags, sys);
    out.residual = max_abs(sys.R);
    out.iterations = max_it;
    out.converged = out.residual < std::max(ctx.s.newton_tol, rounding_floor(ctx, v));
    return out;
}

// pseudo-transient continuation: (J + I/dt) dv = -R with dt grown by residual ratio
LevelOutcome pseudo_transient(const Context& ctx, std::vector<double>& v, std::vector<char>& flags,
                              int max_it) {
    const int N = ctx.g.unknowns();
    System sys, trial;
    std::vector<double> step, vn(N);
    LevelOutcome out;
    double dt = 1e-2, prev = -1.0;
    for (int it = 0; it < max_it; ++it) {
        assemble(ctx, v, flags, sys);
        bool changed = false;
        for (int j = 0; j < N; ++j)
            if (!flags[j] && peclet_flag(ctx, sys, j)) flags[j] = changed = true;
        if (changed) assemble(ctx, v, flags, sys);
        out.residual = max_abs(sys.R);
        out.iterations = it;
        if (out.residual < std::max(ctx.s.newton_tol, rounding_floor(ctx, v))) {
            out.converged = true;
            return out;
        }
        double rms = std::sqrt(sum_sq(sys.R) / N);
        if (prev > 0.0) dt = std::min(dt * prev / rms, 1e14);
        prev = rms;
        if (!thomas(sys, 1.0 / dt, step)) {
            dt *= 0.1;
            prev = -1.0;
            continue;
        }
        for (int j = 0; j < N; ++j) vn[j] = v[j] + step[j];
        assemble(ctx, vn, flags, trial);
        if (!all_finite(trial.R)) {
            dt *= 0.1;
            prev = -1.0;
            continue;
        }
        v.swap(vn);
    }
    return out;
}

Context make_context(const PenalizedSpec& spec, const ErgodicGrid& g) {
    Context ctx{spec, g, {}};
    ctx.cot.resize(g.rho.size());
    for (std::size_t k = 0; k < g.rho.size(); ++k)
        ctx.cot[k] = spec.d == 1 ? 0.0 : (spec.d - 1) * std::cos(g.theta[k]) / std::sin(g.theta[k]);
    return ctx;
}

VProfile solve_on_grid(const PenalizedSpec& spec, const ErgodicGrid& g, const VProfile& init) {
    const int N = g.unknowns();
    if (static_cast<int>(init.v.size()) != N + 1)
        throw DomainError("initial profile does not match the grid (" + std::to_string(init.v.size()) +
                          " values for " + std::to_string(N + 1) + " nodes)");
    Context ctx = make_context(spec, g);
    std::vector<double> v(init.v.begin(), init.v.begin() + N);
    if (!all_finite(v)) throw DomainError("initial profile is not finite");
    std::vector<char> flags(N, 0);
    LevelOutcome o = newton(ctx, v, flags, true, spec.max_newton);
    int total = o.iterations;
    bool continuation = false;
    if (!o.converged) {
        continuation = true;
        v.assign(init.v.begin(), init.v.begin() + N);
        std::fill(flags.begin(), flags.end(), 0);
        o = pseudo_transient(ctx, v, flags, 20 * spec.max_newton);
        total += o.iterations;
    }
    if (!o.converged) {
        std::ostringstream os;
        os << "penalized solve did not converge (eps=" << spec.eps << ", residual " << o.residual
           << " after " << total << " iterations)";
        throw ConvergenceError(os.str(), {o.residual});
    }
    // settle the upwind set on the converged state so it does not depend on the path
    System sys;
    for (int round = 0; round < 10; ++round) {
        assemble(ctx, v, flags, sys);
        std::vector<char> fresh(N, 0);
        for (int j = 0; j < N; ++j) fresh[j] = peclet_flag(ctx, sys, j);
        if (fresh == flags) break;
        flags = fresh;
        LevelOutcome r = newton(ctx, v, flags, false, spec.max_newton);
        total += r.iterations;
        if (!r.converged) {
            std::ostringstream os;
            os << "penalized solve lost convergence while settling upwind nodes (eps=" << spec.eps
               << ", residual " << r.residual << ")";
            throw ConvergenceError(os.str(), {r.residual});
        }
    }
    assemble(ctx, v, flags, sys);
    VProfile vp = blank_profile(spec, g);
    std::copy(v.begin(), v.end(), vp.v.begin());
    vp.v[N] = spec.boundary_value;
    finish_profile(vp, g);
    vp.residual = max_abs(sys.R);
    vp.iterations = total;
    vp.converged = true;
    vp.continuation_used = continuation;
    vp.upwind_nodes = static_cast<int>(std::count(flags.begin(), flags.end(), 1));
    return vp;
}

std::pair<VProfile, VProfile> barriers_on_grid(const PenalizedSpec& spec, const ErgodicGrid& g,
                                               const BarrierParams& b) {
    VProfile up = blank_profile(spec, g), lo = blank_profile(spec, g);
    const double sa = std::sin(spec.alpha);
    for (std::size_t i = 0; i < up.v.size(); ++i) {
        double rt = rho_tilde(spec.alpha, up.rho[i]);
        double r1 = -std::sin(up.theta[i]) / sa;
        up.v[i] = barrier_upper_value(rt, spec.gamma, b, spec.eps);
        lo.v[i] = barrier_lower_value(rt, spec.gamma, b, spec.eps);
        up.dv[i] = (-1.0 / (spec.gamma * rt) - b.M0) * r1;
        lo.dv[i] = (-1.0 / (spec.gamma * rt) + b.M0) * r1;
    }
    const double t0 = g.theta[1], t1 = g.theta[2];
    for (VProfile* vp : {&up, &lo})
        vp->v_center = vp->v[0] - (vp->v[1] - vp->v[0]) * t0 * t0 / (t1 * t1 - t0 * t0);
    return {up, lo};
}

double sandwich_violation(const VProfile& v, const VProfile& up, const VProfile& lo) {
    const double cut = dirichlet_layer_cut(v.alpha);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.v.size(); ++i) {
        if (v.rho[i] < cut) continue;
        worst = std::max({worst, v.v[i] - up.v[i], lo.v[i] - v.v[i]});
    }
    return worst;
}

}  // namespace

std::pair<VProfile, VProfile> barrier_profiles(const PenalizedSpec& spec, const BarrierParams& params) {
    spec.validate();
    ErgodicGrid g = make_ergodic_grid(spec.alpha, spec.grid_size);
    return barriers_on_grid(spec, g, params);
}

VProfile constant_profile(const PenalizedSpec& spec, double value) {
    spec.validate();
    ErgodicGrid g = make_ergodic_grid(spec.alpha, spec.grid_size);
    VProfile vp = blank_profile(spec, g);
    std::fill(vp.v.begin(), vp.v.end(), value);
    vp.v.back() = spec.boundary_value;
    finish_profile(vp, g);
    return vp;
}

double penalized_residual(const PenalizedSpec& spec, const VProfile& vp) {
    spec.validate();
    ErgodicGrid g = make_ergodic_grid(spec.alpha, spec.grid_size);
    Context ctx = make_context(spec, g);
    const int N = g.unknowns();
    if (static_cast<int>(vp.v.size()) != N + 1) throw DomainError("profile does not match the grid");
    std::vector<double> v(vp.v.begin(), vp.v.begin() + N);
    std::vector<char> flags(N, 0);
    System sys;
    assemble(ctx, v, flags, sys);
    for (int j = 0; j < N; ++j) flags[j] = peclet_flag(ctx, sys, j);
    assemble(ctx, v, flags, sys);
    return max_abs(sys.R);
}

VProfile solve_penalized(const PenalizedSpec& spec, const VProfile& init) {
    spec.validate();
    ErgodicGrid g = make_ergodic_grid(spec.alpha, spec.grid_size);
    return solve_on_grid(spec, g, init);
}

double interpolate_v(const VProfile& v, double theta) {
    const auto& th = v.theta;
    if (theta <= th.front()) return v.v.front();
    if (theta >= th.back()) return v.v.back();
    auto it = std::upper_bound(th.begin(), th.end(), theta);
    std::size_t k = static_cast<std::size_t>(it - th.begin());
    double t = (theta - th[k - 1]) / (th[k] - th[k - 1]);
    return v.v[k - 1] + t * (v.v[k] - v.v[k - 1]);
}

ErgodicResult ergodic_constant(double p, int d, double alpha, double gamma, const ErgodicOptions& opt) {
    CapDomain dom(d, alpha);
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (opt.grid_size < 64) throw DomainError("grid_size must be >= 64");
    if (opt.schedule.empty()) throw DomainError("eps schedule is empty");
    for (std::size_t k = 0; k < opt.schedule.size(); ++k) {
        if (!(opt.schedule[k] > 0.0)) throw DomainError("eps values must be positive");
        if (k > 0 && !(opt.schedule[k] < opt.schedule[k - 1]))
            throw DomainError("eps schedule must be strictly decreasing");
    }
    ErgodicGrid g = make_ergodic_grid(alpha, opt.grid_size);
    ErgodicResult res;
    res.params = default_barrier_params(p, d, alpha, gamma, opt.schedule, g);
    if (opt.M1 > 0.0) res.params.M1 = opt.M1;
    res.theta_ref = 0.5 * alpha;

    VProfile v;
    double prev_eps = 0.0, prev_val = 0.0;
    int total_it = 0;
    for (std::size_t k = 0; k < opt.schedule.size(); ++k) {
        PenalizedSpec spec;
        spec.p = p;
        spec.d = d;
        spec.alpha = alpha;
        spec.gamma = gamma;
        spec.eps = opt.schedule[k];
        spec.boundary_value = opt.n_scale * res.params.M1 / spec.eps;
        spec.grid_size = opt.grid_size;
        spec.newton_tol = opt.newton_tol;
        spec.max_newton = opt.max_newton;
        VProfile init;
        if (k == 0) {
            if (opt.init == InitKind::Barrier) {
                init = barriers_on_grid(spec, g, res.params).first;
            } else {
                init = blank_profile(spec, g);
                std::fill(init.v.begin(), init.v.end(), opt.constant_value);
            }
        } else {
            // predictor: eps v is nearly constant in the interior
            init = v;
            double shift = prev_val * (1.0 / spec.eps - 1.0 / prev_eps);
            for (double& e : init.v) e += shift;
        }
        init.v.back() = spec.boundary_value;
        v = solve_on_grid(spec, g, init);
        auto bars = barriers_on_grid(spec, g, res.params);
        v.barrier_violation = sandwich_violation(v, bars.first, bars.second);
        double val = spec.eps * interpolate_v(v, res.theta_ref);
        res.levels.push_back({spec.eps, spec.boundary_value, val, v.iterations, v.residual, v.continuation_used});
        total_it += v.iterations;
        prev_eps = spec.eps;
        prev_val = val;
    }
    const auto& L = res.levels;
    double lambda = L.back().eps_v_ref;
    if (L.size() >= 2) {
        const auto& a = L[L.size() - 2];
        const auto& b = L.back();
        lambda = (a.eps * b.eps_v_ref - b.eps * a.eps_v_ref) / (a.eps - b.eps);
    }
    std::vector<double> hist;
    for (const auto& l : L) hist.push_back(l.eps_v_ref);
    // the increments of eps v must contract along the schedule
    for (std::size_t k = 2; k < L.size(); ++k) {
        double d1 = std::abs(L[k - 1].eps_v_ref - L[k - 2].eps_v_ref);
        double d2 = std::abs(L[k].eps_v_ref - L[k - 1].eps_v_ref);
        if (d2 > 2.0 * d1 + 1e-8 * std::max(1.0, std::abs(lambda)))
            throw ConvergenceError("eps*v(theta_ref) is not settling along the schedule", hist);
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ConvergenceError("extrapolated ergodic constant is not positive", hist);
    res.v = v;
    double vref = interpolate_v(v, res.theta_ref);
    res.w.resize(v.v.size());
    for (std::size_t i = 0; i < v.v.size(); ++i) res.w[i] = v.v[i] - vref;
    res.point.gamma = gamma;
    res.point.lambda = lambda;
    res.point.backend = Backend::Ergodic;
    res.point.residual = v.residual;
    res.point.eps = L.back().eps;
    res.point.grid_size = opt.grid_size;
    res.point.iterations = total_it;
    res.params.Mstar = check_change_of_variables(v, lambda).Mstar;
    return res;
}

Profile ergodic_profile(const VProfile& v) {
    const double cut = dirichlet_layer_cut(v.alpha);
    Profile pr;
    pr.theta.push_back(0.0);
    pr.omega.push_back(1.0);
    pr.domega.push_back(0.0);
    for (std::size_t i = 0; i + 1 < v.v.size(); ++i) {
        if (v.rho[i] < cut) break;
        double om = std::exp(-v.gamma * (v.v[i] - v.v_center));
        pr.theta.push_back(v.theta[i]);
        pr.omega.push_back(om);
        pr.domega.push_back(-v.gamma * v.dv[i] * om);
    }
    // omega vanishes linearly in rho at the boundary; close with the secant slope
    double last_rho = v.alpha - pr.theta.back();
    pr.domega.push_back(-pr.omega.back() / last_rho);
    pr.theta.push_back(v.alpha);
    pr.omega.push_back(0.0);
    return pr;
}

ChangeOfVariablesCheck check_change_of_variables(const VProfile& v, double lambda, double scale) {
    ChangeOfVariablesCheck out;
    const std::size_t n = v.v.size();
    const double cut = dirichlet_layer_cut(v.alpha);
    const double vmin = *std::min_element(v.v.begin(), v.v.end());
    const double g = v.gamma, g2 = g * g, m = 0.5 * (v.p - 2.0), K = g * lambda;
    // the flux difference cancels to ~1e-8 relative near the boundary, so the flux is carried in
    // extended precision; otherwise pow rounding would swamp the residual for non-integer p
    using ld = long double;
    std::vector<ld> flux(n), src(n);
    for (std::size_t i = 0; i < n; ++i) {
        ld om = static_cast<ld>(scale) * std::exp(-static_cast<ld>(g) * (static_cast<ld>(v.v[i]) - vmin));
        ld dom = -static_cast<ld>(g) * v.dv[i] * om;
        ld w = v.d == 1 ? 1.0L : std::pow(std::sin(static_cast<ld>(v.theta[i])), static_cast<ld>(v.d - 1));
        ld W = static_cast<ld>(g2) * om * om + dom * dom;
        ld Wm = W > 0.0L ? std::pow(W, static_cast<ld>(m)) : 0.0L;
        flux[i] = w * Wm * dom;
        src[i] = static_cast<ld>(K) * w * Wm * om;
    }
    // nodes are uniform in xi; d/dtheta = xi_theta d/dxi with xi_theta = 1 + c/rho
    const double c = std::min(0.05, v.alpha / 4.0);
    double r = 0.0;
    for (std::size_t i = 1; i + 2 < n; ++i) {
        if (v.rho[i + 1] < cut) break;
        ld xi_step = (static_cast<ld>(v.rho[i - 1]) - v.rho[i + 1]) + c * std::log(static_cast<ld>(v.rho[i - 1]) / v.rho[i + 1]);
        ld dF = (flux[i + 1] - flux[i - 1]) / xi_step * (1.0L + c / static_cast<ld>(v.rho[i]));
        r = std::max(r, static_cast<double>(std::abs(-dF - src[i])));
    }
    out.residual = r;
    // sandwich exp(-gamma M*) <= omega / rho_tilde <= exp(gamma M*), omega normalised at the centre
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (v.rho[i] < cut) break;
        double omc = std::exp(-g * (v.v[i] - v.v_center));
        worst = std::max(worst, std::abs(std::log(omc / rho_tilde(v.alpha, v.rho[i]))));
    }
    out.Mstar = worst / g;
    out.boundary_omega = std::exp(-g * (v.v.back() - vmin));
    return out;
}

GradientBound check_gradient_bound(const VProfile& v) {
    GradientBound gb;
    const double cut = dirichlet_layer_cut(v.alpha);
    const double half = 0.5 * v.alpha;
    const std::size_t n = v.v.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (v.rho[i] < cut || v.rho[i] >= half) continue;
        gb.L0 = std::max(gb.L0, std::abs(v.dv[i]) * rho_tilde(v.alpha, v.rho[i]));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (v.rho[i] < half) continue;
        double rt = rho_tilde(v.alpha, v.rho[i]);
        gb.L1 = std::max(gb.L1, std::abs(v.dv[i]) - gb.L0 / rt);
    }
    gb.near_ratio_min = std::numeric_limits<double>::infinity();
    gb.near_ratio_max = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (v.rho[i] < cut || v.rho[i] > 1e-2 * v.alpha) continue;
        double r = v.gamma * std::abs(v.dv[i]) * rho_tilde(v.alpha, v.rho[i]);
        gb.near_ratio_min = std::min(gb.near_ratio_min, r);
        gb.near_ratio_max = std::max(gb.near_ratio_max, r);
    }
    gb.finite = std::isfinite(gb.L0) && std::isfinite(gb.L1);
    gb.near_boundary_ok = gb.near_ratio_min >= 0.8 && gb.near_ratio_max <= 1.2;
    return gb;
}

}  // namespace pcone

namespace pcone {

double sandwich_constant(const Profile& prof, double gamma) {
    const double alpha = prof.theta.back();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < prof.size(); ++i) {
        double rt = rho_tilde(alpha, alpha - prof.theta[i]);
        if (!(prof.omega[i] > 0.0) || !(rt > 0.0)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(std::log(prof.omega[i] / rt)));
    }
    return worst / gamma;
}

}  // namespace pcone
