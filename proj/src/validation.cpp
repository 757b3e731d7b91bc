#include "pcone/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pcone/cap_ode.hpp"
#include "pcone/ergodic.hpp"
#include "pcone/exponent.hpp"
#include "pcone/oracle.hpp"
#include "pcone/sector.hpp"

namespace pcone {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <class... T>
std::string fmtn(const char* f, T... a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double cos_distance(const Profile& pr) {
    double e = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) e = std::max(e, std::abs(pr.omega[i] - std::cos(pr.theta[i])));
    return e;
}

double oscillation(const std::vector<double>& a, const std::vector<double>& b) {
    double hi = -INFINITY, lo = INFINITY;
    for (std::size_t i = 0; i < a.size(); ++i) {
        hi = std::max(hi, a[i] - b[i]);
        lo = std::min(lo, a[i] - b[i]);
    }
    return hi - lo;
}

std::vector<double> geometric(double a, double b, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = a * std::pow(b / a, static_cast<double>(k) / (n - 1));
    return g;
}

void c1(CriterionResult& r) {
    r.title = "sector p=2 closed form";
    double worst = 0.0;
    for (Branch br : {Branch::Singular, Branch::Regular})
        for (double g : {0.5, 1.0, 2.0, 4.0}) {
            SectorSolveSpec s;
            s.p = 2.0;
            s.branch = br;
            worst = std::max(worst, std::abs(opening_of_gamma(s, g) - pi / g));
        }
    r.details.push_back(fmt("max |A(gamma) - pi/gamma| = %.3e (limit 1e-8)", worst));
    r.pass = worst <= 1e-8;
}

void c2(CriterionResult& r) {
    r.title = "hemisphere regular anchor";
    double gerr = 0.0, perr = 0.0;
    for (double p : {1.5, 2.0, 3.0, 4.0})
        for (int d : {1, 2, 3}) {
            ExponentResult a = exponent_by_shooting(p, d, pi / 2, Branch::Regular, 1e-6);
            ExponentResult b = solve_exponent(p, d, pi / 2, Branch::Regular, Backend::Shooting, 1e-6);
            gerr = std::max({gerr, std::abs(a.gamma - 1.0), std::abs(b.gamma - 1.0)});
            perr = std::max({perr, cos_distance(a.profile), cos_distance(b.profile)});
        }
    r.details.push_back(fmt("max |gamma - 1| = %.3e (limit 1e-6)", gerr));
    r.details.push_back(fmt("max sup|omega - cos| = %.3e (limit 1e-5)", perr));
    r.pass = gerr <= 1e-6 && perr <= 1e-5;
}

void c3(CriterionResult& r) {
    r.title = "p=2 oracle equivalence";
    double worst = 0.0;
    for (double alpha : {pi / 3, pi / 2, 2 * pi / 3})
        for (int d : {2, 3}) {
            EigenResult eig = p2_cap_eigenvalue(d, alpha, 4000);
            auto [bs, br] = p2_exponents(d + 1, eig.lambda1);
            double gs = exponent_by_shooting(2.0, d, alpha, Branch::Singular, 1e-7).gamma;
            double gr = exponent_by_shooting(2.0, d, alpha, Branch::Regular, 1e-7).gamma;
            worst = std::max({worst, std::abs(gs - bs), std::abs(gr - br)});
        }
    r.details.push_back(fmt("max |gamma_shooting - gamma_oracle| = %.3e (limit 1e-5)", worst));
    r.pass = worst <= 1e-5;
}

void c4(CriterionResult& r) {
    r.title = "cross-backend lambda agreement";
    double worst = 0.0;
    ErgodicOptions eo;
    eo.grid_size = 4000;
    for (double p : {1.5, 3.0})
        for (double alpha : {pi / 4, pi / 2})
            for (double g : {0.5, 1.0, 2.0}) {
                double ls = lambda_by_shooting(p, 2, alpha, g).lambda;
                double le = ergodic_constant(p, 2, alpha, g, eo).point.lambda;
                worst = std::max(worst, std::abs(ls - le));
                r.details.push_back(fmtn("p=%g alpha=%.4f gamma=%g: shooting %.8f ergodic %.8f", p, alpha, g, ls, le));
            }
    r.details.push_back(fmt("max |lambda_ergodic - lambda_shooting| = %.3e (limit 5e-3)", worst));
    r.pass = worst <= 5e-3;
}

void c5(CriterionResult& r) {
    r.title = "hemisphere ergodic identity";
    double worst = 0.0;
    for (double p : {1.5, 3.0})
        for (int d : {2, 3}) {
            double le = ergodic_constant(p, d, pi / 2, 1.0).point.lambda;
            worst = std::max(worst, std::abs(le - d));
        }
    r.details.push_back(fmt("max |lambda - d| = %.3e (limit 5e-3)", worst));
    r.pass = worst <= 5e-3;
}

void c6(CriterionResult& r) {
    r.title = "monotonicity and blow-up of lambda";
    bool ok = true;
    struct Case {
        double p;
        int d;
        double alpha;
        Backend b;
    };
    ExponentOptions opt;
    opt.ergodic.grid_size = 2000;
    for (Case c : {Case{1.5, 2, pi / 4, Backend::Shooting}, Case{2.0, 2, pi / 2, Backend::Shooting},
                   Case{3.0, 2, pi / 4, Backend::Shooting}, Case{4.0, 3, 2 * pi / 3, Backend::Shooting},
                   Case{3.0, 2, pi / 4, Backend::Ergodic}}) {
        LambdaCurve cv = lambda_curve(c.p, c.d, c.alpha, geometric(0.05, 5.0, 20), c.b, opt);
        double l005 = lambda_point(c.p, c.d, c.alpha, 0.05, c.b, opt).lambda;
        double l1 = lambda_point(c.p, c.d, c.alpha, 1.0, c.b, opt).lambda;
        bool here = cv.strictly_decreasing && cv.all_positive && !cv.has_gaps && l005 > 10.0 * l1;
        ok = ok && here;
        r.details.push_back(fmtn("p=%g d=%d alpha=%.4f %s: decreasing=%d lambda(0.05)/lambda(1)=%.3f", c.p, c.d,
                                 c.alpha, to_string(c.b), static_cast<int>(cv.strictly_decreasing), l005 / l1));
    }
    r.pass = ok;
}

void c7(CriterionResult& r) {
    r.title = "homogeneity of degree p-1";
    double worst = 0.0;
    bool same = true;
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const int d = 2;
        const double alpha = pi / 3;
        ExponentResult base = exponent_by_shooting(p, d, alpha, Branch::Singular, 1e-6);
        ShootSpec s;
        s.p = p;
        s.d = d;
        s.gamma = base.gamma;
        s.K = branch_K(p, d, Branch::Singular, base.gamma);
        Profile coarse = shoot_profile(s, alpha, 41);
        double r0 = divergence_residual(coarse, p, d, s.gamma, s.K);
        for (double t : {0.5, 2.0}) {
            Profile sc = coarse;
            for (auto& e : sc.omega) e *= t;
            for (auto& e : sc.domega) e *= t;
            double rt = divergence_residual(sc, p, d, s.gamma, s.K);
            worst = std::max(worst, std::abs(rt / (std::pow(t, p - 1.0) * r0) - 1.0));
            ShootingOptions so;
            so.amplitude = t;
            ExponentResult scaled = exponent_by_shooting(p, d, alpha, Branch::Singular, 1e-6, so);
            same = same && scaled.gamma == base.gamma;
        }
        ErgodicOptions eo;
        eo.grid_size = 2000;
        ErgodicResult er = ergodic_constant(p, d, alpha, 1.0, eo);
        double e0 = check_change_of_variables(er.v, er.point.lambda, 1.0).residual;
        for (double t : {0.5, 2.0}) {
            double et = check_change_of_variables(er.v, er.point.lambda, t).residual;
            worst = std::max(worst, std::abs(et / (std::pow(t, p - 1.0) * e0) - 1.0));
        }
    }
    r.details.push_back(std::string("solved gamma identical under amplitude scaling: ") + (same ? "yes" : "no"));
    r.details.push_back(fmt("max relative deviation from t^(p-1) scaling = %.3e (limit 1e-9)", worst));
    r.pass = worst <= 1e-9 && same;
}

void c8(CriterionResult& r) {
    r.title = "uniqueness up to an additive constant";
    double worst = 0.0;
    struct Case {
        double p, alpha, g;
        int d;
    };
    for (Case c : {Case{3.0, pi / 4, 1.0, 2}, Case{1.5, pi / 2, 0.5, 2}, Case{1.5, pi / 4, 2.0, 3},
                   Case{3.0, 2 * pi / 3, 1.0, 3}}) {
        ErgodicOptions a, b;
        a.grid_size = b.grid_size = 2000;
        a.init = InitKind::Barrier;
        b.init = InitKind::Constant;
        ErgodicResult ra = ergodic_constant(c.p, c.d, c.alpha, c.g, a);
        ErgodicResult rb = ergodic_constant(c.p, c.d, c.alpha, c.g, b);
        double osc = oscillation(ra.w, rb.w);
        worst = std::max(worst, osc);
        r.details.push_back(fmtn("p=%g d=%d alpha=%.4f gamma=%g: osc(w_barrier - w_constant) = %.3e", c.p, c.d,
                                 c.alpha, c.g, osc));
    }
    r.details.push_back(fmt("max oscillation = %.3e (limit 1e-4)", worst));
    r.pass = worst <= 1e-4;
}

void c9(CriterionResult& r) {
    r.title = "gradient estimate shape";
    bool ok = true;
    struct Case {
        double p, alpha, g;
        int d;
    };
    for (Case c : {Case{2.0, pi / 2, 1.0, 2}, Case{1.5, pi / 4, 0.5, 2}, Case{3.0, pi / 4, 2.0, 2},
                   Case{3.0, 2 * pi / 3, 1.0, 3}}) {
        ErgodicOptions a, b;
        a.grid_size = 2000;
        b.grid_size = 4000;
        GradientBound ga = check_gradient_bound(ergodic_constant(c.p, c.d, c.alpha, c.g, a).v);
        GradientBound gb = check_gradient_bound(ergodic_constant(c.p, c.d, c.alpha, c.g, b).v);
        double drift = std::abs(gb.L0 / ga.L0 - 1.0);
        bool here = ga.finite && gb.finite && gb.near_boundary_ok && drift <= 0.1;
        ok = ok && here;
        r.details.push_back(fmtn("p=%g d=%d alpha=%.4f gamma=%g: L0=%.5f L1=%.5f gamma|v'|rho in [%.4f, %.4f], "
                                 "L0 drift under doubling %.2e",
                                 c.p, c.d, c.alpha, c.g, gb.L0, gb.L1, gb.near_ratio_min, gb.near_ratio_max, drift));
    }
    r.pass = ok;
}

void c10(CriterionResult& r) {
    r.title = "boundary flux and profile sandwich";
    bool ok = true;
    int count = 0;
    double max_flux = -INFINITY, max_mstar = 0.0;
    auto accept = [&](const Profile& pr, double gamma) {
        ++count;
        double m = sandwich_constant(pr, gamma);
        max_flux = std::max(max_flux, pr.domega.back());
        max_mstar = std::max(max_mstar, m);
        ok = ok && pr.domega.back() < 0.0 && std::isfinite(m);
    };
    for (double p : {1.5, 2.0, 3.0, 4.0})
        for (int d : {2, 3})
            for (double alpha : {pi / 4, pi / 2, 2 * pi / 3})
                for (Branch br : {Branch::Singular, Branch::Regular}) {
                    ExponentResult e = exponent_by_shooting(p, d, alpha, br, 1e-6);
                    accept(e.profile, e.gamma);
                }
    ExponentOptions eo;
    eo.ergodic.grid_size = 2000;
    for (double p : {1.5, 3.0})
        for (Branch br : {Branch::Singular, Branch::Regular}) {
            ExponentResult e = solve_exponent(p, 2, pi / 3, br, Backend::Ergodic, 0.0, eo);
            accept(e.profile, e.gamma);
            ErgodicResult er = ergodic_constant(p, 2, pi / 3, e.gamma, eo.ergodic);
            double m = check_change_of_variables(er.v, er.point.lambda).Mstar;
            max_mstar = std::max(max_mstar, m);
            ok = ok && std::isfinite(m);
        }
    r.details.push_back(fmtn("%d profiles: max boundary derivative %.4e (must be < 0), max fitted M* %.4f", count,
                             max_flux, max_mstar));
    r.pass = ok;
}

void c11(CriterionResult& r) {
    r.title = "arc caps match sector quadrature";
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0})
        for (double alpha : {pi / 4, pi / 2})
            for (Branch br : {Branch::Singular, Branch::Regular}) {
                double gc = exponent_by_shooting(p, 1, alpha, br, 1e-8).gamma;
                SectorSolveSpec s;
                s.p = p;
                s.branch = br;
                double gs = gamma_of_opening(s, 2.0 * alpha);
                worst = std::max(worst, std::abs(gc - gs));
            }
    r.details.push_back(fmt("max |gamma_cap(d=1) - gamma_sector| = %.3e (limit 1e-6)", worst));
    r.pass = worst <= 1e-6;
}

struct Entry {
    void (*fn)(CriterionResult&);
    double time_limit;  // seconds; 0 means no stated limit
};

const Entry kCriteria[] = {
    {c1, 1.0}, {c2, 10.0}, {c3, 30.0}, {c4, 180.0}, {c5, 0.0}, {c6, 0.0},
    {c7, 0.0}, {c8, 0.0},  {c9, 0.0},  {c10, 0.0},  {c11, 0.0},
};

}  // namespace

int acceptance_criteria_count() { return static_cast<int>(std::size(kCriteria)); }

CriterionResult run_criterion(int id) {
    CriterionResult r;
    r.id = id;
    if (id < 1 || id > acceptance_criteria_count()) {
        r.title = "unknown criterion";
        return r;
    }
    const Entry& e = kCriteria[id - 1];
    auto t0 = std::chrono::steady_clock::now();
    try {
        e.fn(r);
    } catch (const std::exception& ex) {
        r.pass = false;
        r.details.push_back(std::string("exception: ") + ex.what());
    }
    r.seconds = elapsed(t0);
    r.time_limit = e.time_limit;
    if (e.time_limit > 0.0 && r.seconds > e.time_limit) r.pass = false;
    return r;
}

std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_done) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= acceptance_criteria_count(); ++id) {
        out.push_back(run_criterion(id));
        if (on_done) on_done(out.back());
    }
    return out;
}

std::string summary_line(const CriterionResult& r) {
    std::string s = (r.pass ? "PASS" : "FAIL");
    s += " criterion " + std::to_string(r.id) + " (" + r.title + ")";
    if (!r.details.empty()) s += ": " + r.details.back();
    if (r.time_limit > 0.0)
        s += fmtn(" [%.2f s, limit %.0f s]", r.seconds, r.time_limit);
    else
        s += fmt(" [%.2f s]", r.seconds);
    return s;
}

}  // namespace pcone
