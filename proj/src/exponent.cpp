#include "pcone/exponent.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "pcone/errors.hpp"
#include "pcone/sector.hpp"

namespace pcone {

double default_tolerance(Backend b) { return b == Backend::Shooting ? 1e-6 : 1e-3; }

LambdaPoint lambda_point(double p, int d, double alpha, double gamma, Backend backend,
                         const ExponentOptions& opt) {
    if (backend == Backend::Shooting) return lambda_by_shooting(p, d, alpha, gamma, opt.lambda_tol, opt.shooting);
    return ergodic_constant(p, d, alpha, gamma, opt.ergodic).point;
}

LambdaCurve lambda_curve(double p, int d, double alpha, const std::vector<double>& gammas,
                         Backend backend, const ExponentOptions& opt) {
    CapDomain dom(d, alpha);
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        if (!(gammas[k] > 0.0)) throw DomainError("gamma grid must be positive");
        if (k > 0 && !(gammas[k] > gammas[k - 1])) throw DomainError("gamma grid must be increasing");
    }
    LambdaCurve curve;
    curve.points.resize(gammas.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < gammas.size(); k = next++) {
            LambdaPoint& pt = curve.points[k];
            try {
                pt = lambda_point(p, d, alpha, gammas[k], backend, opt);
            } catch (const std::exception& e) {
                pt.gamma = gammas[k];
                pt.backend = backend;
                pt.valid = false;
                pt.lambda = std::nan("");
                pt.error = e.what();
            }
        }
    };
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t nthreads = opt.threads > 0 ? static_cast<std::size_t>(opt.threads) : hw;
    nthreads = std::min<std::size_t>(nthreads, std::max<std::size_t>(1, gammas.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    curve.all_positive = true;
    curve.strictly_decreasing = true;
    const LambdaPoint* prev = nullptr;
    for (const auto& pt : curve.points) {
        if (!pt.valid) {
            curve.has_gaps = true;
            continue;
        }
        if (!(pt.lambda > 0.0)) curve.all_positive = false;
        if (prev && !(pt.lambda < prev->lambda)) curve.strictly_decreasing = false;
        prev = &pt;
    }
    return curve;
}

namespace {

ExponentResult solve_exponent_ergodic(double p, int d, double alpha, Branch branch, double tol,
                                      const ExponentOptions& opt) {
    const double shift = exponent_shift(p, d, branch);
    std::vector<ScanRow> scan;
    auto g_of = [&](double gamma, ErgodicResult* keep) {
        ErgodicResult r = ergodic_constant(p, d, alpha, gamma, opt.ergodic);
        double g = r.point.lambda - gamma * (p - 1.0) - shift;
        scan.push_back({gamma, g, true});
        if (keep) *keep = std::move(r);
        return g;
    };
    // g decreases from +inf to -inf; walk geometrically from the start value
    double lo = opt.gamma_start, hi = opt.gamma_start;
    double g0 = g_of(lo, nullptr);
    int evals = 1;
    if (g0 > 0.0) {
        double gh = g0;
        while (gh > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > opt.gamma_max) throw RangeError("no sign change of the exponent relation up to gamma_max", scan);
            gh = g_of(hi, nullptr);
            ++evals;
        }
    } else {
        double gl = g0;
        while (gl <= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (lo < opt.gamma_min) throw RangeError("no sign change of the exponent relation down to gamma_min", scan);
            gl = g_of(lo, nullptr);
            ++evals;
        }
    }
    int iters = 0;
    while (hi - lo > tol && iters < 100) {
        double mid = 0.5 * (lo + hi);
        double gm = g_of(mid, nullptr);
        ++iters;
        if (gm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    ExponentResult res;
    res.branch = branch;
    res.backend = Backend::Ergodic;
    res.gamma = 0.5 * (lo + hi);
    ErgodicResult er;
    double gfin = g_of(res.gamma, &er);
    res.lambda = er.point.lambda;
    res.g_residual = std::abs(gfin);
    res.bisection_iterations = iters;
    res.profile = ergodic_profile(er.v);
    res.residual = check_change_of_variables(er.v, er.point.lambda).residual;
    res.boundary_flux = res.profile.domega.back();
    return res;
}

}  // namespace

ExponentResult solve_exponent(double p, int d, double alpha, Branch branch, Backend backend,
                              double tol, const ExponentOptions& opt) {
    CapDomain dom(d, alpha);
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    if (tol <= 0.0) tol = default_tolerance(backend);
    if (backend == Backend::Ergodic) return solve_exponent_ergodic(p, d, alpha, branch, tol, opt);
    ShootingOptions so = opt.shooting;
    so.gamma_min = opt.gamma_min;
    so.gamma_max = opt.gamma_max;
    ExponentResult res = exponent_by_shooting(p, d, alpha, branch, tol, so);
    // independent check of the exponent relation through the fixed-gamma eigenvalue
    LambdaPoint lp = lambda_by_shooting(p, d, alpha, res.gamma, opt.lambda_tol, so);
    res.g_residual = std::abs(lp.lambda - res.gamma * (p - 1.0) - exponent_shift(p, d, branch));
    return res;
}

ConsistencyReport consistency_report(double p, int d, double alpha, const ExponentOptions& opt) {
    ConsistencyReport rep;
    rep.p = p;
    rep.d = d;
    rep.alpha = alpha;
    auto add = [&](std::string name, std::string la, double a, std::string lb, double b, double tolr,
                   std::string note = {}) {
        ReportRow r{std::move(name), std::move(la), std::move(lb), a, b, std::abs(a - b), tolr, false, std::move(note)};
        r.pass = std::isfinite(r.delta) && r.delta <= tolr;
        rep.rows.push_back(std::move(r));
    };
    auto failed = [&](std::string name, const std::exception& e) {
        ReportRow r;
        r.name = std::move(name);
        r.a = r.b = r.delta = std::nan("");
        r.note = e.what();
        rep.rows.push_back(std::move(r));
    };
    const double cross_tol = 5e-3;
    for (Branch br : {Branch::Singular, Branch::Regular}) {
        std::string tag = to_string(br);
        try {
            ExponentResult s = solve_exponent(p, d, alpha, br, Backend::Shooting, 0.0, opt);
            ExponentResult e = solve_exponent(p, d, alpha, br, Backend::Ergodic, 0.0, opt);
            add(tag + " gamma", "shooting", s.gamma, "ergodic", e.gamma, cross_tol);
            LambdaPoint ls = lambda_point(p, d, alpha, s.gamma, Backend::Shooting, opt);
            LambdaPoint le = lambda_point(p, d, alpha, s.gamma, Backend::Ergodic, opt);
            add(tag + " lambda at shooting gamma", "shooting", ls.lambda, "ergodic", le.lambda, cross_tol);
            if (br == Branch::Regular && std::abs(alpha - std::numbers::pi / 2) < 1e-12)
                add("regular gamma on the hemisphere", "shooting", s.gamma, "exact", 1.0, default_tolerance(Backend::Shooting));
            if (!(s.boundary_flux < 0.0) || !(e.boundary_flux < 0.0))
                add(tag + " boundary flux sign", "shooting", s.boundary_flux, "ergodic", e.boundary_flux, -1.0,
                    "boundary derivative must be negative");
        } catch (const std::exception& ex) {
            failed(tag + " cross-backend", ex);
        }
        try {
            ShootingOptions so = opt.shooting;
            ExponentResult c1 = exponent_by_shooting(p, 1, alpha, br, 1e-8, so);
            SectorSolveSpec ss;
            ss.p = p;
            ss.branch = br;
            double gs = gamma_of_opening(ss, 2.0 * alpha);
            add(tag + " arc vs sector", "cap d=1", c1.gamma, "sector", gs, 1e-6);
        } catch (const std::exception& ex) {
            failed(tag + " arc vs sector", ex);
        }
    }
    rep.all_pass = std::all_of(rep.rows.begin(), rep.rows.end(), [](const ReportRow& r) { return r.pass; });
    const double pi = std::numbers::pi;
    AlphaSweep& sw = rep.alpha_sweep;
    sw.alphas = {pi / 6, pi / 3, pi / 2, 2 * pi / 3};
    try {
        for (double a : sw.alphas) sw.gammas.push_back(solve_exponent(p, d, a, Branch::Singular, Backend::Shooting, 0.0, opt).gamma);
        sw.decreasing = std::is_sorted(sw.gammas.rbegin(), sw.gammas.rend()) &&
                        std::adjacent_find(sw.gammas.begin(), sw.gammas.end()) == sw.gammas.end();
    } catch (const std::exception& ex) {
        sw.error = ex.what();
    }
    return rep;
}

}  // namespace pcone
