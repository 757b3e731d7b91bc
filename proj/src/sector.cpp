#include "pcone/sector.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "dopri5.hpp"
#include "pcone/cap_ode.hpp"
#include "pcone/errors.hpp"

namespace pcone {

void SectorSolveSpec::validate() const {
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    if (!(quad_tol > 0.0)) throw DomainError("quad_tol must be positive");
    if (max_subdiv < 1) throw DomainError("max_subdiv must be >= 1");
}

double branch_constant(double p, Branch branch, double gamma) {
    double shift = branch == Branch::Singular ? p - 2.0 : 2.0 - p;
    return gamma * (gamma * (p - 1.0) + shift);
}

double sector_gamma_threshold(double p, Branch branch) {
    double shift = branch == Branch::Singular ? p - 2.0 : 2.0 - p;
    return shift < 0.0 ? -shift / (p - 1.0) : 0.0;
}

namespace {

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

// Adaptive G7-K15 bisection on the worst interval; at most max_subdiv intervals.
template <class F>
double adaptive_gk15(F f, double a, double b, double tol, int max_subdiv) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto piece = [&](double lo, double hi) {
        double err = 0.0;
        double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
        return Piece{lo, hi, v, err};
    };
    std::priority_queue<Piece> heap;
    Piece first = piece(a, b);
    heap.push(first);
    double total = first.value, total_err = first.error;
    while (total_err > tol) {
        if (static_cast<int>(heap.size()) >= max_subdiv)
            throw NumericalError("quadrature did not reach tolerance within " +
                                 std::to_string(max_subdiv) + " subintervals (error estimate " +
                                 std::to_string(total_err) + ")");
        Piece worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        Piece l = piece(worst.a, mid), r = piece(mid, worst.b);
        total += l.value + r.value - worst.value;
        total_err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to avoid drift from incremental updates
    double s = 0.0;
    while (!heap.empty()) {
        s += heap.top().value;
        heap.pop();
    }
    return s;
}

}  // namespace

double opening_of_gamma(const SectorSolveSpec& spec, double gamma) {
    spec.validate();
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    const double p = spec.p;
    const double c = branch_constant(p, spec.branch, gamma);
    if (!(c > 0.0))
        throw NoEigenfunctionError("branch constant " + std::to_string(c) +
                                   " is not positive at gamma=" + std::to_string(gamma));
    const double g2 = gamma * gamma;
    // phi = tan t turns the integral over the real line into a smooth one on (-pi/2, pi/2)
    auto f = [=](double t) {
        double s = std::sin(t), co = std::cos(t);
        double s2 = s * s, c2 = co * co;
        return ((p - 1.0) * s2 + g2 * c2) / ((g2 * c2 + s2) * ((p - 1.0) * s2 + c * c2));
    };
    // even integrand: integrate half and double, so the half tolerance is quad_tol/2
    return 2.0 * adaptive_gk15(f, 0.0, std::numbers::pi / 2, 0.5 * spec.quad_tol, spec.max_subdiv);
}

double gamma_of_opening(const SectorSolveSpec& spec, double A) {
    spec.validate();
    if (!(A > 0.0 && A < 2.0 * std::numbers::pi))
        throw DomainError("opening must lie in (0, 2pi)");
    const double thr = sector_gamma_threshold(spec.p, spec.branch);
    std::vector<ScanRow> scan;
    auto eval = [&](double g) {
        double v = opening_of_gamma(spec, g);
        scan.push_back({g, v, std::isfinite(v)});
        return v;
    };
    double lo = thr + 1.0, hi = lo;
    double a_lo = eval(lo);
    if (a_lo > A) {
        for (int k = 0; k < 200 && a_lo > A; ++k) {
            lo = hi;
            hi = thr + 2.0 * (hi - thr);
            a_lo = eval(hi);
        }
        if (a_lo > A) throw RangeError("opening not reached for large gamma", scan);
        // now A(lo) > A >= A(hi)
    } else {
        hi = lo;
        for (int k = 0; k < 200 && a_lo <= A; ++k) {
            hi = lo;
            lo = thr + 0.5 * (lo - thr);
            if (lo - thr <= 1e-300) break;
            try {
                a_lo = eval(lo);
            } catch (const NumericalError&) {
                break;
            }
        }
        if (a_lo <= A) throw RangeError("opening not reached near the branch threshold", scan);
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double am = opening_of_gamma(spec, mid);
        if (am > A)
            lo = mid;
        else
            hi = mid;
        if (std::abs(am - A) <= 1e-3 * spec.quad_tol) break;
    }
    return mid;
}

Profile sector_profile(const SectorSolveSpec& spec, double gamma, int n_points) {
    if (n_points < 3) throw DomainError("n_points must be >= 3");
    const double A = opening_of_gamma(spec, gamma);
    const double c = branch_constant(spec.p, spec.branch, gamma);
    // the arc case of the axisymmetric ODE (d = 1, K = c); autonomous and
    // reversible, so one half is integrated from the midpoint and mirrored
    ShootSpec ss;
    ss.p = spec.p;
    ss.d = 1;
    ss.gamma = gamma;
    ss.K = c;
    const double mid = 0.5 * A;
    const double h = A / (n_points - 1);
    Profile prof;
    prof.theta.resize(n_points);
    prof.omega.resize(n_points);
    prof.domega.resize(n_points);
    std::vector<double> right;
    for (int i = 0; i < n_points; ++i) {
        prof.theta[i] = i == n_points - 1 ? A : i * h;
        if (2 * i >= n_points - 1) right.push_back(std::max(0.0, prof.theta[i] - mid));
    }
    auto vals = integrate_profile_from(ss, 0.0, {1.0, 0.0}, right);
    int first_right = n_points - static_cast<int>(right.size());
    for (std::size_t k = 0; k < right.size(); ++k) {
        int i = first_right + static_cast<int>(k);
        int j = n_points - 1 - i;
        prof.omega[i] = vals[k][0];
        prof.domega[i] = vals[k][1];
        if (j != i) {
            prof.omega[j] = vals[k][0];
            prof.domega[j] = -vals[k][1];
        }
    }
    // the arc endpoints are the zeros of omega
    prof.omega.front() = prof.omega.back() = 0.0;
    prof.center_value = 1.0;
    return prof;
}

double sector_residual(const SectorSolveSpec& spec, double gamma, const Profile& prof) {
    double c = branch_constant(spec.p, spec.branch, gamma);
    return divergence_residual(prof, spec.p, 1, gamma, c);
}

}  // namespace pcone
