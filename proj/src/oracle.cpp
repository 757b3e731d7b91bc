#include "pcone/oracle.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "pcone/errors.hpp"

namespace pcone {

namespace {

// omega'' = -(d-1) cot(theta) omega' - lambda omega, with the regular limit at theta = 0
struct Linear {
    int d;
    double lambda;
    std::array<double, 2> operator()(double t, const std::array<double, 2>& y) const {
        if (t == 0.0) return {y[1], -lambda * y[0] / d};
        return {y[1], -(d - 1) * std::cos(t) / std::sin(t) * y[1] - lambda * y[0]};
    }
};

// integrates on the uniform grid; returns the index of the first node with omega <= 0, or -1
int march(int d, double lambda, double alpha, int n, std::vector<std::array<double, 2>>* out) {
    Linear f{d, lambda};
    const double h = alpha / n;
    std::array<double, 2> y{1.0, 0.0};
    if (out) out->assign(1, y);
    for (int i = 0; i < n; ++i) {
        double t = i * h;
        auto k1 = f(t, y);
        std::array<double, 2> yt{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
        auto k2 = f(t + 0.5 * h, yt);
        yt = {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
        auto k3 = f(t + 0.5 * h, yt);
        yt = {y[0] + h * k3[0], y[1] + h * k3[1]};
        auto k4 = f(t + h, yt);
        for (int j = 0; j < 2; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (out) out->push_back(y);
        if (y[0] <= 0.0 && !out) return i + 1;
    }
    if (out) {
        for (int i = 1; i <= n; ++i)
            if ((*out)[i][0] <= 0.0) return i;
    }
    return -1;
}

}  // namespace

EigenResult p2_cap_eigenvalue(int d, double alpha, int grid_size) {
    CapDomain dom(d, alpha);
    if (grid_size < 8) throw DomainError("grid_size must be >= 8");
    // the first zero moves inward as lambda grows
    auto has_zero = [&](double lam) { return march(d, lam, alpha, grid_size, nullptr) >= 0; };
    double lo = 0.0, hi = 1.0;
    int k = 0;
    while (!has_zero(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++k > 200) throw RangeError("no eigenvalue bracket found");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (has_zero(mid))
            hi = mid;
        else
            lo = mid;
    }
    EigenResult r;
    r.lambda1 = hi;
    r.grid_size = grid_size;
    std::vector<std::array<double, 2>> ys;
    march(d, hi, alpha, grid_size, &ys);
    r.eigenfunction.theta.resize(grid_size + 1);
    r.eigenfunction.omega.resize(grid_size + 1);
    r.eigenfunction.domega.resize(grid_size + 1);
    for (int i = 0; i <= grid_size; ++i) {
        r.eigenfunction.theta[i] = i == grid_size ? alpha : i * (alpha / grid_size);
        r.eigenfunction.omega[i] = ys[i][0];
        r.eigenfunction.domega[i] = ys[i][1];
    }
    r.eigenfunction.omega.back() = 0.0;
    return r;
}

std::pair<double, double> p2_exponents(int N, double lambda1) {
    if (N < 2) throw DomainError("N must be >= 2");
    if (!(lambda1 > 0.0)) throw DomainError("lambda1 must be positive");
    double s = std::sqrt((N - 2.0) * (N - 2.0) + 4.0 * lambda1);
    return {0.5 * ((N - 2.0) + s), 0.5 * (s - (N - 2.0))};
}

}  // namespace pcone
