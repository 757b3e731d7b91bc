#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcone/cap_ode.hpp"
#include "pcone/errors.hpp"
#include "pcone/ergodic.hpp"
#include "pcone/oracle.hpp"

using namespace pcone;
constexpr double pi = std::numbers::pi;

static ErgodicOptions grid(int n) {
    ErgodicOptions o;
    o.grid_size = n;
    return o;
}

TEST_CASE("grid layout") {
    auto g = make_ergodic_grid(1.0, 500);
    CHECK(g.unknowns() == 500);
    CHECK(g.rho.size() == 502u);
    CHECK(g.rho.back() == doctest::Approx(g.rho_min));
    for (std::size_t i = 1; i + 1 < g.rho.size(); ++i) CHECK(g.rho[i + 1] < g.rho[i]);
    CHECK(g.theta[1] > 0.0);
}

TEST_CASE("barrier formulas") {
    BarrierParams b{1.0, 1.0, 1.0};
    CHECK(barrier_upper_value(1.0, 1.0, b, 0.1) == doctest::Approx(9.0));
    CHECK(barrier_lower_value(1.0, 1.0, b, 0.1) == doctest::Approx(-9.0));
    CHECK(rho_tilde(pi / 2, 0.3) == doctest::Approx(std::sin(0.3)));
    // ordering where rho_tilde <= M1 / (eps M0)
    for (double rt = 1e-6; rt < 1.0; rt *= 3.0)
        CHECK(barrier_upper_value(rt, 2.0, b, 0.1) >= barrier_lower_value(rt, 2.0, b, 0.1));
    // slope close to 1 / (gamma rho) near the boundary
    double g = 2.0, r = 1e-6, h = 1e-9;
    double slope = (barrier_upper_value(r, g, b, 0.1) - barrier_upper_value(r + h, g, b, 0.1)) / h;
    CHECK(slope * g * r == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("penalized solve imposes the boundary value and stays between barriers") {
    PenalizedSpec s;
    s.p = 3;
    s.d = 2;
    s.alpha = pi / 4;
    s.gamma = 2.0;
    s.eps = 0.1;
    s.grid_size = 800;
    auto g = make_ergodic_grid(s.alpha, s.grid_size);
    auto par = default_barrier_params(s.p, s.d, s.alpha, s.gamma, {0.1}, g);
    s.boundary_value = par.M1 / s.eps;
    auto [up, lo] = barrier_profiles(s, par);
    auto v = solve_penalized(s, up);
    REQUIRE(v.converged);
    CHECK(v.v.back() == s.boundary_value);
    // convergence is judged against the rounding floor of the scaled residual
    CHECK(penalized_residual(s, v) == doctest::Approx(v.residual).epsilon(1e-6));
    CHECK(v.residual <= 1e-6);
    double slack = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        slack = std::max(slack, v.v[i] - up.v[i]);
        slack = std::max(slack, lo.v[i] - v.v[i]);
    }
    CHECK(slack <= 1e-3);
}

TEST_CASE("penalized solutions are ordered in gamma") {
    PenalizedSpec s;
    s.p = 2.5;
    s.d = 2;
    s.alpha = pi / 3;
    s.eps = 0.1;
    s.grid_size = 600;
    s.boundary_value = 20.0;
    s.gamma = 1.0;
    auto v1 = solve_penalized(s, constant_profile(s, 0.0));
    s.gamma = 1.5;
    auto v2 = solve_penalized(s, constant_profile(s, 0.0));
    for (std::size_t i = 0; i + 1 < v1.size(); ++i) CHECK(v1.v[i] >= v2.v[i] - 1e-9);
}

TEST_CASE("hemisphere p = 2 ergodic constant") {
    auto r = ergodic_constant(2, 2, pi / 2, 1.0, grid(2000));
    CHECK(std::abs(r.point.lambda - 2.0) <= 5e-3);
    Profile pr = ergodic_profile(r.v);
    double err = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) err = std::max(err, std::abs(pr.omega[i] - std::cos(pr.theta[i])));
    CHECK(err <= 1e-3);
    auto cv = check_change_of_variables(r.v, r.point.lambda);
    CHECK(cv.residual <= 1e-2);
    CHECK(cv.boundary_omega <= std::exp(-r.v.gamma * (r.v.v.back() - interpolate_v(r.v, r.theta_ref))) * 1.01);
}

TEST_CASE("hemisphere identity for other p and d") {
    for (double p : {1.5, 3.0}) {
        for (int d : {2, 3}) {
            auto r = ergodic_constant(p, d, pi / 2, 1.0, grid(2000));
            CHECK(std::abs(r.point.lambda - d) <= 5e-3);
        }
    }
}

TEST_CASE("change of variables residual is homogeneous of degree p - 1") {
    for (double p : {1.5, 3.0}) {
        auto r = ergodic_constant(p, 2, pi / 3, 1.0, grid(1000));
        double base = check_change_of_variables(r.v, r.point.lambda).residual;
        double twice = check_change_of_variables(r.v, r.point.lambda, 2.0).residual;
        CHECK(std::abs(twice / (std::pow(2.0, p - 1.0) * base) - 1.0) <= 1e-10);
    }
}

TEST_CASE("residual decreases under grid refinement") {
    auto a = ergodic_constant(2, 2, pi / 2, 1.0, grid(500));
    auto b = ergodic_constant(2, 2, pi / 2, 1.0, grid(1000));
    CHECK(check_change_of_variables(b.v, b.point.lambda).residual <
          check_change_of_variables(a.v, a.point.lambda).residual);
}

TEST_CASE("gradient bound") {
    auto a = ergodic_constant(2, 2, pi / 2, 1.0, grid(1000));
    auto gb = check_gradient_bound(a.v);
    CHECK(gb.finite);
    CHECK(gb.near_boundary_ok);
    CHECK(gb.near_ratio_min >= 0.8);
    CHECK(gb.near_ratio_max <= 1.2);
    auto b = ergodic_constant(2, 2, pi / 2, 1.0, grid(2000));
    CHECK(std::abs(check_gradient_bound(b.v).L0 / gb.L0 - 1.0) <= 0.1);
}

TEST_CASE("initialisations agree") {
    ErgodicOptions o = grid(1000);
    auto a = ergodic_constant(3, 2, pi / 4, 2.0, o);
    o.init = InitKind::Constant;
    auto b = ergodic_constant(3, 2, pi / 4, 2.0, o);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < a.w.size(); ++i) {
        double dlt = a.w[i] - b.w[i];
        lo = std::min(lo, dlt);
        hi = std::max(hi, dlt);
    }
    CHECK(hi - lo <= 1e-4);
}

TEST_CASE("ergodic and shooting lambdas agree") {
    auto e = ergodic_constant(3, 2, pi / 4, 2.0, grid(4000));
    auto s = lambda_by_shooting(3, 2, pi / 4, 2.0);
    CHECK(std::abs(e.point.lambda - s.lambda) <= 5e-3);
}

TEST_CASE("ergodic input checks") {
    PenalizedSpec s;
    s.eps = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK_THROWS_AS(ergodic_constant(2, 2, 4.0, 1.0), DomainError);
    ErgodicOptions o;
    o.schedule = {};
    CHECK_THROWS_AS(ergodic_constant(2, 2, 1.0, 1.0, o), DomainError);
}
