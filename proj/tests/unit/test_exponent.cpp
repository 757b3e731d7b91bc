#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pcone/errors.hpp"
#include "pcone/exponent.hpp"
#include "pcone/oracle.hpp"
#include "pcone/sector.hpp"

using namespace pcone;
constexpr double pi = std::numbers::pi;

TEST_CASE("exponent shift and default tolerances") {
    CHECK(exponent_shift(3, 2, Branch::Singular) == doctest::Approx(0.0));
    CHECK(exponent_shift(3, 2, Branch::Regular) == doctest::Approx(0.0));
    CHECK(exponent_shift(2, 3, Branch::Regular) == doctest::Approx(2.0));
    CHECK(default_tolerance(Backend::Shooting) == 1e-6);
    CHECK(default_tolerance(Backend::Ergodic) == 1e-3);
}

TEST_CASE("hemisphere lambda curve is 2 / gamma for p = 2") {
    std::vector<double> gs;
    for (int i = 0; i < 8; ++i) gs.push_back(0.25 * std::pow(1.6, i));
    ExponentOptions opt;
    opt.ergodic.grid_size = 2000;
    auto c = lambda_curve(2, 2, pi / 2, gs, Backend::Ergodic, opt);
    CHECK(c.strictly_decreasing);
    CHECK(c.all_positive);
    CHECK_FALSE(c.has_gaps);
    for (const auto& pt : c.points) CHECK(std::abs(pt.lambda * pt.gamma - 2.0) <= 5e-3 * std::max(1.0, pt.gamma));
    auto s = lambda_curve(2, 2, pi / 2, gs, Backend::Shooting);
    for (const auto& pt : s.points) CHECK(std::abs(pt.lambda * pt.gamma - 2.0) <= 1e-7);
}

TEST_CASE("blow-up as gamma tends to zero") {
    auto lo = lambda_point(3, 2, pi / 4, 0.05, Backend::Shooting);
    auto one = lambda_point(3, 2, pi / 4, 1.0, Backend::Shooting);
    CHECK(lo.lambda > 10.0 * one.lambda);
}

TEST_CASE("solve exponent examples") {
    auto a = solve_exponent(2, 2, pi / 2, Branch::Singular, Backend::Shooting, 1e-8);
    CHECK(std::abs(a.gamma - 2.0) <= 1e-7);
    CHECK(a.g_residual <= 1e-6);
    auto b = solve_exponent(3, 2, pi / 2, Branch::Regular, Backend::Shooting);
    CHECK(std::abs(b.gamma - 1.0) <= 1e-6);
    auto c = solve_exponent(2, 1, pi / 2, Branch::Singular, Backend::Shooting, 1e-8);
    CHECK(std::abs(c.gamma - 1.0) <= 1e-7);
}

TEST_CASE("ergodic exponent matches shooting") {
    ExponentOptions opt;
    opt.ergodic.grid_size = 2000;
    auto e = solve_exponent(3, 2, pi / 2, Branch::Singular, Backend::Ergodic, 0.0, opt);
    auto s = solve_exponent(3, 2, pi / 2, Branch::Singular, Backend::Shooting);
    CHECK(std::abs(e.gamma - s.gamma) <= 5e-3);
    CHECK(e.boundary_flux < 0.0);
}

TEST_CASE("consistency report") {
    ExponentOptions opt;
    opt.ergodic.grid_size = 2000;
    auto rep = consistency_report(3, 2, pi / 2, opt);
    CHECK(rep.all_pass);
    CHECK_FALSE(rep.rows.empty());
    for (const auto& r : rep.rows) {
        CHECK_MESSAGE(r.pass, r.name);
    }
}

TEST_CASE("exponent input checks") {
    CHECK_THROWS_AS(solve_exponent(0.5, 2, 1.0, Branch::Singular, Backend::Shooting), DomainError);
    CHECK_THROWS_AS(solve_exponent(2, 2, 3.5, Branch::Singular, Backend::Shooting), DomainError);
    CHECK_THROWS_AS(lambda_point(2, 2, 1.0, -1.0, Backend::Ergodic), DomainError);
}

TEST_CASE("perturbed brackets return the same exponent") {
    const double tol = 1e-6;
    auto base = solve_exponent(3, 2, pi / 3, Branch::Singular, Backend::Shooting, tol);
    for (auto [lo, hi] : {std::pair{0.5, 20.0}, std::pair{1.0, 7.0}, std::pair{0.1, 50.0}}) {
        ExponentOptions opt;
        opt.shooting.bracket_lo = lo;
        opt.shooting.bracket_hi = hi;
        auto r = solve_exponent(3, 2, pi / 3, Branch::Singular, Backend::Shooting, tol, opt);
        CHECK(std::abs(r.gamma - base.gamma) <= 2.0 * tol);
    }
}

TEST_CASE("p = 2 branches are the two roots of the quadratic") {
    for (int d : {2, 3}) {
        for (double alpha : {pi / 3, pi / 2, 2 * pi / 3}) {
            auto eig = p2_cap_eigenvalue(d, alpha, 4000);
            double s = solve_exponent(2, d, alpha, Branch::Singular, Backend::Shooting, 1e-9).gamma;
            double r = solve_exponent(2, d, alpha, Branch::Regular, Backend::Shooting, 1e-9).gamma;
            CHECK(std::abs(s * r - eig.lambda1) <= 1e-5);
            CHECK(std::abs(s - r - (d - 1)) <= 1e-5);
        }
    }
}

TEST_CASE("singular exponent decreases with the half-angle") {
    ExponentOptions opt;
    opt.ergodic.grid_size = 1000;
    auto rep = consistency_report(3, 2, pi / 2, opt);
    REQUIRE(rep.alpha_sweep.gammas.size() == 4u);
    CHECK(rep.alpha_sweep.decreasing);
}
