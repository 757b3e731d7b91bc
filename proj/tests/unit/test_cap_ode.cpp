#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ode_oracles.hpp"
#include "pcone/cap_ode.hpp"
#include "pcone/errors.hpp"
#include "pcone/oracle.hpp"
#include "pcone/sector.hpp"

using namespace pcone;
constexpr double pi = std::numbers::pi;

static ShootSpec make(double p, int d, double gamma, double K) {
    ShootSpec s;
    s.p = p;
    s.d = d;
    s.gamma = gamma;
    s.K = K;
    return s;
}

TEST_CASE("branch K") {
    CHECK(branch_K(2, 2, Branch::Regular, 1.0) == doctest::Approx(2.0));
    CHECK(branch_K(3, 2, Branch::Regular, 1.0) == doctest::Approx(2.0));
    CHECK(branch_K(2, 2, Branch::Singular, 4.0) == doctest::Approx(12.0));
}

TEST_CASE("series coefficient matches the equation at the pole") {
    // cos anchor: p = 2, d = 2, K = 2 is omega = cos theta, so a2 = -1/2
    CHECK(series_coefficient(make(2, 2, 1, 2)) == doctest::Approx(-0.5).epsilon(1e-15));
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (int d : {1, 2, 3, 5}) {
            ShootSpec s = make(p, d, 1.3, 2.7);
            double a2 = series_coefficient(s);
            double t = 1e-5;
            double w2 = omega_second_derivative(s, t, 1.0 + a2 * t * t, 2.0 * a2 * t);
            CHECK(std::abs(w2 - 2.0 * a2) <= 1e-6 * std::abs(a2));
        }
    }
}

TEST_CASE("series start") {
    ShootSpec s = make(3, 2, 1.0, 2.0);
    ShootState st = series_start(s);
    CHECK(st.omega <= 1.0);
    CHECK(st.omega > 1.0 - 1e-7);
    // domega / theta is independent of the start angle
    double r0 = st.domega / st.theta;
    for (int k = 0; k < 4; ++k) {
        s.series_start_theta *= 0.5;
        ShootState h = series_start(s);
        CHECK(std::abs(h.domega / h.theta - r0) <= 1e-12 * std::abs(r0));
    }
}

TEST_CASE("hemisphere first zero") {
    auto r2 = shoot_first_zero(make(2, 2, 1, branch_K(2, 2, Branch::Regular, 1)));
    REQUIRE(r2.theta_star);
    CHECK(std::abs(*r2.theta_star - pi / 2) <= 1e-7);
    auto r3 = shoot_first_zero(make(3, 2, 1, branch_K(3, 2, Branch::Regular, 1)));
    REQUIRE(r3.theta_star);
    CHECK(std::abs(*r3.theta_star - pi / 2) <= 1e-6);
}

TEST_CASE("p = 2 first zero against the linear oracles") {
    auto r = shoot_first_zero(make(2, 2, 4, 12));
    REQUIRE(r.theta_star);
    CHECK(std::abs(*r.theta_star - oracle::linear_cap_first_zero(2, 12.0)) <= 1e-8);
    // the cap of that half-angle has first eigenvalue K
    CHECK(std::abs(p2_cap_eigenvalue(2, *r.theta_star).lambda1 - 12.0) <= 1e-4);
}

TEST_CASE("no zero for nonpositive K") {
    CHECK_FALSE(shoot_first_zero(make(3, 2, 1, 0.0)).theta_star);
    CHECK_FALSE(shoot_first_zero(make(3, 2, 1, -1.0)).theta_star);
}

TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(shoot_first_zero(make(1.0, 2, 1, 1)), DomainError);
    CHECK_THROWS_AS(shoot_first_zero(make(2, 0, 1, 1)), DomainError);
    CHECK_THROWS_AS(shoot_first_zero(make(2, 2, -1, 1)), DomainError);
    ShootSpec s = make(2, 2, 1, 2);
    s.series_start_theta = 0.1;
    CHECK_THROWS_AS(series_start(s), DomainError);
}

TEST_CASE("hemisphere regular exponent is 1") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (int d : {1, 2, 3}) {
            auto r = exponent_by_shooting(p, d, pi / 2, Branch::Regular, 1e-8);
            CHECK(std::abs(r.gamma - 1.0) <= 1e-8);
            double err = 0.0;
            for (std::size_t i = 0; i < r.profile.size(); ++i)
                err = std::max(err, std::abs(r.profile.omega[i] - std::cos(r.profile.theta[i])));
            CHECK(err <= 1e-5);
            CHECK(r.boundary_flux < 0.0);
        }
    }
}

TEST_CASE("p = 2 singular exponent against the oracle") {
    double alpha = pi / 3;
    auto eig = p2_cap_eigenvalue(2, alpha, 4000);
    double ref = p2_exponents(3, eig.lambda1).first;
    auto r = exponent_by_shooting(2, 2, alpha, Branch::Singular, 1e-9);
    CHECK(std::abs(r.gamma - ref) <= 1e-5);
    CHECK(r.gamma == doctest::Approx(2.77728827).epsilon(1e-7));
}

TEST_CASE("arc caps reduce to sectors") {
    auto r = exponent_by_shooting(2, 1, pi / 2, Branch::Singular, 1e-9);
    CHECK(std::abs(r.gamma - 1.0) <= 1e-8);
    for (double p : {1.5, 3.0}) {
        SectorSolveSpec s;
        s.p = p;
        double ref = gamma_of_opening(s, 2.0 * pi / 3);
        auto c = exponent_by_shooting(p, 1, pi / 3, Branch::Singular, 1e-9);
        CHECK(std::abs(c.gamma - ref) <= 1e-6);
    }
}

TEST_CASE("lambda by shooting") {
    auto pt = lambda_by_shooting(2, 2, pi / 2, 1.0);
    CHECK(std::abs(pt.lambda - 2.0) <= 1e-7);
    for (double p : {1.5, 3.0}) {
        auto q = lambda_by_shooting(p, 3, pi / 2, 1.0);
        CHECK(std::abs(q.lambda - 3.0) <= 1e-6);
    }
}

TEST_CASE("homogeneity of the shot profile") {
    ShootSpec s = make(3, 2, 1.7, branch_K(3, 2, Branch::Singular, 1.7));
    Profile a = shoot_profile(s, 0.8, 51);
    s.amplitude = 2.0;
    Profile b = shoot_profile(s, 0.8, 51);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.omega[i] == 2.0 * a.omega[i]);
}

TEST_CASE("bad scan range reports the scan") {
    ShootingOptions opt;
    opt.bracket_lo = 5.0;
    opt.bracket_hi = 10.0;
    try {
        exponent_by_shooting(2, 2, pi / 2, Branch::Singular, 1e-6, opt);
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK_FALSE(e.scan().empty());
    }
}
