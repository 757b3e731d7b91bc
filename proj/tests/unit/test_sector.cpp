#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ode_oracles.hpp"
#include "pcone/errors.hpp"
#include "pcone/sector.hpp"

using namespace pcone;
constexpr double pi = std::numbers::pi;

// reference values from the odeint oracle in tests/oracles, frozen
constexpr double kOpeningP3Gamma1 = 1.98860666705770;
constexpr double kGammaP4HalfPlane = 0.47683362468102;

static SectorSolveSpec spec(double p, Branch b) {
    SectorSolveSpec s;
    s.p = p;
    s.branch = b;
    return s;
}

TEST_CASE("branch constant") {
    CHECK(branch_constant(2, Branch::Singular, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(branch_constant(2, Branch::Regular, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(branch_constant(3, Branch::Singular, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(branch_constant(3, Branch::Regular, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("p = 2 openings are pi / gamma") {
    for (Branch b : {Branch::Singular, Branch::Regular}) {
        for (double g = 0.25; g <= 8.0; g *= 1.3) {
            CHECK(std::abs(opening_of_gamma(spec(2, b), g) - pi / g) <= 1e-10);
        }
    }
    CHECK(std::abs(opening_of_gamma(spec(2, Branch::Singular), 2.0) - pi / 2) <= 1e-10);
    CHECK(std::abs(opening_of_gamma(spec(2, Branch::Regular), 1.0) - pi) <= 1e-10);
    CHECK(std::abs(gamma_of_opening(spec(2, Branch::Singular), pi) - 1.0) <= 1e-9);
    CHECK(std::abs(gamma_of_opening(spec(2, Branch::Regular), pi / 2) - 2.0) <= 1e-9);
}

TEST_CASE("p = 3 opening against the ODE oracle") {
    double ref = oracle::sector_opening(3.0, branch_constant(3.0, Branch::Singular, 1.0), 1.0);
    CHECK(std::abs(ref - kOpeningP3Gamma1) <= 1e-9);
    CHECK(std::abs(opening_of_gamma(spec(3, Branch::Singular), 1.0) - kOpeningP3Gamma1) <= 1e-10);
}

TEST_CASE("p = 4 half-plane exponent against the ODE oracle") {
    double g = gamma_of_opening(spec(4, Branch::Singular), pi);
    CHECK(std::abs(g - kGammaP4HalfPlane) <= 1e-10);
    double A = oracle::sector_opening(4.0, branch_constant(4.0, Branch::Singular, g), g);
    CHECK(std::abs(A - pi) <= 1e-9);
}

TEST_CASE("opening decreases in gamma") {
    for (double p : {1.5, 3.0, 4.0}) {
        for (Branch b : {Branch::Singular, Branch::Regular}) {
            auto s = spec(p, b);
            double prev = INFINITY;
            double g0 = sector_gamma_threshold(p, b) + 0.05;
            for (double g = g0; g < 8.0; g *= 1.5) {
                double A = opening_of_gamma(s, g);
                CHECK(A < prev);
                prev = A;
            }
        }
    }
}

TEST_CASE("round trip gamma -> A -> gamma") {
    for (double p : {1.5, 2.5, 4.0}) {
        for (Branch b : {Branch::Singular, Branch::Regular}) {
            auto s = spec(p, b);
            for (double A : {pi / 3, pi, 1.5 * pi}) {
                double g = gamma_of_opening(s, A);
                CHECK(std::abs(opening_of_gamma(s, g) - A) <= 1e-8);
            }
        }
    }
}

TEST_CASE("sector profiles") {
    auto s = spec(2, Branch::Singular);
    Profile pr = sector_profile(s, 1.0, 201);
    double err = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) err = std::max(err, std::abs(pr.omega[i] - std::sin(pr.theta[i])));
    CHECK(err <= 1e-8);
    CHECK(pr.omega[100] == 1.0);
    CHECK(pr.omega.front() == 0.0);
    CHECK(pr.omega.back() == 0.0);

    auto s3 = spec(3, Branch::Singular);
    double g = gamma_of_opening(s3, pi);
    Profile p3 = sector_profile(s3, g, 401);
    CHECK(p3.omega[200] == 1.0);
    CHECK(sector_residual(s3, g, p3) <= 1e-6);
}

TEST_CASE("sector errors") {
    auto s = spec(1.5, Branch::Singular);
    double thr = sector_gamma_threshold(1.5, Branch::Singular);
    CHECK(thr == doctest::Approx(1.0));
    CHECK_THROWS_AS(opening_of_gamma(s, 0.5 * thr), NoEigenfunctionError);
    CHECK_THROWS_AS(opening_of_gamma(spec(0.9, Branch::Singular), 1.0), DomainError);
    CHECK_THROWS_AS(gamma_of_opening(spec(2, Branch::Singular), 7.0), DomainError);
    auto tight = spec(3, Branch::Singular);
    tight.quad_tol = 1e-15;
    tight.max_subdiv = 2;
    CHECK_THROWS_AS(opening_of_gamma(tight, 1.0), NumericalError);
}
