#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pcone/errors.hpp"
#include "pcone/oracle.hpp"

using namespace pcone;
constexpr double pi = std::numbers::pi;

TEST_CASE("hemisphere eigenvalues") {
    // first axisymmetric Dirichlet eigenvalue of a hemisphere of S^d is d
    CHECK(std::abs(p2_cap_eigenvalue(2, pi / 2).lambda1 - 2.0) <= 1e-9);
    CHECK(std::abs(p2_cap_eigenvalue(3, pi / 2).lambda1 - 3.0) <= 1e-9);
    // arcs: (pi / (2 alpha))^2
    CHECK(std::abs(p2_cap_eigenvalue(1, pi / 2).lambda1 - 1.0) <= 1e-9);
    CHECK(std::abs(p2_cap_eigenvalue(1, 1.0).lambda1 - std::pow(pi / 2.0, 2)) <= 1e-9);
}

TEST_CASE("eigenfunction is normalised and positive") {
    auto r = p2_cap_eigenvalue(2, pi / 2, 400);
    const auto& ef = r.eigenfunction;
    CHECK(ef.omega.front() == doctest::Approx(1.0));
    for (std::size_t i = 0; i + 1 < ef.size(); ++i) {
        CHECK(ef.omega[i] > 0.0);
        CHECK(std::abs(ef.omega[i] - std::cos(ef.theta[i])) <= 1e-8);
    }
    CHECK(std::abs(ef.omega.back()) <= 1e-8);
}

TEST_CASE("convergence order under grid refinement") {
    // small grids so the discretisation error stays above the bisection floor
    double alpha = pi / 3;
    double fine = p2_cap_eigenvalue(2, alpha, 4000).lambda1;
    double e1 = std::abs(p2_cap_eigenvalue(2, alpha, 10).lambda1 - fine);
    double e2 = std::abs(p2_cap_eigenvalue(2, alpha, 20).lambda1 - fine);
    CHECK(std::log2(e1 / e2) >= 2.0);
}

TEST_CASE("quadratic exponents") {
    auto [s, r] = p2_exponents(3, 2.0);
    CHECK(s == doctest::Approx(2.0));
    CHECK(r == doctest::Approx(1.0));
    auto [s2, r2] = p2_exponents(2, 1.0);
    CHECK(s2 == doctest::Approx(1.0));
    CHECK(r2 == doctest::Approx(1.0));
    auto [s3, r3] = p2_exponents(4, 3.0);
    CHECK(s3 == doctest::Approx(3.0));
    CHECK(r3 == doctest::Approx(1.0));
}

TEST_CASE("oracle input checks") {
    CHECK_THROWS_AS(p2_cap_eigenvalue(2, 0.0), DomainError);
    CHECK_THROWS_AS(p2_cap_eigenvalue(2, 1.0, 2), DomainError);
}
