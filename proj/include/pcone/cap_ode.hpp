#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pcone/geometry.hpp"
#include "pcone/results.hpp"

namespace pcone {

struct ShootState {
    double theta = 0.0;
    double omega = 1.0;
    double domega = 0.0;
};

struct ShootSpec {
    double p = 2.0;
    int d = 2;
    double gamma = 1.0;
    double K = 0.0;
    double series_start_theta = 1e-4;
    double rk_tol = 1e-10;
    double max_theta = 3.141592653589793 - 1e-3;
    double amplitude = 1.0;  // omega at the centre

    void validate() const;
};

// K tied to gamma by the exponent relation of the branch
double branch_K(double p, int d, Branch branch, double gamma);

double series_coefficient(const ShootSpec& spec);
ShootState series_start(const ShootSpec& spec);

// omega'' of the expanded axisymmetric equation
double omega_second_derivative(const ShootSpec& spec, double theta, double omega, double domega);

struct ShootOutcome {
    std::optional<double> theta_star;
    double omega_at_zero = 0.0;
    double domega_at_zero = 0.0;
    long steps = 0;
};

ShootOutcome shoot_first_zero(const ShootSpec& spec);

// Integrates from (theta0, state) and returns (omega, domega) at each requested theta
// (sorted, all >= theta0).
std::vector<std::array<double, 2>> integrate_profile_from(const ShootSpec& spec, double theta0,
                                                          std::array<double, 2> state,
                                                          const std::vector<double>& thetas);

// Profile on a uniform grid over [0, theta_end].
Profile shoot_profile(const ShootSpec& spec, double theta_end, int n_points);

// max-norm residual of -(w (W)^{p/2-1} omega')' - K w W^{p/2-1} omega on the interior
// of a uniform grid, w = sin^{d-1}, W = gamma^2 omega^2 + omega'^2
double divergence_residual(const Profile& prof, double p, int d, double gamma, double K);

struct ShootingOptions {
    double series_start_theta = 1e-4;
    double rk_tol = 1e-10;
    double max_theta = 3.141592653589793 - 1e-3;
    double amplitude = 1.0;
    double gamma_min = 1e-2;
    double gamma_max = 1e2;
    int scan_points = 40;
    int profile_points = 1001;
    // optional bracket override for the gamma scan (used to perturb brackets)
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

ExponentResult exponent_by_shooting(double p, int d, double alpha, Branch branch, double tol,
                                    const ShootingOptions& opt = {});

LambdaPoint lambda_by_shooting(double p, int d, double alpha, double gamma, double tol = 1e-10,
                               const ShootingOptions& opt = {});

}  // namespace pcone
