#pragma once

#include <string>

#include "pcone/geometry.hpp"

namespace pcone {

enum class Backend { Shooting, Ergodic };

const char* to_string(Backend b);
Backend parse_backend(const std::string& s);

struct LambdaPoint {
    double gamma = 0.0;
    double lambda = 0.0;
    Backend backend = Backend::Shooting;
    // diagnostics
    double residual = 0.0;
    double eps = 0.0;  // smallest discount used (ergodic only)
    int grid_size = 0;
    int iterations = 0;
    bool valid = true;
    std::string error;
};

struct ExponentResult {
    Branch branch = Branch::Singular;
    double gamma = 0.0;
    double lambda = 0.0;
    Profile profile;
    Backend backend = Backend::Shooting;
    double residual = 0.0;      // divergence-form residual of the profile
    double g_residual = 0.0;    // |lambda_gamma - exponent relation| at the returned gamma
    int bisection_iterations = 0;
    double boundary_flux = 0.0; // domega at the boundary node
};

// right-hand side constant of the exponent relation: lambda = gamma(p-1) + shift
double exponent_shift(double p, int d, Branch branch);

}  // namespace pcone
