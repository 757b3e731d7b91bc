#pragma once

#include <utility>

#include "pcone/geometry.hpp"

namespace pcone {

struct EigenResult {
    double lambda1 = 0.0;
    Profile eigenfunction;
    int grid_size = 0;
};

// First Dirichlet eigenvalue of the Laplace-Beltrami operator on a cap for
// axisymmetric functions; fixed-step linear RK4 shooting with bisection.
EigenResult p2_cap_eigenvalue(int d, double alpha, int grid_size = 2000);

// (singular, regular) exponents of the quadratic X^2 - (N-2) X - lambda1 = 0
std::pair<double, double> p2_exponents(int N, double lambda1);

}  // namespace pcone
