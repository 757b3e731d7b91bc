#pragma once

#include "pcone/geometry.hpp"

namespace pcone {

struct SectorSolveSpec {
    double p = 2.0;
    Branch branch = Branch::Singular;
    double quad_tol = 1e-10;
    int max_subdiv = 60;

    void validate() const;
};

double branch_constant(double p, Branch branch, double gamma);

// smallest gamma admitted by the branch (the constant vanishes there)
double sector_gamma_threshold(double p, Branch branch);

double opening_of_gamma(const SectorSolveSpec& spec, double gamma);
double gamma_of_opening(const SectorSolveSpec& spec, double A);

Profile sector_profile(const SectorSolveSpec& spec, double gamma, int n_points);

// Residual of the second-order profile equation on a uniform grid, with the
// flux derivative taken by fourth-order central differences.
double sector_residual(const SectorSolveSpec& spec, double gamma, const Profile& prof);

}  // namespace pcone
