#pragma once

#include <utility>
#include <vector>

#include "pcone/geometry.hpp"
#include "pcone/results.hpp"

namespace pcone {

struct PenalizedSpec {
    double p = 2.0;
    int d = 2;
    double alpha = 1.5707963267948966;
    double gamma = 1.0;
    double eps = 0.1;
    double boundary_value = 10.0;
    int grid_size = 4000;
    double newton_tol = 1e-10;
    int max_newton = 200;

    void validate() const;
};

struct BarrierParams {
    double M0 = 1.0;
    double M1 = 1.0;
    double Mstar = 1.0;
};

// Cell-centred grid, uniform in xi = (alpha - rho) + c ln(alpha / rho), rho = alpha - theta.
// Node 0 is a ghost beyond the pole, nodes 1..N are unknowns, node N+1 is the
// boundary node at rho_min where the Dirichlet value is imposed.
struct ErgodicGrid {
    double alpha = 0.0;
    double c = 0.0;
    double dxi = 0.0;
    double rho_min = 0.0;
    double ghost_weight = 0.0;
    std::vector<double> rho, theta, xt, xtt;

    int unknowns() const { return static_cast<int>(rho.size()) - 2; }
};

ErgodicGrid make_ergodic_grid(double alpha, int grid_size);

// nodes closer to the boundary than this are the artificial Dirichlet layer
double dirichlet_layer_cut(double alpha);

struct VProfile {
    // unknown nodes followed by the boundary node
    std::vector<double> theta, rho, v, dv;
    double p = 2.0;
    int d = 2;
    double alpha = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    double boundary_value = 0.0;
    double v_center = 0.0;  // even extrapolation of v to theta = 0
    // solver diagnostics
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool continuation_used = false;
    int upwind_nodes = 0;
    double barrier_violation = 0.0;

    std::size_t size() const { return v.size(); }
};

// smooth boundary distance used by the barriers: (cos theta - cos alpha) / sin alpha
double rho_tilde(double alpha, double rho);

double barrier_upper_value(double rho_t, double gamma, const BarrierParams& b, double eps);
double barrier_lower_value(double rho_t, double gamma, const BarrierParams& b, double eps);

BarrierParams default_barrier_params(double p, int d, double alpha, double gamma,
                                     const std::vector<double>& eps_values, const ErgodicGrid& grid);

std::pair<VProfile, VProfile> barrier_profiles(const PenalizedSpec& spec, const BarrierParams& params);

VProfile constant_profile(const PenalizedSpec& spec, double value);

// max-norm of the scaled discrete residual
double penalized_residual(const PenalizedSpec& spec, const VProfile& v);

VProfile solve_penalized(const PenalizedSpec& spec, const VProfile& init);

double interpolate_v(const VProfile& v, double theta);

enum class InitKind { Barrier, Constant };

struct ErgodicOptions {
    std::vector<double> schedule{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    int grid_size = 4000;
    double M1 = 0.0;         // 0 selects the barrier-derived value
    double n_scale = 1.0;    // boundary value n = n_scale * M1 / eps
    InitKind init = InitKind::Barrier;
    double constant_value = 0.0;
    double newton_tol = 1e-10;
    int max_newton = 200;
};

struct ErgodicLevel {
    double eps = 0.0;
    double n = 0.0;
    double eps_v_ref = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool continuation_used = false;
};

struct ErgodicResult {
    LambdaPoint point;
    std::vector<ErgodicLevel> levels;
    VProfile v;                 // solution at the smallest eps
    std::vector<double> w;      // v - v(theta_ref) on the same nodes
    double theta_ref = 0.0;
    BarrierParams params;
};

ErgodicResult ergodic_constant(double p, int d, double alpha, double gamma,
                               const ErgodicOptions& opt = {});

// normalised profile exp(-gamma (v - v(0))) outside the Dirichlet layer, closed by
// a boundary node with omega = 0
Profile ergodic_profile(const VProfile& v);

struct ChangeOfVariablesCheck {
    double residual = 0.0;
    double Mstar = 0.0;
    double boundary_omega = 0.0;
};

ChangeOfVariablesCheck check_change_of_variables(const VProfile& v, double lambda, double scale = 1.0);

struct GradientBound {
    double L0 = 0.0;
    double L1 = 0.0;
    double near_ratio_min = 0.0;  // min of gamma |v'| rho_tilde over the near-boundary window
    double near_ratio_max = 0.0;
    bool finite = false;
    bool near_boundary_ok = false;
};

GradientBound check_gradient_bound(const VProfile& v);

}  // namespace pcone

namespace pcone {

// smallest M* with exp(-gamma M*) <= omega / rho_tilde <= exp(gamma M*) on the interior
// nodes of a profile whose last node is the boundary
double sandwich_constant(const Profile& prof, double gamma);

}  // namespace pcone
