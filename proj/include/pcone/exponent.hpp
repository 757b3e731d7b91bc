#pragma once

#include <string>
#include <vector>

#include "pcone/cap_ode.hpp"
#include "pcone/ergodic.hpp"
#include "pcone/results.hpp"

namespace pcone {

double default_tolerance(Backend b);

struct ExponentOptions {
    ShootingOptions shooting;
    ErgodicOptions ergodic;
    double lambda_tol = 1e-10;  // first-zero tolerance for shooting lambda points
    double gamma_min = 1e-2;
    double gamma_max = 1e2;
    double gamma_start = 1.0;   // first probe of the ergodic bracket search
    int threads = 0;            // 0 picks hardware concurrency
};

LambdaPoint lambda_point(double p, int d, double alpha, double gamma, Backend backend,
                         const ExponentOptions& opt = {});

struct LambdaCurve {
    std::vector<LambdaPoint> points;
    bool strictly_decreasing = false;
    bool all_positive = false;
    bool has_gaps = false;
};

LambdaCurve lambda_curve(double p, int d, double alpha, const std::vector<double>& gammas,
                         Backend backend, const ExponentOptions& opt = {});

// tol <= 0 selects the backend default
ExponentResult solve_exponent(double p, int d, double alpha, Branch branch, Backend backend,
                              double tol = 0.0, const ExponentOptions& opt = {});

struct ReportRow {
    std::string name;
    std::string label_a, label_b;
    double a = 0.0, b = 0.0;
    double delta = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

// singular exponent against the half-angle; informational, not part of all_pass
struct AlphaSweep {
    std::vector<double> alphas, gammas;
    bool decreasing = false;
    std::string error;
};

struct ConsistencyReport {
    double p = 0.0;
    int d = 0;
    double alpha = 0.0;
    std::vector<ReportRow> rows;
    bool all_pass = false;
    AlphaSweep alpha_sweep;
};

ConsistencyReport consistency_report(double p, int d, double alpha, const ExponentOptions& opt = {});

}  // namespace pcone
