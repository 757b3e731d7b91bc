#include "pcone/report.hpp"

#include <cmath>
#include <cstdio>

namespace pcone {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

// JSON has no NaN/Inf; emit null for them
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json profile_json(const Profile& prof) {
    Json j;
    j["theta"] = Json::array();
    j["omega"] = Json::array();
    j["omega_prime"] = Json::array();
    for (std::size_t i = 0; i < prof.size(); ++i) {
        j["theta"].push_back(num(prof.theta[i]));
        j["omega"].push_back(num(prof.omega[i]));
        j["omega_prime"].push_back(num(prof.domega[i]));
    }
    j["normalization"] = "omega(0) = " + format_double(prof.center_value);
    return j;
}

Json lambda_point_json(const LambdaPoint& pt) {
    Json j;
    j["gamma"] = num(pt.gamma);
    j["lambda"] = num(pt.lambda);
    j["backend"] = to_string(pt.backend);
    j["valid"] = pt.valid;
    j["residual"] = num(pt.residual);
    if (pt.backend == Backend::Ergodic) {
        j["eps"] = num(pt.eps);
        j["grid_size"] = pt.grid_size;
    }
    j["iterations"] = pt.iterations;
    if (!pt.valid) j["error"] = pt.error;
    return j;
}

Json exponent_json(const ExponentResult& r, bool with_profile) {
    Json j;
    j["branch"] = to_string(r.branch);
    j["backend"] = to_string(r.backend);
    j["gamma"] = num(r.gamma);
    j["lambda"] = num(r.lambda);
    j["residual"] = num(r.residual);
    j["g_residual"] = num(r.g_residual);
    j["bisection_iterations"] = r.bisection_iterations;
    j["boundary_flux"] = num(r.boundary_flux);
    if (with_profile) j["profile"] = profile_json(r.profile);
    return j;
}

Json ergodic_levels_json(const ErgodicResult& r) {
    Json arr = Json::array();
    for (const auto& l : r.levels) {
        Json e;
        e["eps"] = num(l.eps);
        e["boundary_value"] = num(l.n);
        e["eps_v_ref"] = num(l.eps_v_ref);
        e["newton_iterations"] = l.iterations;
        e["residual"] = num(l.residual);
        e["continuation_used"] = l.continuation_used;
        arr.push_back(e);
    }
    Json j;
    j["levels"] = arr;
    j["M0"] = num(r.params.M0);
    j["M1"] = num(r.params.M1);
    j["Mstar"] = num(r.params.Mstar);
    j["theta_ref"] = num(r.theta_ref);
    return j;
}

Json report_json(const ConsistencyReport& rep) {
    Json j;
    j["p"] = rep.p;
    j["d"] = rep.d;
    j["alpha"] = rep.alpha;
    j["rows"] = Json::array();
    for (const auto& r : rep.rows) {
        Json e;
        e["name"] = r.name;
        e[r.label_a.empty() ? "a" : r.label_a] = num(r.a);
        e[r.label_b.empty() ? "b" : r.label_b] = num(r.b);
        e["delta"] = num(r.delta);
        e["tolerance"] = num(r.tolerance);
        e["pass"] = r.pass;
        if (!r.note.empty()) e["note"] = r.note;
        j["rows"].push_back(e);
    }
    j["all_pass"] = rep.all_pass;
    Json sw;
    sw["alpha"] = Json::array();
    sw["gamma"] = Json::array();
    for (double a : rep.alpha_sweep.alphas) sw["alpha"].push_back(num(a));
    for (double g : rep.alpha_sweep.gammas) sw["gamma"].push_back(num(g));
    sw["decreasing"] = rep.alpha_sweep.decreasing;
    if (!rep.alpha_sweep.error.empty()) sw["error"] = rep.alpha_sweep.error;
    j["singular_gamma_by_alpha"] = sw;
    return j;
}

Json criterion_json(const CriterionResult& c) {
    Json j;
    j["id"] = c.id;
    j["title"] = c.title;
    j["pass"] = c.pass;
    j["seconds"] = c.seconds;
    if (c.time_limit > 0.0) j["time_limit"] = c.time_limit;
    j["details"] = c.details;
    return j;
}

std::string profile_csv(const Profile& prof) {
    std::string s = "theta,omega,omega_prime\n";
    for (std::size_t i = 0; i < prof.size(); ++i)
        s += format_double(prof.theta[i]) + "," + format_double(prof.omega[i]) + "," +
             format_double(prof.domega[i]) + "\n";
    return s;
}

std::string lambda_csv(const std::vector<LambdaPoint>& pts) {
    std::string s = "gamma,lambda,backend\n";
    for (const auto& pt : pts)
        s += format_double(pt.gamma) + "," + (pt.valid ? format_double(pt.lambda) : std::string()) + "," +
             to_string(pt.backend) + "\n";
    return s;
}

}  // namespace pcone
