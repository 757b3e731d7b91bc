#include "pcone/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include "pcone/errors.hpp"
#include "pcone/exponent.hpp"
#include "pcone/report.hpp"
#include "pcone/sector.hpp"
#include "pcone/validation.hpp"

namespace pcone {

namespace {

constexpr const char* kOutputDirEnv = "PCONE_OUTPUT_DIR";

struct Common {
    double p = 0.0;
    int ambient_dim = 3;
    double alpha = NAN;
    double alpha_deg = NAN;
    std::string branch = "singular";
    std::string backend = "shooting";
    int grid = 4000;
    double tol = 0.0;
    std::string format;  // empty until parsed; each command has its own default
    std::string output;
    int points = 1001;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_cap_options(CLI::App* sub, Common& c, bool with_branch) {
    sub->add_option("--p", c.p, "p-Laplacian exponent (> 1)")->required();
    sub->add_option("--ambient-dim", c.ambient_dim, "ambient dimension N (sphere dimension N-1)")->capture_default_str();
    auto* a = sub->add_option("--alpha", c.alpha, "cap half-angle in radians");
    auto* ad = sub->add_option("--alpha-deg", c.alpha_deg, "cap half-angle in degrees");
    a->excludes(ad);
    ad->excludes(a);
    if (with_branch)
        sub->add_option("--branch", c.branch, "singular | regular")->capture_default_str()
            ->check(CLI::IsMember({"singular", "regular"}));
    sub->add_option("--backend", c.backend, "shooting | ergodic")->capture_default_str()->check(CLI::IsMember({"shooting", "ergodic"}));
    sub->add_option("--grid", c.grid, "ergodic grid size")->capture_default_str();
    sub->add_option("--tol", c.tol, "tolerance (0 selects the backend default)")->capture_default_str();
}

void add_output_options(CLI::App* sub, Common& c, const std::string& default_format) {
    sub->add_option("--format", c.format, "json | csv (default " + default_format + ")")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", c.output, "output file (relative paths resolve against $PCONE_OUTPUT_DIR)");
}

double resolve_alpha(const Common& c) {
    bool r = !std::isnan(c.alpha), d = !std::isnan(c.alpha_deg);
    if (r == d) throw UsageError("exactly one of --alpha or --alpha-deg is required");
    return r ? c.alpha : c.alpha_deg * std::numbers::pi / 180.0;
}

void check_cap(const Common& c) {
    if (!(c.p > 1.0)) throw UsageError("--p must exceed 1");
    if (c.ambient_dim < 2) throw UsageError("--ambient-dim must be >= 2");
    if (c.grid < 64) throw UsageError("--grid must be >= 64");
    if (c.tol < 0.0) throw UsageError("--tol must be nonnegative");
    if (c.points < 5) throw UsageError("--points must be >= 5");
}

Json cap_inputs(const Common& c, double alpha, double tol, const ExponentOptions& opt, bool with_branch) {
    Json in;
    in["p"] = c.p;
    in["ambient_dim"] = c.ambient_dim;
    in["sphere_dim"] = c.ambient_dim - 1;
    in["alpha"] = alpha;
    if (with_branch) in["branch"] = c.branch;
    in["backend"] = c.backend;
    in["tol"] = tol;
    if (c.backend == "ergodic") {
        in["grid"] = opt.ergodic.grid_size;
        in["eps_schedule"] = opt.ergodic.schedule;
        in["newton_tol"] = opt.ergodic.newton_tol;
        in["max_newton"] = opt.ergodic.max_newton;
    } else {
        in["series_start_theta"] = opt.shooting.series_start_theta;
        in["rk_tol"] = opt.shooting.rk_tol;
        in["max_theta"] = opt.shooting.max_theta;
        in["gamma_scan"] = {opt.gamma_min, opt.gamma_max, opt.shooting.scan_points};
        in["lambda_tol"] = opt.lambda_tol;
    }
    in["format"] = c.format;
    return in;
}

ExponentOptions make_options(const Common& c) {
    ExponentOptions opt;
    opt.ergodic.grid_size = c.grid;
    opt.shooting.profile_points = c.points;
    return opt;
}

Json envelope(const std::string& command, Json inputs) {
    Json j;
    j["command"] = command;
    j["inputs"] = std::move(inputs);
    j["result"] = nullptr;
    j["diagnostics"] = Json::object();
    j["status"] = "ok";
    return j;
}

std::filesystem::path resolve_output(const std::string& out) {
    std::filesystem::path p(out);
    const char* dir = std::getenv(kOutputDirEnv);
    if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
    return p;
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
    if (c.output.empty()) {
        out << text;
        return;
    }
    auto path = resolve_output(c.output);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path.string());
    f << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exponents and profiles of separable p-harmonic functions in cones"};
    app.require_subcommand(1);
    Common c;

    auto* exp_cmd = app.add_subcommand("exponent", "solve for the singular or regular exponent of a cap");
    add_cap_options(exp_cmd, c, true);
    add_output_options(exp_cmd, c, "json");
    bool with_profile = false;
    exp_cmd->add_flag("--with-profile", with_profile, "include the profile in the JSON result");
    exp_cmd->add_option("--points", c.points, "profile points (shooting backend)")->capture_default_str();

    auto* sweep = app.add_subcommand("lambda-sweep", "ergodic constant lambda over a gamma grid");
    add_cap_options(sweep, c, false);
    add_output_options(sweep, c, "csv");
    double gmin = 0.1, gmax = 10.0;
    int count = 20;
    std::vector<double> gammas;
    int threads = 0;
    sweep->add_option("--gamma-min", gmin, "first gamma of the geometric grid")->capture_default_str();
    sweep->add_option("--gamma-max", gmax, "last gamma of the geometric grid")->capture_default_str();
    sweep->add_option("--count", count, "number of grid points")->capture_default_str();
    sweep->add_option("--gammas", gammas, "explicit increasing gamma values")->delimiter(',');
    sweep->add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->capture_default_str();

    auto* prof = app.add_subcommand("profile", "solve for the exponent and emit the profile");
    add_cap_options(prof, c, true);
    add_output_options(prof, c, "csv");
    prof->add_option("--points", c.points, "profile points (shooting backend)")->capture_default_str();

    auto* sec = app.add_subcommand("sector", "planar sector: exponent for an opening, or opening for an exponent");
    double opening = NAN, opening_deg = NAN, sgamma = NAN;
    double quad_tol = 1e-10;
    int max_subdiv = 60;
    sec->add_option("--p", c.p, "p-Laplacian exponent (> 1)")->required();
    sec->add_option("--branch", c.branch, "singular | regular")->capture_default_str()->check(CLI::IsMember({"singular", "regular"}));
    auto* o1 = sec->add_option("--opening", opening, "opening angle in radians");
    auto* o2 = sec->add_option("--opening-deg", opening_deg, "opening angle in degrees");
    auto* o3 = sec->add_option("--gamma", sgamma, "exponent; reports the opening instead");
    o1->excludes(o2)->excludes(o3);
    o2->excludes(o1)->excludes(o3);
    o3->excludes(o1)->excludes(o2);
    sec->add_option("--quad-tol", quad_tol, "absolute quadrature tolerance")->capture_default_str();
    sec->add_option("--max-subdiv", max_subdiv, "quadrature subinterval budget")->capture_default_str();
    sec->add_option("--points", c.points, "profile points")->capture_default_str();
    bool sec_profile = false;
    sec->add_flag("--with-profile", sec_profile, "include the profile in the JSON result");
    add_output_options(sec, c, "json");

    auto* val = app.add_subcommand("validate", "run the acceptance suite and consistency reports");
    std::vector<int> only;
    bool skip_report = false;
    val->add_option("--criteria", only, "run only these criterion ids")->delimiter(',');
    val->add_flag("--skip-report", skip_report, "skip the consistency reports");
    add_output_options(val, c, "json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    std::string command = app.get_subcommands().front()->get_name();
    if (c.format.empty()) c.format = (command == "lambda-sweep" || command == "profile") ? "csv" : "json";
    Json doc = envelope(command, Json::object());
    std::string text;
    int code = 0;
    try {
        if (command == "exponent" || command == "profile") {
            check_cap(c);
            double alpha = resolve_alpha(c);
            Branch br = parse_branch(c.branch);
            Backend be = parse_backend(c.backend);
            ExponentOptions opt = make_options(c);
            double tol = c.tol > 0.0 ? c.tol : default_tolerance(be);
            doc["inputs"] = cap_inputs(c, alpha, tol, opt, true);
            if (be == Backend::Shooting) doc["inputs"]["points"] = c.points;
            ExponentResult r = solve_exponent(c.p, c.ambient_dim - 1, alpha, br, be, tol, opt);
            bool want_profile = command == "profile" || with_profile;
            doc["result"] = exponent_json(r, want_profile);
            doc["diagnostics"]["profile_points"] = r.profile.size();
            doc["diagnostics"]["boundary_flux_negative"] = r.boundary_flux < 0.0;
            doc["diagnostics"]["exponent_relation_residual"] = r.g_residual;
            if (c.format == "csv") {
                text = command == "profile" ? profile_csv(r.profile)
                                            : "gamma,lambda,branch,backend\n" + format_double(r.gamma) + "," +
                                                  format_double(r.lambda) + "," + c.branch + "," + c.backend + "\n";
            }
        } else if (command == "lambda-sweep") {
            check_cap(c);
            double alpha = resolve_alpha(c);
            Backend be = parse_backend(c.backend);
            ExponentOptions opt = make_options(c);
            opt.threads = threads;
            if (gammas.empty()) {
                if (!(gmin > 0.0 && gmax > gmin) || count < 2) throw UsageError("need 0 < gamma-min < gamma-max and count >= 2");
                for (int k = 0; k < count; ++k) gammas.push_back(gmin * std::pow(gmax / gmin, double(k) / (count - 1)));
            }
            double tol = opt.lambda_tol;
            doc["inputs"] = cap_inputs(c, alpha, tol, opt, false);
            doc["inputs"]["gammas"] = gammas;
            LambdaCurve cv = lambda_curve(c.p, c.ambient_dim - 1, alpha, gammas, be, opt);
            Json pts = Json::array();
            for (const auto& pt : cv.points) pts.push_back(lambda_point_json(pt));
            doc["result"] = {{"points", pts}};
            doc["diagnostics"]["strictly_decreasing"] = cv.strictly_decreasing;
            doc["diagnostics"]["all_positive"] = cv.all_positive;
            doc["diagnostics"]["has_gaps"] = cv.has_gaps;
            if (c.format == "csv") text = lambda_csv(cv.points);
        } else if (command == "sector") {
            if (!(c.p > 1.0)) throw UsageError("--p must exceed 1");
            SectorSolveSpec s;
            s.p = c.p;
            s.branch = parse_branch(c.branch);
            s.quad_tol = quad_tol;
            s.max_subdiv = max_subdiv;
            Json in;
            in["p"] = c.p;
            in["branch"] = c.branch;
            in["quad_tol"] = quad_tol;
            in["max_subdiv"] = max_subdiv;
            in["points"] = c.points;
            in["format"] = c.format;
            double gamma, A;
            if (!std::isnan(sgamma)) {
                gamma = sgamma;
                in["gamma"] = gamma;
                doc["inputs"] = in;
                A = opening_of_gamma(s, gamma);
            } else {
                bool r = !std::isnan(opening), d = !std::isnan(opening_deg);
                if (!r && !d) throw UsageError("one of --opening, --opening-deg or --gamma is required");
                A = r ? opening : opening_deg * std::numbers::pi / 180.0;
                in["opening"] = A;
                doc["inputs"] = in;
                gamma = gamma_of_opening(s, A);
            }
            Json res;
            res["gamma"] = gamma;
            res["opening"] = A;
            res["branch_constant"] = branch_constant(c.p, s.branch, gamma);
            Profile pr;
            if (sec_profile || c.format == "csv") {
                pr = sector_profile(s, gamma, c.points);
                if (sec_profile) res["profile"] = profile_json(pr);
                doc["diagnostics"]["profile_residual"] = sector_residual(s, gamma, pr);
            }
            doc["result"] = res;
            if (c.format == "csv") text = profile_csv(pr);
        } else {
            Json in;
            in["criteria"] = only;
            in["consistency_report"] = !skip_report;
            doc["inputs"] = in;
            Json crit = Json::array();
            bool ok = true;
            auto record = [&](const CriterionResult& r) {
                err << summary_line(r) << "\n";
                crit.push_back(criterion_json(r));
                ok = ok && r.pass;
            };
            if (only.empty()) {
                run_acceptance(record);
            } else {
                for (int id : only) {
                    if (id < 1 || id > acceptance_criteria_count())
                        throw UsageError("unknown criterion id " + std::to_string(id));
                    record(run_criterion(id));
                }
            }
            Json res;
            res["criteria"] = crit;
            if (!skip_report) {
                Json reps = Json::array();
                const double pi = std::numbers::pi;
                for (auto [p, d, a] : {std::tuple{3.0, 2, pi / 2}, std::tuple{1.5, 2, pi / 4}}) {
                    ConsistencyReport rep = consistency_report(p, d, a);
                    err << (rep.all_pass ? "PASS" : "FAIL") << " consistency report p=" << p << " d=" << d
                        << " alpha=" << a << "\n";
                    reps.push_back(report_json(rep));
                    ok = ok && rep.all_pass;
                }
                res["consistency"] = reps;
            }
            doc["result"] = res;
            doc["status"] = ok ? "ok" : "failed";
            code = ok ? 0 : 1;
            if (c.format == "csv") {
                text = "criterion,title,pass,seconds\n";
                for (const auto& e : crit)
                    text += std::to_string(e["id"].get<int>()) + "," + e["title"].get<std::string>() + "," +
                            (e["pass"].get<bool>() ? "1" : "0") + "," + format_double(e["seconds"].get<double>()) + "\n";
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        doc["status"] = "error";
        Json er;
        er["type"] = dynamic_cast<const RangeError*>(&e)        ? "range"
                     : dynamic_cast<const ConvergenceError*>(&e) ? "convergence"
                     : dynamic_cast<const NoEigenfunctionError*>(&e) ? "no_eigenfunction"
                     : dynamic_cast<const NumericalError*>(&e)  ? "numerical"
                                                                : "internal";
        er["message"] = e.what();
        if (auto* re = dynamic_cast<const RangeError*>(&e)) {
            Json scan = Json::array();
            for (const auto& row : re->scan()) scan.push_back({row.x, row.finite ? Json(row.value) : Json(nullptr)});
            er["scan"] = scan;
        }
        if (auto* ce = dynamic_cast<const ConvergenceError*>(&e)) er["history"] = ce->history();
        doc["diagnostics"]["error"] = er;
        text.clear();
        code = 1;
    }
    if (text.empty()) text = doc.dump(2) + "\n";
    try {
        emit(text, c, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}

}  // namespace pcone
