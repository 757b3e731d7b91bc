#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcone/cli.hpp"

using Json = nlohmann::json;

struct Run {
    int code;
    std::string out, err;
};

static Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "pcone");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = pcone::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

TEST_CASE("exponent json envelope") {
    auto r = run({"exponent", "--p", "2", "--alpha", "1.5707963267948966", "--tol", "1e-8"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["command"] == "exponent");
    CHECK(j["status"] == "ok");
    CHECK(j["inputs"]["ambient_dim"] == 3);
    CHECK(std::abs(j["result"]["gamma"].get<double>() - 2.0) <= 1e-7);
}

TEST_CASE("sector both directions") {
    auto a = run({"sector", "--p", "2", "--opening-deg", "180"});
    REQUIRE(a.code == 0);
    CHECK(std::abs(Json::parse(a.out)["result"]["gamma"].get<double>() - 1.0) <= 1e-9);
    auto b = run({"sector", "--p", "2", "--gamma", "2"});
    REQUIRE(b.code == 0);
    CHECK(std::abs(Json::parse(b.out)["result"]["opening"].get<double>() - 1.5707963267948966) <= 1e-9);
}

TEST_CASE("profile csv") {
    auto r = run({"profile", "--p", "3", "--alpha-deg", "90", "--branch", "regular", "--points", "11"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta,omega,omega_prime");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 11);
}

TEST_CASE("lambda sweep csv") {
    auto r = run({"lambda-sweep", "--p", "2", "--alpha-deg", "90", "--gammas", "0.5,1,2", "--grid", "1000"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("gamma,lambda,backend", 0) == 0);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({"exponent", "--alpha", "1"}).code == 2);
    CHECK(run({"exponent", "--p", "2", "--alpha", "1", "--alpha-deg", "30"}).code == 2);
    CHECK(run({"exponent", "--p", "0.5", "--alpha", "1"}).code == 2);
    CHECK(run({"sector", "--p", "2", "--opening", "1", "--gamma", "1"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({"exponent", "--p", "2", "--alpha", "1", "--format", "xml"}).code == 2);
}

TEST_CASE("numerical failures exit with 1 and report the error") {
    auto r = run({"sector", "--p", "1.5", "--gamma", "0.5"});
    CHECK(r.code == 1);
    auto j = Json::parse(r.out);
    CHECK(j["status"] == "error");
    CHECK(j["diagnostics"]["error"]["type"].is_string());
}

TEST_CASE("output file honours PCONE_OUTPUT_DIR") {
    auto dir = std::filesystem::temp_directory_path() / "pcone_cli_test";
    std::filesystem::create_directories(dir);
    setenv("PCONE_OUTPUT_DIR", dir.c_str(), 1);
    auto r = run({"sector", "--p", "2", "--opening", "3.141592653589793", "--output", "s.json"});
    unsetenv("PCONE_OUTPUT_DIR");
    REQUIRE(r.code == 0);
    std::ifstream f(dir / "s.json");
    REQUIRE(f.good());
    Json j = Json::parse(f);
    CHECK(j["command"] == "sector");
    std::filesystem::remove_all(dir);
}

TEST_CASE("validate a single criterion") {
    auto r = run({"validate", "--criteria", "1", "--skip-report"});
    CHECK(r.code == 0);
    CHECK(r.err.find("PASS criterion 1") != std::string::npos);
}
