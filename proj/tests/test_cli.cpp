// Drives the installed CLI binary end to end: report schema, exit codes,
// determinism. GCAP_CLI_PATH points at the build-tree executable.

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "core/special_fn.hpp"

using nlohmann::json;

namespace {

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cli(const std::string &args) {
    const std::string cmd = std::string(GCAP_CLI_PATH) + " " + args + " 2>/dev/null";
    std::FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

bool all_checks_pass(const json &report) {
    for (const auto &c : report["checks"])
        if (!c["pass"].get<bool>())
            return false;
    return true;
}

} // namespace

TEST_CASE("cli: capacity of a point set at the origin") {
    const auto r = run_cli("capacity --set '{\"points\":[0.0]}'");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["command"] == "capacity");
    CHECK(j["outputs"]["capacity"] == 1.0);
    CHECK(j["outputs"]["classification"]["case"] == "FULL_IF_RHO_ZERO");
    CHECK(j["checks"].is_array());
}

TEST_CASE("cli: two-sided set runs the series") {
    const auto r = run_cli(
        R"(capacity --set '{"intervals":[["-inf",-1,"closed","closed"],[2,"inf","closed","closed"]]}' --sigma-bar 1 --T 1)");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    const double expected = gcap::two_barrier_series(-1.0, 2.0, 1.0, 1.0).value;
    CHECK(j["outputs"]["capacity"].get<double>() == expected);
    CHECK(j["outputs"]["classification"]["case"] == "TWO_SIDED");
    CHECK(j["outputs"]["series_terms"].get<long>() >= 1);
}

TEST_CASE("cli: one-sided interval gives phi(rho)") {
    const auto r = run_cli(
        R"(capacity --set '{"intervals":[[0.5,3,"closed","closed"]]}')");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["outputs"]["capacity"].get<double>() ==
          doctest::Approx(gcap::phi(0.5)).epsilon(1e-14));
}

TEST_CASE("cli: exit code 2 on validation errors") {
    CHECK(run_cli("capacity --set 'not json'").exit_code == 2);
    CHECK(run_cli("capacity").exit_code == 2); // missing --set
    CHECK(run_cli("capacity --set '{}' --sigma-bar -1").exit_code == 2);
    CHECK(run_cli("no-such-command").exit_code == 2);
}

TEST_CASE("cli: exit code 3 on convergence failure") {
    const auto r = run_cli(
        R"(capacity --set '{"points":[-1e-9,1e-9]}' --max-terms 1000)");
    CHECK(r.exit_code == 3);
}

TEST_CASE("cli: verify cross-validates all four routes") {
    const auto r = run_cli(
        "verify --b -1 --l 1 --paths 30000 --dt-mc 1e-3 --seed 3");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["checks"].size() >= 6);
    CHECK(all_checks_pass(j));
    // every check names its oracle
    for (const auto &c : j["checks"])
        CHECK(!c["oracle"].get<std::string>().empty());
}

TEST_CASE("cli: verify exits 1 when a check fails") {
    // k = 1 alone stops far from the series value, tripping the final check
    const auto r = run_cli(
        "verify --b -1 --l 1 --paths 2000 --dt-mc 1e-3 --phik-max 1 "
        "--un-list 1");
    CHECK(r.exit_code == 1);
}

TEST_CASE("cli: demo-nonqc decreasing sequence with positive limit") {
    const auto r = run_cli(
        "demo-nonqc --x0 1 --n-list 1,2,4,8 --dx 0.01");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(all_checks_pass(j));
    const auto &seq = j["outputs"]["sequence"];
    REQUIRE(seq.size() == 4);
    double prev = 2.0;
    for (const auto &item : seq) {
        const double v = item["value"].get<double>();
        CHECK(v < prev);
        prev = v;
    }
    CHECK(!j["outputs"]["narrative"].get<std::string>().empty());
}

TEST_CASE("cli: demo-nonqc at the origin keeps value one") {
    const auto r = run_cli("demo-nonqc --x0 0 --n-list 1,2 --dx 0.01");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    for (const auto &item : j["outputs"]["sequence"])
        CHECK(item["value"].get<double>() == doctest::Approx(1.0));
    CHECK(all_checks_pass(j));
}

TEST_CASE("cli: pde-solve constant payoff and csv export") {
    const auto r = run_cli(
        "pde-solve --payoff const:2.5 --x-min -2 --x-max 2 --dx 0.1 --T 0.5");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["outputs"]["value_at_zero"] == 2.5);

    const auto csv = run_cli(
        "pde-solve --payoff const:1 --x-min -2 --x-max 2 --dx 0.5 --T 0.1 "
        "--output csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("t,x,u\n", 0) == 0);
}

TEST_CASE("cli: mc hitting is deterministic given the seed") {
    const std::string args =
        "mc --hitting --b -1 --l 1 --paths 20000 --dt-mc 1e-3 --seed 17";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    const auto j = json::parse(a.out);
    CHECK(j["outputs"]["estimate"]["n_paths"] == 20000);
    CHECK(j["outputs"]["estimate"]["seed"] == 17);
}

TEST_CASE("cli: mc frozen constant strategy") {
    const auto r = run_cli(
        "mc --strategy constant:0 --payoff const:3 --paths 100 --T 1");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["outputs"]["estimate"]["mean"] == 3.0);
    CHECK(j["outputs"]["estimate"]["std_error"] == 0.0);
}

TEST_CASE("cli: hitting-density integral identity checks") {
    const auto r = run_cli(
        "hitting-density --x 0 --b -1 --l 1 --s-lo 0.05 --s-hi 2 --s-count 8");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(all_checks_pass(j));
    CHECK(j["checks"].size() == 2); // u_n identity + x = 0 series identity
    const auto csv = run_cli(
        "hitting-density --x 0.25 --b -1 --l 1 --s-count 5 --output csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("s,density\n", 0) == 0);
}

TEST_CASE("cli: report lands in --out file") {
    const char *path = "/tmp/gcap_cli_report.json";
    std::remove(path);
    const auto r = run_cli(std::string("capacity --set '{\"points\":[1]}' --out ") + path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    std::FILE *fp = std::fopen(path, "r");
    REQUIRE(fp != nullptr);
    std::fclose(fp);
    std::remove(path);
}
