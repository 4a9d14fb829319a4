// Exercises the shared library strictly through the C header, the same
// surface the CLI and external embedders see.

#include <doctest.h>

#include <gcap/gcap.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

gcap_params default_params() {
    gcap_params p;
    gcap_params_default(&p);
    return p;
}

} // namespace

TEST_CASE("capi: version and status strings") {
    CHECK(std::string(gcap_version_string()).rfind("gcap", 0) == 0);
    CHECK(std::string(gcap_status_str(GCAP_OK)) == "ok");
    CHECK(std::string(gcap_status_str(GCAP_ERR_CONVERGENCE)) ==
          "convergence error");
}

TEST_CASE("capi: phi family") {
    double v = 0.0;
    REQUIRE(gcap_phi(0.0, &v) == GCAP_OK);
    CHECK(v == doctest::Approx(1.0));
    REQUIRE(gcap_phi_prime(0.0, &v) == GCAP_OK);
    CHECK(v == doctest::Approx(-0.7978845608028654));
    REQUIRE(gcap_phi_second(1.0, &v) == GCAP_OK);
    CHECK(v > 0.0);
    CHECK(gcap_phi(NAN, &v) == GCAP_ERR_VALIDATION);
    CHECK(std::string(gcap_last_error()).find("finite") != std::string::npos);
    CHECK(gcap_phi(0.0, nullptr) == GCAP_ERR_VALIDATION);
}

TEST_CASE("capi: two-barrier series and convergence failure") {
    double v = 0.0;
    long terms = 0;
    REQUIRE(gcap_two_barrier_series(-1, 1, 1, 1, 1e-12, 1000000, &v, &terms) ==
            GCAP_OK);
    CHECK(v == doctest::Approx(0.6292225702004761).epsilon(1e-12));
    CHECK(terms >= 1);
    CHECK(gcap_two_barrier_series(-1e-5, 1e-5, 1, 1, 1e-12, 64, &v, &terms) ==
          GCAP_ERR_CONVERGENCE);
    CHECK(std::strlen(gcap_last_error()) > 0);
    CHECK(gcap_two_barrier_series(1, 2, 1, 1, 1e-12, 100, &v, nullptr) ==
          GCAP_ERR_VALIDATION);
}

TEST_CASE("capi: set parse, classify, union, capacity") {
    gcap_set *rays = nullptr;
    REQUIRE(gcap_set_parse_json(
                R"({"intervals": [["-inf", -1, "closed", "closed"],
                                  [2, "inf", "closed", "closed"]]})",
                &rays) == GCAP_OK);
    gcap_classification cls;
    REQUIRE(gcap_set_classify(rays, &cls) == GCAP_OK);
    CHECK(cls.case_tag == GCAP_SET_TWO_SIDED);
    CHECK(cls.rho_minus == 1.0);
    CHECK(cls.rho_plus == 2.0);
    CHECK(std::string(gcap_case_str(cls.case_tag)) == "TWO_SIDED");
    CHECK(std::string(gcap_side_str(cls.side)) == "mixed");

    const gcap_params p = default_params();
    gcap_capacity_result res;
    REQUIRE(gcap_capacity(rays, &p, &res) == GCAP_OK);
    double series = 0.0;
    REQUIRE(gcap_two_barrier_series(-1, 2, 1, 1, 1e-12, 1000000, &series,
                                    nullptr) == GCAP_OK);
    CHECK(res.value == series);
    CHECK(res.series_terms >= 1);
    CHECK(res.empty_set == 0);

    gcap_set *zero = nullptr;
    REQUIRE(gcap_set_parse_json(R"({"points": [0.0]})", &zero) == GCAP_OK);
    gcap_set *both = nullptr;
    REQUIRE(gcap_set_union(rays, zero, &both) == GCAP_OK);
    REQUIRE(gcap_capacity(both, &p, &res) == GCAP_OK);
    CHECK(res.value == 1.0); // now contains 0

    char *json_text = nullptr;
    REQUIRE(gcap_set_to_json(both, &json_text) == GCAP_OK);
    const auto round = nlohmann::json::parse(json_text);
    CHECK(round["points"].size() == 1);
    gcap_string_free(json_text);

    gcap_set_free(rays);
    gcap_set_free(zero);
    gcap_set_free(both);

    CHECK(gcap_set_parse_json("{bad", &rays) == GCAP_ERR_VALIDATION);
}

TEST_CASE("capi: empty set warning and unsupported regime") {
    gcap_set *empty = nullptr;
    REQUIRE(gcap_set_parse_json("{}", &empty) == GCAP_OK);
    gcap_params p = default_params();
    gcap_capacity_result res;
    REQUIRE(gcap_capacity(empty, &p, &res) == GCAP_OK);
    CHECK(res.value == 0.0);
    CHECK(res.empty_set == 1);
    CHECK(res.cls.case_tag == GCAP_SET_EMPTY);

    p.sigma_under = 0.3;
    CHECK(gcap_capacity(empty, &p, &res) == GCAP_ERR_UNSUPPORTED);
    gcap_set_free(empty);
}

TEST_CASE("capi: point, ray and u_n closed forms") {
    const gcap_params p = default_params();
    double vp = 0.0, vr = 0.0;
    REQUIRE(gcap_capacity_point(1.0, &p, &vp) == GCAP_OK);
    REQUIRE(gcap_capacity_ray(1.0, GCAP_RAY_GE, &p, &vr) == GCAP_OK);
    CHECK(vp == vr);
    CHECK(gcap_capacity_ray(1.0, 42, &p, &vr) == GCAP_ERR_VALIDATION);

    double u1 = 0.0;
    REQUIRE(gcap_u_n(100, 1.0, 0.0, -1.0, 1.0, &p, &u1) == GCAP_OK);
    CHECK(u1 == doctest::Approx(0.6337681591593675).epsilon(1e-10));
    CHECK(gcap_u_n(0, 1.0, 0.0, -1.0, 1.0, &p, &u1) == GCAP_ERR_VALIDATION);
}

TEST_CASE("capi: hitting density") {
    double d = 0.0;
    REQUIRE(gcap_hitting_density(0.5, 0.0, -1.0, 1.0, 1.0, 1e-12, 1000000,
                                 &d) == GCAP_OK);
    CHECK(d > 0.0);
    CHECK(gcap_hitting_density(0.5, 2.0, -1.0, 1.0, 1.0, 1e-12, 1000000, &d) ==
          GCAP_ERR_VALIDATION);
}

namespace {

double tent_cb(double x, void *) {
    return x < -1.0 || x > 1.0 ? 1.0 : std::abs(x);
}

double increments_cb(const double *xs, size_t n, void *) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i)
        acc += std::exp(-0.5 * xs[i] * xs[i]);
    return acc;
}

double quadratic_tx(double t, double x, void *) {
    return x * x + t; // d_t u = 1, d_xx u = 2, G = 1: exact solution
}

} // namespace

TEST_CASE("capi: pde solve, solution accessors, exports") {
    const gcap_params p = default_params();
    gcap_grid_config g;
    gcap_grid_config_default(&g);
    g.x_min = -4;
    g.x_max = 4;
    g.dx = 0.05;
    g.snapshot_stride = 0;

    size_t n = 0;
    REQUIRE(gcap_grid_n_nodes(&g, &n) == GCAP_OK);
    CHECK(n == 161);
    std::vector<double> xs(n);
    REQUIRE(gcap_grid_axis(&g, xs.data(), n) == GCAP_OK);
    CHECK(xs.front() == doctest::Approx(-4.0));
    CHECK(xs.back() == doctest::Approx(4.0));
    CHECK(gcap_grid_axis(&g, xs.data(), 3) == GCAP_ERR_VALIDATION);

    std::vector<double> u0(n);
    for (size_t j = 0; j < n; ++j)
        u0[j] = tent_cb(xs[j], nullptr);

    gcap_solution *sol = nullptr;
    REQUIRE(gcap_pde_solve(u0.data(), n, 1.0, &p, &g, &sol) == GCAP_OK);
    size_t levels = 0, nodes = 0;
    REQUIRE(gcap_solution_n_levels(sol, &levels) == GCAP_OK);
    REQUIRE(gcap_solution_n_nodes(sol, &nodes) == GCAP_OK);
    CHECK(nodes == n);
    CHECK(levels >= 2);
    std::vector<double> times(levels), level0(nodes);
    REQUIRE(gcap_solution_times(sol, times.data(), levels) == GCAP_OK);
    CHECK(times.front() == 0.0);
    CHECK(times.back() == doctest::Approx(1.0));
    REQUIRE(gcap_solution_level(sol, 0, level0.data(), nodes) == GCAP_OK);
    CHECK(level0[0] == u0[0]);
    double v = 0.0;
    REQUIRE(gcap_solution_value(sol, (size_t)-1, 0.0, &v) == GCAP_OK);
    CHECK(v >= 0.0);
    CHECK(gcap_solution_value(sol, 9999, 0.0, &v) == GCAP_ERR_VALIDATION);

    char *summary = nullptr;
    REQUIRE(gcap_solution_summary_json(sol, &summary) == GCAP_OK);
    const auto sj = nlohmann::json::parse(summary);
    CHECK(sj["u_at_zero"].size() == levels);
    gcap_string_free(summary);

    const char *csv_path = "/tmp/gcap_capi_test.csv";
    REQUIRE(gcap_solution_write_csv(sol, csv_path) == GCAP_OK);
    std::FILE *fp = std::fopen(csv_path, "r");
    REQUIRE(fp != nullptr);
    char header[16] = {0};
    REQUIRE(std::fgets(header, sizeof header, fp) != nullptr);
    CHECK(std::string(header) == "t,x,u\n");
    std::fclose(fp);
    std::remove(csv_path);

    gcap_solution_free(sol);

    // CFL violation surfaces as a validation error
    g.dt = 1.0;
    CHECK(gcap_pde_solve(u0.data(), n, 1.0, &p, &g, &sol) ==
          GCAP_ERR_VALIDATION);
}

TEST_CASE("capi: g-expectation evaluators") {
    const gcap_params p = default_params();
    gcap_grid_config g;
    gcap_grid_config_default(&g);
    g.x_min = -4;
    g.x_max = 4;
    g.dx = 0.05;

    double one = 0.0;
    REQUIRE(gcap_g_expectation_1step(&tent_cb, nullptr, 0.0, 1.0, &p, &g,
                                     &one) == GCAP_OK);
    CHECK(one > 0.0);

    const double ts[2] = {0.5, 1.0};
    double multi = 0.0;
    REQUIRE(gcap_g_expectation_multistep(&increments_cb, nullptr, ts, 2, 10.0,
                                         10.0, &p, &g, &multi) == GCAP_OK);
    CHECK(multi > 0.0);
    CHECK(multi <= 2.0 + 1e-9);

    const double bad_ts[2] = {1.0, 0.5};
    CHECK(gcap_g_expectation_multistep(&increments_cb, nullptr, bad_ts, 2,
                                       10.0, 10.0, &p, &g,
                                       &multi) == GCAP_ERR_VALIDATION);
    const double ts4[4] = {0.1, 0.2, 0.3, 0.4};
    CHECK(gcap_g_expectation_multistep(&increments_cb, nullptr, ts4, 4, 10.0,
                                       10.0, &p, &g,
                                       &multi) == GCAP_ERR_UNSUPPORTED);
}

TEST_CASE("capi: residual check on an exact classical solution") {
    gcap_params p = default_params();
    p.sigma_under = p.sigma_bar; // linear regime: G(a) = a/2
    double r = 0.0;
    REQUIRE(gcap_residual_check(&quadratic_tx, nullptr, 0.2, 1.0, -1.0, 1.0, 5,
                                9, 1e-3, nullptr, 0, &p, &r) == GCAP_OK);
    CHECK(r <= 1e-6);
    const double lines[] = {0.5};
    CHECK(gcap_residual_check(&quadratic_tx, nullptr, 0.2, 1.0, -1.0, 1.0, 5,
                              9, 1e-3, lines, 1, &p,
                              &r) == GCAP_ERR_VALIDATION);
}

namespace {

double band_cb(double x, void *ctx) {
    const double eps = *static_cast<const double *>(ctx);
    return (std::abs(x - 1.0) <= eps || std::abs(x + 1.0) <= eps) ? 1.0 : 0.0;
}

} // namespace

TEST_CASE("capi: monte carlo surface") {
    const gcap_params p = default_params();
    gcap_mc_config mc;
    gcap_mc_config_default(&mc);
    mc.n_paths = 20000;
    mc.dt = 1e-3;
    mc.seed = 5;

    gcap_mc_estimate est;
    REQUIRE(gcap_mc_hitting(-1.0, 1.0, &p, &mc, &est) == GCAP_OK);
    double series = 0.0;
    REQUIRE(gcap_two_barrier_series(-1, 1, 1, 1, 1e-12, 1000000, &series,
                                    nullptr) == GCAP_OK);
    CHECK(std::abs(est.mean - series) <= 4.0 * est.std_error + 2e-3);

    gcap_mc_estimate est2;
    REQUIRE(gcap_mc_hitting(-1.0, 1.0, &p, &mc, &est2) == GCAP_OK);
    CHECK(est.mean == est2.mean); // determinism through the C surface

    gcap_strategy strat;
    strat.kind = GCAP_STRATEGY_CONSTANT;
    strat.sigma = 1.0;
    strat.b = strat.l = 0.0;
    double eps = 5e-3;
    gcap_mc_estimate pay;
    REQUIRE(gcap_mc_payoff(&strat, &band_cb, &eps, 1.0, &p, &mc, &pay) ==
            GCAP_OK);
    CHECK(pay.mean < est.mean);

    char *record = nullptr;
    REQUIRE(gcap_mc_record_json(&pay, &mc, &strat, &record) == GCAP_OK);
    const auto rj = nlohmann::json::parse(record);
    CHECK(rj["strategy"]["kind"] == "constant");
    CHECK(rj["n_paths"] == 20000);
    gcap_string_free(record);

    strat.kind = GCAP_STRATEGY_CONSTANT;
    strat.sigma = 9.0; // outside [sigma_under, sigma_bar]
    CHECK(gcap_mc_payoff(&strat, &band_cb, &eps, 1.0, &p, &mc, &pay) ==
          GCAP_ERR_VALIDATION);
}
