#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "core/capacity.hpp"
#include "oracles.hpp"

using namespace gcap;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CapacityParams params(double sigma_bar = 1.0, double T = 1.0) {
    CapacityParams p;
    p.sigma_bar = sigma_bar;
    p.horizon = T;
    return p;
}

BorelSetSpec from_json(const std::string &text) {
    return parse_set_json(text);
}

} // namespace

TEST_CASE("capacity: rho = 0 gives capacity one for any (sigma, T)") {
    const auto a = from_json(R"({"intervals": [[0, 1, "open", "open"]]})");
    for (double sb : {0.5, 1.0, 2.0})
        for (double T : {0.25, 1.0, 5.0})
            CHECK(capacity_of(a, params(sb, T)).value == 1.0);
}

TEST_CASE("capacity: single point matches phi, quadrature oracle") {
    BorelSetSpec one;
    one.points = {1.0};
    const auto r = capacity_of(one, params());
    CHECK(r.cls.case_tag == SetCase::one_sided);
    CHECK(std::abs(r.value - oracles::phi_by_quadrature(1.0)) <= 1e-12);
    CHECK(r.value == doctest::Approx(0.3173105078629141).epsilon(1e-10));
}

TEST_CASE("capacity: two-point set equals the complement-of-interval set") {
    BorelSetSpec pts;
    pts.points = {-1.0, 1.0};
    const auto rays = from_json(
        R"({"intervals": [["-inf", -1, "open", "closed"], [1, "inf", "closed", "open"]]})");
    const auto a = capacity_of(pts, params());
    const auto b = capacity_of(rays, params());
    CHECK(a.value == b.value); // identical by construction
    CHECK(a.value ==
          two_barrier_series(-1.0, 1.0, 1.0, 1.0).value);
}

TEST_CASE("capacity: theorem series matches an independent transcription") {
    // direct sum over the displayed formula with rho(A+), rho(A-)
    const double rp = 1.7, rm = 0.6, T = 1.3, sb = 0.9;
    const double s = sb * std::sqrt(T);
    double direct = 0.0;
    for (int i = -30; i <= 30; ++i) {
        const double sgn = i >= 0 ? 1.0 : -1.0;
        direct += sgn * (phi(std::abs(2.0 * i * (rp + rm) + rm) / s) +
                         phi(std::abs(2.0 * i * (rp + rm) + rp) / s));
    }
    BorelSetSpec a;
    a.points = {-rm, rp};
    CapacityParams p = params(sb, T);
    CHECK(capacity_of(a, p).value == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("capacity: empty set returns zero with a warning flag") {
    const auto r = capacity_of(BorelSetSpec{}, params());
    CHECK(r.value == 0.0);
    CHECK(r.empty_set);
    CHECK(r.cls.case_tag == SetCase::empty);
}

TEST_CASE("capacity: nondegenerate sigma_under is rejected") {
    BorelSetSpec a;
    a.points = {1.0};
    CapacityParams p = params();
    p.sigma_under = 0.5;
    CHECK_THROWS_AS(capacity_of(a, p), UnsupportedError);
    CHECK_THROWS_AS(capacity_point(1.0, p), UnsupportedError);
    CHECK_THROWS_AS(u_n(1, 0.0, 0.0, -1.0, 1.0, p), UnsupportedError);
}

TEST_CASE("capacity: parameter validation") {
    BorelSetSpec a;
    a.points = {1.0};
    CapacityParams p = params();
    p.sigma_bar = 0.0;
    CHECK_THROWS_AS(capacity_of(a, p), ValidationError);
    p = params();
    p.horizon = -1.0;
    CHECK_THROWS_AS(capacity_of(a, p), ValidationError);
    p = params();
    p.sigma_under = -0.25;
    CHECK_THROWS_AS(capacity_of(a, p), ValidationError);
}

TEST_CASE("u_n: complement branch is phi of the scaled distance") {
    CapacityParams p = params();
    CHECK(u_n(3, 0.7, -1.0, -1.0, 1.0, p) == 1.0); // x = b -> phi(0)
    CHECK(u_n(3, 0.7, 1.0, -1.0, 1.0, p) == 1.0);  // x = l
    const double tau = 1.0 / 3.0 + 0.7;
    CHECK(u_n(3, 0.7, 2.5, -1.0, 1.0, p) ==
          doctest::Approx(phi(1.5 / std::sqrt(tau))).epsilon(1e-15));
}

TEST_CASE("u_n: equals the integral of the hitting density") {
    CapacityParams p = params();
    for (long n : {1L, 10L}) {
        for (double t : {0.0, 0.5}) {
            const double upper = 1.0 / static_cast<double>(n) + t;
            const double quad = oracles::integrate(
                [](double s) {
                    return hitting_density(s, 0.0, -1.0, 1.0, 1.0);
                },
                1e-12, upper, 1e-12);
            CHECK(std::abs(u_n(n, t, 0.0, -1.0, 1.0, p) - quad) <= 1e-8);
        }
    }
}

TEST_CASE("u_n: large n converges to the two-point capacity") {
    CapacityParams p = params();
    BorelSetSpec a;
    a.points = {-1.0, 1.0};
    const double cap = capacity_of(a, p).value;
    CHECK(std::abs(u_n(1000000, 1.0, 0.0, -1.0, 1.0, p) - cap) <= 1e-6);
}

TEST_CASE("u_n: pointwise nonincreasing in n, decaying off {b,l}") {
    CapacityParams p = params();
    const long ns[] = {1, 10, 100, 10000, 1000000};
    for (double x : {-1.0, -0.6, 0.0, 0.35, 1.0, 1.5}) {
        double prev = 2.0;
        double last = 0.0;
        for (long n : ns) {
            const double v = u_n(n, 0.0, x, -1.0, 1.0, p);
            CHECK(v <= prev + 1e-14);
            prev = v;
            last = v;
        }
        if (x == -1.0 || x == 1.0)
            CHECK(last == 1.0);
        else
            CHECK(last <= 1e-6); // far below the indicator limit already
    }
}

TEST_CASE("u_n: validation") {
    CapacityParams p = params();
    CHECK_THROWS_AS(u_n(0, 0.0, 0.0, -1.0, 1.0, p), ValidationError);
    CHECK_THROWS_AS(u_n(1, -0.1, 0.0, -1.0, 1.0, p), ValidationError);
    CHECK_THROWS_AS(u_n(1, 0.0, 0.0, 1.0, 2.0, p), ValidationError);
}

TEST_CASE("capacity_point and capacity_ray") {
    CHECK(capacity_point(0.0, params()) == 1.0);
    // same scaled argument, same value
    CHECK(capacity_point(2.0, params(1.0, 4.0)) ==
          capacity_point(1.0, params(1.0, 1.0)));
    CHECK(std::abs(capacity_point(1.0, params(2.0, 1.0)) -
                   oracles::phi_by_quadrature(0.5)) <= 1e-12);
    CHECK(capacity_ray(1.0, RayDir::ge, params()) ==
          capacity_point(1.0, params()));
    CHECK(capacity_ray(-1.0, RayDir::le, params()) ==
          capacity_point(1.0, params()));

    // consistency with capacity_of on the matching specs
    BorelSetSpec ray = parse_set_json(
        R"({"intervals": [[1, "inf", "closed", "open"]]})");
    CHECK(capacity_of(ray, params()).value ==
          capacity_ray(1.0, RayDir::ge, params()));
}

TEST_CASE("capacity: far barrier limit approaches the one-sided value") {
    BorelSetSpec a;
    a.points = {-50.0, 0.8};
    const auto r = capacity_of(a, params());
    CHECK(std::abs(r.value - phi(0.8)) <= 1e-12);
}

namespace {

BorelSetSpec random_union(std::mt19937_64 &gen) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::bernoulli_distribution flag(0.5);
    BorelSetSpec s;
    const int k = static_cast<int>(gen() % 3);
    for (int i = 0; i < k; ++i) {
        double a = u(gen), b = u(gen);
        if (a > b)
            std::swap(a, b);
        if (a == b)
            b += 0.05;
        s.intervals.push_back({a, b, flag(gen), flag(gen)});
    }
    const int np = 1 + static_cast<int>(gen() % 2);
    for (int i = 0; i < np; ++i)
        s.points.push_back(u(gen));
    return s;
}

} // namespace

TEST_CASE("capacity: monotone and subadditive over random unions") {
    std::mt19937_64 gen(101);
    CapacityParams p = params();
    for (int rep = 0; rep < 100; ++rep) {
        const auto a = random_union(gen);
        const auto b = random_union(gen);
        const auto ab = set_union(a, b);
        const double ca = capacity_of(a, p).value;
        const double cb = capacity_of(b, p).value;
        const double cab = capacity_of(ab, p).value;
        CHECK(ca <= cab + 1e-9);
        CHECK(cb <= cab + 1e-9);
        CHECK(cab <= ca + cb + 1e-9);
    }
}
