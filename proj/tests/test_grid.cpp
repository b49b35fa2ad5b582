#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nrf/grid.hpp"

using namespace nrf;

namespace {

std::vector<double> sample(const RadialGrid& g, double (*f)(double)) {
    std::vector<double> v(size_t(g.node_count));
    for (int i = 0; i < g.node_count; ++i) v[size_t(i)] = f(g.radius(i));
    return v;
}

double max_err(const std::vector<double>& got, const RadialGrid& g, double (*f)(double),
               int lo, int hi) {
    double m = 0.0;
    for (int i = lo; i < hi; ++i)
        m = std::max(m, std::abs(got[size_t(i)] - f(g.radius(i))));
    return m;
}

} // namespace

TEST_CASE("grid construction and invariants") {
    auto g = RadialGrid::with_count(100, 0.01);
    CHECK(g.r_max == doctest::Approx(1.0));
    CHECK(g.radius(0) == doctest::Approx(0.005));
    CHECK(g.radius(99) == doctest::Approx(0.995));
    for (int i = 1; i < g.node_count; ++i)
        CHECK(g.radius(i) - g.radius(i - 1) == doctest::Approx(g.dr));
    CHECK_THROWS_AS(RadialGrid::with_count(8, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid::with_count(32, -1.0), std::invalid_argument);
    CHECK(g.index_at(0.5) == 50);
}

TEST_CASE("fd_weights reproduces classic stencils") {
    auto w = fd_weights(0.0, {-1, 0, 1}, 1);
    CHECK(w[0] == doctest::Approx(-0.5));
    CHECK(w[1] == doctest::Approx(0.0));
    CHECK(w[2] == doctest::Approx(0.5));
    w = fd_weights(0.0, {-1, 0, 1}, 2);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-2.0));
    w = fd_weights(0.0, {-2, -1, 0, 1, 2}, 1);
    CHECK(w[0] == doctest::Approx(1.0 / 12));
    CHECK(w[1] == doctest::Approx(-8.0 / 12));
    CHECK(w[3] == doctest::Approx(8.0 / 12));
    w = fd_weights(0.0, {-2, -1, 0, 1, 2}, 2);
    CHECK(w[2] == doctest::Approx(-30.0 / 12));
}

TEST_CASE("derivatives of odd and even fields across the origin") {
    auto g = RadialGrid::with_count(200, 0.02);
    auto fodd = sample(g, +[](double r) { return std::sinh(r); });
    auto feven = sample(g, +[](double r) { return std::cosh(r); });

    auto d1 = d_dr(fodd, Parity::Odd, g.dr, g.index_at(1.0));
    auto d2 = d2_dr2(fodd, Parity::Odd, g.dr, g.index_at(1.0));
    auto e1 = d_dr(feven, Parity::Even, g.dr, g.index_at(1.0));

    // interior: 4th order; origin cells: 6th order via parity ghosts
    CHECK(max_err(d1, g, +[](double r) { return std::cosh(r); }, 0, 190) < 3e-7);
    CHECK(max_err(d2, g, +[](double r) { return std::sinh(r); }, 0, 190) < 3e-6);
    CHECK(max_err(e1, g, +[](double r) { return std::sinh(r); }, 0, 190) < 3e-7);
    // one-sided boundary rows stay accurate
    CHECK(max_err(d1, g, +[](double r) { return std::cosh(r); }, 190, 200) < 1e-5);
    CHECK(max_err(d2, g, +[](double r) { return std::sinh(r); }, 190, 200) < 2e-3);
}

TEST_CASE("derivative convergence order") {
    double e_coarse, e_fine;
    {
        auto g = RadialGrid::with_count(100, 0.04);
        auto f = sample(g, +[](double r) { return std::sinh(r); });
        auto d = d_dr(f, Parity::Odd, g.dr, g.index_at(1.0));
        e_coarse = max_err(d, g, +[](double r) { return std::cosh(r); }, 30, 90);
    }
    {
        auto g = RadialGrid::with_count(200, 0.02);
        auto f = sample(g, +[](double r) { return std::sinh(r); });
        auto d = d_dr(f, Parity::Odd, g.dr, g.index_at(1.0));
        e_fine = max_err(d, g, +[](double r) { return std::cosh(r); }, 60, 180);
    }
    // 4th order: halving dr shrinks the error ~16x
    CHECK(e_coarse / e_fine > 10.0);
}

TEST_CASE("polynomials are differentiated exactly") {
    auto g = RadialGrid::with_count(64, 0.05);
    auto f = sample(g, +[](double r) { return r * r * r; });
    auto d1 = d_dr(f, Parity::Odd, g.dr, 4);
    auto d2 = d2_dr2(f, Parity::Odd, g.dr, 4);
    CHECK(max_err(d1, g, +[](double r) { return 3 * r * r; }, 0, 64) < 1e-11);
    CHECK(max_err(d2, g, +[](double r) { return 6 * r; }, 0, 64) < 1e-9);
}

TEST_CASE("arclength and integrate") {
    auto g = RadialGrid::with_count(100, 0.01);
    std::vector<double> ones(100, 1.0);
    auto s = arclength(ones, g.dr);
    for (int i = 0; i < 100; ++i) CHECK(s[size_t(i)] == doctest::Approx(g.radius(i)));
    CHECK(integrate(ones, g.dr) == doctest::Approx(1.0));
}
