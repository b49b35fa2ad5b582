#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nrf/oracle.hpp"

using namespace nrf;

namespace {

double field_gap(const CurvatureField& a, const CurvatureField& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.k_rad.size(); ++i) {
        m = std::max(m, std::abs(a.k_rad[i] - b.k_rad[i]));
        m = std::max(m, std::abs(a.k_sph[i] - b.k_sph[i]));
        m = std::max(m, std::abs(a.ric_rad[i] - b.ric_rad[i]));
        m = std::max(m, std::abs(a.ric_tan[i] - b.ric_tan[i]));
    }
    return m;
}

} // namespace

TEST_CASE("oracle on hyperbolic space: Ricci eigenvalues -(n-1)") {
    for (int n : {3, 4}) {
        const auto grid = RadialGrid::with_extent(5.0, 1000);
        const auto m = make_hyperbolic(n, grid);
        const auto c = curvature_oracle(m);
        for (int i = 0; i < grid.node_count; i += 13) {
            CHECK(c.ric_rad[size_t(i)] == doctest::Approx(-(n - 1.0)).epsilon(1e-5));
            CHECK(c.ric_tan[size_t(i)] == doctest::Approx(-(n - 1.0)).epsilon(1e-5));
            CHECK(c.k_rad[size_t(i)] == doctest::Approx(-1.0).epsilon(1e-5));
            CHECK(c.k_sph[size_t(i)] == doctest::Approx(-1.0).epsilon(1e-5));
        }
    }
}

TEST_CASE("oracle on the Euclidean warp: everything vanishes") {
    const auto grid = RadialGrid::with_extent(4.0, 800);
    WarpedMetric m = make_hyperbolic(3, grid);
    for (int i = 0; i < grid.node_count; ++i) m.b[size_t(i)] = grid.radius(i);
    const auto c = curvature_oracle(m);
    for (int i = 0; i < grid.node_count; ++i) {
        CHECK(std::abs(c.k_rad[size_t(i)]) < 1e-9);
        CHECK(std::abs(c.k_sph[size_t(i)]) < 1e-9);
        CHECK(std::abs(c.ric_tan[size_t(i)]) < 1e-9);
    }
}

TEST_CASE("oracle rejects unsupported dimensions") {
    const auto grid = RadialGrid::with_extent(4.0, 100);
    CHECK_THROWS_AS(curvature_oracle(make_hyperbolic(5, grid)), std::invalid_argument);
}

TEST_CASE("closed-form curvature matches the oracle on a perturbed metric") {
    const auto grid = RadialGrid::with_extent(6.0, 3000); // dr = 2e-3
    const auto m = perturb(3, grid, 0.01, 3.0, PerturbOptions{});
    const double gap = field_gap(curvature(m), curvature_oracle(m));
    CHECK(gap < 2e-6);
    CHECK(gap > 0.0);
}

TEST_CASE("closed-form vs oracle discrepancy shrinks ~4x per halving") {
    auto gap_at = [](int nodes) {
        const auto grid = RadialGrid::with_extent(6.0, nodes);
        const auto m = perturb(3, grid, 0.01, 3.0, PerturbOptions{});
        return field_gap(curvature(m), curvature_oracle(m));
    };
    const double g1 = gap_at(1500);
    const double g2 = gap_at(3000);
    CHECK(g1 / g2 > 3.0);
    CHECK(g1 / g2 < 5.0);
}

TEST_CASE("n=4 closed form matches the oracle too") {
    const auto grid = RadialGrid::with_extent(6.0, 2000);
    const auto m = perturb(4, grid, 0.01, 2.5, PerturbOptions{});
    CHECK(field_gap(curvature(m), curvature_oracle(m)) < 5e-6);
}

TEST_CASE("tensor gradient oracle validates the connection weights") {
    const auto grid = RadialGrid::with_extent(8.0, 1600);
    for (int n : {3, 4}) {
        const auto m = make_hyperbolic(n, grid);
        const int i = grid.index_at(3.0);
        const double r = grid.radius(i);
        const double f = 0.8, df = -0.3;
        const double coth = std::cosh(r) / std::sinh(r);

        SUBCASE("radial-traceless: |grad xi|^2 = f_s^2 + 2n f^2 (b_s/b)^2") {
            const double got = tensor_gradient_sq_oracle(m, i, f, df, TensorForm::RadialTraceless);
            const double expect = df * df + 2.0 * n * f * f * coth * coth;
            CHECK(got == doctest::Approx(expect).epsilon(1e-6));
        }
        SUBCASE("sphere-traceless: pointwise cot^2 connection term") {
            const double got = tensor_gradient_sq_oracle(m, i, f, df, TensorForm::SphereTraceless);
            const double cot = std::cos(oracle_theta()) / std::sin(oracle_theta());
            const double expect =
                df * df + f * f * (2.0 * coth * coth +
                                   2.0 * (n - 1.0) * cot * cot / (std::sinh(r) * std::sinh(r)));
            CHECK(got == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("tensor gradient oracle on a perturbed metric still matches closed form") {
    const auto grid = RadialGrid::with_extent(8.0, 1600);
    const auto m = perturb(3, grid, 0.02, 2.0, PerturbOptions{});
    const int zone = sixth_order_zone(grid);
    const auto db = d_dr(m.b, Parity::Odd, grid.dr, zone);
    const int i = grid.index_at(2.5);
    const double f = 1.3, df = 0.45;
    const double ai = m.a[size_t(i)], bi = m.b[size_t(i)];
    const double fs = df / ai;
    const double bs_over_b = (db[size_t(i)] / ai) / bi;
    const double expect = fs * fs + 6.0 * f * f * bs_over_b * bs_over_b;
    const double got = tensor_gradient_sq_oracle(m, i, f, df, TensorForm::RadialTraceless);
    CHECK(got == doctest::Approx(expect).epsilon(1e-5));
}
