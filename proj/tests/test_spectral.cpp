#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nrf/spectral.hpp"

using namespace nrf;

TEST_CASE("function bottom: closed-form n=3 reduction") {
    // u = f sinh r turns the radial problem into -u'' = (lambda - 1) u
    const auto grid = RadialGrid::with_extent(20.0, 4000);
    const auto m = make_hyperbolic(3, grid);
    const auto est = function_bottom(m);
    const double expected = 1.0 + std::pow(M_PI / 20.0, 2);
    CHECK(est.value == doctest::Approx(expected).epsilon(1e-4));
    CHECK(est.kind == SpectralKind::FunctionBottom);
}

TEST_CASE("function bottom: n=7 approaches 9 from above, decreasing in r_max") {
    double prev = 1e300;
    for (double R : {20.0, 25.0, 30.0}) {
        const auto grid = RadialGrid::with_extent(R, int(R * 100));
        const double v = function_bottom(make_hyperbolic(7, grid)).value;
        CHECK(v < prev);
        CHECK(v > 9.0);
        prev = v;
    }
    CHECK(std::abs(prev - 9.0) < 0.09);
}

TEST_CASE("function bottom: Euclidean warp has the flat-ball eigenvalue") {
    const double R = 6.0;
    const auto grid = RadialGrid::with_extent(R, 3000);
    WarpedMetric m = make_hyperbolic(3, grid);
    for (int i = 0; i < grid.node_count; ++i) m.b[size_t(i)] = grid.radius(i);
    const auto est = function_bottom(m);
    CHECK(est.value == doctest::Approx(std::pow(M_PI / R, 2)).epsilon(0.01));
}

TEST_CASE("rayleigh_function") {
    const auto grid = RadialGrid::with_extent(12.0, 1200);
    const auto m = make_hyperbolic(3, grid);

    std::vector<double> f(size_t(grid.node_count), 0.0);
    for (int i = 0; i < grid.node_count; ++i) {
        const double r = grid.radius(i);
        if (r > 2.0 && r < 8.0) f[size_t(i)] = std::sin(M_PI * (r - 2.0) / 6.0);
    }

    SUBCASE("sine bump quotient is at least the H^3 bottom") {
        const auto est = rayleigh_function(m, f);
        CHECK(est.value >= 1.0);
        CHECK(est.value < 3.0);
    }
    SUBCASE("homogeneity: scaling f leaves the quotient unchanged") {
        const double q1 = rayleigh_function(m, f).value;
        auto f10 = f;
        for (auto& v : f10) v *= 10.0;
        CHECK(rayleigh_function(m, f10).value == doctest::Approx(q1).epsilon(1e-14));
    }
    SUBCASE("hat profile matches the hand-computed discrete form to 1e-8") {
        std::vector<double> hat(size_t(grid.node_count), 0.0);
        const int i0 = grid.index_at(4.0), i1 = grid.index_at(6.0), i2 = grid.index_at(8.0);
        for (int i = i0; i <= i2 && i < grid.node_count; ++i) {
            const double r = grid.radius(i);
            hat[size_t(i)] = (i <= i1) ? (r - grid.radius(i0)) / 2.0
                                       : (grid.radius(i2) - r) / 2.0;
        }
        // independent hand evaluation of the documented discrete form
        auto P = [&](int i) {
            return std::pow(m.b[size_t(i)], 2.0) / m.a[size_t(i)];
        };
        auto W = [&](int i) {
            return std::pow(m.b[size_t(i)], 2.0) * m.a[size_t(i)];
        };
        double num = 0.0, den = 0.0;
        for (int i = 0; i + 1 < grid.node_count; ++i) {
            const double df = (hat[size_t(i + 1)] - hat[size_t(i)]) / grid.dr;
            num += df * df * 0.5 * (P(i) + P(i + 1)) * grid.dr;
        }
        for (int i = 0; i < grid.node_count; ++i)
            den += hat[size_t(i)] * hat[size_t(i)] * W(i) * grid.dr;
        const double got = rayleigh_function(m, hat).value;
        CHECK(got == doctest::Approx(num / den).epsilon(1e-8));
    }
    SUBCASE("zero profile is rejected") {
        std::vector<double> z(size_t(grid.node_count), 0.0);
        CHECK_THROWS_AS(rayleigh_function(m, z), std::domain_error);
    }
}

TEST_CASE("tensor rayleigh: radial-traceless bound and validation") {
    const auto grid = RadialGrid::with_extent(16.0, 1600);

    SUBCASE("n=3 validates against the oracle and clears (n-1)^2/4 + 2n") {
        const auto m = make_hyperbolic(3, grid);
        const auto xi = make_test_tensor(grid, TensorForm::RadialTraceless, 3.0, 9.0,
                                         [](double u) { return u * u * (1 - u) * (1 - u); });
        const auto est = tensor_rayleigh(m, xi);
        CHECK(est.value >= 1.0 + 6.0 - 0.05); // (n-1)^2/4 + 2n = 7
    }
    SUBCASE("zeroing the connection term trips the oracle check") {
        const auto m = make_hyperbolic(3, grid);
        const auto xi = make_test_tensor(grid, TensorForm::RadialTraceless, 3.0, 9.0,
                                         [](double u) { return u * (1 - u); });
        CHECK_THROWS_AS(tensor_rayleigh(m, xi, 0.0), std::runtime_error);
    }
    SUBCASE("support touching the boundary is rejected") {
        const auto m = make_hyperbolic(3, grid);
        const auto xi = make_test_tensor(grid, TensorForm::RadialTraceless, 10.0, 16.0,
                                         [](double u) { return u; });
        CHECK_THROWS_AS(tensor_rayleigh(m, xi), std::invalid_argument);
    }
    SUBCASE("sphere form needs n >= 4") {
        const auto m = make_hyperbolic(3, grid);
        const auto xi = make_test_tensor(grid, TensorForm::SphereTraceless, 3.0, 9.0,
                                         [](double u) { return u * (1 - u); });
        CHECK_THROWS_AS(tensor_rayleigh(m, xi), std::invalid_argument);
    }
}

TEST_CASE("tensor rayleigh: no sampled tensor beats the traceless bound") {
    const auto grid = RadialGrid::with_extent(20.0, 1500);
    const auto m = make_hyperbolic(6, grid);
    const double bound = 25.0 / 4.0 + 2.0; // 8.25

    const auto qs = sample_tensor_quotients(m, TensorForm::SphereTraceless, 8.0, 16.0, 40, 123);
    REQUIRE(qs.size() == 40);
    for (double q : qs) CHECK(q >= bound - 0.05);

    const auto qr = sample_tensor_quotients(m, TensorForm::RadialTraceless, 8.0, 16.0, 40, 321);
    for (double q : qr) CHECK(q >= bound - 0.05); // far above, family floor is 18.25
}

TEST_CASE("tensor rayleigh: spline minimization trends to the sharp constant") {
    const auto grid = RadialGrid::with_extent(20.0, 2000);
    const auto m = make_hyperbolic(6, grid);
    const auto est = min_spline_quotient(m, TensorForm::SphereTraceless, 10.0, 16.0, 10);
    CHECK(est.value >= 8.25 - 0.05);
    CHECK(est.value <= 8.25 * 1.15);
    // the radial-traceless family floors near (n-1)^2/4 + 2n instead
    const auto est_rad = min_spline_quotient(m, TensorForm::RadialTraceless, 10.0, 16.0, 10);
    CHECK(est_rad.value >= 6.25 + 12.0 - 0.2);
}

TEST_CASE("comparison margin scalar evaluations") {
    SUBCASE("n=6, eps=0, r=1 matches -2.25 + 4.5 coth(1)") {
        const auto p = comparison_margin(6, 0.0, 1.0);
        CHECK(p.margin == doctest::Approx(-2.25 + 4.5 * (std::cosh(1.0) / std::sinh(1.0)))
                              .epsilon(1e-12));
        CHECK(p.margin == doctest::Approx(3.658659).epsilon(1e-6));
    }
    SUBCASE("n=6, eps=0 limit at large r is (n-3)^2/4") {
        CHECK(comparison_margin(6, 0.0, 60.0).margin == doctest::Approx(2.25).epsilon(1e-9));
    }
    SUBCASE("n=3 margin vanishes identically") {
        for (double eps : {0.0, 0.3, 0.9})
            for (double r : {1.0, 5.0, 40.0})
                CHECK(comparison_margin(3, eps, r).margin == doctest::Approx(0.0));
    }
    SUBCASE("M(n,0,r) >= (n-3)^2/4 for all r >= 1") {
        for (int i = 0; i < 200; ++i) {
            const double r = 1.0 + 199.0 * double(i) / 199.0;
            CHECK(comparison_margin(7, 0.0, r).margin >= 4.0 - 1e-12);
        }
    }
}

TEST_CASE("find_epsilon0") {
    SUBCASE("n=6, delta=0.1 admits a sizable epsilon0") {
        const double e0 = find_epsilon0(6, 0.1);
        CHECK(e0 >= 1e-3);
        CHECK(e0 < 0.5);
        // returned value passes, slightly larger fails
        double worst_pass = 1e300, worst_fail = 1e300;
        for (int i = 0; i < 512; ++i) {
            const double r = std::max(1.0, std::exp(std::log(200.0) * i / 511.0));
            worst_pass = std::min(worst_pass, comparison_margin(6, e0, r).margin);
            worst_fail = std::min(worst_fail, comparison_margin(6, e0 + 0.01, r).margin);
        }
        CHECK(worst_pass >= 2.25 - 0.1 - 1e-9);
        CHECK(worst_fail < 2.25 - 0.1);
    }
    SUBCASE("n=3 saturates the scan bound") {
        CHECK(find_epsilon0(3, 0.5) == doctest::Approx(0.999));
    }
    SUBCASE("epsilon0 is nondecreasing in delta") {
        double prev = 0.0;
        for (double d : {0.05, 0.1, 0.5, 1.0}) {
            const double e0 = find_epsilon0(6, d);
            CHECK(e0 >= prev - 1e-9);
            prev = e0;
        }
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(find_epsilon0(6, 0.0), std::invalid_argument);
    }
}
