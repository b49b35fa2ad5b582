#pragma once
#include <cstdint>
#include <functional>
#include <vector>

#include "nrf/geometry.hpp"
#include "nrf/oracle.hpp"

namespace nrf {

enum class SpectralKind { FunctionBottom, FunctionRayleigh, TensorRayleigh };

struct SpectralEstimate {
    double value = 0.0;
    SpectralKind kind = SpectralKind::FunctionBottom;
    double domain_radius = 0.0;
    double grid_spacing = 0.0;
};

// Smallest Dirichlet eigenvalue of the radial Laplace-Beltrami operator
// -(1/W) d/dr (P d/dr) with P = b^{n-1}/a and W = a b^{n-1} (the dV weight),
// discretized in symmetric flux form (natural closure at the origin, Dirichlet
// at the outer face) and solved by Sturm bisection on the tridiagonal problem
// to 1e-10. Throws std::runtime_error if the bisection fails to bracket.
SpectralEstimate function_bottom(const WarpedMetric& m);

// Discrete Dirichlet form for a compactly supported radial profile:
//   sum_i ((f_{i+1}-f_i)/dr)^2 * (P_i+P_{i+1})/2 * dr  /  sum_i f_i^2 W_i dr.
// Throws std::domain_error on a vanishing denominator.
SpectralEstimate rayleigh_function(const WarpedMetric& m, const std::vector<double>& f);

// Radial profile times a fixed unit traceless frame direction.
struct TestTensor {
    std::vector<double> profile; // f(r_i)
    double r_lo = 0.0, r_hi = 0.0;
    TensorForm form = TensorForm::RadialTraceless;
};

// Rayleigh quotient int |grad xi|^2 dV / int |xi|^2 dV for xi = f * T with
//   |grad xi|^2 = f_s^2 + W_T(r) f^2,
//   W_T = 2n (b_s/b)^2                      (radial-traceless direction)
//   W_T = 2 (b_s/b)^2 + c_n / b^2           (sphere-traceless, n >= 4)
// where c_n = 2(n-1)/(n-3) is the angular average of the sphere direction's
// intrinsic gradient. For n in {3,4} the closed-form |grad xi|^2 is checked
// pointwise against the coordinate oracle; disagreement is a hard error.
// connection_scale != 1 deliberately corrupts the connection weight (fault
// harness); the oracle check is what catches it.
SpectralEstimate tensor_rayleigh(const WarpedMetric& m, const TestTensor& xi,
                                 double connection_scale = 1.0);

// Profile f vanishing outside [r_lo, r_hi], from a shape on [0,1].
TestTensor make_test_tensor(const RadialGrid& grid, TensorForm form, double r_lo,
                            double r_hi, const std::function<double(double)>& shape);

// Quotients of `count` random 10-coefficient cubic B-spline profiles.
std::vector<double> sample_tensor_quotients(const WarpedMetric& m, TensorForm form,
                                            double r_lo, double r_hi, int count,
                                            std::uint64_t seed);

// Exact minimum of the quotient over the spanned spline family (generalized
// eigenvalue problem in the coefficients).
SpectralEstimate min_spline_quotient(const WarpedMetric& m, TensorForm form,
                                     double r_lo, double r_hi, int coeff_count = 10);

// Cosh/sinh comparison margin
//   M(n,eps,r) = -(n-3)^2/4 - (n-3) sqrt(1+eps) coth(sqrt(1+eps) r)
//                + (n-3)(n-1)/2 sqrt(1-eps) coth(sqrt(1-eps) r).
struct ComparisonProbe {
    int n = 0;
    double eps = 0.0;
    double r = 0.0;
    double margin = 0.0;
};

ComparisonProbe comparison_margin(int n, double eps, double r);

// Largest eps in [0, 0.999] such that M(n,eps,r) >= (n-3)^2/4 - delta on a
// 512-point log-spaced scan of r in [1, r_max_scan]. Throws if the predicate
// fails at eps = 0 (impossible for n >= 3 unless the formula is wrong).
double find_epsilon0(int n, double delta, double r_max_scan = 200.0,
                     int scan_points = 512);

} // namespace nrf
