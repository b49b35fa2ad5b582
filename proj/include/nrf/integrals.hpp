#pragma once
#include <vector>

namespace nrf {

// Convolution of two exponential kernels on H^n,
//   I(D) = int_{H^n} e^{-a d(x,z)} e^{-b d(y,z)} dV_z,   D = d(x,y),
// in polar coordinates about x: dV = omega_{n-2} (sin th)^{n-2} sinh^{n-1}s ds dth,
// with d(y,z) from the hyperbolic law of cosines
//   cosh d(y,z) = cosh D cosh s - sinh D sinh s cos th.
struct ConvolutionQuery {
    int n = 3;
    double a_exp = 3.0;
    double b_exp = 1.0;
    double D = 0.0;
    double s_max = -1.0;    // <= 0 picks the default 40 + D
    int radial_nodes = 4000;  // composite Simpson intervals in s
    int angular_nodes = 64;   // Gauss-Legendre order in theta
};

struct ConvolutionResult {
    double value = 0.0;
    bool divergent = false;  // a+b <= n-1: integral does not exist
    double tail_bound = 0.0; // analytic bound on the truncated s > s_max part
};

ConvolutionResult convolution_integral(const ConvolutionQuery& q);

struct RatioCurve {
    std::vector<double> D;
    std::vector<double> integral;
    std::vector<double> ratio;   // integral / e^{-b D}
    double empirical_C = 0.0;    // max ratio over the sweep
    double tail_slope = 0.0;     // slope of log(ratio) on the last third of D
    bool hypothesis_ok = false;  // a+b > n-1 and a > b
};

RatioCurve convolution_ratio_curve(int n, double a_exp, double b_exp,
                                   const std::vector<double>& D_list,
                                   int radial_nodes = 4000, int angular_nodes = 64);

// Gauss-Legendre nodes/weights on [lo, hi].
void gauss_legendre(int order, double lo, double hi, std::vector<double>& x,
                    std::vector<double>& w);

// vol(S^k) = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
double sphere_volume(int k);

} // namespace nrf
