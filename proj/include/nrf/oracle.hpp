#pragma once
#include "nrf/geometry.hpp"

namespace nrf {

// Independent validator: curvature assembled from generic tensor formulas in
// the explicit coordinate chart diag(a^2, b^2, b^2 sin^2(theta), ...), with
// Christoffel symbols and the Riemann tensor built from finite differences of
// the metric components. No warped-product identities are used.
// Supported for n in {3, 4}; the closed forms are dimension-generic once
// validated there.
CurvatureField curvature_oracle(const WarpedMetric& m);

// Canonical traceless frame directions for radial test tensors.
enum class TensorForm {
    RadialTraceless, // diag(n-1, -1, ..., -1)/sqrt(n(n-1))
    SphereTraceless, // diag(0, n-2, -1, ..., -1)/sqrt((n-1)(n-2))
};

// |grad xi|^2 at one node for xi = f(r) * T, computed from coordinate
// Christoffels (finite differences), for validating the closed-form
// connection weights. f and df/dr are the profile value and coordinate
// derivative at the node; the sphere form is evaluated at the oracle's
// fixed angular point.
double tensor_gradient_sq_oracle(const WarpedMetric& m, int node, double f,
                                 double df_dr, TensorForm form);

// The oracle's angular evaluation point (needed to compare pointwise values
// of the sphere-tangent form, whose connection term carries cot^2(theta)).
double oracle_theta();

} // namespace nrf
