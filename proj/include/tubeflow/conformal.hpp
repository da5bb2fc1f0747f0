#pragma once

// Closed-form transformation laws under a conformal change g~ = e^h g:
// Christoffel symbols, the curvature operator, and sectional curvature of
// orthonormal pairs. These are evaluated from base-metric quantities plus the
// partials of h, and are cross-checked in tests against direct recomputation
// from the deformed chart components.

#include "tubeflow/common.hpp"
#include "tubeflow/tensor.hpp"

namespace tubeflow {

// First and second partials of the conformal exponent at a point.
struct ScalarJet {
  double value = 0.0;
  Vec d{};    // d[k]    = d_k h
  Mat dd{};   // dd[k][l] = d^2_{kl} h
};

// Hessian w.r.t. the base metric: Hess_ij = d^2_ij h - Gamma^k_ij d_k h.
Mat hessian(const ScalarJet& h, const Christoffel& gamma, int n);

// Gamma~^k_ij = Gamma^k_ij + (d_i h delta^k_j + d_j h delta^k_i
//               - d_l h g^{lk} g_ij) / 2.
void conformal_christoffel(const Christoffel& base, const ScalarJet& h,
                           const Mat& g, const Mat& ginv, int n,
                           Christoffel& out);

// R~(X,Y)Z from the base curvature and h (vector output, base-metric index
// raising internally; result is the deformed curvature operator applied to
// X, Y, Z as coordinate vectors).
Vec conformal_curvature(const CurvatureTensor& base, const ScalarJet& h,
                        const Mat& g, const Mat& ginv,
                        const Christoffel& gamma, const Vec& X, const Vec& Y,
                        const Vec& Z);

// For X, Y orthonormal w.r.t. the base metric, returns phi * K~ where
// phi = e^h:
//   phi K~ = K - (Hess h(X,X) + Hess h(Y,Y)) / 2
//            - (|grad h|^2 - (Xh)^2 - (Yh)^2) / 4.
// Throws std::invalid_argument when X, Y are not base-orthonormal.
double conformal_sectional(double base_K, const ScalarJet& h, const Mat& g,
                           const Mat& ginv, const Christoffel& gamma,
                           const Vec& X, const Vec& Y, int n);

}  // namespace tubeflow
