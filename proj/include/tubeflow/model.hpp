#pragma once

// The undeformed locally symmetric background: the complex-hyperbolic
// curvature operator (holomorphic curvature -1, quarter-pinched), the
// splitting of a unit vector's orthogonal complement into the -1 part A and
// the -1/4 part B, and the quadratic tube chart around the central closed
// geodesic whose curvature at the axis reproduces the model exactly.

#include <memory>

#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/tensor.hpp"

namespace tubeflow {

struct ModelSpec {
  int m = 2;         // complex dimension; real dimension n = 2m
  int r = 1;         // dim A (span{Jv}) in the complex-hyperbolic model
  int s = 3;         // deformation direction, r+1 <= s <= n-1
  double period = 6.283185307179586;  // period of the central closed geodesic
  double tube_radius = 0.5;           // half-width of the tube chart

  int n() const { return 2 * m; }
  void validate() const;  // throws std::invalid_argument on bad fields
};

// Standard complex structure pairing coordinates (0,1), (2,3), ...:
// J e_{2k} = e_{2k+1}, J e_{2k+1} = -e_{2k}.
Vec apply_J(const Vec& v, int n);

// Curvature operator of the complex space form with holomorphic sectional
// curvature -1:
//   R(X,Y)Z = -(1/4) [ g(Y,Z)X - g(X,Z)Y + g(JY,Z)JX - g(JX,Z)JY
//                      - 2 g(JX,Y)JZ ]
// evaluated in an orthonormal frame (g = identity).
Vec model_curvature_op(const Vec& X, const Vec& Y, const Vec& Z, int n);

// Fully lowered model tensor R_ijks = <R(e_i,e_j)e_k, e_s>.
void model_curvature_tensor(int n, CurvatureTensor& out);

// Sectional curvature of the model for arbitrary (not necessarily
// orthonormal) X, Y.
double model_sectional(const Vec& X, const Vec& Y, int n);

// Splits w (assumed orthogonal to the unit vector v) into the A-part
// (projection onto span{Jv}) and the B-part (the rest).
// Throws std::invalid_argument when w is not orthogonal to v.
void split_AB(const Vec& v, const Vec& w, int n, Vec& wA, Vec& wB);

// Second-order tube chart around the central geodesic: g_ij(t,x) =
// delta_ij + Q^{ij}_{ab} x_a x_b with coefficients determined by the model
// curvature tensor so that the chart curvature at x = 0 reproduces it
// exactly:
//   Q^{00}_{ab} = -R_{a00b},
//   Q^{0i}_{ab} = -(R_{a0ib} + R_{b0ia}) / 3,
//   Q^{ij}_{ab} =  (R_{aibj} + R_{biaj}) / 6.
// Throws std::invalid_argument when the requested radius breaks positive
// definiteness somewhere in the tube; the message reports the largest
// admissible radius.
QuadraticChart fermi_chart(const ModelSpec& spec);

// Largest tube radius (binary search over box corners) at which the chart
// metric stays positive definite.
double max_admissible_radius(const ModelSpec& spec);

}  // namespace tubeflow
