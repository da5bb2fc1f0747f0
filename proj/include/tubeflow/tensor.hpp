#pragma once

// Coordinate tensor algebra on a metric jet: Christoffel symbols, the fully
// lowered curvature tensor, sectional curvature, and the finite-difference
// oracles used by the tests. All formulas use the convention
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
//   R_ijks  = g(R(d_i, d_j) d_k, d_s),
// with the overall sign fixed by the hyperbolic-plane oracle (K = -1).

#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"

namespace tubeflow {

using Christoffel = std::array<Mat, kMaxDim>;  // [k][i][j] = Gamma^k_ij

struct CurvatureTensor {
  int n = 0;
  double r[kMaxDim][kMaxDim][kMaxDim][kMaxDim];  // r[i][j][k][s] = R_ijks
};

// Everything derived from the jet at one point.
struct PointGeometry {
  MetricJet jet;
  Mat ginv{};
  Christoffel gamma{};
  CurvatureTensor curv{};
};

// Gamma^k_ij = (g^{kl}/2)(d_i g_lj + d_j g_li - d_l g_ij).
// Throws std::runtime_error when the metric is degenerate at the point.
void christoffel(const MetricJet& jet, const Mat& ginv, Christoffel& out);

// Fully lowered curvature tensor from the jet, Christoffel symbols and metric.
void curvature(const MetricJet& jet, const Christoffel& gamma,
               CurvatureTensor& out);

// R(X,Y)Z contracted and raised: out^m = g^{ms} R_ijks X^i Y^j Z^k.
Vec curvature_apply(const CurvatureTensor& R, const Mat& ginv, const Vec& X,
                    const Vec& Y, const Vec& Z);

// g(R(X,Y)Y, X) = R_ijks X^i Y^j Y^k X^s.
double curvature_quad(const CurvatureTensor& R, const Vec& X, const Vec& Y);

// Sectional curvature K(X,Y) = g(R(X,Y)Y,X) / (|X|^2|Y|^2 - g(X,Y)^2).
// Throws std::invalid_argument when the plane is degenerate.
double sectional(const CurvatureTensor& R, const Mat& g, const Vec& X,
                 const Vec& Y, int n);

// Convenience: jet + inverse + Christoffel (+ curvature when asked) at p.
void analyze_point(const MetricChart& chart, const Vec& p, PointGeometry& out,
                   bool need_curvature = true);

// --- Bivector (wedge) quadratic forms -------------------------------------
// For scans the sectional curvature is evaluated as a ratio of two quadratic
// forms on wedge components w_{ab} = X_a Y_b - X_b Y_a (a < b):
//   numerator   = -sum R6[p][q] w_p w_q   (R6[p=(ij)][q=(ks)] = R_ijks)
//   denominator =  sum G6[p][q] w_p w_q   (G6 = induced metric on bivectors)
// Both matrices are symmetric of size n(n-1)/2 (= 6 when n = 4).

inline constexpr int kMaxWedge = kMaxDim * (kMaxDim - 1) / 2;

struct WedgeForms {
  int n = 0;
  int dim = 0;  // n(n-1)/2
  int pair_a[kMaxWedge];
  int pair_b[kMaxWedge];
  double rq[kMaxWedge][kMaxWedge];  // curvature form (already negated)
  double gq[kMaxWedge][kMaxWedge];  // Gram form
};

void build_wedge_forms(const CurvatureTensor& R, const Mat& g, int n,
                       WedgeForms& out);

void wedge_components(const WedgeForms& wf, const Vec& X, const Vec& Y,
                      double* w);

double sectional_from_wedge(const WedgeForms& wf, const double* w);

// --- Identity checks and oracles -------------------------------------------

struct IdentityResiduals {
  double inverse_derivative;  // d_s g^{ik} g_kj + g^{ik} d_s g_kj
  double metric_derivative;   // d_p g_ms - g_ns Gamma^n_pm - g_nm Gamma^n_ps
};

IdentityResiduals metric_identity_checks(const MetricChart& chart, const Vec& p);

// Max violation of the four index symmetries of R at a point.
double curvature_symmetry_residual(const CurvatureTensor& R);

// Max violation of the first Bianchi identity at a point.
double bianchi_residual(const CurvatureTensor& R);

// 4th-order central finite differences of the metric components, used only as
// test oracles for the charts' exact partials.
double fd_d_component(const MetricChart& chart, int k, int i, int j,
                      const Vec& p, double step);
double fd_dd_component(const MetricChart& chart, int k, int l, int i, int j,
                       const Vec& p, double step);

}  // namespace tubeflow
