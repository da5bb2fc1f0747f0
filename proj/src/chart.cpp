#include "tubeflow/chart.hpp"

#include <cmath>

namespace tubeflow {

double MetricChart::component(int i, int j, const Vec& p) const {
  MetricJet jet;
  eval(p, jet);
  return jet.g[i][j];
}

double MetricChart::d_component(int k, int i, int j, const Vec& p) const {
  MetricJet jet;
  eval(p, jet);
  return jet.dg[k][i][j];
}

double MetricChart::dd_component(int k, int l, int i, int j,
                                 const Vec& p) const {
  MetricJet jet;
  eval(p, jet);
  return jet.ddg[k][l][i][j];
}

bool MetricChart::inside(const Vec& p) const {
  for (int a = 1; a < n_; ++a) {
    if (std::fabs(p[a]) >= radius_) return false;
  }
  return true;
}

void EuclideanChart::eval(const Vec& p, MetricJet& jet) const {
  (void)p;
  jet.n = n_;
  jet.g = zero_mat();
  for (int i = 0; i < n_; ++i) jet.g[i][i] = 1.0;
  for (int k = 0; k < n_; ++k) jet.dg[k] = zero_mat();
  for (int k = 0; k < n_; ++k) {
    for (int l = 0; l < n_; ++l) jet.ddg[k][l] = zero_mat();
  }
}

void HyperbolicPlaneChart::eval(const Vec& p, MetricJet& jet) const {
  double x = p[1];
  double c = std::cosh(x);
  jet.n = 2;
  jet.g = zero_mat();
  jet.g[0][0] = c * c;
  jet.g[1][1] = 1.0;
  for (int k = 0; k < 2; ++k) jet.dg[k] = zero_mat();
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) jet.ddg[k][l] = zero_mat();
  }
  jet.dg[1][0][0] = std::sinh(2.0 * x);
  jet.ddg[1][1][0][0] = 2.0 * std::cosh(2.0 * x);
}

QuadraticChart::QuadraticChart(int n, const Coeffs& q, double period,
                               double radius)
    : MetricChart(n, period, radius), q_(std::make_shared<Coeffs>(q)) {
  // Enforce the two symmetries so eval can use them.
  Coeffs& c = *q_;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int a = 1; a < n; ++a) {
        for (int b = 1; b < n; ++b) {
          double v = 0.25 * (c[i][j][a][b] + c[j][i][a][b] + c[i][j][b][a] +
                             c[j][i][b][a]);
          c[i][j][a][b] = v;
          c[j][i][a][b] = v;
          c[i][j][b][a] = v;
          c[j][i][b][a] = v;
        }
      }
    }
  }
}

QuadraticChart QuadraticChart::random(int n, Rng& rng, double amplitude) {
  Coeffs q{};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int a = 1; a < n; ++a) {
        for (int b = a; b < n; ++b) {
          double v = amplitude * rng.uniform(-1.0, 1.0);
          q[i][j][a][b] = v;
          q[j][i][a][b] = v;
          q[i][j][b][a] = v;
          q[j][i][b][a] = v;
        }
      }
    }
  }
  return QuadraticChart(n, q, 6.283185307179586, 0.8);
}

void QuadraticChart::eval(const Vec& p, MetricJet& jet) const {
  const Coeffs& q = *q_;
  jet.n = n_;
  for (int k = 0; k < n_; ++k) jet.dg[k] = zero_mat();
  for (int k = 0; k < n_; ++k) {
    for (int l = 0; l < n_; ++l) jet.ddg[k][l] = zero_mat();
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      double v = (i == j) ? 1.0 : 0.0;
      for (int a = 1; a < n_; ++a) {
        double row = 0.0;
        for (int b = 1; b < n_; ++b) row += q[i][j][a][b] * p[b];
        v += p[a] * row;
      }
      jet.g[i][j] = v;
      // d_k g_ij = 2 sum_b q[i][j][k][b] x_b (uses (a,b) symmetry).
      for (int k = 1; k < n_; ++k) {
        double dv = 0.0;
        for (int b = 1; b < n_; ++b) dv += q[i][j][k][b] * p[b];
        jet.dg[k][i][j] = 2.0 * dv;
        for (int l = 1; l < n_; ++l) {
          jet.ddg[k][l][i][j] = 2.0 * q[i][j][k][l];
        }
      }
    }
  }
}

}  // namespace tubeflow
