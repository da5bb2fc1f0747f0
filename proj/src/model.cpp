#include "tubeflow/model.hpp"

#include <cmath>
#include <sstream>

namespace tubeflow {

void ModelSpec::validate() const {
  if (m < 2 || 2 * m > kMaxDim) {
    throw std::invalid_argument("model.m: need 2 <= m and 2m <= 6");
  }
  if (r != 1) {
    throw std::invalid_argument("model.r: the complex space form has r = 1");
  }
  if (s < r + 1 || s > n() - 1) {
    throw std::invalid_argument("model.s: need r+1 <= s <= n-1");
  }
  if (!(period > 0.0)) {
    throw std::invalid_argument("model.period: must be positive");
  }
  if (!(tube_radius > 0.0)) {
    throw std::invalid_argument("model.tube_radius: must be positive");
  }
}

Vec apply_J(const Vec& v, int n) {
  Vec out = zero_vec();
  for (int k = 0; k + 1 < n; k += 2) {
    out[k] = -v[k + 1];
    out[k + 1] = v[k];
  }
  return out;
}

Vec model_curvature_op(const Vec& X, const Vec& Y, const Vec& Z, int n) {
  Vec JX = apply_J(X, n);
  Vec JY = apply_J(Y, n);
  Vec JZ = apply_J(Z, n);
  double yz = dot(Y, Z, n);
  double xz = dot(X, Z, n);
  double jyz = dot(JY, Z, n);
  double jxz = dot(JX, Z, n);
  double jxy = dot(JX, Y, n);
  Vec out = zero_vec();
  for (int k = 0; k < n; ++k) {
    out[k] = -0.25 * (yz * X[k] - xz * Y[k] + jyz * JX[k] - jxz * JY[k] -
                      2.0 * jxy * JZ[k]);
  }
  return out;
}

void model_curvature_tensor(int n, CurvatureTensor& out) {
  out.n = n;
  Vec e[kMaxDim];
  for (int i = 0; i < n; ++i) {
    e[i] = zero_vec();
    e[i][i] = 1.0;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Vec v = model_curvature_op(e[i], e[j], e[k], n);
        for (int s = 0; s < n; ++s) out.r[i][j][k][s] = v[s];
      }
    }
  }
}

double model_sectional(const Vec& X, const Vec& Y, int n) {
  Vec rv = model_curvature_op(X, Y, Y, n);
  double num = dot(rv, X, n);
  double xx = dot(X, X, n);
  double yy = dot(Y, Y, n);
  double xy = dot(X, Y, n);
  double den = xx * yy - xy * xy;
  if (den <= 1e-14 * std::max(1.0, xx * yy)) {
    throw std::invalid_argument("model_sectional: degenerate plane");
  }
  return num / den;
}

void split_AB(const Vec& v, const Vec& w, int n, Vec& wA, Vec& wB) {
  double vv = dot(v, v, n);
  double vw = dot(v, w, n);
  if (std::fabs(vw) > 1e-9 * std::sqrt(vv * std::max(dot(w, w, n), 1e-300))) {
    throw std::invalid_argument("split_AB: w is not orthogonal to v");
  }
  Vec Jv = apply_J(v, n);
  double jj = dot(Jv, Jv, n);
  double c = dot(w, Jv, n) / jj;
  wA = zero_vec();
  wB = zero_vec();
  for (int k = 0; k < n; ++k) {
    wA[k] = c * Jv[k];
    wB[k] = w[k] - wA[k];
  }
}

namespace {

QuadraticChart::Coeffs tube_coefficients(int n) {
  CurvatureTensor R;
  model_curvature_tensor(n, R);
  QuadraticChart::Coeffs q{};
  for (int a = 1; a < n; ++a) {
    for (int b = 1; b < n; ++b) {
      q[0][0][a][b] = -R.r[a][0][0][b];
      for (int i = 1; i < n; ++i) {
        double v = -(R.r[a][0][i][b] + R.r[b][0][i][a]) / 3.0;
        q[0][i][a][b] = v;
        q[i][0][a][b] = v;
        for (int j = 1; j < n; ++j) {
          q[i][j][a][b] = (R.r[a][i][b][j] + R.r[b][i][a][j]) / 6.0;
        }
      }
    }
  }
  return q;
}

// Smallest metric eigenvalue over a sample grid of the closed box of the
// given radius.
double min_eig_over_box(const QuadraticChart& chart, int n, double radius) {
  const int per_axis = 5;
  double lo = 1e300;
  int d = n - 1;
  int total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  MetricJet jet;
  for (int idx = 0; idx < total; ++idx) {
    Vec p = zero_vec();
    int rem = idx;
    for (int a = 1; a < n; ++a) {
      int c = rem % per_axis;
      rem /= per_axis;
      p[a] = radius * (-1.0 + 2.0 * c / (per_axis - 1));
    }
    chart.eval(p, jet);
    lo = std::min(lo, min_eigenvalue_sym(jet.g, n));
  }
  return lo;
}

}  // namespace

QuadraticChart fermi_chart(const ModelSpec& spec) {
  spec.validate();
  int n = spec.n();
  QuadraticChart chart(n, tube_coefficients(n), spec.period,
                       spec.tube_radius);
  if (min_eig_over_box(chart, n, spec.tube_radius) <= 0.0) {
    std::ostringstream msg;
    msg << "fermi_chart: metric degenerates inside radius " << spec.tube_radius
        << "; largest admissible radius is about " << max_admissible_radius(spec);
    throw std::invalid_argument(msg.str());
  }
  return chart;
}

double max_admissible_radius(const ModelSpec& spec) {
  int n = spec.n();
  QuadraticChart chart(n, tube_coefficients(n), spec.period, 1e9);
  double lo = 0.0, hi = 8.0;
  for (int it = 0; it < 48; ++it) {
    double mid = 0.5 * (lo + hi);
    if (min_eig_over_box(chart, n, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace tubeflow
