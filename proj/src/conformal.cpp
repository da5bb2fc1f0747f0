#include "tubeflow/conformal.hpp"

#include <cmath>

namespace tubeflow {

Mat hessian(const ScalarJet& h, const Christoffel& gamma, int n) {
  Mat out = zero_mat();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = h.dd[i][j];
      for (int k = 0; k < n; ++k) v -= gamma[k][i][j] * h.d[k];
      out[i][j] = v;
    }
  }
  return out;
}

void conformal_christoffel(const Christoffel& base, const ScalarJet& h,
                           const Mat& g, const Mat& ginv, int n,
                           Christoffel& out) {
  Vec grad = zero_vec();  // raised gradient g^{lk} d_l h
  for (int k = 0; k < n; ++k) {
    double v = 0.0;
    for (int l = 0; l < n; ++l) v += ginv[k][l] * h.d[l];
    grad[k] = v;
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = base[k][i][j];
        if (k == j) v += 0.5 * h.d[i];
        if (k == i) v += 0.5 * h.d[j];
        v -= 0.5 * grad[k] * g[i][j];
        out[k][i][j] = v;
      }
    }
  }
}

Vec conformal_curvature(const CurvatureTensor& base, const ScalarJet& h,
                        const Mat& g, const Mat& ginv,
                        const Christoffel& gamma, const Vec& X, const Vec& Y,
                        const Vec& Z) {
  int n = base.n;
  Vec out = curvature_apply(base, ginv, X, Y, Z);

  Mat hess = hessian(h, gamma, n);
  Vec grad = zero_vec();
  for (int k = 0; k < n; ++k) {
    double v = 0.0;
    for (int l = 0; l < n; ++l) v += ginv[k][l] * h.d[l];
    grad[k] = v;
  }

  double hxz = 0.0, hyz = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      hxz += X[i] * hess[i][j] * Z[j];
      hyz += Y[i] * hess[i][j] * Z[j];
    }
  }
  double gxz = inner(g, X, Z, n);
  double gyz = inner(g, Y, Z, n);

  // nabla_Y grad h has components g^{kl} Hess_{lj} Y^j.
  Vec covY = zero_vec(), covX = zero_vec();
  for (int k = 0; k < n; ++k) {
    double sy = 0.0, sx = 0.0;
    for (int l = 0; l < n; ++l) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += hess[l][j] * Y[j];
      sy += ginv[k][l] * row;
      double rowx = 0.0;
      for (int j = 0; j < n; ++j) rowx += hess[l][j] * X[j];
      sx += ginv[k][l] * rowx;
    }
    covY[k] = sy;
    covX[k] = sx;
  }

  for (int k = 0; k < n; ++k) {
    out[k] += 0.5 * (hxz * Y[k] - hyz * X[k] + gxz * covY[k] - gyz * covX[k]);
  }

  double xh = dot(X, h.d, n);
  double yh = dot(Y, h.d, n);
  double zh = dot(Z, h.d, n);
  double grad2 = dot(grad, h.d, n);  // |grad h|^2 = g^{kl} d_k h d_l h

  for (int k = 0; k < n; ++k) {
    out[k] += 0.25 * ((yh * zh - gyz * grad2) * X[k] -
                      (xh * zh - gxz * grad2) * Y[k] +
                      (xh * gyz - yh * gxz) * grad[k]);
  }
  return out;
}

double conformal_sectional(double base_K, const ScalarJet& h, const Mat& g,
                           const Mat& ginv, const Christoffel& gamma,
                           const Vec& X, const Vec& Y, int n) {
  double xx = inner(g, X, X, n);
  double yy = inner(g, Y, Y, n);
  double xy = inner(g, X, Y, n);
  if (std::fabs(xx - 1.0) > 1e-9 || std::fabs(yy - 1.0) > 1e-9 ||
      std::fabs(xy) > 1e-9) {
    throw std::invalid_argument(
        "conformal_sectional: inputs must be orthonormal for the base metric");
  }
  Mat hess = hessian(h, gamma, n);
  double hxx = 0.0, hyy = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      hxx += X[i] * hess[i][j] * X[j];
      hyy += Y[i] * hess[i][j] * Y[j];
    }
  }
  Vec grad = zero_vec();
  for (int k = 0; k < n; ++k) {
    double v = 0.0;
    for (int l = 0; l < n; ++l) v += ginv[k][l] * h.d[l];
    grad[k] = v;
  }
  double grad2 = dot(grad, h.d, n);
  double xh = dot(X, h.d, n);
  double yh = dot(Y, h.d, n);
  return base_K - 0.5 * (hxx + hyy) - 0.25 * (grad2 - xh * xh - yh * yh);
}

}  // namespace tubeflow
