#include "tubeflow/tensor.hpp"

#include <cmath>

namespace tubeflow {

void christoffel(const MetricJet& jet, const Mat& ginv, Christoffel& out) {
  int n = jet.n;
  for (int k = 0; k < n; ++k) out[k] = zero_mat();
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
          sum += ginv[k][l] *
                 (jet.dg[i][l][j] + jet.dg[j][l][i] - jet.dg[l][i][j]);
        }
        out[k][i][j] = 0.5 * sum;
        out[k][j][i] = out[k][i][j];
      }
    }
  }
}

void curvature(const MetricJet& jet, const Christoffel& gamma,
               CurvatureTensor& out) {
  int n = jet.n;
  out.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int s = 0; s < n; ++s) out.r[i][j][k][s] = 0.0;

  // Fill the independent block i < j, k < s, then reflect through the index
  // symmetries (entries with i == j or k == s vanish).
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int s = k + 1; s < n; ++s) {
          double second = 0.5 * (jet.ddg[i][k][j][s] + jet.ddg[j][s][i][k] -
                                 jet.ddg[i][s][j][k] - jet.ddg[j][k][i][s]);
          double quad = 0.0;
          for (int m = 0; m < n; ++m) {
            double gm_js = 0.0, gm_ik = 0.0, gm_is = 0.0, gm_jk = 0.0;
            for (int q = 0; q < n; ++q) {
              gm_js += jet.g[m][q] * gamma[q][j][s];
              gm_ik += jet.g[m][q] * gamma[q][i][k];
              gm_is += jet.g[m][q] * gamma[q][i][s];
              gm_jk += jet.g[m][q] * gamma[q][j][k];
            }
            // g_mn (Gamma^m_js Gamma^n_ik - Gamma^m_is Gamma^n_jk); the g
            // contraction is folded into one factor of each product.
            quad += gamma[m][j][s] * gm_ik - gamma[m][i][s] * gm_jk;
          }
          double v = second + quad;
          out.r[i][j][k][s] = v;
          out.r[j][i][k][s] = -v;
          out.r[i][j][s][k] = -v;
          out.r[j][i][s][k] = v;
        }
      }
    }
  }
}

Vec curvature_apply(const CurvatureTensor& R, const Mat& ginv, const Vec& X,
                    const Vec& Y, const Vec& Z) {
  int n = R.n;
  Vec low = zero_vec();
  for (int s = 0; s < n; ++s) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (X[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (Y[j] == 0.0) continue;
        double xy = X[i] * Y[j];
        for (int k = 0; k < n; ++k) {
          sum += R.r[i][j][k][s] * xy * Z[k];
        }
      }
    }
    low[s] = sum;
  }
  Vec out = zero_vec();
  for (int m = 0; m < n; ++m) {
    double sum = 0.0;
    for (int s = 0; s < n; ++s) sum += ginv[m][s] * low[s];
    out[m] = sum;
  }
  return out;
}

double curvature_quad(const CurvatureTensor& R, const Vec& X, const Vec& Y) {
  int n = R.n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double xy = X[i] * Y[j];
      if (xy == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        for (int s = 0; s < n; ++s) {
          sum += R.r[i][j][k][s] * xy * Y[k] * X[s];
        }
      }
    }
  }
  return sum;
}

double sectional(const CurvatureTensor& R, const Mat& g, const Vec& X,
                 const Vec& Y, int n) {
  double xx = inner(g, X, X, n);
  double yy = inner(g, Y, Y, n);
  double xy = inner(g, X, Y, n);
  double den = xx * yy - xy * xy;
  if (den <= 1e-14 * std::max(1.0, xx * yy)) {
    throw std::invalid_argument("sectional: degenerate plane");
  }
  return curvature_quad(R, X, Y) / den;
}

void analyze_point(const MetricChart& chart, const Vec& p, PointGeometry& out,
                   bool need_curvature) {
  chart.eval(p, out.jet);
  spd_inverse(out.jet.g, out.jet.n, out.ginv);
  christoffel(out.jet, out.ginv, out.gamma);
  if (need_curvature) curvature(out.jet, out.gamma, out.curv);
}

void build_wedge_forms(const CurvatureTensor& R, const Mat& g, int n,
                       WedgeForms& out) {
  out.n = n;
  out.dim = n * (n - 1) / 2;
  int p = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      out.pair_a[p] = a;
      out.pair_b[p] = b;
      ++p;
    }
  }
  for (int pi = 0; pi < out.dim; ++pi) {
    int i = out.pair_a[pi], j = out.pair_b[pi];
    for (int q = 0; q < out.dim; ++q) {
      int k = out.pair_a[q], s = out.pair_b[q];
      out.rq[pi][q] = -R.r[i][j][k][s];
      out.gq[pi][q] = g[i][k] * g[j][s] - g[i][s] * g[j][k];
    }
  }
}

void wedge_components(const WedgeForms& wf, const Vec& X, const Vec& Y,
                      double* w) {
  for (int p = 0; p < wf.dim; ++p) {
    int a = wf.pair_a[p], b = wf.pair_b[p];
    w[p] = X[a] * Y[b] - X[b] * Y[a];
  }
}

double sectional_from_wedge(const WedgeForms& wf, const double* w) {
  double num = 0.0, den = 0.0;
  for (int p = 0; p < wf.dim; ++p) {
    double rrow = 0.0, grow = 0.0;
    for (int q = 0; q < wf.dim; ++q) {
      rrow += wf.rq[p][q] * w[q];
      grow += wf.gq[p][q] * w[q];
    }
    num += w[p] * rrow;
    den += w[p] * grow;
  }
  if (den <= 0.0) {
    throw std::invalid_argument("sectional_from_wedge: degenerate plane");
  }
  return num / den;
}

IdentityResiduals metric_identity_checks(const MetricChart& chart,
                                         const Vec& p) {
  PointGeometry geo;
  analyze_point(chart, p, geo, false);
  int n = geo.jet.n;

  // Derivative of the inverse: compare a finite difference of g^{-1} with
  // the closed form -g^{ia} (d_s g_ab) g^{bk}.
  double res1 = 0.0;
  double step = 1e-5;
  for (int s = 0; s < n; ++s) {
    Mat num{};
    {
      MetricJet jp;
      Mat inv_p2, inv_p1, inv_m1, inv_m2;
      Vec q = p;
      q[s] = p[s] + 2 * step;
      chart.eval(q, jp);
      spd_inverse(jp.g, n, inv_p2);
      q[s] = p[s] + step;
      chart.eval(q, jp);
      spd_inverse(jp.g, n, inv_p1);
      q[s] = p[s] - step;
      chart.eval(q, jp);
      spd_inverse(jp.g, n, inv_m1);
      q[s] = p[s] - 2 * step;
      chart.eval(q, jp);
      spd_inverse(jp.g, n, inv_m2);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
          num[i][k] = (-inv_p2[i][k] + 8.0 * inv_p1[i][k] - 8.0 * inv_m1[i][k] +
                       inv_m2[i][k]) /
                      (12.0 * step);
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        double closed = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            closed -= geo.ginv[i][a] * geo.jet.dg[s][a][b] * geo.ginv[b][k];
          }
        }
        res1 = std::max(res1, std::fabs(num[i][k] - closed));
      }
    }
  }

  // d_p g_ms = g_ns Gamma^n_pm + g_nm Gamma^n_ps.
  double res2 = 0.0;
  for (int pp = 0; pp < n; ++pp) {
    for (int m = 0; m < n; ++m) {
      for (int s = 0; s < n; ++s) {
        double rhs = 0.0;
        for (int q = 0; q < n; ++q) {
          rhs += geo.jet.g[q][s] * geo.gamma[q][pp][m] +
                 geo.jet.g[q][m] * geo.gamma[q][pp][s];
        }
        res2 = std::max(res2, std::fabs(geo.jet.dg[pp][m][s] - rhs));
      }
    }
  }
  return IdentityResiduals{res1, res2};
}

double curvature_symmetry_residual(const CurvatureTensor& R) {
  int n = R.n;
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int s = 0; s < n; ++s) {
          double v = R.r[i][j][k][s];
          res = std::max(res, std::fabs(v + R.r[j][i][k][s]));
          res = std::max(res, std::fabs(v + R.r[i][j][s][k]));
          res = std::max(res, std::fabs(v - R.r[k][s][i][j]));
        }
      }
    }
  }
  return res;
}

double bianchi_residual(const CurvatureTensor& R) {
  int n = R.n;
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int s = 0; s < n; ++s) {
          double cyc =
              R.r[i][j][k][s] + R.r[j][k][i][s] + R.r[k][i][j][s];
          res = std::max(res, std::fabs(cyc));
        }
      }
    }
  }
  return res;
}

double fd_d_component(const MetricChart& chart, int k, int i, int j,
                      const Vec& p, double step) {
  Vec q = p;
  auto at = [&](double x) {
    q[k] = p[k] + x;
    return chart.component(i, j, q);
  };
  return (-at(2 * step) + 8.0 * at(step) - 8.0 * at(-step) + at(-2 * step)) /
         (12.0 * step);
}

double fd_dd_component(const MetricChart& chart, int k, int l, int i, int j,
                       const Vec& p, double step) {
  if (k == l) {
    Vec q = p;
    auto at = [&](double x) {
      q[k] = p[k] + x;
      return chart.component(i, j, q);
    };
    return (-at(2 * step) + 16.0 * at(step) - 30.0 * at(0.0) +
            16.0 * at(-step) - at(-2 * step)) /
           (12.0 * step * step);
  }
  Vec q = p;
  auto slice = [&](double x) {
    q[l] = p[l] + x;
    return fd_d_component(chart, k, i, j, q, step);
  };
  return (-slice(2 * step) + 8.0 * slice(step) - 8.0 * slice(-step) +
          slice(-2 * step)) /
         (12.0 * step);
}

}  // namespace tubeflow
