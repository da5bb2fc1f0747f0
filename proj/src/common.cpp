#include "tubeflow/common.hpp"

#include <algorithm>
#include <thread>

namespace tubeflow {

bool cholesky(const Mat& g, int n, Mat& L) {
  L = zero_mat();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = 0.5 * (g[i][j] + g[j][i]);
      for (int k = 0; k < j; ++k) sum -= L[i][k] * L[j][k];
      if (i == j) {
        if (sum <= 0.0) return false;
        L[i][i] = std::sqrt(sum);
      } else {
        L[i][j] = sum / L[j][j];
      }
    }
  }
  return true;
}

void spd_inverse(const Mat& g, int n, Mat& ginv) {
  Mat L;
  if (!cholesky(g, n, L)) {
    throw std::runtime_error("spd_inverse: matrix is not positive definite");
  }
  // Solve L L^T X = I column by column.
  ginv = zero_mat();
  for (int c = 0; c < n; ++c) {
    double y[kMaxDim] = {0};
    for (int i = 0; i < n; ++i) {
      double sum = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) sum -= L[i][k] * y[k];
      y[i] = sum / L[i][i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double sum = y[i];
      for (int k = i + 1; k < n; ++k) sum -= L[k][i] * ginv[k][c];
      ginv[i][c] = sum / L[i][i];
    }
  }
  // Symmetrize to kill the last rounding asymmetry.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      double v = 0.5 * (ginv[i][j] + ginv[j][i]);
      ginv[i][j] = v;
      ginv[j][i] = v;
    }
  }
}

double min_eigenvalue_sym(const Mat& g, int n) {
  Mat a = g;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      double v = 0.5 * (a[i][j] + a[j][i]);
      a[i][j] = v;
      a[j][i] = v;
    }
  }
  // Cyclic Jacobi rotations.
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  double lo = a[0][0];
  for (int i = 1; i < n; ++i) lo = std::min(lo, a[i][i]);
  return lo;
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  std::size_t workers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  workers = std::min(workers, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  // Static contiguous partition; results must go to disjoint slots, so the
  // outcome does not depend on the worker count.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn]() {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace tubeflow
