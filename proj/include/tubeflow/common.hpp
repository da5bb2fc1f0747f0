#pragma once

// Small fixed-size linear algebra, deterministic RNG helpers and a static
// work partitioner shared by all modules. Dimensions are tiny (n <= 6), so
// everything lives on the stack.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tubeflow {

inline constexpr int kMaxDim = 6;

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<std::array<double, kMaxDim>, kMaxDim>;

inline Vec zero_vec() {
  Vec v{};
  return v;
}

inline Mat zero_mat() {
  Mat m{};
  return m;
}

inline double dot(const Vec& a, const Vec& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double inner(const Mat& g, const Vec& a, const Vec& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += g[i][j] * b[j];
    s += a[i] * row;
  }
  return s;
}

inline double norm(const Vec& a, int n) { return std::sqrt(dot(a, a, n)); }

inline void axpy(double c, const Vec& x, Vec& y, int n) {
  for (int i = 0; i < n; ++i) y[i] += c * x[i];
}

inline void scale(Vec& x, double c, int n) {
  for (int i = 0; i < n; ++i) x[i] *= c;
}

// Cholesky factorization of the symmetric part of g; returns false when g is
// not positive definite. L is lower triangular with g = L L^T.
bool cholesky(const Mat& g, int n, Mat& L);

// Inverse of a symmetric positive definite matrix via Cholesky.
// Throws std::runtime_error when the matrix is not positive definite.
void spd_inverse(const Mat& g, int n, Mat& ginv);

// Smallest eigenvalue of a symmetric matrix (Jacobi rotations; n <= kMaxDim).
double min_eigenvalue_sym(const Mat& g, int n);

// Deterministic RNG: mt19937_64 with explicit bit-to-double mapping so the
// stream does not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double gaussian() {
    // Box-Muller; one fresh pair per call keeps the stream stateless.
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Stable mixing of a base seed with an item index, so parallel scans draw
// identical streams regardless of the thread partition.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t item) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (item + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Runs fn(i) for i in [0, count) over `threads` workers with a static
// partition. Results must be written to disjoint preallocated slots; the
// output is then independent of the thread count.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace tubeflow
