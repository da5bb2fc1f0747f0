#pragma once

// Batched hot-path kernels with scalar reference implementations and SIMD
// variants selected at runtime. Two shapes dominate the scans:
//   1. pairs of small quadratic forms evaluated on batches of wedge
//      coordinates (sectional curvature numerator/denominator), and
//   2. cone-boundary alignment rates evaluated on batches of (xi, eta)
//      states against a fixed curvature matrix.
// The dispatching entry points are bit-compatible with the scalar reference
// up to floating-point contraction differences; equivalence is tested.

#include <cstddef>
#include <cstdint>

namespace tubeflow {
namespace kernels {

// Upper bound on the per-item dimension (quadratic form size m, cone
// dimension d) accepted by the batched kernels.
inline constexpr int kMaxBatchDim = 16;

enum class Lane { kScalar, kAvx2, kNeon };

// Lane the dispatcher would pick on this machine (build + runtime checks).
Lane active_lane();
const char* lane_name(Lane lane);

// Force the scalar path (equivalence tests, --no-simd). Returns the
// previous setting.
bool set_scalar_override(bool on);
bool scalar_override();

// out_a[i] = sum_{p,q} qa[p*m+q] w[i*m+p] w[i*m+q], same for out_b with qb.
// m <= 16; w holds count rows of m contiguous doubles.
void quadform_pair_batch(const double* qa, const double* qb, int m,
                         const double* w, int count, double* out_a,
                         double* out_b);
void quadform_pair_batch_scalar(const double* qa, const double* qb, int m,
                                const double* w, int count, double* out_a,
                                double* out_b);

// Alignment rate of the slope-one cone over A = slots [0, r) for a batch of
// states against one symmetric matrix K (row-major d x d):
//   u  = |xi_A + eta_A|^2
//   u' = 2 <xi_A + eta_A, eta_A - (K xi)_A>
//   N  = |xi|^2 + |eta|^2,  N' = 2 <xi, eta> - 2 <eta, K xi>
//   rate[i] = (u' N - u N') / (2 N^2)
// u is written to center_mass for degeneracy filtering.
void cone_rate_batch(const double* K, int r, int d, const double* xi,
                     const double* eta, int count, double* rate,
                     double* center_mass);
void cone_rate_batch_scalar(const double* K, int r, int d, const double* xi,
                            const double* eta, int count, double* rate,
                            double* center_mass);

#if defined(TUBEFLOW_BUILD_AVX2)
void quadform_pair_batch_avx2(const double* qa, const double* qb, int m,
                              const double* w, int count, double* out_a,
                              double* out_b);
void cone_rate_batch_avx2(const double* K, int r, int d, const double* xi,
                          const double* eta, int count, double* rate,
                          double* center_mass);
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
void quadform_pair_batch_neon(const double* qa, const double* qb, int m,
                              const double* w, int count, double* out_a,
                              double* out_b);
void cone_rate_batch_neon(const double* K, int r, int d, const double* xi,
                          const double* eta, int count, double* rate,
                          double* center_mass);
#endif

}  // namespace kernels
}  // namespace tubeflow
