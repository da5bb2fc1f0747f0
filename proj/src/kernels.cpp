#include "tubeflow/kernels.hpp"

#include <atomic>

#if defined(__aarch64__) || defined(__ARM_NEON)
#include <arm_neon.h>
#endif

namespace tubeflow {
namespace kernels {

namespace {
std::atomic<bool> g_scalar_override{false};

bool cpu_has_avx2() {
#if defined(TUBEFLOW_BUILD_AVX2) && defined(__GNUC__) && \
    (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
}  // namespace

Lane active_lane() {
  if (g_scalar_override.load(std::memory_order_relaxed)) return Lane::kScalar;
#if defined(TUBEFLOW_BUILD_AVX2)
  if (cpu_has_avx2()) return Lane::kAvx2;
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
  return Lane::kNeon;
#else
  return Lane::kScalar;
#endif
}

const char* lane_name(Lane lane) {
  switch (lane) {
    case Lane::kAvx2:
      return "avx2";
    case Lane::kNeon:
      return "neon";
    default:
      return "scalar";
  }
}

bool set_scalar_override(bool on) {
  return g_scalar_override.exchange(on, std::memory_order_relaxed);
}

bool scalar_override() {
  return g_scalar_override.load(std::memory_order_relaxed);
}

void quadform_pair_batch_scalar(const double* qa, const double* qb, int m,
                                const double* w, int count, double* out_a,
                                double* out_b) {
  for (int i = 0; i < count; ++i) {
    const double* wi = w + static_cast<std::size_t>(i) * m;
    double acc_a = 0.0, acc_b = 0.0;
    for (int p = 0; p < m; ++p) {
      double row_a = 0.0, row_b = 0.0;
      const double* qa_row = qa + static_cast<std::size_t>(p) * m;
      const double* qb_row = qb + static_cast<std::size_t>(p) * m;
      for (int q = 0; q < m; ++q) {
        row_a += qa_row[q] * wi[q];
        row_b += qb_row[q] * wi[q];
      }
      acc_a += wi[p] * row_a;
      acc_b += wi[p] * row_b;
    }
    out_a[i] = acc_a;
    out_b[i] = acc_b;
  }
}

void cone_rate_batch_scalar(const double* K, int r, int d, const double* xi,
                            const double* eta, int count, double* rate,
                            double* center_mass) {
  for (int i = 0; i < count; ++i) {
    const double* x = xi + static_cast<std::size_t>(i) * d;
    const double* e = eta + static_cast<std::size_t>(i) * d;
    double kx[kMaxBatchDim];
    for (int c = 0; c < d; ++c) {
      double a = 0.0;
      const double* krow = K + static_cast<std::size_t>(c) * d;
      for (int q = 0; q < d; ++q) a += krow[q] * x[q];
      kx[c] = a;
    }
    double u = 0.0, up = 0.0, nn = 0.0, xe = 0.0, ekx = 0.0;
    for (int c = 0; c < d; ++c) {
      nn += x[c] * x[c] + e[c] * e[c];
      xe += x[c] * e[c];
      ekx += e[c] * kx[c];
    }
    for (int c = 0; c < r; ++c) {
      double a = x[c] + e[c];
      u += a * a;
      up += 2.0 * a * (e[c] - kx[c]);
    }
    double np = 2.0 * xe - 2.0 * ekx;
    rate[i] = (up * nn - u * np) / (2.0 * nn * nn);
    center_mass[i] = u;
  }
}

#if defined(__aarch64__) || defined(__ARM_NEON)

void quadform_pair_batch_neon(const double* qa, const double* qb, int m,
                              const double* w, int count, double* out_a,
                              double* out_b) {
  for (int i = 0; i < count; ++i) {
    const double* wi = w + static_cast<std::size_t>(i) * m;
    double acc_a = 0.0, acc_b = 0.0;
    for (int p = 0; p < m; ++p) {
      const double* qa_row = qa + static_cast<std::size_t>(p) * m;
      const double* qb_row = qb + static_cast<std::size_t>(p) * m;
      float64x2_t va = vdupq_n_f64(0.0);
      float64x2_t vb = vdupq_n_f64(0.0);
      int q = 0;
      for (; q + 2 <= m; q += 2) {
        float64x2_t wv = vld1q_f64(wi + q);
        va = vfmaq_f64(va, vld1q_f64(qa_row + q), wv);
        vb = vfmaq_f64(vb, vld1q_f64(qb_row + q), wv);
      }
      double row_a = vaddvq_f64(va);
      double row_b = vaddvq_f64(vb);
      for (; q < m; ++q) {
        row_a += qa_row[q] * wi[q];
        row_b += qb_row[q] * wi[q];
      }
      acc_a += wi[p] * row_a;
      acc_b += wi[p] * row_b;
    }
    out_a[i] = acc_a;
    out_b[i] = acc_b;
  }
}

void cone_rate_batch_neon(const double* K, int r, int d, const double* xi,
                          const double* eta, int count, double* rate,
                          double* center_mass) {
  int i = 0;
  for (; i + 2 <= count; i += 2) {
    const double* x0 = xi + static_cast<std::size_t>(i) * d;
    const double* x1 = x0 + d;
    const double* e0 = eta + static_cast<std::size_t>(i) * d;
    const double* e1 = e0 + d;
    float64x2_t u = vdupq_n_f64(0.0);
    float64x2_t up = vdupq_n_f64(0.0);
    float64x2_t nn = vdupq_n_f64(0.0);
    float64x2_t xe = vdupq_n_f64(0.0);
    float64x2_t ekx = vdupq_n_f64(0.0);
    double kx0[kMaxBatchDim], kx1[kMaxBatchDim];
    for (int c = 0; c < d; ++c) {
      double a0 = 0.0, a1 = 0.0;
      const double* krow = K + static_cast<std::size_t>(c) * d;
      for (int q = 0; q < d; ++q) {
        a0 += krow[q] * x0[q];
        a1 += krow[q] * x1[q];
      }
      kx0[c] = a0;
      kx1[c] = a1;
    }
    for (int c = 0; c < d; ++c) {
      float64x2_t xc = {x0[c], x1[c]};
      float64x2_t ec = {e0[c], e1[c]};
      float64x2_t kc = {kx0[c], kx1[c]};
      nn = vfmaq_f64(vfmaq_f64(nn, xc, xc), ec, ec);
      xe = vfmaq_f64(xe, xc, ec);
      ekx = vfmaq_f64(ekx, ec, kc);
      if (c < r) {
        float64x2_t a = vaddq_f64(xc, ec);
        u = vfmaq_f64(u, a, a);
        float64x2_t da = vsubq_f64(ec, kc);
        up = vfmaq_f64(up, vmulq_n_f64(a, 2.0), da);
      }
    }
    float64x2_t np = vmulq_n_f64(vsubq_f64(xe, ekx), 2.0);
    float64x2_t num = vsubq_f64(vmulq_f64(up, nn), vmulq_f64(u, np));
    float64x2_t den = vmulq_n_f64(vmulq_f64(nn, nn), 2.0);
    float64x2_t res = vdivq_f64(num, den);
    rate[i] = vgetq_lane_f64(res, 0);
    rate[i + 1] = vgetq_lane_f64(res, 1);
    center_mass[i] = vgetq_lane_f64(u, 0);
    center_mass[i + 1] = vgetq_lane_f64(u, 1);
  }
  if (i < count) {
    cone_rate_batch_scalar(K, r, d, xi + static_cast<std::size_t>(i) * d,
                           eta + static_cast<std::size_t>(i) * d, count - i,
                           rate + i, center_mass + i);
  }
}

#endif  // NEON

void quadform_pair_batch(const double* qa, const double* qb, int m,
                         const double* w, int count, double* out_a,
                         double* out_b) {
  switch (active_lane()) {
#if defined(TUBEFLOW_BUILD_AVX2)
    case Lane::kAvx2:
      quadform_pair_batch_avx2(qa, qb, m, w, count, out_a, out_b);
      return;
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Lane::kNeon:
      quadform_pair_batch_neon(qa, qb, m, w, count, out_a, out_b);
      return;
#endif
    default:
      quadform_pair_batch_scalar(qa, qb, m, w, count, out_a, out_b);
      return;
  }
}

void cone_rate_batch(const double* K, int r, int d, const double* xi,
                     const double* eta, int count, double* rate,
                     double* center_mass) {
  switch (active_lane()) {
#if defined(TUBEFLOW_BUILD_AVX2)
    case Lane::kAvx2:
      cone_rate_batch_avx2(K, r, d, xi, eta, count, rate, center_mass);
      return;
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Lane::kNeon:
      cone_rate_batch_neon(K, r, d, xi, eta, count, rate, center_mass);
      return;
#endif
    default:
      cone_rate_batch_scalar(K, r, d, xi, eta, count, rate, center_mass);
      return;
  }
}

}  // namespace kernels
}  // namespace tubeflow
