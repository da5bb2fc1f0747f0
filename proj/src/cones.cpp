#include "tubeflow/cones.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tubeflow/kernels.hpp"

namespace tubeflow {

namespace {

struct BundleShape {
  double sigma;
  int lo;
  int hi;
};

BundleShape bundle_shape(const ConeSpec& cone) {
  switch (cone.bundle) {
    case Bundle::kAU:
      return {1.0, 0, cone.r};
    case Bundle::kAS:
      return {-1.0, 0, cone.r};
    case Bundle::kBU:
      return {0.5, cone.r, cone.d};
    default:
      return {-0.5, cone.r, cone.d};
  }
}

double state_norm2(const Vec& xi, const Vec& eta, int d) {
  double nn = 0.0;
  for (int c = 0; c < d; ++c) nn += xi[c] * xi[c] + eta[c] * eta[c];
  return nn;
}

}  // namespace

double alignment(const ConeSpec& cone, const Vec& xi, const Vec& eta) {
  BundleShape sh = bundle_shape(cone);
  double nn = state_norm2(xi, eta, cone.d);
  if (nn <= 0.0) {
    throw std::invalid_argument("alignment: zero state");
  }
  double u = 0.0;
  for (int c = sh.lo; c < sh.hi; ++c) {
    double a = xi[c] + sh.sigma * eta[c];
    u += a * a;
  }
  return u / ((1.0 + sh.sigma * sh.sigma) * nn);
}

RateResult alignment_rate(const ConeSpec& cone, const Vec& xi, const Vec& eta,
                          const Mat& K) {
  BundleShape sh = bundle_shape(cone);
  int d = cone.d;
  double nn = state_norm2(xi, eta, d);
  if (nn <= 0.0) {
    throw std::invalid_argument("alignment_rate: zero state");
  }
  Vec kx = zero_vec();
  for (int c = 0; c < d; ++c) {
    double a = 0.0;
    for (int q = 0; q < d; ++q) a += K[c][q] * xi[q];
    kx[c] = a;
  }
  double u = 0.0, up = 0.0;
  for (int c = sh.lo; c < sh.hi; ++c) {
    double a = xi[c] + sh.sigma * eta[c];
    u += a * a;
    up += 2.0 * a * (eta[c] - sh.sigma * kx[c]);
  }
  double xe = 0.0, ekx = 0.0;
  for (int c = 0; c < d; ++c) {
    xe += xi[c] * eta[c];
    ekx += eta[c] * kx[c];
  }
  double np = 2.0 * xe - 2.0 * ekx;
  double s2 = 1.0 + sh.sigma * sh.sigma;

  RateResult out;
  out.rate = (up * nn - u * np) / (s2 * nn * nn);
  out.multiplier = u / (s2 * nn * nn);
  out.degenerate = u <= 1e-12 * nn;
  out.bracket = out.degenerate ? 0.0 : out.rate * (s2 * nn * nn) / u;
  return out;
}

RateResult model_analytic_rate(const ConeSpec& cone, const Vec& xi,
                               const Vec& eta) {
  if (cone.bundle != Bundle::kAU) {
    throw std::invalid_argument(
        "model_analytic_rate: closed form is for the slope-one A cone");
  }
  int d = cone.d, r = cone.r;
  double nn = state_norm2(xi, eta, d);
  if (nn <= 0.0) {
    throw std::invalid_argument("model_analytic_rate: zero state");
  }
  double u = 0.0, xeA = 0.0, xeB = 0.0, xe = 0.0;
  for (int c = 0; c < d; ++c) {
    double p = xi[c] * eta[c];
    xe += p;
    if (c < r) {
      double a = xi[c] + eta[c];
      u += a * a;
      xeA += p;
    } else {
      xeB += p;
    }
  }
  double f = nn - xe - xeA - 0.25 * xeB;
  RateResult out;
  out.rate = (u / (nn * nn)) * f;
  out.multiplier = u / (2.0 * nn * nn);
  out.degenerate = u <= 1e-12 * nn;
  out.bracket = 2.0 * f;
  return out;
}

double worst_case_bracket(const Vec& xi, const Vec& eta, int r, int d, int s) {
  int idx = s - 1;
  double nn = 0.0, xe = 0.0, xeA = 0.0, xeB = 0.0;
  for (int c = 0; c < d; ++c) {
    nn += xi[c] * xi[c] + eta[c] * eta[c];
    double p = xi[c] * eta[c];
    xe += p;
    if (c < r) {
      xeA += p;
    } else {
      xeB += p;
    }
  }
  return nn - xe - xeA - 0.25 * xeB - 0.5 * xi[idx] * eta[idx];
}

double worst_case_bracket_sos(const Vec& xi, const Vec& eta, int r, int d,
                              int s) {
  int idx = s - 1;
  double acc = 0.0;
  for (int c = 0; c < r; ++c) {
    double a = xi[c] - eta[c];
    acc += a * a;
  }
  for (int c = r; c < d; ++c) {
    if (c == idx) continue;
    double a = xi[c] - 0.625 * eta[c];
    acc += a * a + (39.0 / 64.0) * eta[c] * eta[c];
  }
  double a = xi[idx] - 0.875 * eta[idx];
  acc += a * a + (15.0 / 64.0) * eta[idx] * eta[idx];
  return acc;
}

JacobiInit boundary_state(const ConeSpec& cone, Rng& rng) {
  BundleShape sh = bundle_shape(cone);
  int d = cone.d;
  double s2 = std::sqrt(1.0 + sh.sigma * sh.sigma);

  // Unit center direction (w, sigma w) for a random w in the subspace.
  double w[kMaxDim - 1] = {0};
  double wn = 0.0;
  do {
    wn = 0.0;
    for (int c = sh.lo; c < sh.hi; ++c) {
      w[c] = rng.gaussian();
      wn += w[c] * w[c];
    }
  } while (wn < 1e-12);
  wn = std::sqrt(wn);

  JacobiInit center;
  center.xi = zero_vec();
  center.eta = zero_vec();
  for (int c = sh.lo; c < sh.hi; ++c) {
    center.xi[c] = w[c] / (wn * s2);
    center.eta[c] = sh.sigma * w[c] / (wn * s2);
  }

  // Random unit vector orthogonal to the whole center subspace.
  JacobiInit q;
  double qn = 0.0;
  do {
    for (int c = 0; c < d; ++c) {
      q.xi[c] = rng.gaussian();
      q.eta[c] = rng.gaussian();
    }
    for (int c = sh.lo; c < sh.hi; ++c) {
      // Subtract the projection onto (e_c, sigma e_c)/s2.
      double coeff = (q.xi[c] + sh.sigma * q.eta[c]) / (s2 * s2);
      q.xi[c] -= coeff;
      q.eta[c] -= coeff * sh.sigma;
    }
    qn = std::sqrt(state_norm2(q.xi, q.eta, d));
  } while (qn < 1e-8);

  double a = std::sqrt(cone.opening);
  double b = std::sqrt(1.0 - cone.opening);
  JacobiInit out;
  for (int c = 0; c < d; ++c) {
    out.xi[c] = a * center.xi[c] + b * q.xi[c] / qn;
    out.eta[c] = a * center.eta[c] + b * q.eta[c] / qn;
  }
  return out;
}

AlignmentSeries alignment_series(const JacobiPath& path, int field,
                                 const ConeSpec& cone) {
  AlignmentSeries out;
  std::size_t m = path.times.size();
  out.t = path.times;
  out.theta.resize(m);
  out.numeric_rate.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    Vec xi = zero_vec(), eta = zero_vec();
    for (int c = 0; c < path.d; ++c) {
      xi[c] = path.at(i, field, 0, c);
      eta[c] = path.at(i, field, 1, c);
    }
    out.theta[i] = alignment(cone, xi, eta);
  }
  if (m < 2) return out;
  double dt = out.t[1] - out.t[0];
  auto uniform_at = [&](std::size_t i) {
    return std::fabs(out.t[i + 1] - out.t[i] - dt) < 1e-9 * std::max(dt, 1.0);
  };
  for (std::size_t i = 0; i < m; ++i) {
    if (i >= 2 && i + 2 < m && uniform_at(i) && uniform_at(i + 1) &&
        uniform_at(i - 1) && uniform_at(i - 2)) {
      out.numeric_rate[i] = (-out.theta[i + 2] + 8.0 * out.theta[i + 1] -
                             8.0 * out.theta[i - 1] + out.theta[i - 2]) /
                            (12.0 * dt);
    } else if (i + 1 < m && i >= 1) {
      out.numeric_rate[i] =
          (out.theta[i + 1] - out.theta[i - 1]) / (out.t[i + 1] - out.t[i - 1]);
    } else if (i + 1 < m) {
      out.numeric_rate[i] =
          (out.theta[i + 1] - out.theta[i]) / (out.t[i + 1] - out.t[i]);
    } else {
      out.numeric_rate[i] =
          (out.theta[i] - out.theta[i - 1]) / (out.t[i] - out.t[i - 1]);
    }
  }
  return out;
}

// --- Invariance scan ---------------------------------------------------------

namespace {

ConeSeedResult scan_one_seed(const MetricChart& chart, const ModelSpec& spec,
                             double eps, const ConeScanPlan& plan,
                             SeedClass cls, int seed_id,
                             std::uint64_t stream) {
  Rng rng(stream);
  int n = spec.n();
  int d = n - 1;
  double theta = plan.theta_threshold;

  Vec x0 = zero_vec();
  Vec dir = zero_vec();
  x0[0] = rng.uniform(0.0, spec.period);
  dir[0] = 1.0;
  for (int a = 1; a < n; ++a) {
    if (a == spec.s) {
      x0[a] = rng.uniform(-0.5 * eps * eps, 0.5 * eps * eps);
    } else {
      x0[a] = rng.uniform(-0.5 * eps, 0.5 * eps);
    }
  }
  if (cls == SeedClass::kAlmostParallel) {
    for (int a = 1; a < n; ++a) dir[a] = rng.uniform(-theta, theta);
  } else if (cls == SeedClass::kTransversal) {
    x0[spec.s] = -eps;
    for (int a = 1; a < n; ++a) {
      dir[a] = rng.uniform(-0.5 * theta, 0.5 * theta);
    }
    dir[spec.s] = theta * rng.uniform(1.0, 2.0);
  }

  ConeSeedResult out;
  out.seed_id = seed_id;
  out.cls = cls;

  ConeSpec cone{Bundle::kAU, plan.opening, spec.r, d};
  int nb = plan.boundary_directions;
  std::vector<double> bxi(static_cast<std::size_t>(nb) * d);
  std::vector<double> beta(static_cast<std::size_t>(nb) * d);
  for (int b = 0; b < nb; ++b) {
    JacobiInit st = boundary_state(cone, rng);
    for (int c = 0; c < d; ++c) {
      bxi[static_cast<std::size_t>(b) * d + c] = st.xi[c];
      beta[static_cast<std::size_t>(b) * d + c] = st.eta[c];
    }
  }
  std::vector<double> rates(static_cast<std::size_t>(nb));
  std::vector<double> mass(static_cast<std::size_t>(nb));

  FlowState start = initial_state(chart, x0, dir);
  FlowStepper fs(chart, start, 0, plan.step);

  if (cls == SeedClass::kTransversal) {
    // Residence time in the slab |x_s| <= eps. The seed starts on the
    // entering face, so residence is the first crossing time of the far
    // face.
    double prev = fs.state().x[spec.s];
    out.exit_time = plan.horizon;
    long max_steps = std::lround(plan.horizon / plan.step);
    for (long i = 0; i < max_steps; ++i) {
      if (!fs.advance()) break;
      double cur = fs.state().x[spec.s];
      if (cur >= eps) {
        double frac = (eps - prev) / (cur - prev);
        out.exited = true;
        out.exit_time = fs.time() - plan.step + frac * plan.step;
        break;
      }
      prev = cur;
    }
    out.min_rate = 0.0;
    return out;
  }

  double best = 1e300;
  double best_t = 0.0;
  long max_steps = std::lround(plan.horizon / plan.step);
  long i = 0;
  while (true) {
    if (i % plan.stride == 0) {
      Mat K = fs.curvature();
      double kflat[(kMaxDim - 1) * (kMaxDim - 1)];
      for (int c = 0; c < d; ++c) {
        for (int q = 0; q < d; ++q) kflat[c * d + q] = K[c][q];
      }
      kernels::cone_rate_batch(kflat, spec.r, d, bxi.data(), beta.data(), nb,
                               rates.data(), mass.data());
      for (int b = 0; b < nb; ++b) {
        double nn = 0.0;
        for (int c = 0; c < d; ++c) {
          nn += bxi[static_cast<std::size_t>(b) * d + c] * bxi[static_cast<std::size_t>(b) * d + c] +
                beta[static_cast<std::size_t>(b) * d + c] * beta[static_cast<std::size_t>(b) * d + c];
        }
        if (mass[static_cast<std::size_t>(b)] <= 1e-12 * nn) {
          ++out.degenerate_skipped;
          continue;
        }
        if (rates[static_cast<std::size_t>(b)] < best) {
          best = rates[static_cast<std::size_t>(b)];
          best_t = fs.time();
        }
      }
    }
    if (i >= max_steps) break;
    if (!fs.advance()) {
      out.exited = true;
      out.exit_time = fs.exit_time();
      break;
    }
    ++i;
  }
  out.min_rate = best;
  out.min_rate_time = best_t;
  return out;
}

}  // namespace

ConeScanReport cone_invariance_scan(const MetricChart& chart,
                                    const ModelSpec& spec, double eps,
                                    const ConeScanPlan& plan) {
  spec.validate();
  ConeScanReport report;
  int per = plan.seeds_per_class;
  report.parallel.resize(static_cast<std::size_t>(per));
  report.almost_parallel.resize(static_cast<std::size_t>(per));
  report.transversal.resize(static_cast<std::size_t>(per));

  parallel_for(static_cast<std::size_t>(3 * per), plan.threads,
               [&](std::size_t item) {
                 int cls_i = static_cast<int>(item) / per;
                 int k = static_cast<int>(item) % per;
                 SeedClass cls = cls_i == 0   ? SeedClass::kParallel
                                 : cls_i == 1 ? SeedClass::kAlmostParallel
                                              : SeedClass::kTransversal;
                 ConeSeedResult res =
                     scan_one_seed(chart, spec, eps, plan, cls, k,
                                   mix_seed(plan.seed, item));
                 if (cls == SeedClass::kParallel) {
                   report.parallel[static_cast<std::size_t>(k)] = res;
                 } else if (cls == SeedClass::kAlmostParallel) {
                   report.almost_parallel[static_cast<std::size_t>(k)] = res;
                 } else {
                   report.transversal[static_cast<std::size_t>(k)] = res;
                 }
               });

  report.min_rate_parallel = 1e300;
  report.min_rate_almost = 1e300;
  for (const auto& r : report.parallel) {
    report.min_rate_parallel = std::min(report.min_rate_parallel, r.min_rate);
  }
  for (const auto& r : report.almost_parallel) {
    report.min_rate_almost = std::min(report.min_rate_almost, r.min_rate);
  }
  report.transversal_budget =
      (2.0 * eps / plan.theta_threshold) * (1.0 + 10.0 * eps);
  report.max_transversal_residence = 0.0;
  bool trans_ok = true;
  for (const auto& r : report.transversal) {
    report.max_transversal_residence =
        std::max(report.max_transversal_residence, r.exit_time);
    trans_ok = trans_ok && r.exited &&
               r.exit_time <= report.transversal_budget;
  }
  report.pass = report.min_rate_parallel > 0.0 &&
                report.min_rate_almost > 0.0 && trans_ok;
  return report;
}

// --- Finite-time spectrum ---------------------------------------------------

namespace {

struct Checkpoint {
  double t;
  std::array<double, 2 * (kMaxDim - 1)> S;
};

// Modified Gram-Schmidt on the 2d-dimensional field columns; returns the
// log of each pivot norm added into S.
template <typename GetF, typename SetF>
void qr_pass(int D, int d, const GetF& get, const SetF& set,
             std::array<double, 2 * (kMaxDim - 1)>& S) {
  std::array<std::array<double, 2 * (kMaxDim - 1)>, 2 * (kMaxDim - 1)> col;
  for (int f = 0; f < D; ++f) {
    JacobiInit ji = get(f);
    for (int c = 0; c < d; ++c) {
      col[f][c] = ji.xi[c];
      col[f][d + c] = ji.eta[c];
    }
  }
  for (int f = 0; f < D; ++f) {
    for (int b = 0; b < f; ++b) {
      double proj = 0.0;
      for (int c = 0; c < 2 * d; ++c) proj += col[f][c] * col[b][c];
      for (int c = 0; c < 2 * d; ++c) col[f][c] -= proj * col[b][c];
    }
    double nn = 0.0;
    for (int c = 0; c < 2 * d; ++c) nn += col[f][c] * col[f][c];
    double norm = std::sqrt(nn);
    S[f] += std::log(norm);
    for (int c = 0; c < 2 * d; ++c) col[f][c] /= norm;
  }
  for (int f = 0; f < D; ++f) {
    JacobiInit ji;
    for (int c = 0; c < d; ++c) {
      ji.xi[c] = col[f][c];
      ji.eta[c] = col[f][d + c];
    }
    set(f, ji);
  }
}

SpectrumReport finish_spectrum(const std::vector<Checkpoint>& cps, int D,
                               double horizon, bool partial, double exit_time,
                               double cluster_merge) {
  SpectrumReport rep;
  rep.horizon = horizon;
  rep.partial = partial;
  rep.exit_time = exit_time;
  if (cps.size() < 6) {
    throw std::runtime_error("lyapunov: too few checkpoints for the fit");
  }
  double t_end = cps.back().t;
  double warmup = 0.25 * t_end;

  std::vector<double> lam(static_cast<std::size_t>(D)),
      lc(static_cast<std::size_t>(D)), off(static_cast<std::size_t>(D));
  double max_res = 0.0;
  for (int f = 0; f < D; ++f) {
    // Least squares S(t) = lam t + c ln t + b over post-warmup checkpoints.
    double a[3][3] = {{0}};
    double rhs[3] = {0};
    int used = 0;
    for (const auto& cp : cps) {
      if (cp.t < warmup) continue;
      double reg[3] = {cp.t, std::log(cp.t), 1.0};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] += reg[i] * reg[j];
        rhs[i] += reg[i] * cp.S[f];
      }
      ++used;
    }
    if (used < 4) {
      throw std::runtime_error("lyapunov: too few post-warmup checkpoints");
    }
    // Solve the 3x3 system by Gaussian elimination with partial pivoting.
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
      m[i][3] = rhs[i];
    }
    for (int c = 0; c < 3; ++c) {
      int piv = c;
      for (int rr = c + 1; rr < 3; ++rr) {
        if (std::fabs(m[rr][c]) > std::fabs(m[piv][c])) piv = rr;
      }
      std::swap(m[c], m[piv]);
      for (int rr = c + 1; rr < 3; ++rr) {
        double fct = m[rr][c] / m[c][c];
        for (int j = c; j < 4; ++j) m[rr][j] -= fct * m[c][j];
      }
    }
    double sol[3];
    for (int i = 2; i >= 0; --i) {
      double v = m[i][3];
      for (int j = i + 1; j < 3; ++j) v -= m[i][j] * sol[j];
      sol[i] = v / m[i][i];
    }
    lam[static_cast<std::size_t>(f)] = sol[0];
    lc[static_cast<std::size_t>(f)] = sol[1];
    off[static_cast<std::size_t>(f)] = sol[2];
    for (const auto& cp : cps) {
      if (cp.t < warmup) continue;
      double fit = sol[0] * cp.t + sol[1] * std::log(cp.t) + sol[2];
      max_res = std::max(max_res, std::fabs(cp.S[f] - fit));
    }
  }

  std::vector<int> order(static_cast<std::size_t>(D));
  for (int f = 0; f < D; ++f) order[static_cast<std::size_t>(f)] = f;
  std::sort(order.begin(), order.end(), [&](int a2, int b2) {
    return lam[static_cast<std::size_t>(a2)] > lam[static_cast<std::size_t>(b2)];
  });
  rep.exponents.resize(static_cast<std::size_t>(D));
  rep.log_coefficients.resize(static_cast<std::size_t>(D));
  for (int f = 0; f < D; ++f) {
    rep.exponents[static_cast<std::size_t>(f)] = lam[static_cast<std::size_t>(order[static_cast<std::size_t>(f)])];
    rep.log_coefficients[static_cast<std::size_t>(f)] = lc[static_cast<std::size_t>(order[static_cast<std::size_t>(f)])];
  }
  rep.fit_residual = max_res;

  double pairing = 0.0, sum = 0.0;
  for (int f = 0; f < D; ++f) {
    sum += rep.exponents[static_cast<std::size_t>(f)];
    pairing = std::max(pairing,
                       std::fabs(rep.exponents[static_cast<std::size_t>(f)] +
                                 rep.exponents[static_cast<std::size_t>(D - 1 - f)]));
  }
  rep.pairing_residual = pairing;
  rep.sum_residual = std::fabs(sum);

  // Cluster the sorted exponents, then report gaps between cluster means.
  std::vector<double> means;
  double acc = rep.exponents[0];
  int cnt = 1;
  for (int f = 1; f < D; ++f) {
    if (rep.exponents[static_cast<std::size_t>(f - 1)] - rep.exponents[static_cast<std::size_t>(f)] <= cluster_merge) {
      acc += rep.exponents[static_cast<std::size_t>(f)];
      ++cnt;
    } else {
      means.push_back(acc / cnt);
      acc = rep.exponents[static_cast<std::size_t>(f)];
      cnt = 1;
    }
  }
  means.push_back(acc / cnt);
  for (std::size_t k = 1; k < means.size(); ++k) {
    rep.domination_gaps.push_back(means[k - 1] - means[k]);
  }
  return rep;
}

}  // namespace

SpectrumReport lyapunov_spectrum(const MetricChart& chart,
                                 const FlowState& start, double horizon,
                                 double qr_interval, double step,
                                 double cluster_merge) {
  int d = chart.dim() - 1;
  int D = 2 * d;
  FlowStepper fs(chart, start, D, step);
  for (int f = 0; f < D; ++f) {
    JacobiInit ji;
    ji.xi = zero_vec();
    ji.eta = zero_vec();
    if (f < d) {
      ji.xi[f] = 1.0;
    } else {
      ji.eta[f - d] = 1.0;
    }
    fs.set_field(f, ji);
  }

  long qr_every = std::max(1L, std::lround(qr_interval / step));
  long max_steps = std::lround(horizon / step);
  std::array<double, 2 * (kMaxDim - 1)> S{};
  std::vector<Checkpoint> cps;
  bool partial = false;
  double exit_time = horizon;
  for (long i = 1; i <= max_steps; ++i) {
    if (!fs.advance()) {
      partial = true;
      exit_time = fs.exit_time();
      break;
    }
    if (i % qr_every == 0 || i == max_steps) {
      qr_pass(
          D, d, [&](int f) { return fs.field(f); },
          [&](int f, const JacobiInit& ji) { fs.set_field(f, ji); }, S);
      cps.push_back({fs.time(), S});
    }
  }
  return finish_spectrum(cps, D, horizon, partial, exit_time, cluster_merge);
}

SpectrumReport lyapunov_spectrum_model(const ModelSpec& spec, double horizon,
                                       double qr_interval, double step,
                                       double cluster_merge) {
  spec.validate();
  int d = spec.n() - 1;
  int D = 2 * d;
  std::vector<JacobiInit> fields(static_cast<std::size_t>(D));
  for (int f = 0; f < D; ++f) {
    fields[static_cast<std::size_t>(f)].xi = zero_vec();
    fields[static_cast<std::size_t>(f)].eta = zero_vec();
    if (f < d) {
      fields[static_cast<std::size_t>(f)].xi[f] = 1.0;
    } else {
      fields[static_cast<std::size_t>(f)].eta[f - d] = 1.0;
    }
  }
  long qr_every = std::max(1L, std::lround(qr_interval / step));
  long max_steps = std::lround(horizon / step);
  double h = horizon / static_cast<double>(max_steps);

  double c_mu[kMaxDim - 1], c_ch[kMaxDim - 1], c_sh[kMaxDim - 1];
  for (int c = 0; c < d; ++c) {
    double mu = (c < spec.r) ? 1.0 : 0.5;
    c_mu[c] = mu;
    c_ch[c] = std::cosh(mu * h);
    c_sh[c] = std::sinh(mu * h);
  }

  std::array<double, 2 * (kMaxDim - 1)> S{};
  std::vector<Checkpoint> cps;
  for (long i = 1; i <= max_steps; ++i) {
    for (int f = 0; f < D; ++f) {
      for (int c = 0; c < d; ++c) {
        double xi = fields[static_cast<std::size_t>(f)].xi[c];
        double eta = fields[static_cast<std::size_t>(f)].eta[c];
        fields[static_cast<std::size_t>(f)].xi[c] = c_ch[c] * xi + c_sh[c] * eta / c_mu[c];
        fields[static_cast<std::size_t>(f)].eta[c] = c_mu[c] * c_sh[c] * xi + c_ch[c] * eta;
      }
    }
    if (i % qr_every == 0 || i == max_steps) {
      qr_pass(
          D, d, [&](int f) { return fields[static_cast<std::size_t>(f)]; },
          [&](int f, const JacobiInit& ji) { fields[static_cast<std::size_t>(f)] = ji; }, S);
      cps.push_back({static_cast<double>(i) * h, S});
    }
  }
  return finish_spectrum(cps, D, horizon, false, horizon, cluster_merge);
}

// --- Obstruction witness ----------------------------------------------------

WitnessReport anosov_obstruction_witness(const MetricChart& chart, int s,
                                         int t_samples) {
  WitnessReport out;
  int n = chart.dim();
  Vec es = zero_vec(), e0 = zero_vec();
  es[s] = 1.0;
  e0[0] = 1.0;
  for (int i = 0; i < t_samples; ++i) {
    Vec p = zero_vec();
    p[0] = chart.period() * static_cast<double>(i) / t_samples;
    PointGeometry geo;
    analyze_point(chart, p, geo, true);
    double K = sectional(geo.curv, geo.jet.g, es, e0, n);
    out.max_abs_curvature = std::max(out.max_abs_curvature, std::fabs(K));

    // Covariant derivative of e_s along the unit-speed axis direction.
    double inv_speed = 1.0 / std::sqrt(geo.jet.g[0][0]);
    Vec w = zero_vec();
    for (int k = 0; k < n; ++k) w[k] = geo.gamma[k][0][s] * inv_speed;
    double defect = std::sqrt(inner(geo.jet.g, w, w, n));
    out.max_transport_defect = std::max(out.max_transport_defect, defect);
  }
  out.flat_parallel_field =
      out.max_abs_curvature < 1e-9 && out.max_transport_defect < 1e-10;
  return out;
}

}  // namespace tubeflow
