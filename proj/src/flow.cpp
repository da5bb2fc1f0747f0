#include "tubeflow/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace tubeflow {

namespace {

constexpr int kMaxFrame = kMaxDim - 1;

// Raw derivative state for RK4: position, velocity, frame and Jacobi fields
// flattened into one fixed-size block.
struct Deriv {
  Vec dx{};
  Vec dv{};
  std::array<Vec, kMaxFrame> dframe{};
  std::array<double, kMaxFields * 2 * kMaxFrame> djac{};
};

struct Stage {
  Vec x{};
  Vec v{};
  std::array<Vec, kMaxFrame> frame{};
  std::array<double, kMaxFields * 2 * kMaxFrame> jac{};
};

void rhs(const MetricChart& chart, const Stage& st, int n, int d, int nfields,
         Deriv& out) {
  PointGeometry geo;
  analyze_point(chart, st.x, geo, nfields > 0);

  out.dx = st.v;
  for (int k = 0; k < n; ++k) {
    double a = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a += geo.gamma[k][i][j] * st.v[i] * st.v[j];
    }
    out.dv[k] = -a;
  }
  for (int c = 0; c < d; ++c) {
    for (int k = 0; k < n; ++k) {
      double a = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          a += geo.gamma[k][i][j] * st.v[i] * st.frame[c][j];
        }
      }
      out.dframe[c][k] = -a;
    }
  }

  if (nfields > 0) {
    // K_cd = R(e_c, v, v, e_d) via the intermediate T_il = R_ijkl v^j v^k.
    Mat T = zero_mat();
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < n; ++l) {
        double a = 0.0;
        for (int j = 0; j < n; ++j) {
          if (st.v[j] == 0.0) continue;
          for (int k = 0; k < n; ++k) {
            a += geo.curv.r[i][j][k][l] * st.v[j] * st.v[k];
          }
        }
        T[i][l] = a;
      }
    }
    Mat K = zero_mat();
    for (int c = 0; c < d; ++c) {
      for (int e = 0; e < d; ++e) {
        double a = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int l = 0; l < n; ++l) {
            a += st.frame[c][i] * T[i][l] * st.frame[e][l];
          }
        }
        K[c][e] = a;
      }
    }
    for (int f = 0; f < nfields; ++f) {
      const double* xi = &st.jac[static_cast<std::size_t>(f) * 2 * kMaxFrame];
      const double* eta = xi + kMaxFrame;
      double* dxi = &out.djac[static_cast<std::size_t>(f) * 2 * kMaxFrame];
      double* deta = dxi + kMaxFrame;
      for (int c = 0; c < d; ++c) {
        dxi[c] = eta[c];
        double a = 0.0;
        for (int e = 0; e < d; ++e) a += K[c][e] * xi[e];
        deta[c] = -a;
      }
    }
  }
}

void add_scaled(Stage& out, const Stage& base, const Deriv& dd, double c,
                int n, int d, int nfields) {
  for (int k = 0; k < n; ++k) {
    out.x[k] = base.x[k] + c * dd.dx[k];
    out.v[k] = base.v[k] + c * dd.dv[k];
  }
  for (int f = 0; f < d; ++f) {
    for (int k = 0; k < n; ++k) {
      out.frame[f][k] = base.frame[f][k] + c * dd.dframe[f][k];
    }
  }
  int m = nfields * 2 * kMaxFrame;
  for (int i = 0; i < m; ++i) out.jac[static_cast<std::size_t>(i)] = base.jac[static_cast<std::size_t>(i)] + c * dd.djac[static_cast<std::size_t>(i)];
}

}  // namespace

FlowState initial_state(const MetricChart& chart, const Vec& x0,
                        const Vec& direction) {
  MetricJet jet;
  chart.eval(x0, jet);
  int n = jet.n;
  FlowState st;
  st.x = x0;
  double nv = std::sqrt(inner(jet.g, direction, direction, n));
  if (!(nv > 0.0)) {
    throw std::invalid_argument("initial_state: zero direction");
  }
  st.v = direction;
  scale(st.v, 1.0 / nv, n);

  // Candidates: J v first (at the axis this is the A-direction), then the
  // coordinate axes; Gram-Schmidt against v and the accepted vectors.
  std::vector<Vec> cand;
  if (n % 2 == 0) cand.push_back(apply_J(st.v, n));
  for (int k = 1; k < n; ++k) {
    Vec e = zero_vec();
    e[k] = 1.0;
    cand.push_back(e);
  }
  {
    Vec e = zero_vec();
    e[0] = 1.0;
    cand.push_back(e);
  }
  int got = 0;
  for (const Vec& c0 : cand) {
    if (got >= n - 1) break;
    Vec w = c0;
    axpy(-inner(jet.g, w, st.v, n), st.v, w, n);
    for (int b = 0; b < got; ++b) {
      axpy(-inner(jet.g, w, st.frame[b], n), st.frame[b], w, n);
    }
    double nn = inner(jet.g, w, w, n);
    if (nn < 1e-8) continue;
    scale(w, 1.0 / std::sqrt(nn), n);
    st.frame[got] = w;
    ++got;
  }
  if (got != n - 1) {
    throw std::runtime_error("initial_state: failed to complete the frame");
  }
  return st;
}

FlowStepper::FlowStepper(const MetricChart& chart, const FlowState& start,
                         int nfields, double step)
    : chart_(chart),
      n_(chart.dim()),
      d_(chart.dim() - 1),
      nfields_(nfields),
      h_(step),
      s_(start) {
  if (nfields < 0 || nfields > kMaxFields) {
    throw std::invalid_argument("FlowStepper: bad field count");
  }
  if (!chart.inside(start.x)) {
    exited_ = true;
    exit_time_ = 0.0;
  }
}

void FlowStepper::set_field(int f, const JacobiInit& init) {
  double* xi = &jac_[static_cast<std::size_t>(f) * 2 * kMaxFrame];
  for (int c = 0; c < d_; ++c) {
    xi[c] = init.xi[c];
    xi[kMaxFrame + c] = init.eta[c];
  }
}

JacobiInit FlowStepper::field(int f) const {
  JacobiInit out;
  const double* xi = &jac_[static_cast<std::size_t>(f) * 2 * kMaxFrame];
  for (int c = 0; c < d_; ++c) {
    out.xi[c] = xi[c];
    out.eta[c] = xi[kMaxFrame + c];
  }
  return out;
}

void FlowStepper::scale_field(int f, double c) {
  double* xi = &jac_[static_cast<std::size_t>(f) * 2 * kMaxFrame];
  for (int i = 0; i < 2 * kMaxFrame; ++i) xi[i] *= c;
}

Mat FlowStepper::curvature() const {
  return curvature_matrix(chart_, s_);
}

bool FlowStepper::advance() {
  if (exited_) return false;
  Stage y;
  y.x = s_.x;
  y.v = s_.v;
  for (int c = 0; c < d_; ++c) y.frame[c] = s_.frame[c];
  y.jac = jac_;

  Deriv k1, k2, k3, k4;
  Stage tmp;
  rhs(chart_, y, n_, d_, nfields_, k1);
  add_scaled(tmp, y, k1, 0.5 * h_, n_, d_, nfields_);
  rhs(chart_, tmp, n_, d_, nfields_, k2);
  add_scaled(tmp, y, k2, 0.5 * h_, n_, d_, nfields_);
  rhs(chart_, tmp, n_, d_, nfields_, k3);
  add_scaled(tmp, y, k3, h_, n_, d_, nfields_);
  rhs(chart_, tmp, n_, d_, nfields_, k4);

  Stage next = y;
  auto accumulate = [&](const Deriv& kk, double w) {
    for (int k = 0; k < n_; ++k) {
      next.x[k] += w * kk.dx[k];
      next.v[k] += w * kk.dv[k];
    }
    for (int c = 0; c < d_; ++c) {
      for (int k = 0; k < n_; ++k) next.frame[c][k] += w * kk.dframe[c][k];
    }
    int m = nfields_ * 2 * kMaxFrame;
    for (int i = 0; i < m; ++i) next.jac[static_cast<std::size_t>(i)] += w * kk.djac[static_cast<std::size_t>(i)];
  };
  accumulate(k1, h_ / 6.0);
  accumulate(k2, h_ / 3.0);
  accumulate(k3, h_ / 3.0);
  accumulate(k4, h_ / 6.0);

  if (!chart_.inside(next.x)) {
    // Interpolate the first boundary crossing linearly inside this step.
    double frac = 1.0;
    double radius = chart_.tube_radius();
    for (int a = 1; a < n_; ++a) {
      double x0 = std::fabs(s_.x[a]);
      double x1 = std::fabs(next.x[a]);
      if (x1 >= radius && x1 > x0) {
        frac = std::min(frac, (radius - x0) / (x1 - x0));
      }
    }
    exited_ = true;
    exit_time_ = t_ + frac * h_;
    return false;
  }

  // Stabilize: renormalize the velocity and re-orthonormalize the frame in
  // the metric at the new point (corrections are integrator-error sized).
  MetricJet jet;
  chart_.eval(next.x, jet);
  double nv = std::sqrt(inner(jet.g, next.v, next.v, n_));
  max_drift_ = std::max(max_drift_, std::fabs(nv - 1.0));
  scale(next.v, 1.0 / nv, n_);
  for (int c = 0; c < d_; ++c) {
    Vec w = next.frame[c];
    axpy(-inner(jet.g, w, next.v, n_), next.v, w, n_);
    for (int b = 0; b < c; ++b) {
      axpy(-inner(jet.g, w, next.frame[b], n_), next.frame[b], w, n_);
    }
    double nn = std::sqrt(inner(jet.g, w, w, n_));
    scale(w, 1.0 / nn, n_);
    next.frame[c] = w;
  }

  s_.x = next.x;
  s_.v = next.v;
  for (int c = 0; c < d_; ++c) s_.frame[c] = next.frame[c];
  jac_ = next.jac;
  t_ += h_;
  return true;
}

Orbit integrate_geodesic(const MetricChart& chart, const FlowState& start,
                         double horizon, double step, int stride) {
  Orbit orbit;
  long nsteps = std::lround(horizon / step);
  if (nsteps < 1) nsteps = 1;
  orbit.step = horizon / static_cast<double>(nsteps);
  orbit.stride = stride;
  orbit.horizon = horizon;

  FlowStepper fs(chart, start, 0, orbit.step);
  orbit.samples.push_back({0.0, fs.state()});
  long last_sampled = 0;
  for (long i = 1; i <= nsteps; ++i) {
    if (!fs.advance()) break;
    if (i % stride == 0 || i == nsteps) {
      orbit.samples.push_back({fs.time(), fs.state()});
      last_sampled = i;
    }
  }
  if (fs.exited()) {
    orbit.exited = true;
    orbit.exit_time = fs.exit_time();
    long done = std::lround(fs.time() / orbit.step);
    if (done != last_sampled) {
      orbit.samples.push_back({fs.time(), fs.state()});
    }
  }
  orbit.max_unit_drift = fs.max_unit_drift();
  return orbit;
}

Mat curvature_matrix(const MetricChart& chart, const FlowState& s) {
  PointGeometry geo;
  analyze_point(chart, s.x, geo, true);
  int n = geo.jet.n;
  int d = n - 1;
  Mat T = zero_mat();
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      double a = 0.0;
      for (int j = 0; j < n; ++j) {
        if (s.v[j] == 0.0) continue;
        for (int k = 0; k < n; ++k) {
          a += geo.curv.r[i][j][k][l] * s.v[j] * s.v[k];
        }
      }
      T[i][l] = a;
    }
  }
  Mat K = zero_mat();
  for (int c = 0; c < d; ++c) {
    for (int e = 0; e < d; ++e) {
      double a = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) a += s.frame[c][i] * T[i][l] * s.frame[e][l];
      }
      K[c][e] = a;
    }
  }
  return K;
}

JacobiPath integrate_jacobi(const MetricChart& chart, const Orbit& orbit,
                            const std::vector<JacobiInit>& inits) {
  if (orbit.samples.empty()) {
    throw std::invalid_argument("integrate_jacobi: empty orbit");
  }
  int nfields = static_cast<int>(inits.size());
  JacobiPath path;
  path.count = nfields;
  path.d = chart.dim() - 1;

  FlowStepper fs(chart, orbit.samples.front().s, nfields, orbit.step);
  for (int f = 0; f < nfields; ++f) fs.set_field(f, inits[f]);

  auto record = [&]() {
    path.times.push_back(fs.time());
    for (int f = 0; f < nfields; ++f) {
      JacobiInit cur = fs.field(f);
      for (int c = 0; c < path.d; ++c) path.data.push_back(cur.xi[c]);
      for (int c = 0; c < path.d; ++c) path.data.push_back(cur.eta[c]);
    }
  };

  std::size_t want = 1;
  record();
  long nsteps = std::lround(orbit.horizon / orbit.step);
  for (long i = 1; i <= nsteps && want < orbit.samples.size(); ++i) {
    if (!fs.advance()) break;
    // Mirror the orbit's sampling decisions by matching recorded times.
    if (std::fabs(fs.time() - orbit.samples[want].t) < 0.25 * orbit.step) {
      record();
      ++want;
    }
  }
  return path;
}

void central_jacobi_closed_form(const ModelSpec& spec, CentralMode mode,
                                int component, double J0, double J0p,
                                double t, double* J, double* Jp) {
  spec.validate();
  bool affine = (mode == CentralMode::kDeformed) && (component == spec.s);
  if (affine) {
    *J = J0 + J0p * t;
    *Jp = J0p;
    return;
  }
  double mu = (component <= spec.r) ? 1.0 : 0.5;
  double cm = 0.5 * (J0 - J0p / mu);
  double cp = 0.5 * (J0 + J0p / mu);
  double em = std::exp(-mu * t);
  double ep = std::exp(mu * t);
  *J = cm * em + cp * ep;
  *Jp = mu * (-cm * em + cp * ep);
}

JacobiPath model_jacobi_path(const ModelSpec& spec,
                             const std::vector<JacobiInit>& inits,
                             double horizon, double step, int stride) {
  spec.validate();
  int d = spec.n() - 1;
  int nfields = static_cast<int>(inits.size());
  JacobiPath path;
  path.count = nfields;
  path.d = d;

  long nsteps = std::lround(horizon / step);
  if (nsteps < 1) nsteps = 1;
  double h = horizon / static_cast<double>(nsteps);

  // Exact per-step propagator per component: xi'' = mu^2 xi with mu = 1 on
  // the A slot and 1/2 on the B slots.
  double c_cosh[kMaxFrame], c_sinh[kMaxFrame], c_mu[kMaxFrame];
  for (int c = 0; c < d; ++c) {
    double mu = (c < spec.r) ? 1.0 : 0.5;
    c_mu[c] = mu;
    c_cosh[c] = std::cosh(mu * h);
    c_sinh[c] = std::sinh(mu * h);
  }

  std::vector<JacobiInit> cur = inits;
  auto record = [&](double t) {
    path.times.push_back(t);
    for (int f = 0; f < nfields; ++f) {
      for (int c = 0; c < d; ++c) path.data.push_back(cur[static_cast<std::size_t>(f)].xi[c]);
      for (int c = 0; c < d; ++c) path.data.push_back(cur[static_cast<std::size_t>(f)].eta[c]);
    }
  };
  record(0.0);
  for (long i = 1; i <= nsteps; ++i) {
    for (int f = 0; f < nfields; ++f) {
      for (int c = 0; c < d; ++c) {
        double xi = cur[static_cast<std::size_t>(f)].xi[c];
        double eta = cur[static_cast<std::size_t>(f)].eta[c];
        cur[static_cast<std::size_t>(f)].xi[c] = c_cosh[c] * xi + c_sinh[c] * eta / c_mu[c];
        cur[static_cast<std::size_t>(f)].eta[c] = c_mu[c] * c_sinh[c] * xi + c_cosh[c] * eta;
      }
    }
    if (i % stride == 0 || i == nsteps) record(static_cast<double>(i) * h);
  }
  return path;
}

SasakiProducts sasaki_products(const MetricChart& chart, const Vec& p,
                               const Vec& v, const TangentPair& a,
                               const TangentPair& b) {
  MetricJet jet;
  chart.eval(p, jet);
  int n = jet.n;
  SasakiProducts out;
  out.inner = inner(jet.g, a.h, b.h, n) + inner(jet.g, a.w, b.w, n);
  out.alpha1 = inner(jet.g, a.h, v, n);
  out.alpha2 = inner(jet.g, b.h, v, n);
  out.omega = inner(jet.g, a.h, b.w, n) - inner(jet.g, a.w, b.h, n);
  return out;
}

double richardson_error(const MetricChart& chart, const FlowState& start,
                        double horizon, double step) {
  Orbit a = integrate_geodesic(chart, start, horizon, step, 1 << 30);
  Orbit b = integrate_geodesic(chart, start, horizon, 0.5 * step, 1 << 30);
  const FlowState& fa = a.samples.back().s;
  const FlowState& fb = b.samples.back().s;
  int n = chart.dim();
  double err = 0.0;
  for (int k = 0; k < n; ++k) {
    err = std::max(err, std::fabs(fa.x[k] - fb.x[k]));
    err = std::max(err, std::fabs(fa.v[k] - fb.v[k]));
    for (int c = 0; c < n - 1; ++c) {
      err = std::max(err, std::fabs(fa.frame[c][k] - fb.frame[c][k]));
    }
  }
  return err;
}

}  // namespace tubeflow
