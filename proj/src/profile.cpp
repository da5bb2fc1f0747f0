#include "tubeflow/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace tubeflow {

DeformationProfile::DeformationProfile(int n, int s, int order, double eps,
                                       DeformationKind kind)
    : n_(n), s_(s), kind_(kind), bumps_(order, eps) {
  if (s < 1 || s > n - 1) {
    throw std::invalid_argument("DeformationProfile: s must be in [1, n-1]");
  }
}

ScalarJet DeformationProfile::jet(const Vec& p) const {
  ScalarJet out;
  out.d = zero_vec();
  out.dd = zero_mat();
  if (kind_ == DeformationKind::kNone || outside_support(p)) {
    out.value = 0.0;
    return out;
  }
  double eps = bumps_.eps();

  // Factor values: F = f(x_s) and phi_j = phi(x_j / eps) for j != s. First
  // and second derivatives in x carry 1/eps chain factors for the phis.
  double F0 = bumps_.f(p[s_], 0);
  double F1 = bumps_.f(p[s_], 1);
  double F2 = bumps_.f(p[s_], 2);

  double ph0[kMaxDim], ph1[kMaxDim], ph2[kMaxDim];
  for (int j = 1; j < n_; ++j) {
    if (j == s_) continue;
    double u = p[j] / eps;
    ph0[j] = BumpFamily::phi(u, 0);
    ph1[j] = BumpFamily::phi(u, 1) / eps;
    ph2[j] = BumpFamily::phi(u, 2) / (eps * eps);
  }

  auto window_except = [&](int skip1, int skip2) {
    double prod = 1.0;
    for (int j = 1; j < n_; ++j) {
      if (j == s_ || j == skip1 || j == skip2) continue;
      prod *= ph0[j];
    }
    return prod;
  };

  double W = window_except(-1, -1);
  out.value = -2.0 * F0 * W;
  out.d[s_] = -2.0 * F1 * W;
  out.dd[s_][s_] = -2.0 * F2 * W;
  for (int j = 1; j < n_; ++j) {
    if (j == s_) continue;
    double Wj = window_except(j, -1);
    out.d[j] = -2.0 * F0 * ph1[j] * Wj;
    out.dd[j][j] = -2.0 * F0 * ph2[j] * Wj;
    out.dd[s_][j] = -2.0 * F1 * ph1[j] * Wj;
    out.dd[j][s_] = out.dd[s_][j];
    for (int l = j + 1; l < n_; ++l) {
      if (l == s_) continue;
      double Wjl = window_except(j, l);
      double v = -2.0 * F0 * ph1[j] * ph1[l] * Wjl;
      out.dd[j][l] = v;
      out.dd[l][j] = v;
    }
  }
  return out;
}

bool DeformationProfile::outside_support(const Vec& p) const {
  double eps = bumps_.eps();
  if (std::fabs(p[s_]) >= eps * eps) return true;
  for (int j = 1; j < n_; ++j) {
    if (j == s_) continue;
    if (std::fabs(p[j]) >= eps) return true;
  }
  return false;
}

EstimateCertificate verify_estimates(const DeformationProfile& profile,
                                     int grid_per_axis, int s_grid) {
  double eps = profile.eps();
  int n = profile.dim();
  int s = profile.s();
  double e2 = eps * eps;
  double e3 = e2 * eps;
  double e4 = e2 * e2;

  // Measured shape constants of the bump family itself, evaluated on dense
  // one-dimensional grids; the certificate bounds use these rather than
  // nominal constants.
  double sup_r = profile.bumps().sup_abs_r();
  double sup_phi1 = 0.0, sup_phi2 = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    double u = -1.0 + 2.0 * i / 20000.0;
    sup_phi1 = std::max(sup_phi1, std::fabs(BumpFamily::phi(u, 1)));
    sup_phi2 = std::max(sup_phi2, std::fabs(BumpFamily::phi(u, 2)));
  }

  EstimateCertificate cert;
  cert.eps = eps;

  struct Tracker {
    double measured = 0.0;
    Vec witness{};
    void update(double v, const Vec& p) {
      if (std::fabs(v) > measured) {
        measured = std::fabs(v);
        witness = p;
      }
    }
  };
  Tracker t_h, t_dj, t_ds, t_dij, t_dsj, t_dii, t_dss;

  // Transverse directions other than s get grid_per_axis points over
  // [-eps, eps]; the s direction gets s_grid points over [-eps^2, eps^2].
  std::vector<int> dims;
  for (int j = 1; j < n; ++j) {
    if (j != s) dims.push_back(j);
  }
  long total = s_grid;
  for (std::size_t k = 0; k < dims.size(); ++k) total *= grid_per_axis;

  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    Vec p = zero_vec();
    int si = static_cast<int>(rem % s_grid);
    rem /= s_grid;
    p[s] = e2 * (-1.0 + 2.0 * si / (s_grid - 1));
    for (int dj : dims) {
      int c = static_cast<int>(rem % grid_per_axis);
      rem /= grid_per_axis;
      p[dj] = eps * (-1.0 + 2.0 * c / (grid_per_axis - 1));
    }
    ScalarJet jet = profile.jet(p);
    t_h.update(jet.value, p);
    t_ds.update(jet.d[s], p);
    t_dss.update(jet.dd[s][s], p);
    for (int j = 1; j < n; ++j) {
      if (j == s) continue;
      t_dj.update(jet.d[j], p);
      t_dsj.update(jet.dd[s][j], p);
      t_dii.update(jet.dd[j][j], p);
      for (int l = j + 1; l < n; ++l) {
        if (l == s) continue;
        t_dij.update(jet.dd[j][l], p);
      }
    }
  }

  auto add = [&](const char* name, const Tracker& t, double bound) {
    BoundReport b;
    b.name = name;
    b.measured = t.measured;
    b.bound = bound;
    b.witness = t.witness;
    b.pass = t.measured <= bound;
    cert.bounds.push_back(b);
  };
  add("value", t_h, e4);
  add("d_perp", t_dj, 2.0 * e3);
  add("d_s", t_ds, e2);
  add("dd_perp_mixed", t_dij, 4.0 * e2);
  add("dd_s_perp", t_dsj, 2.0 * eps);
  add("dd_perp_diag", t_dii, 2.0 * sup_r * sup_phi2 * e2);
  add("dd_ss", t_dss, 0.5);
  (void)sup_phi1;

  cert.measured_M = t_dii.measured / e2;
  cert.pass = true;
  for (const auto& b : cert.bounds) cert.pass = cert.pass && b.pass;
  return cert;
}

}  // namespace tubeflow
