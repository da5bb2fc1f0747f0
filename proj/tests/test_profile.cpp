#include <cmath>

#include "doctest.h"
#include "tubeflow/common.hpp"
#include "tubeflow/profile.hpp"

using namespace tubeflow;

namespace {

DeformationProfile make_profile(double eps, int order = 3) {
  return DeformationProfile(4, 3, order, eps, DeformationKind::kConformal);
}

double fd_partial(const DeformationProfile& prof, const Vec& p, int i,
                  double step) {
  Vec a = p, b = p, c = p, d = p;
  a[i] += 2.0 * step;
  b[i] += step;
  c[i] -= step;
  d[i] -= 2.0 * step;
  return (-prof.value(a) + 8.0 * prof.value(b) - 8.0 * prof.value(c) +
          prof.value(d)) /
         (12.0 * step);
}

double fd_second(const DeformationProfile& prof, const Vec& p, int i, int j,
                 double step_i, double step_j) {
  Vec pp = p, pm = p, mp = p, mm = p;
  pp[i] += step_i;
  pp[j] += step_j;
  pm[i] += step_i;
  pm[j] -= step_j;
  mp[i] -= step_i;
  mp[j] += step_j;
  mm[i] -= step_i;
  mm[j] -= step_j;
  return (prof.value(pp) - prof.value(pm) - prof.value(mp) + prof.value(mm)) /
         (4.0 * step_i * step_j);
}

}  // namespace

TEST_CASE("axis jet is exact: only the ss second partial survives") {
  DeformationProfile prof = make_profile(0.2);
  Vec p = zero_vec();
  p[0] = 2.3;
  ScalarJet h = prof.jet(p);
  CHECK(h.value == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(h.d[i] == 0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == 3 && j == 3) {
        CHECK(h.dd[i][j] == -0.5);
      } else {
        CHECK(h.dd[i][j] == 0.0);
      }
    }
  }
}

TEST_CASE("closed-form partials match finite differences inside the support") {
  double eps = 0.2;
  DeformationProfile prof = make_profile(eps);
  Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    Vec p = zero_vec();
    p[0] = rng.uniform(0.0, 6.0);
    p[1] = rng.uniform(-0.7 * eps, 0.7 * eps);
    p[2] = rng.uniform(-0.7 * eps, 0.7 * eps);
    p[3] = rng.uniform(-0.7 * eps * eps, 0.7 * eps * eps);
    ScalarJet h = prof.jet(p);
    for (int i = 1; i < 4; ++i) {
      double step = (i == 3) ? 1e-4 * eps * eps : 1e-4 * eps;
      double fd = fd_partial(prof, p, i, step);
      CHECK(h.d[i] == doctest::Approx(fd).epsilon(1e-6));
    }
    for (int i = 1; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        double si = (i == 3) ? 2e-4 * eps * eps : 2e-4 * eps;
        double sj = (j == 3) ? 2e-4 * eps * eps : 2e-4 * eps;
        double fd = fd_second(prof, p, i, j, si, sj);
        CHECK(h.dd[i][j] == doctest::Approx(fd).epsilon(5e-5));
        CHECK(h.dd[i][j] == h.dd[j][i]);
      }
    }
    // No t dependence at all.
    CHECK(h.d[0] == 0.0);
    for (int j = 0; j < 4; ++j) CHECK(h.dd[0][j] == 0.0);
  }
}

TEST_CASE("outside the support the jet is identically zero") {
  double eps = 0.2;
  DeformationProfile prof = make_profile(eps);
  Vec p = zero_vec();
  p[1] = eps;  // on the window boundary
  p[3] = 0.01;
  CHECK(prof.outside_support(p));
  ScalarJet h = prof.jet(p);
  CHECK(h.value == 0.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(h.d[i] == 0.0);
    for (int j = 0; j < 4; ++j) CHECK(h.dd[i][j] == 0.0);
  }

  Vec q = zero_vec();
  q[3] = eps * eps;  // s-direction seam
  CHECK(prof.outside_support(q));
  Vec inside = zero_vec();
  inside[3] = 0.5 * eps * eps;
  CHECK_FALSE(prof.outside_support(inside));
}

TEST_CASE("profile is even in each transverse coordinate") {
  double eps = 0.15;
  DeformationProfile prof = make_profile(eps, 2);
  Vec p = zero_vec();
  p[0] = 1.0;
  p[1] = 0.3 * eps;
  p[2] = -0.45 * eps;
  p[3] = 0.2 * eps * eps;
  Vec m = p;
  for (int i = 1; i < 4; ++i) m[i] = -m[i];
  CHECK(prof.value(p) == prof.value(m));

  Vec t2 = p;
  t2[0] = 4.44;
  CHECK(prof.value(p) == prof.value(t2));
}

TEST_CASE("estimate certificate passes at eps 0.1") {
  DeformationProfile prof = make_profile(0.1);
  EstimateCertificate cert = verify_estimates(prof, 21, 101);
  CHECK(cert.pass);
  CHECK(cert.measured_M > 0.0);
  CHECK(cert.eps == doctest::Approx(0.1));
  CHECK(cert.bounds.size() >= 7);
  for (const auto& b : cert.bounds) {
    CHECK(b.pass);
    CHECK(b.measured <= b.bound);
  }
}

TEST_CASE("disabled deformation yields a zero exponent everywhere") {
  DeformationProfile prof(4, 3, 3, 0.2, DeformationKind::kNone);
  Vec p = zero_vec();
  p[1] = 0.05;
  p[3] = 0.01;
  ScalarJet h = prof.jet(p);
  CHECK(h.value == 0.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(h.d[i] == 0.0);
    for (int j = 0; j < 4; ++j) CHECK(h.dd[i][j] == 0.0);
  }
}
