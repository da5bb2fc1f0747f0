#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "tubeflow/common.hpp"
#include "tubeflow/cones.hpp"
#include "tubeflow/kernels.hpp"

using namespace tubeflow;

namespace {

struct QuadCase {
  int m = 0;
  int count = 0;
  std::vector<double> qa, qb, w;
};

QuadCase make_quad_case(int m, int count, std::uint64_t seed) {
  QuadCase c;
  c.m = m;
  c.count = count;
  Rng rng(seed);
  c.qa.resize(static_cast<std::size_t>(m) * m);
  c.qb.resize(static_cast<std::size_t>(m) * m);
  for (int p = 0; p < m; ++p) {
    for (int q = p; q < m; ++q) {
      double a = rng.gaussian();
      double b = rng.gaussian();
      c.qa[static_cast<std::size_t>(p) * m + q] = a;
      c.qa[static_cast<std::size_t>(q) * m + p] = a;
      c.qb[static_cast<std::size_t>(p) * m + q] = b;
      c.qb[static_cast<std::size_t>(q) * m + p] = b;
    }
  }
  c.w.resize(static_cast<std::size_t>(count) * m);
  for (double& x : c.w) x = rng.gaussian();
  return c;
}

}  // namespace

TEST_CASE("scalar quadratic form batch equals a direct triple loop") {
  QuadCase c = make_quad_case(6, 9, 101);
  std::vector<double> out_a(c.count), out_b(c.count);
  kernels::quadform_pair_batch_scalar(c.qa.data(), c.qb.data(), c.m,
                                      c.w.data(), c.count, out_a.data(),
                                      out_b.data());
  for (int i = 0; i < c.count; ++i) {
    double ea = 0.0, eb = 0.0;
    for (int p = 0; p < c.m; ++p) {
      for (int q = 0; q < c.m; ++q) {
        double ww = c.w[static_cast<std::size_t>(i) * c.m + p] *
                    c.w[static_cast<std::size_t>(i) * c.m + q];
        ea += c.qa[static_cast<std::size_t>(p) * c.m + q] * ww;
        eb += c.qb[static_cast<std::size_t>(p) * c.m + q] * ww;
      }
    }
    CHECK(out_a[i] == doctest::Approx(ea).epsilon(1e-14));
    CHECK(out_b[i] == doctest::Approx(eb).epsilon(1e-14));
  }
}

TEST_CASE("dispatched quadratic forms match the scalar reference") {
  for (int count : {1, 2, 3, 5, 9, 33}) {
    QuadCase c = make_quad_case(6, count, 200 + count);
    std::vector<double> da(count), db(count), sa(count), sb(count);
    kernels::quadform_pair_batch(c.qa.data(), c.qb.data(), c.m, c.w.data(),
                                 count, da.data(), db.data());
    kernels::quadform_pair_batch_scalar(c.qa.data(), c.qb.data(), c.m,
                                        c.w.data(), count, sa.data(),
                                        sb.data());
    for (int i = 0; i < count; ++i) {
      double tol_a = 1e-13 * std::max(1.0, std::abs(sa[i]));
      double tol_b = 1e-13 * std::max(1.0, std::abs(sb[i]));
      CHECK(std::abs(da[i] - sa[i]) <= tol_a);
      CHECK(std::abs(db[i] - sb[i]) <= tol_b);
    }
  }
}

TEST_CASE("scalar override makes the dispatcher bitwise reproducible") {
  QuadCase c = make_quad_case(4, 7, 404);
  std::vector<double> da(c.count), db(c.count), sa(c.count), sb(c.count);
  bool prev = kernels::set_scalar_override(true);
  CHECK(kernels::scalar_override());
  kernels::quadform_pair_batch(c.qa.data(), c.qb.data(), c.m, c.w.data(),
                               c.count, da.data(), db.data());
  kernels::set_scalar_override(prev);
  kernels::quadform_pair_batch_scalar(c.qa.data(), c.qb.data(), c.m,
                                      c.w.data(), c.count, sa.data(),
                                      sb.data());
  CHECK(std::memcmp(da.data(), sa.data(), sizeof(double) * c.count) == 0);
  CHECK(std::memcmp(db.data(), sb.data(), sizeof(double) * c.count) == 0);
}

TEST_CASE("cone rate batch reproduces the exact single-state rate") {
  int r = 1, d = 3;
  ConeSpec cone;
  cone.bundle = Bundle::kAU;
  cone.r = r;
  cone.d = d;
  Rng rng(55);
  Mat K = zero_mat();
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      K[a][b] = K[b][a] = rng.gaussian();
    }
  }
  for (int count : {1, 2, 5, 12}) {
    std::vector<double> xi(static_cast<std::size_t>(count) * d);
    std::vector<double> eta(static_cast<std::size_t>(count) * d);
    for (double& x : xi) x = rng.gaussian();
    for (double& x : eta) x = rng.gaussian();
    std::vector<double> rate(count), mass(count);
    double kflat[9];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) kflat[a * d + b] = K[a][b];
    }
    kernels::cone_rate_batch(kflat, r, d, xi.data(), eta.data(), count,
                             rate.data(), mass.data());
    std::vector<double> srate(count), smass(count);
    kernels::cone_rate_batch_scalar(kflat, r, d, xi.data(), eta.data(), count,
                                    srate.data(), smass.data());
    for (int i = 0; i < count; ++i) {
      Vec vx = zero_vec(), ve = zero_vec();
      for (int c = 0; c < d; ++c) {
        vx[c] = xi[static_cast<std::size_t>(i) * d + c];
        ve[c] = eta[static_cast<std::size_t>(i) * d + c];
      }
      RateResult exact = alignment_rate(cone, vx, ve, K);
      CHECK(rate[i] == doctest::Approx(exact.rate).epsilon(1e-13));
      double u = 0.0;
      for (int c = 0; c < r; ++c) {
        double a = vx[c] + ve[c];
        u += a * a;
      }
      CHECK(mass[i] == doctest::Approx(u).epsilon(1e-13));
      CHECK(srate[i] == doctest::Approx(exact.rate).epsilon(1e-14));
    }
  }
}

TEST_CASE("lane introspection is well formed") {
  kernels::Lane lane = kernels::active_lane();
  const char* name = kernels::lane_name(lane);
  CHECK(name != nullptr);
  CHECK(std::strlen(name) > 0);
  CHECK(kernels::lane_name(kernels::Lane::kScalar) != nullptr);
}
