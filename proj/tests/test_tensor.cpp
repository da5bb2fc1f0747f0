#include <atomic>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/tensor.hpp"

using namespace tubeflow;

TEST_CASE("euclidean chart is flat") {
  EuclideanChart chart(4);
  Vec p = zero_vec();
  p[0] = 0.3;
  p[2] = -0.1;
  PointGeometry geo;
  analyze_point(chart, p, geo, true);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        CHECK(geo.gamma[k][i][j] == 0.0);
      }
    }
  }
  CHECK(curvature_symmetry_residual(geo.curv) == 0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(geo.curv.r[i][j][i][j] == 0.0);
    }
  }
}

TEST_CASE("hyperbolic plane oracle: Christoffel symbols and K = -1") {
  HyperbolicPlaneChart chart;
  Vec p = zero_vec();
  p[0] = 0.4;
  p[1] = 0.7;
  double x = p[1];
  PointGeometry geo;
  analyze_point(chart, p, geo, true);

  CHECK(geo.gamma[0][0][1] == doctest::Approx(std::tanh(x)).epsilon(1e-12));
  CHECK(geo.gamma[0][1][0] == doctest::Approx(std::tanh(x)).epsilon(1e-12));
  CHECK(geo.gamma[1][0][0] ==
        doctest::Approx(-std::sinh(x) * std::cosh(x)).epsilon(1e-12));
  CHECK(geo.gamma[1][1][1] == doctest::Approx(0.0));

  Vec X = zero_vec(), Y = zero_vec();
  X[0] = 1.0;
  Y[1] = 1.0;
  CHECK(sectional(geo.curv, geo.jet.g, X, Y, 2) ==
        doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("quadratic chart partials match finite differences") {
  Rng chart_rng(77);
  QuadraticChart chart = QuadraticChart::random(4, chart_rng, 0.3);
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Vec p = zero_vec();
    p[0] = rng.uniform(0.0, 6.0);
    for (int a = 1; a < 4; ++a) p[a] = rng.uniform(-0.3, 0.3);
    MetricJet jet;
    chart.eval(p, jet);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
          double fd = fd_d_component(chart, k, i, j, p, 1e-3);
          CHECK(jet.dg[k][i][j] == doctest::Approx(fd).epsilon(1e-9));
          for (int l = 0; l < 4; ++l) {
            double fdd = fd_dd_component(chart, k, l, i, j, p, 1e-3);
            CHECK(jet.ddg[k][l][i][j] ==
                  doctest::Approx(fdd).epsilon(1e-7).scale(1.0));
          }
        }
      }
    }
  }
}

TEST_CASE("curvature tensor symmetries and first Bianchi identity") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    Rng chart_rng(seed);
    QuadraticChart chart = QuadraticChart::random(4, chart_rng, 0.4);
    Rng rng(seed + 100);
    Vec p = zero_vec();
    p[0] = rng.uniform(0.0, 6.0);
    for (int a = 1; a < 4; ++a) p[a] = rng.uniform(-0.4, 0.4);
    PointGeometry geo;
    analyze_point(chart, p, geo, true);
    CHECK(curvature_symmetry_residual(geo.curv) <= 1e-12);
    CHECK(bianchi_residual(geo.curv) <= 1e-12);
  }
}

TEST_CASE("metric identities: inverse derivative and Christoffel reconstruction") {
  Rng chart_rng(21);
  QuadraticChart chart = QuadraticChart::random(4, chart_rng, 0.35);
  Rng rng(9);
  for (int trial = 0; trial < 4; ++trial) {
    Vec p = zero_vec();
    p[0] = rng.uniform(0.0, 6.0);
    for (int a = 1; a < 4; ++a) p[a] = rng.uniform(-0.35, 0.35);
    IdentityResiduals res = metric_identity_checks(chart, p);
    CHECK(res.inverse_derivative <= 1e-8);
    CHECK(res.metric_derivative <= 1e-12);
  }
}

TEST_CASE("wedge-form sectional equals the direct evaluation") {
  Rng chart_rng(33);
  QuadraticChart chart = QuadraticChart::random(4, chart_rng, 0.3);
  Rng rng(17);
  Vec p = zero_vec();
  p[0] = 1.0;
  for (int a = 1; a < 4; ++a) p[a] = rng.uniform(-0.3, 0.3);
  PointGeometry geo;
  analyze_point(chart, p, geo, true);
  WedgeForms wf;
  build_wedge_forms(geo.curv, geo.jet.g, 4, wf);
  CHECK(wf.dim == 6);
  for (int trial = 0; trial < 20; ++trial) {
    Vec X = zero_vec(), Y = zero_vec();
    for (int c = 0; c < 4; ++c) {
      X[c] = rng.gaussian();
      Y[c] = rng.gaussian();
    }
    double w[kMaxWedge];
    wedge_components(wf, X, Y, w);
    double direct = sectional(geo.curv, geo.jet.g, X, Y, 4);
    double viaw = sectional_from_wedge(wf, w);
    CHECK(viaw == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("sectional curvature rejects a degenerate plane") {
  EuclideanChart chart(4);
  Vec p = zero_vec();
  PointGeometry geo;
  analyze_point(chart, p, geo, true);
  Vec X = zero_vec(), Y = zero_vec();
  X[0] = 1.0;
  Y[0] = 2.0;
  CHECK_THROWS_AS(sectional(geo.curv, geo.jet.g, X, Y, 4),
                  std::invalid_argument);
}

TEST_CASE("cholesky, SPD inverse and minimum eigenvalue") {
  Mat g = zero_mat();
  Rng rng(3);
  // Random SPD matrix A A^T + I.
  Mat a = zero_mat();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] = rng.gaussian() * 0.4;
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double sum = (i == j) ? 1.0 : 0.0;
      for (int k = 0; k < 4; ++k) sum += a[i][k] * a[j][k];
      g[i][j] = sum;
    }
  }
  Mat L;
  REQUIRE(cholesky(g, 4, L));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double rec = 0.0;
      for (int k = 0; k < 4; ++k) rec += L[i][k] * L[j][k];
      CHECK(rec == doctest::Approx(g[i][j]).epsilon(1e-12));
    }
  }
  Mat ginv;
  spd_inverse(g, 4, ginv);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double prod = 0.0;
      for (int k = 0; k < 4; ++k) prod += g[i][k] * ginv[k][j];
      CHECK(prod == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-11).scale(1.0));
    }
  }

  Mat diag = zero_mat();
  diag[0][0] = 3.0;
  diag[1][1] = -2.0;
  diag[2][2] = 0.5;
  CHECK(min_eigenvalue_sym(diag, 3) == doctest::Approx(-2.0).epsilon(1e-12));

  Mat notpd = zero_mat();
  notpd[0][0] = 1.0;
  notpd[1][1] = -1.0;
  CHECK_FALSE(cholesky(notpd, 2, L));
  CHECK_THROWS_AS(spd_inverse(notpd, 2, ginv), std::runtime_error);
}

TEST_CASE("rng streams are deterministic and mixing separates items") {
  Rng a(42), b(42);
  for (int i = 0; i < 16; ++i) {
    CHECK(a.uniform() == b.uniform());
  }
  CHECK(mix_seed(1, 0) == mix_seed(1, 0));
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("parallel_for output is independent of the thread count") {
  const std::size_t count = 257;
  std::vector<double> one(count, 0.0), four(count, 0.0);
  auto work = [](std::size_t i) {
    Rng rng(mix_seed(7, i));
    return rng.gaussian() + static_cast<double>(i);
  };
  parallel_for(count, 1, [&](std::size_t i) { one[i] = work(i); });
  parallel_for(count, 4, [&](std::size_t i) { four[i] = work(i); });
  for (std::size_t i = 0; i < count; ++i) {
    CHECK(one[i] == four[i]);
  }

  std::atomic<int> hits{0};
  parallel_for(10, 3, [&](std::size_t) { hits.fetch_add(1); });
  CHECK(hits.load() == 10);
}
