#include <cmath>
#include <memory>

#include "doctest.h"
#include "tubeflow/chart.hpp"
#include "tubeflow/conformal.hpp"
#include "tubeflow/deform.hpp"
#include "tubeflow/model.hpp"
#include "tubeflow/profile.hpp"
#include "tubeflow/tensor.hpp"

using namespace tubeflow;

namespace {

ScalarJet zero_exponent() {
  ScalarJet h;
  h.value = 0.0;
  h.d = zero_vec();
  h.dd = zero_mat();
  return h;
}

}  // namespace

TEST_CASE("vanishing exponent reproduces the base geometry") {
  Rng chart_rng(41);
  QuadraticChart chart = QuadraticChart::random(4, chart_rng, 0.3);
  Vec p = zero_vec();
  p[0] = 0.5;
  p[1] = 0.2;
  p[3] = -0.1;
  PointGeometry geo;
  analyze_point(chart, p, geo, true);
  ScalarJet h = zero_exponent();

  Christoffel law;
  conformal_christoffel(geo.gamma, h, geo.jet.g, geo.ginv, 4, law);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        CHECK(law[k][i][j] == geo.gamma[k][i][j]);
      }
    }
  }

  Rng rng(2);
  Vec X = zero_vec(), Y = zero_vec(), Z = zero_vec();
  for (int c = 0; c < 4; ++c) {
    X[c] = rng.gaussian();
    Y[c] = rng.gaussian();
    Z[c] = rng.gaussian();
  }
  Vec lhs = conformal_curvature(geo.curv, h, geo.jet.g, geo.ginv, geo.gamma,
                                X, Y, Z);
  Vec rhs = curvature_apply(geo.curv, geo.ginv, X, Y, Z);
  for (int c = 0; c < 4; ++c) {
    CHECK(lhs[c] == doctest::Approx(rhs[c]).epsilon(1e-14));
  }
}

TEST_CASE("constant exponent leaves Christoffel symbols and the operator") {
  Rng chart_rng(42);
  QuadraticChart chart = QuadraticChart::random(4, chart_rng, 0.25);
  Vec p = zero_vec();
  p[1] = 0.15;
  p[2] = -0.2;
  PointGeometry geo;
  analyze_point(chart, p, geo, true);
  ScalarJet h = zero_exponent();
  h.value = 0.7;

  Christoffel law;
  conformal_christoffel(geo.gamma, h, geo.jet.g, geo.ginv, 4, law);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        CHECK(law[k][i][j] == geo.gamma[k][i][j]);
      }
    }
  }

  // phi K~ equals K when all derivatives of h vanish.
  Vec X = zero_vec(), Y = zero_vec();
  X[0] = 1.0 / std::sqrt(geo.jet.g[0][0]);
  double g01 = geo.jet.g[0][1];
  Y[1] = 1.0;
  // Base-orthonormalize Y against X.
  double xy = g01 * X[0];
  Y[0] = -xy * X[0];
  double ny = std::sqrt(inner(geo.jet.g, Y, Y, 4));
  Y[0] /= ny;
  Y[1] /= ny;
  double K = sectional(geo.curv, geo.jet.g, X, Y, 4);
  double phiK =
      conformal_sectional(K, h, geo.jet.g, geo.ginv, geo.gamma, X, Y, 4);
  CHECK(phiK == doctest::Approx(K).epsilon(1e-13));
}

TEST_CASE("flat base plus the disk exponent has curvature -1") {
  // e^h (dx^2 + dy^2) with e^h = 4 / (1 - |x|^2)^2 is the hyperbolic disk;
  // the sectional law must return phi K~ = -e^h.
  EuclideanChart chart(2);
  Vec p = zero_vec();
  p[0] = 0.1;
  p[1] = -0.25;
  PointGeometry geo;
  analyze_point(chart, p, geo, true);

  double rho2 = p[0] * p[0] + p[1] * p[1];
  double w = 1.0 - rho2;
  ScalarJet h;
  h.value = std::log(4.0) - 2.0 * std::log(w);
  h.d = zero_vec();
  h.dd = zero_mat();
  for (int i = 0; i < 2; ++i) h.d[i] = 4.0 * p[i] / w;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      h.dd[i][j] = 8.0 * p[i] * p[j] / (w * w) + (i == j ? 4.0 / w : 0.0);
    }
  }

  Vec X = zero_vec(), Y = zero_vec();
  X[0] = 1.0;
  Y[1] = 1.0;
  double phiK =
      conformal_sectional(0.0, h, geo.jet.g, geo.ginv, geo.gamma, X, Y, 2);
  double phi = std::exp(h.value);
  CHECK(phiK == doctest::Approx(-phi).epsilon(1e-12));

  // The deformed curvature operator must satisfy R~(X,Y)Y = -phi X + ...
  // lowered against g~ = phi g; equivalently K~ = -1.
  Vec op = conformal_curvature(geo.curv, h, geo.jet.g, geo.ginv, geo.gamma,
                               X, Y, Y);
  // K~ = g~(R~(X,Y)Y, X) / (g~(X,X) g~(Y,Y)) = op[0] / phi.
  CHECK(op[0] / phi == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("transformation laws match the deformed chart on the bump support") {
  ModelSpec spec;
  spec.validate();
  double eps = 0.2;
  auto base = std::make_shared<QuadraticChart>(fermi_chart(spec));
  auto prof = std::make_shared<DeformationProfile>(
      spec.n(), spec.s, 3, eps, DeformationKind::kConformal);
  ConformalChart chart(base, prof);

  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Vec p = zero_vec();
    p[0] = rng.uniform(0.0, spec.period);
    for (int a = 1; a < 4; ++a) {
      double lim = (a == spec.s) ? 0.8 * eps * eps : 0.8 * eps;
      p[a] = rng.uniform(-lim, lim);
    }
    PointGeometry bg, dg;
    analyze_point(*base, p, bg, true);
    analyze_point(chart, p, dg, true);
    ScalarJet h = prof->jet(p);

    Christoffel law;
    conformal_christoffel(bg.gamma, h, bg.jet.g, bg.ginv, 4, law);
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          CHECK(law[k][i][j] ==
                doctest::Approx(dg.gamma[k][i][j]).epsilon(1e-9));
        }
      }
    }

    Vec X = zero_vec(), Y = zero_vec(), Z = zero_vec();
    for (int c = 0; c < 4; ++c) {
      X[c] = rng.gaussian();
      Y[c] = rng.gaussian();
      Z[c] = rng.gaussian();
    }
    Vec lawv =
        conformal_curvature(bg.curv, h, bg.jet.g, bg.ginv, bg.gamma, X, Y, Z);
    Vec direct = curvature_apply(dg.curv, dg.ginv, X, Y, Z);
    for (int c = 0; c < 4; ++c) {
      CHECK(lawv[c] == doctest::Approx(direct[c]).epsilon(1e-8));
    }
  }
}

TEST_CASE("hessian of the exponent is symmetric") {
  ModelSpec spec;
  auto base = std::make_shared<QuadraticChart>(fermi_chart(spec));
  DeformationProfile prof(spec.n(), spec.s, 3, 0.2, DeformationKind::kConformal);
  Vec p = zero_vec();
  p[1] = 0.1;
  p[2] = -0.05;
  p[3] = 0.02;
  PointGeometry geo;
  analyze_point(*base, p, geo, false);
  Mat hess = hessian(prof.jet(p), geo.gamma, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(hess[i][j] == doctest::Approx(hess[j][i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("orthonormality is enforced by the sectional law") {
  EuclideanChart chart(4);
  Vec p = zero_vec();
  PointGeometry geo;
  analyze_point(chart, p, geo, true);
  ScalarJet h = zero_exponent();
  Vec X = zero_vec(), Y = zero_vec();
  X[0] = 2.0;  // not unit
  Y[1] = 1.0;
  CHECK_THROWS_AS(
      conformal_sectional(0.0, h, geo.jet.g, geo.ginv, geo.gamma, X, Y, 4),
      std::invalid_argument);
}
