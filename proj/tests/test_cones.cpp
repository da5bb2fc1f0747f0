#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/cones.hpp"
#include "tubeflow/deform.hpp"
#include "tubeflow/flow.hpp"
#include "tubeflow/model.hpp"
#include "tubeflow/profile.hpp"

using namespace tubeflow;

namespace {

ConeSpec make_cone(Bundle b, double opening = 0.9) {
  ConeSpec cone;
  cone.bundle = b;
  cone.opening = opening;
  cone.r = 1;
  cone.d = 3;
  return cone;
}

std::shared_ptr<MetricChart> deformed_chart(double eps) {
  ModelSpec spec;
  auto base = std::make_shared<QuadraticChart>(fermi_chart(spec));
  auto profile = std::make_shared<DeformationProfile>(
      spec.n(), spec.s, 3, eps, DeformationKind::kConformal);
  return std::make_shared<ConformalChart>(base, profile);
}

}  // namespace

TEST_CASE("alignment hits the expected landmarks") {
  ConeSpec au = make_cone(Bundle::kAU);
  Vec xi = zero_vec(), eta = zero_vec();
  xi[0] = 1.0;
  eta[0] = 1.0;  // exactly the AU center
  CHECK(alignment(au, xi, eta) == doctest::Approx(1.0).epsilon(1e-15));

  eta[0] = -1.0;  // the AS center is orthogonal to it
  CHECK(alignment(au, xi, eta) == doctest::Approx(0.0).epsilon(1e-15));
  ConeSpec as = make_cone(Bundle::kAS);
  CHECK(alignment(as, xi, eta) == doctest::Approx(1.0).epsilon(1e-15));

  // B-slot data has no AU component.
  Vec bxi = zero_vec(), beta = zero_vec();
  bxi[1] = 1.0;
  beta[1] = 0.5;
  CHECK(alignment(au, bxi, beta) == doctest::Approx(0.0).epsilon(1e-15));
  ConeSpec bu = make_cone(Bundle::kBU);
  CHECK(alignment(bu, bxi, beta) == doctest::Approx(1.0).epsilon(1e-15));

  // Scale invariance and range.
  Rng rng(3);
  for (int trial = 0; trial < 32; ++trial) {
    Vec x = zero_vec(), e = zero_vec();
    for (int c = 0; c < 3; ++c) {
      x[c] = rng.gaussian();
      e[c] = rng.gaussian();
    }
    double th = alignment(au, x, e);
    CHECK(th >= 0.0);
    CHECK(th <= 1.0 + 1e-15);
    Vec x2 = x, e2 = e;
    for (int c = 0; c < 3; ++c) {
      x2[c] *= 3.5;
      e2[c] *= 3.5;
    }
    CHECK(alignment(au, x2, e2) == doctest::Approx(th).epsilon(1e-13));
  }

  Vec z = zero_vec();
  CHECK_THROWS_AS(alignment(au, z, z), std::invalid_argument);
}

TEST_CASE("boundary states sit exactly on the cone boundary") {
  Rng rng(7);
  for (Bundle b : {Bundle::kAU, Bundle::kAS, Bundle::kBU, Bundle::kBS}) {
    ConeSpec cone = make_cone(b, 0.9);
    for (int trial = 0; trial < 16; ++trial) {
      JacobiInit st = boundary_state(cone, rng);
      CHECK(alignment(cone, st.xi, st.eta) ==
            doctest::Approx(0.9).epsilon(1e-12));
    }
  }

  // Same seed, same draw.
  ConeSpec cone = make_cone(Bundle::kBU, 0.8);
  Rng r1(99), r2(99);
  JacobiInit a = boundary_state(cone, r1);
  JacobiInit b = boundary_state(cone, r2);
  for (int c = 0; c < 3; ++c) {
    CHECK(a.xi[c] == b.xi[c]);
    CHECK(a.eta[c] == b.eta[c]);
  }
}

TEST_CASE("exact alignment rate matches the numeric derivative") {
  ModelSpec spec;
  ConeSpec cone = make_cone(Bundle::kAU, 0.9);
  Rng rng(13);
  JacobiInit init = boundary_state(cone, rng);
  JacobiPath path = model_jacobi_path(spec, {init}, 2.0, 1e-3, 10);
  AlignmentSeries series = alignment_series(path, 0, cone);

  Mat K = zero_mat();
  K[0][0] = -1.0;
  K[1][1] = -0.25;
  K[2][2] = -0.25;

  std::size_t m = series.t.size();
  for (std::size_t i = 2; i + 2 < m; i += 7) {
    Vec xi = zero_vec(), eta = zero_vec();
    for (int c = 0; c < 3; ++c) {
      xi[c] = path.at(i, 0, 0, c);
      eta[c] = path.at(i, 0, 1, c);
    }
    RateResult exact = alignment_rate(cone, xi, eta, K);
    CHECK(exact.rate ==
          doctest::Approx(series.numeric_rate[i]).epsilon(1e-5));
    RateResult analytic = model_analytic_rate(cone, xi, eta);
    CHECK(exact.rate == doctest::Approx(analytic.rate).epsilon(1e-13));
    if (!exact.degenerate) {
      CHECK(exact.rate ==
            doctest::Approx(exact.multiplier * exact.bracket).epsilon(1e-12));
    }
  }
}

TEST_CASE("analytic rate is defined for the AU cone only") {
  ConeSpec bu = make_cone(Bundle::kBU);
  Vec xi = zero_vec(), eta = zero_vec();
  xi[1] = 1.0;
  eta[1] = 0.5;
  CHECK_THROWS_AS(model_analytic_rate(bu, xi, eta), std::invalid_argument);
}

TEST_CASE("worst-case bracket equals its sum-of-squares form") {
  Rng rng(17);
  for (int trial = 0; trial < 64; ++trial) {
    Vec xi = zero_vec(), eta = zero_vec();
    for (int c = 0; c < 3; ++c) {
      xi[c] = rng.gaussian();
      eta[c] = rng.gaussian();
    }
    double direct = worst_case_bracket(xi, eta, 1, 3, 3);
    double sos = worst_case_bracket_sos(xi, eta, 1, 3, 3);
    double scale = std::max(1.0, std::abs(direct));
    CHECK(std::abs(direct - sos) <= 1e-12 * scale);
    CHECK(sos >= -1e-13 * scale);
  }

  // The form vanishes exactly on xi_A = eta_A, xi_B = eta_B = 0.
  Vec xi = zero_vec(), eta = zero_vec();
  xi[0] = 0.8;
  eta[0] = 0.8;
  CHECK(worst_case_bracket_sos(xi, eta, 1, 3, 3) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("model spectrum recovers the symmetric exponent set") {
  ModelSpec spec;
  SpectrumReport rep = lyapunov_spectrum_model(spec, 10.0, 0.5, 1e-3, 0.05);
  REQUIRE(rep.exponents.size() == 6);
  std::vector<double> expect = {1.0, 0.5, 0.5, -0.5, -0.5, -1.0};
  for (int i = 0; i < 6; ++i) {
    CHECK(rep.exponents[i] == doctest::Approx(expect[i]).epsilon(5e-2));
  }
  CHECK(rep.pairing_residual <= 5e-2);
  CHECK_FALSE(rep.partial);
}

TEST_CASE("the obstruction witness separates the two metrics") {
  ModelSpec spec;
  auto chart = deformed_chart(0.2);
  WitnessReport def = anosov_obstruction_witness(*chart, spec.s, 32);
  CHECK(def.flat_parallel_field);
  CHECK(def.max_abs_curvature <= 1e-9);
  CHECK(def.max_transport_defect <= 1e-10);

  auto base = std::make_shared<QuadraticChart>(fermi_chart(spec));
  WitnessReport und = anosov_obstruction_witness(*base, spec.s, 32);
  CHECK_FALSE(und.flat_parallel_field);
  CHECK(und.max_abs_curvature == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("small invariance scan passes and is thread-count independent") {
  ModelSpec spec;
  // eps <= theta, matching the configuration constraint: wider slabs make
  // the marginal transversal crossing stall against the axial repulsion.
  double eps = 0.05;
  auto chart = deformed_chart(eps);
  ConeScanPlan plan;
  plan.seeds_per_class = 4;
  plan.boundary_directions = 8;
  plan.opening = 0.9;
  plan.theta_threshold = 0.1;
  plan.horizon = 2.0;
  plan.step = 1e-3;
  plan.stride = 50;
  plan.seed = 5;
  plan.threads = 1;
  ConeScanReport one = cone_invariance_scan(*chart, spec, eps, plan);
  CHECK(one.pass);
  CHECK(one.min_rate_parallel > 0.0);
  CHECK(one.min_rate_almost > 0.0);
  CHECK(one.max_transversal_residence <= one.transversal_budget);
  CHECK(one.parallel.size() == 4);
  CHECK(one.transversal.size() == 4);
  for (const auto& res : one.transversal) CHECK(res.exited);

  plan.threads = 2;
  ConeScanReport two = cone_invariance_scan(*chart, spec, eps, plan);
  CHECK(two.min_rate_parallel == one.min_rate_parallel);
  CHECK(two.min_rate_almost == one.min_rate_almost);
  CHECK(two.max_transversal_residence == one.max_transversal_residence);
  for (std::size_t i = 0; i < one.parallel.size(); ++i) {
    CHECK(two.parallel[i].min_rate == one.parallel[i].min_rate);
    CHECK(two.parallel[i].min_rate_time == one.parallel[i].min_rate_time);
  }
}
