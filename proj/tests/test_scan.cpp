#include <cmath>
#include <memory>

#include "doctest.h"
#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/deform.hpp"
#include "tubeflow/model.hpp"
#include "tubeflow/profile.hpp"
#include "tubeflow/scan.hpp"
#include "tubeflow/tensor.hpp"

using namespace tubeflow;

namespace {

std::shared_ptr<QuadraticChart> base_chart() {
  ModelSpec spec;
  return std::make_shared<QuadraticChart>(fermi_chart(spec));
}

std::shared_ptr<MetricChart> deformed_chart(double eps, DeformationKind kind) {
  ModelSpec spec;
  auto profile =
      std::make_shared<DeformationProfile>(spec.n(), spec.s, 3, eps, kind);
  if (kind == DeformationKind::kG00) {
    return std::make_shared<G00Chart>(base_chart(), profile);
  }
  return std::make_shared<ConformalChart>(base_chart(), profile);
}

}  // namespace

TEST_CASE("central tables for the three metrics") {
  auto base = base_chart();
  CentralTable und = central_curvature_table(*base, 8);
  REQUIRE(und.values.size() == 3);
  CHECK(und.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(und.values[1] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(und.values[2] == doctest::Approx(-0.25).epsilon(1e-12));
  for (double v : und.t_variation) CHECK(v <= 1e-14);

  for (DeformationKind kind :
       {DeformationKind::kConformal, DeformationKind::kG00}) {
    auto chart = deformed_chart(0.2, kind);
    CentralTable def = central_curvature_table(*chart, 8);
    CHECK(def.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(def.values[1] == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(def.values[2] == doctest::Approx(0.0).epsilon(1e-12));
    for (double v : def.t_variation) CHECK(v <= 1e-14);
  }
}

TEST_CASE("radial profile peaks at the origin with the exact quarter") {
  double eps = 0.1;
  ProfileReport rep = p_profile(eps, 2, 4001);
  CHECK(rep.max_value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.max_location == 0.0);
  CHECK(rep.max_attained_only_at_zero);
  double expected_pp = -12.0 / (eps * eps * eps * eps) + 0.5;
  CHECK(rep.second_derivative_at_zero ==
        doctest::Approx(expected_pp).epsilon(1e-12));
  CHECK(rep.min_value < 0.0);
  CHECK(rep.bound >= rep.max_value);

  // Pointwise evaluation agrees with the report at the ends.
  CHECK(p_profile_value(eps, 2, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(p_profile_value(eps, 2, eps * eps) == 0.0);
}

TEST_CASE("plane basis is orthonormal for the deformed metric") {
  auto chart = deformed_chart(0.2, DeformationKind::kConformal);
  Vec p = zero_vec();
  p[0] = 0.7;
  p[1] = 0.05;
  p[3] = 0.01;
  MetricJet jet;
  chart->eval(p, jet);
  PlaneBasis basis = gram_schmidt_plane(jet, 3);
  CHECK(inner(jet.g, basis.first, basis.first, 4) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inner(jet.g, basis.second, basis.second, 4) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inner(jet.g, basis.first, basis.second, 4) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(basis.a_squared == doctest::Approx(basis.a * basis.a).epsilon(1e-13));
}

TEST_CASE("undeformed scan finds strictly negative curvature and no zeros") {
  auto base = base_chart();
  ScanPlan plan;
  plan.grid_per_axis = 9;
  plan.t_samples = 2;
  plan.random_planes = 4;
  plan.zero_band = 1e-3;
  plan.half_width = 0.05;
  plan.seed = 3;
  plan.threads = 1;
  CurvatureReport rep = scan_sectional(*base, 3, plan);
  CHECK(rep.points > 0);
  CHECK(rep.planes > 0);
  CHECK(rep.max_value < 0.0);
  CHECK(rep.near_zeros.empty());
}

TEST_CASE("second deformation scan localizes its zeros at the axis plane") {
  double eps = 0.2;
  auto chart = deformed_chart(eps, DeformationKind::kG00);
  ScanPlan plan;
  plan.grid_per_axis = 11;
  plan.t_samples = 2;
  plan.random_planes = 4;
  plan.zero_band = 1e-3;
  plan.half_width = eps;
  plan.seed = 3;
  plan.threads = 1;
  CurvatureReport rep = scan_sectional(*chart, 3, plan);
  CHECK_FALSE(rep.near_zeros.empty());
  CHECK(rep.near_zeros_confined);
  CHECK(rep.max_near_zero_axis_distance <= rep.cell * (1.0 + 1e-9));
  bool axis_zero_found = false;
  for (const auto& nz : rep.near_zeros) {
    bool on_axis = true;
    for (int c = 1; c < 4; ++c) on_axis = on_axis && nz.x[c] == 0.0;
    if (on_axis && nz.coordinate_plane) axis_zero_found = true;
  }
  CHECK(axis_zero_found);
}

TEST_CASE("truncation floor grows with the cell size") {
  ModelSpec spec;
  TruncationReport rep = measure_truncation(spec, 0.2, 11, 7, 2, 4, 1, 1);
  CHECK(rep.near_axis_deviation > 0.0);
  CHECK(rep.coarse_deviation >= rep.near_axis_deviation);
  CHECK(rep.whole_tube_deviation >= rep.near_axis_deviation);
  CHECK(rep.scale_constant > 0.0);
}

TEST_CASE("deformation bound scan stays below the linear cap") {
  double eps = 0.2;
  auto chart = deformed_chart(eps, DeformationKind::kConformal);
  BoundScan rep = scan_deformation_bound(*chart, 3, eps, 7, 11, 2, 4, 1, 1);
  CHECK(rep.max_value <= 8.0 * eps);
  CHECK(rep.bound_constant == doctest::Approx(rep.max_value / eps)
                                  .epsilon(1e-12)
                                  .scale(std::abs(rep.max_value / eps) + 1.0));
  CHECK(rep.refined_constant <= 8.0);
}

TEST_CASE("scan results are thread-count independent") {
  double eps = 0.2;
  auto chart = deformed_chart(eps, DeformationKind::kConformal);
  ScanPlan plan;
  plan.grid_per_axis = 9;
  plan.t_samples = 2;
  plan.random_planes = 6;
  plan.zero_band = 1e-4;
  plan.half_width = eps;
  plan.seed = 11;
  plan.threads = 1;
  CurvatureReport one = scan_sectional(*chart, 3, plan);
  plan.threads = 3;
  CurvatureReport three = scan_sectional(*chart, 3, plan);
  CHECK(one.max_value == three.max_value);
  CHECK(one.min_value == three.min_value);
  CHECK(one.max_location_t == three.max_location_t);
  CHECK(one.points == three.points);
  CHECK(one.planes == three.planes);
  REQUIRE(one.near_zeros.size() == three.near_zeros.size());
  for (std::size_t i = 0; i < one.near_zeros.size(); ++i) {
    CHECK(one.near_zeros[i].value == three.near_zeros[i].value);
    CHECK(one.near_zeros[i].t == three.near_zeros[i].t);
  }
}

TEST_CASE("grid validation") {
  auto base = base_chart();
  ScanPlan plan;
  plan.grid_per_axis = 8;  // even: the axis is not a grid line
  CHECK_THROWS_AS(scan_sectional(*base, 3, plan), std::invalid_argument);
}
