#pragma once

// Metric charts: a chart supplies the metric components and their exact first
// and second partial derivatives at a point. Index 0 is the coordinate along
// the central curve (t); indices 1..n-1 are the transverse coordinates.

#include <memory>

#include "tubeflow/common.hpp"

namespace tubeflow {

// Full second-order jet of the metric at a point. Only indices < n are valid.
struct MetricJet {
  int n = 0;
  Mat g{};                                   // g[i][j]
  std::array<Mat, kMaxDim> dg{};             // dg[k][i][j]   = d_k g_ij
  std::array<std::array<Mat, kMaxDim>, kMaxDim> ddg{};  // ddg[k][l][i][j]
};

class MetricChart {
 public:
  virtual ~MetricChart() = default;

  int dim() const { return n_; }
  double period() const { return period_; }
  double tube_radius() const { return radius_; }

  // Fills the complete jet (components plus exact partials) at p.
  virtual void eval(const Vec& p, MetricJet& jet) const = 0;

  // Convenience accessors evaluating the full jet internally.
  double component(int i, int j, const Vec& p) const;
  double d_component(int k, int i, int j, const Vec& p) const;
  double dd_component(int k, int l, int i, int j, const Vec& p) const;

  // True when p lies in the open tube |x_a| < tube_radius for a >= 1.
  bool inside(const Vec& p) const;

 protected:
  MetricChart(int n, double period, double radius)
      : n_(n), period_(period), radius_(radius) {}
  int n_;
  double period_;
  double radius_;
};

// Flat chart, g_ij = delta_ij everywhere.
class EuclideanChart : public MetricChart {
 public:
  explicit EuclideanChart(int n, double period = 6.283185307179586,
                          double radius = 1.0)
      : MetricChart(n, period, radius) {}
  void eval(const Vec& p, MetricJet& jet) const override;
};

// Hyperbolic plane in coordinates (t, x) along a geodesic:
// g = cosh^2(x) dt^2 + dx^2, constant curvature -1. Oracle chart.
class HyperbolicPlaneChart : public MetricChart {
 public:
  explicit HyperbolicPlaneChart(double period = 6.283185307179586,
                                double radius = 1.0)
      : MetricChart(2, period, radius) {}
  void eval(const Vec& p, MetricJet& jet) const override;
};

// g_ij = delta_ij + sum_{a,b>=1} Q[i][j][a][b] x_a x_b with Q symmetric in
// (i,j) and in (a,b). Covers both randomized test charts and the tube chart
// around the central geodesic (whose coefficients model.cpp derives from the
// curvature operator).
class QuadraticChart : public MetricChart {
 public:
  using Coeffs = std::array<std::array<Mat, kMaxDim>, kMaxDim>;  // [i][j][a][b]

  QuadraticChart(int n, const Coeffs& q, double period, double radius);

  // Random small symmetric coefficients, for oracle tests.
  static QuadraticChart random(int n, Rng& rng, double amplitude);

  void eval(const Vec& p, MetricJet& jet) const override;

  const Coeffs& coefficients() const { return *q_; }

 private:
  std::shared_ptr<Coeffs> q_;  // large block; shared, immutable
};

}  // namespace tubeflow
