#pragma once

// Curvature certification over the tube: the central-orbit sectional table,
// the closed-form radial profile controlling the sign of the deformed
// curvature in the bump direction, grid scans with random plane sampling,
// and the chart-truncation floor used to calibrate the near-zero band.

#include <cstdint>
#include <vector>

#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/model.hpp"

namespace tubeflow {

// Sectional curvatures K(e_k, gamma') at (t, 0) for k = 1..n-1, sampled on a
// t grid; reports per-direction values and the max deviation across t.
struct CentralTable {
  std::vector<double> values;        // per direction, at t = 0
  std::vector<double> t_variation;   // max |K(t) - K(0)| per direction
  int t_samples = 0;
};
CentralTable central_curvature_table(const MetricChart& chart, int t_samples);

// Radial profile p(x) = f''(x) + x f'(x) for the bump primitive f of order
// k0 at scale eps; the deformed curvature in the plane spanned by the bump
// direction and the axis is -(1/2) e^{-h} p(x_s) Phi + lower order terms, so
// its sign is controlled by p.
struct ProfileReport {
  double max_value = 0.0;      // global max of p over the support
  double max_location = 0.0;   // argmax
  double second_derivative_at_zero = 0.0;
  double min_value = 0.0;
  double min_location = 0.0;
  bool max_attained_only_at_zero = false;
  double bound = 0.0;          // certified sup |p| (grid + critical points)
};
ProfileReport p_profile(double eps, int order, int grid = 4001);
double p_profile_value(double eps, int order, double x);

// Orthonormal basis of the plane span{d/dt, d/dx_s} at p: Y = a X_0 + b X_s
// with a = sqrt(g_ss / (g_00 g_ss - g_0s^2)), b = -a g_0s / g_ss. Also
// exposes the unsimplified coefficient a2 = g_ss / (g_00 g_ss - g_0s^2)
// (the square of a) for cross-checking printed forms. Postcondition:
// the pair (X_s/|X_s|, Y) is orthonormal to 1e-12.
struct PlaneBasis {
  Vec first;   // normalized d/dx_s
  Vec second;  // Y
  double a = 0.0;
  double b = 0.0;
  double a_squared = 0.0;
};
PlaneBasis gram_schmidt_plane(const MetricJet& jet, int s);

// --- Grid scan ---------------------------------------------------------------

struct ScanPlan {
  int grid_per_axis = 41;    // odd, so the axis is a grid line
  int t_samples = 16;
  int random_planes = 32;    // Haar-random planes per grid point
  double zero_band = 1e-3;   // |K| <= band counts as a near-zero
  double half_width = 0.0;   // spatial box half-width; 0 means the tube radius
  std::uint64_t seed = 1;
  int threads = 1;
  bool use_simd = true;
};

struct NearZero {
  double t = 0.0;
  Vec x;              // spatial coordinates (slot 0 unused)
  double value = 0.0;
  bool coordinate_plane = false;  // one of the scanned coordinate planes
};

struct CurvatureReport {
  double max_value = 0.0;       // max sectional over all sampled planes
  double min_value = 0.0;
  Vec max_location;
  double max_location_t = 0.0;
  std::int64_t points = 0;
  std::int64_t planes = 0;
  std::vector<NearZero> near_zeros;
  // near-zero localization against the axis plane of the deformed direction
  double max_near_zero_axis_distance = 0.0;  // max |x_s| over near-zeros
  double max_near_zero_radial = 0.0;         // max |x| over near-zeros
  bool near_zeros_confined = false;          // within one cell of x_s = 0
  double cell = 0.0;                         // grid spacing
};

// Scans sectional curvature over the tube grid: at each (t, x) evaluates
// the coordinate planes e_i ^ e_j plus random_planes Haar-random 2-planes,
// recording extrema and all near-zeros. Confinement is judged against the
// plane x_s = 0 for the given deformed slot s.
CurvatureReport scan_sectional(const MetricChart& chart, int s,
                               const ScanPlan& plan);

// --- Truncation floor --------------------------------------------------------

// The quadratic chart agrees with the true tube metric to O(|x|^4), so the
// chart's sectional curvature deviates from the locally symmetric band
// [-1, -1/4] by O(|x|^2). Measured near the axis (points within two grid
// cells), at two grid refinements, this deviation calibrates the zero band.
struct TruncationReport {
  double near_axis_deviation = 0.0;   // at the finer grid
  double coarse_deviation = 0.0;      // at the coarser grid
  double whole_tube_deviation = 0.0;  // for context only
  double scale_constant = 0.0;        // near_axis_deviation / (2 cell)^2
};
TruncationReport measure_truncation(const ModelSpec& spec, double eps,
                                    int fine_grid = 41, int coarse_grid = 21,
                                    int t_samples = 4, int random_planes = 16,
                                    std::uint64_t seed = 1, int threads = 1);

// Max sectional curvature over the tube for a deformed chart, with the
// per-epsilon bound constant M = max K / eps (headline of the first
// deformation: curvature stays <= M eps, not <= 0).
struct BoundScan {
  double max_value = 0.0;
  double bound_constant = 0.0;  // max_value / eps
  double refined_constant = 0.0;  // same at the finer grid
};
BoundScan scan_deformation_bound(const MetricChart& chart, int s, double eps,
                                 int coarse_grid, int fine_grid,
                                 int t_samples, int random_planes,
                                 std::uint64_t seed, int threads);

}  // namespace tubeflow
