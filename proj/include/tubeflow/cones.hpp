#pragma once

// Cone families around the candidate strong bundles, the squared-cosine
// alignment functional Theta, its exact instantaneous time derivative along
// the linearized flow, invariance scans over orbit seeds, finite-time
// Lyapunov spectra, and the flat-parallel-field obstruction witness.
//
// In the transported orthonormal frame a perpendicular Jacobi state is
// (xi, eta) in R^{2d}, d = n-1; slots [0, r) are the A-directions and
// [r, d) the B-directions. The four center bundles are
//   AU = {(w,  w) : w in A}, AS = {(w, -w) : w in A},
//   BU = {(w, w/2) : w in B}, BS = {(w, -w/2) : w in B}.

#include <string>
#include <vector>

#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/flow.hpp"
#include "tubeflow/model.hpp"

namespace tubeflow {

enum class Bundle { kAU, kAS, kBU, kBS };

struct ConeSpec {
  Bundle bundle = Bundle::kAU;
  double opening = 0.9;  // boundary value of Theta (squared cosine)
  int r = 1;             // dim A
  int d = 3;             // n - 1
};

// Theta = |Pr_E zeta|^2 / |zeta|^2 for zeta = (xi, eta); in [0, 1].
// Throws std::invalid_argument on the zero vector.
double alignment(const ConeSpec& cone, const Vec& xi, const Vec& eta);

struct RateResult {
  double rate = 0.0;        // d Theta / dt
  double multiplier = 0.0;  // u / ((1+sigma^2) N^2), the positive prefactor
  double bracket = 0.0;     // rate / multiplier (when not degenerate)
  bool degenerate = false;  // center projection of (xi, eta) vanished
};

// Exact instantaneous derivative of Theta along xi' = eta, eta' = -K xi,
// where K is the frame-component curvature matrix at the current state.
RateResult alignment_rate(const ConeSpec& cone, const Vec& xi, const Vec& eta,
                          const Mat& K);

// The locally symmetric background satisfies the identity
//   dTheta/dt = (u/N^2) (N - <xi,eta> - <xi_A,eta_A> - <xi_B,eta_B>/4),
// u = |xi_A + eta_A|^2, N = |xi|^2 + |eta|^2, for the AU cone. Returns the
// analytic value (exact for the model propagator).
RateResult model_analytic_rate(const ConeSpec& cone, const Vec& xi,
                               const Vec& eta);

// Worst-case positivity certificate for the deformed parallel-orbit bracket:
// the quadratic form
//   N - <xi,eta> - <xi_A,eta_A> - <xi_B,eta_B>/4 - xi_s eta_s / 2
// and its sum-of-squares decomposition
//   sum_A (xi-eta)^2 + sum_{B\s} [(xi - 5eta/8)^2 + 39 eta^2/64]
//   + (xi_s - 7eta_s/8)^2 + 15 eta_s^2/64,
// which agree identically (s indexes the deformed direction, slot s-1).
double worst_case_bracket(const Vec& xi, const Vec& eta, int r, int d, int s);
double worst_case_bracket_sos(const Vec& xi, const Vec& eta, int r, int d,
                              int s);

// Random state exactly on the cone boundary (Theta = opening), drawn with
// the center component fixed and the orthogonal component Haar-uniform.
JacobiInit boundary_state(const ConeSpec& cone, Rng& rng);

// Theta along an integrated Jacobi path plus its numeric time derivative
// (4th-order interior differences over the dense samples).
struct AlignmentSeries {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> numeric_rate;  // same length; one-sided at the ends
};
AlignmentSeries alignment_series(const JacobiPath& path, int field,
                                 const ConeSpec& cone);

// --- Invariance scan --------------------------------------------------------

enum class SeedClass { kParallel, kAlmostParallel, kTransversal };

struct ConeScanPlan {
  int seeds_per_class = 64;
  int boundary_directions = 32;
  double opening = 0.9;
  double theta_threshold = 0.1;  // |v_s| threshold separating the classes
  double horizon = 12.566370614359172;  // cap when the orbit never exits
  double step = 1e-3;
  int stride = 50;  // boundary rates evaluated every stride steps
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ConeSeedResult {
  int seed_id = 0;
  SeedClass cls = SeedClass::kParallel;
  double min_rate = 0.0;     // over sampled times and boundary directions
  double min_rate_time = 0.0;
  bool exited = false;
  double exit_time = 0.0;    // in-tube residence time when exited
  int degenerate_skipped = 0;
};

struct ConeScanReport {
  std::vector<ConeSeedResult> parallel;
  std::vector<ConeSeedResult> almost_parallel;
  std::vector<ConeSeedResult> transversal;
  double min_rate_parallel = 0.0;
  double min_rate_almost = 0.0;
  double max_transversal_residence = 0.0;
  double transversal_budget = 0.0;  // (2 eps/theta)(1 + 10 eps)
  bool pass = false;
};

ConeScanReport cone_invariance_scan(const MetricChart& chart,
                                    const ModelSpec& spec, double eps,
                                    const ConeScanPlan& plan);

// --- Finite-time spectrum ---------------------------------------------------

struct SpectrumReport {
  std::vector<double> exponents;  // sorted descending, 2d values
  std::vector<double> log_coefficients;  // fitted ln-t coefficients per mode
  double fit_residual = 0.0;      // max |S - fit| over checkpoints
  double pairing_residual = 0.0;  // max |lambda_i + lambda_{2d+1-i}|
  double sum_residual = 0.0;      // |sum lambda_i|
  std::vector<double> domination_gaps;  // between consecutive clusters
  double horizon = 0.0;
  bool partial = false;  // orbit left the tube before the horizon
  double exit_time = 0.0;
};

// Finite-time exponents of the frame-component Jacobi system restricted to
// the perpendicular (contact) directions: QR re-orthonormalization of a full
// basis every qr_interval, then a least-squares fit of the cumulative
// log-growth S_i(t) = lambda t + c ln t + b over the post-warmup checkpoints
// (the ln t regressor absorbs polynomial growth of Jordan-type blocks).
SpectrumReport lyapunov_spectrum(const MetricChart& chart,
                                 const FlowState& start, double horizon,
                                 double qr_interval = 0.5, double step = 1e-3,
                                 double cluster_merge = 0.05);

// Same estimator driven by the exact locally symmetric dynamics.
SpectrumReport lyapunov_spectrum_model(const ModelSpec& spec, double horizon,
                                       double qr_interval = 0.5,
                                       double step = 1e-3,
                                       double cluster_merge = 0.05);

// --- Obstruction witness ----------------------------------------------------

// A geodesic flow with a uniformly hyperbolic splitting admits no unit
// parallel field along a geodesic whose sectional curvature with the
// velocity vanishes identically. The witness checks the transverse
// direction s along the central orbit:
//   max_t |K(e_s, e_0)(t, 0)|  and  max_t |covariant derivative of e_s|.
struct WitnessReport {
  double max_abs_curvature = 0.0;
  double max_transport_defect = 0.0;
  bool flat_parallel_field = false;  // both below certification thresholds
};

WitnessReport anosov_obstruction_witness(const MetricChart& chart, int s,
                                         int t_samples = 64);

}  // namespace tubeflow
