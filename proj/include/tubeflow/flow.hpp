#pragma once

// Geodesic and Jacobi-field integration on a chart. The geodesic state
// carries an orthonormal frame e_1..e_{n-1} that is parallel-transported
// along the orbit; Jacobi fields are integrated in frame components, where
// the equation reads xi' = eta, eta' = -K xi with K_cd = R(e_c, v, v, e_d).
// A classical 4th-order one-step method with fixed step is used throughout
// (velocity renormalized to unit length once per step).

#include <functional>
#include <vector>

#include "tubeflow/chart.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/model.hpp"
#include "tubeflow/tensor.hpp"

namespace tubeflow {

struct FlowState {
  Vec x{};                                // position
  Vec v{};                                // velocity (unit for the chart)
  std::array<Vec, kMaxDim - 1> frame{};   // e_1..e_{n-1}, coordinate comps
};

// Builds the initial state at (x0, direction): normalizes the velocity and
// produces a g-orthonormal frame whose first vector is the projection of
// J v (the A-direction of the model at the axis), the rest completed from
// coordinate axes.
FlowState initial_state(const MetricChart& chart, const Vec& x0,
                        const Vec& direction);

struct OrbitSample {
  double t = 0.0;
  FlowState s{};
};

struct Orbit {
  std::vector<OrbitSample> samples;  // every `stride` steps, plus endpoints
  double step = 0.0;
  int stride = 1;
  bool exited = false;
  double exit_time = 0.0;       // linear interpolation of the crossing
  double max_unit_drift = 0.0;  // max |g(v,v) - 1| measured before renorm
  double horizon = 0.0;
};

Orbit integrate_geodesic(const MetricChart& chart, const FlowState& start,
                         double horizon, double step = 1e-3, int stride = 50);

// Frame components of the curvature contraction K_cd = R(e_c, v, v, e_d)
// at one state; symmetric (n-1)x(n-1), returned in the top-left block.
Mat curvature_matrix(const MetricChart& chart, const FlowState& s);

struct JacobiInit {
  Vec xi{};   // frame components 1..n-1 stored in slots 0..n-2
  Vec eta{};
};

struct JacobiPath {
  int count = 0;  // number of fields
  int d = 0;      // n-1 components each
  std::vector<double> times;
  // data[sample][field][0][c] = xi_c, data[sample][field][1][c] = eta_c
  std::vector<double> data;
  double at(std::size_t sample, int field, int part, int comp) const {
    return data[((sample * count + field) * 2 + part) * d + comp];
  }
};

// Re-integrates the orbit from its initial sample with the same step and
// propagates the given Jacobi fields alongside; sampled at the orbit's
// sample times.
JacobiPath integrate_jacobi(const MetricChart& chart, const Orbit& orbit,
                            const std::vector<JacobiInit>& inits);

// Closed-form solutions along the central orbit. Component classes:
// rate 1 (A-directions), rate 1/2 (B-directions), and — for the deformed
// metrics — the affine s-component J = J0 + J0' t.
enum class CentralMode { kUndeformed, kDeformed };
void central_jacobi_closed_form(const ModelSpec& spec, CentralMode mode,
                                int component, double J0, double J0p,
                                double t, double* J, double* Jp);

// Jacobi propagation in the exact locally symmetric background (constant
// frame-component curvature diag(-1 on A, -1/4 on B)); used as the
// chart-free reference dynamics.
JacobiPath model_jacobi_path(const ModelSpec& spec,
                             const std::vector<JacobiInit>& inits,
                             double horizon, double step = 1e-3,
                             int stride = 10);

// Step-level driver underlying the orbit and Jacobi integrators. Carries the
// geodesic state, the transported frame and an optional batch of Jacobi
// fields through fixed RK4 steps; exposed so that scans can interleave their
// own bookkeeping (QR renormalization, residence measurements) with steps.
inline constexpr int kMaxFields = 16;

class FlowStepper {
 public:
  FlowStepper(const MetricChart& chart, const FlowState& start, int nfields,
              double step);

  void set_field(int f, const JacobiInit& init);
  JacobiInit field(int f) const;
  // Multiplies every field's components by c (log-growth bookkeeping stays
  // with the caller).
  void scale_field(int f, double c);

  // Advances one step; returns false (and does not move) once the orbit has
  // left the tube. Exit time is interpolated inside the crossing step.
  bool advance();

  const FlowState& state() const { return s_; }
  double time() const { return t_; }
  bool exited() const { return exited_; }
  double exit_time() const { return exit_time_; }
  double max_unit_drift() const { return max_drift_; }
  double step_size() const { return h_; }

  // Frame-component curvature matrix at the current state.
  Mat curvature() const;

 private:
  const MetricChart& chart_;
  int n_, d_, nfields_;
  double h_;
  double t_ = 0.0;
  FlowState s_{};
  std::array<double, kMaxFields * 2 * (kMaxDim - 1)> jac_{};
  bool exited_ = false;
  double exit_time_ = 0.0;
  double max_drift_ = 0.0;
};

// Sasaki bookkeeping at a fixed unit tangent (p, v): tangent-bundle vectors
// are (horizontal, vertical) pairs of coordinate vectors.
struct TangentPair {
  Vec h{};
  Vec w{};
};
struct SasakiProducts {
  double inner = 0.0;   // g(h1,h2) + g(w1,w2)
  double alpha1 = 0.0;  // g(h1, v)
  double alpha2 = 0.0;  // g(h2, v)
  double omega = 0.0;   // g(h1,w2) - g(w1,h2)
};
SasakiProducts sasaki_products(const MetricChart& chart, const Vec& p,
                               const Vec& v, const TangentPair& a,
                               const TangentPair& b);

// Integrates with step and step/2 and reports the max deviation of the
// final state (position, velocity, frame), a convergence self-check.
double richardson_error(const MetricChart& chart, const FlowState& start,
                        double horizon, double step);

}  // namespace tubeflow
