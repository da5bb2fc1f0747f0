#pragma once

// The certification suite. Each runner checks one documented property of the
// deformed tube metrics, with pinned tolerances and a wall-clock budget, and
// reports named sub-checks with measured values. The runners are shared by
// the command-line tool and the standalone acceptance binary.

#include <string>
#include <vector>

#include "tubeflow/report.hpp"

namespace tubeflow {

struct CriterionResult {
  std::string name;
  bool pass = false;         // all sub-checks passed, within budget
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::vector<CheckResult> checks;
};

// Sectional curvature along the central orbit matches the model values in
// every transverse direction, t-independently.
CriterionResult run_central_curvature_table(const ExperimentConfig& cfg);

// Integrated central Jacobi fields match the closed forms (exponential
// rates 1 and 1/2; the affine component for the deformed metric).
CriterionResult run_jacobi_closed_form(const ExperimentConfig& cfg);

// Finite-time exponent estimates along the central orbit: the deformed
// metric trades a -1/2..1/2 pair for a double zero, with symmetric pairing.
CriterionResult run_lyapunov_spectrum(const ExperimentConfig& cfg);

// Exact alignment derivative matches the numeric derivative along model
// Jacobi paths, and is positive off the degenerate set.
CriterionResult run_alignment_derivative(const ExperimentConfig& cfg);

// Cone-boundary alignment rates stay positive along in-tube orbit classes of
// the conformally deformed metric; transversal orbits leave the deformation
// slab within the energy budget.
CriterionResult run_cone_invariance(const ExperimentConfig& cfg);

// The bump family: exact normalization, smooth seams, and the seven
// amplitude bounds across deformation scales.
CriterionResult run_bump_certificate(const ExperimentConfig& cfg);

// Grid scan of the g00-deformed metric: no positive sectional curvature
// beyond the chart truncation floor, near-zeros confined to the axis, and
// the radial profile behaves as the closed form dictates.
CriterionResult run_nonpositivity_scan(const ExperimentConfig& cfg);

// Grid scan of the conformally deformed metric: max sectional curvature
// bounded by a constant multiple of epsilon, stably across refinement and
// decreasing with epsilon.
CriterionResult run_curvature_bound_scan(const ExperimentConfig& cfg);

// Conformal transformation laws against direct recomputation from the
// deformed chart, plus metric and curvature identities.
CriterionResult run_conformal_identities(const ExperimentConfig& cfg);

// The deformed metrics carry a unit parallel field along the central orbit
// with vanishing sectional curvature against the flow direction; the
// undeformed metric does not.
CriterionResult run_flat_field_witness(const ExperimentConfig& cfg);

// All criteria in report order.
std::vector<CriterionResult> run_all_criteria(const ExperimentConfig& cfg);

// Names in report order.
std::vector<std::string> criterion_names();

// Criteria run by a given command group ("verify-deformation",
// "scan-curvature", "cone-check", "lyapunov", "oracle-suite", "report");
// empty for unknown groups.
std::vector<std::string> criteria_in_group(const std::string& group);

// Runs one criterion by name; throws std::invalid_argument for unknown
// names.
CriterionResult run_criterion(const std::string& name,
                              const ExperimentConfig& cfg);

}  // namespace tubeflow
