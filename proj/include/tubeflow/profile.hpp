#pragma once

// The deformation exponent h(x) = -2 f(x_s) * prod_{j != s} phi(x_j / eps),
// a function of the transverse coordinates only (no t dependence), with
// closed-form partials to second order and the grid certificate for its
// seven amplitude bounds.

#include <string>
#include <vector>

#include "tubeflow/bump.hpp"
#include "tubeflow/common.hpp"
#include "tubeflow/conformal.hpp"

namespace tubeflow {

enum class DeformationKind { kNone, kConformal, kG00 };

class DeformationProfile {
 public:
  // n: chart dimension; s: deformed transverse direction (1 <= s <= n-1).
  DeformationProfile(int n, int s, int order, double eps,
                     DeformationKind kind);

  int dim() const { return n_; }
  int s() const { return s_; }
  double eps() const { return bumps_.eps(); }
  int order() const { return bumps_.order(); }
  DeformationKind kind() const { return kind_; }
  const BumpFamily& bumps() const { return bumps_; }

  // Value plus first and second partials at x (full chart point; slot 0 is
  // ignored since h does not depend on t). Exact product-rule closed forms.
  ScalarJet jet(const Vec& p) const;

  double value(const Vec& p) const { return jet(p).value; }

  // True when p lies outside supp h (some |x_j| >= eps for j != s, or
  // |x_s| >= eps^2).
  bool outside_support(const Vec& p) const;

 private:
  int n_;
  int s_;
  DeformationKind kind_;
  BumpFamily bumps_;
};

// One amplitude bound of the estimate certificate.
struct BoundReport {
  std::string name;
  double measured = 0.0;   // sup of the quantity over the grid
  double bound = 0.0;      // allowed bound
  Vec witness{};           // argmax point
  bool pass = false;
};

struct EstimateCertificate {
  double eps = 0.0;
  double measured_M = 0.0;  // sup eps^2 |d^2_ii h| / eps^4 over i != s
  std::vector<BoundReport> bounds;
  bool pass = false;
};

// Scans supp h on a grid with s-direction resolution <= eps^2/50 and checks
//   |h| <= eps^4                    |d_j h| <= 2 eps^3   (j != s)
//   |d_s h| <= eps^2                |d2_ij h| <= 4 eps^2 (i != j, both != s)
//   |d2_sj h| <= 2 eps  (j != s)    |d2_ii h| <= M eps^2 (i != s, M measured)
//   |d2_ss h| <= 1/2
EstimateCertificate verify_estimates(const DeformationProfile& profile,
                                     int grid_per_axis = 41,
                                     int s_grid = 201);

}  // namespace tubeflow
