#pragma once

// The compactly supported bump family driving the deformation:
//   s_n(u) = (1/8) (u^2 - 1)^{2n}        on [-1, 1], 0 outside
//   r_n(u) = u^2 s_n(u)
//   f_n(x) = x^2 s_n(x / eps^2)          support [-eps^2, eps^2]
//   phi(u) = exp(1 - 1/(1 - u^2))        on (-1, 1), 0 outside, phi(0) = 1
//   Phi(x) = prod_j phi(x_j / eps)
// s and r are polynomials inside their support and are evaluated with exact
// coefficient arrays, giving exact derivatives to order 4 (r_n''(0) = 1/4
// holds exactly in floating point).

#include <vector>

#include "tubeflow/common.hpp"

namespace tubeflow {

// Dense polynomial with derivative evaluation (Horner).
class Polynomial {
 public:
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  double eval(double x, int order) const;
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coefficients() const { return c_; }

 private:
  std::vector<double> c_;  // c_[k] multiplies x^k
};

class BumpFamily {
 public:
  // order: the smoothness parameter n of s_n (>= 2); eps: tube parameter.
  BumpFamily(int order, double eps);

  int order() const { return order_; }
  double eps() const { return eps_; }

  // s_n and r_n on their unit support; derivatives up to order 4.
  double s(double u, int deriv = 0) const;
  double r(double u, int deriv = 0) const;

  // f(x) = x^2 s(x / eps^2) = eps^4 r(x / eps^2); derivatives up to order 4.
  double f(double x, int deriv = 0) const;

  // Unit bump phi and its derivatives up to order 2.
  static double phi(double u, int deriv = 0);

  // Phi(x) = prod_{j=1}^{d} phi(x_j / eps) over the transverse coordinates
  // x[1..d] (slot 0 ignored to keep chart indexing).
  double window(const Vec& x, int d) const;

  // Measured sup |r| over the support (dense grid), used by the bound
  // certificates instead of a literature constant.
  double sup_abs_r() const;

 private:
  int order_;
  double eps_;
  Polynomial s_poly_;
  Polynomial r_poly_;
};

}  // namespace tubeflow
