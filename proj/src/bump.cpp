#include "tubeflow/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace tubeflow {

double Polynomial::eval(double x, int order) const {
  int deg = degree();
  if (order > deg) return 0.0;
  // Horner on the order-th derivative's coefficients, built on the fly:
  // the x^k coefficient of p^(order) is c[k+order] * (k+order)! / k!.
  double acc = 0.0;
  for (int k = deg - order; k >= 0; --k) {
    double factor = 1.0;
    for (int t = 0; t < order; ++t) factor *= static_cast<double>(k + order - t);
    acc = acc * x + c_[static_cast<std::size_t>(k + order)] * factor;
  }
  return acc;
}

namespace {

// Coefficients of (1/8) (u^2 - 1)^{2n}: the u^{2k} coefficient is
// (1/8) C(2n, k) (-1)^k.
std::vector<double> s_coefficients(int order) {
  int p = 2 * order;
  std::vector<double> binom(static_cast<std::size_t>(p) + 1, 0.0);
  binom[0] = 1.0;
  for (int row = 1; row <= p; ++row) {
    for (int k = row; k >= 1; --k) binom[static_cast<std::size_t>(k)] += binom[static_cast<std::size_t>(k - 1)];
  }
  std::vector<double> c(static_cast<std::size_t>(2 * p) + 1, 0.0);
  double sign = 1.0;
  for (int k = 0; k <= p; ++k) {
    c[static_cast<std::size_t>(2 * k)] = 0.125 * sign * binom[static_cast<std::size_t>(k)];
    sign = -sign;
  }
  return c;
}

std::vector<double> shift_by_u2(const std::vector<double>& c) {
  std::vector<double> out(c.size() + 2, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) out[k + 2] = c[k];
  return out;
}

}  // namespace

BumpFamily::BumpFamily(int order, double eps)
    : order_(order),
      eps_(eps),
      s_poly_(s_coefficients(order)),
      r_poly_(shift_by_u2(s_coefficients(order))) {
  if (order < 2) throw std::invalid_argument("BumpFamily: order must be >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("BumpFamily: eps must be > 0");
}

double BumpFamily::s(double u, int deriv) const {
  if (std::fabs(u) > 1.0) return 0.0;
  return s_poly_.eval(u, deriv);
}

double BumpFamily::r(double u, int deriv) const {
  if (std::fabs(u) > 1.0) return 0.0;
  return r_poly_.eval(u, deriv);
}

double BumpFamily::f(double x, int deriv) const {
  double e2 = eps_ * eps_;
  double u = x / e2;
  if (std::fabs(u) >= 1.0) return 0.0;
  // f(x) = eps^4 r(x / eps^2), so each derivative trades eps^4 for eps^2.
  double scale = eps_ * eps_ * eps_ * eps_;
  for (int t = 0; t < deriv; ++t) scale /= e2;
  return scale * r_poly_.eval(u, deriv);
}

double BumpFamily::phi(double u, int deriv) {
  if (std::fabs(u) >= 1.0) return 0.0;
  double w = 1.0 - u * u;
  double value = std::exp(1.0 - 1.0 / w);
  if (deriv == 0) return value;
  double psi1 = -2.0 * u / (w * w);
  if (deriv == 1) return value * psi1;
  if (deriv == 2) {
    double psi2 = -2.0 / (w * w) - 8.0 * u * u / (w * w * w);
    return value * (psi2 + psi1 * psi1);
  }
  throw std::invalid_argument("BumpFamily::phi: derivative order must be <= 2");
}

double BumpFamily::window(const Vec& x, int d) const {
  double prod = 1.0;
  for (int j = 1; j <= d; ++j) prod *= phi(x[j] / eps_, 0);
  return prod;
}

double BumpFamily::sup_abs_r() const {
  const int grid = 20001;
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    double u = -1.0 + 2.0 * i / (grid - 1);
    best = std::max(best, std::fabs(r_poly_.eval(u, 0)));
  }
  return best;
}

}  // namespace tubeflow
