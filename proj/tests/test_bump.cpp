#include <cmath>
#include <vector>

#include "doctest.h"
#include "tubeflow/bump.hpp"
#include "tubeflow/common.hpp"

using namespace tubeflow;

namespace {

// Five-point central difference for the k-th derivative from the (k-1)-th.
double fd_derivative(const BumpFamily& b, double x, int k, double step) {
  double f2 = b.f(x + 2.0 * step, k - 1);
  double f1 = b.f(x + step, k - 1);
  double fm1 = b.f(x - step, k - 1);
  double fm2 = b.f(x - 2.0 * step, k - 1);
  return (-f2 + 8.0 * f1 - 8.0 * fm1 + fm2) / (12.0 * step);
}

}  // namespace

TEST_CASE("polynomial derivative evaluation matches a hand expansion") {
  // p(x) = 2 - x + 3x^3
  Polynomial p({2.0, -1.0, 0.0, 3.0});
  CHECK(p.degree() == 3);
  CHECK(p.eval(0.5, 0) == doctest::Approx(2.0 - 0.5 + 3.0 * 0.125));
  CHECK(p.eval(0.5, 1) == doctest::Approx(-1.0 + 9.0 * 0.25));
  CHECK(p.eval(0.5, 2) == doctest::Approx(18.0 * 0.5));
  CHECK(p.eval(0.5, 3) == doctest::Approx(18.0));
  CHECK(p.eval(0.5, 4) == 0.0);
}

TEST_CASE("second derivative of r at zero is exactly one quarter") {
  for (int order = 2; order <= 4; ++order) {
    BumpFamily b(order, 0.1);
    CHECK(b.r(0.0, 2) == 0.25);
    CHECK(b.r(0.0, 0) == 0.0);
    CHECK(b.r(0.0, 1) == 0.0);
    CHECK(b.r(0.0, 3) == 0.0);
  }
}

TEST_CASE("seam derivatives vanish to the advertised order") {
  // s_n has a zero of order 2n at u = 1, so r = u^2 s vanishes there with all
  // derivatives through order 2n - 1.
  BumpFamily b3(3, 0.1);
  for (int j = 0; j <= 4; ++j) {
    CHECK(b3.r(1.0, j) == 0.0);
    CHECK(b3.r(-1.0, j) == 0.0);
  }

  BumpFamily b2(2, 0.1);
  for (int j = 0; j <= 3; ++j) {
    CHECK(b2.r(1.0, j) == 0.0);
  }
  CHECK(b2.r(1.0, 4) == doctest::Approx(48.0).epsilon(1e-12));

  // Outside the support everything is identically zero.
  CHECK(b3.r(1.5, 0) == 0.0);
  CHECK(b3.r(1.5, 2) == 0.0);
  CHECK(b3.s(-2.0, 0) == 0.0);
}

TEST_CASE("scaled profile has the right support and chain rule") {
  double eps = 0.2;
  BumpFamily b(3, eps);
  double cell = eps * eps;
  CHECK(b.f(cell, 0) == 0.0);
  CHECK(b.f(-cell, 0) == 0.0);
  CHECK(b.f(1.5 * cell, 0) == 0.0);
  CHECK(b.f(0.0, 2) == doctest::Approx(0.25));

  // f(x) = eps^4 r(x / eps^2) gives f^{(k)}(x) = eps^{4-2k} r^{(k)}(u).
  for (int k = 1; k <= 4; ++k) {
    double x = 0.37 * cell;
    double u = x / cell;
    double expected = std::pow(eps, 4.0 - 2.0 * k) * b.r(u, k);
    CHECK(b.f(x, k) == doctest::Approx(expected).epsilon(1e-13));
  }

  // Derivatives agree with finite differences of the previous order.
  for (int k = 1; k <= 3; ++k) {
    for (double frac : {-0.6, -0.2, 0.3, 0.7}) {
      double x = frac * cell;
      double fd = fd_derivative(b, x, k, 1e-4 * cell);
      CHECK(b.f(x, k) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("unit window bump is normalized and smooth") {
  CHECK(BumpFamily::phi(0.0, 0) == 1.0);
  CHECK(BumpFamily::phi(1.0, 0) == 0.0);
  CHECK(BumpFamily::phi(-1.0, 0) == 0.0);
  CHECK(BumpFamily::phi(2.0, 0) == 0.0);
  CHECK(BumpFamily::phi(0.0, 1) == 0.0);

  for (double u : {-0.7, -0.3, 0.2, 0.55}) {
    double step = 1e-5;
    double fd1 = (BumpFamily::phi(u + step, 0) - BumpFamily::phi(u - step, 0)) /
                 (2.0 * step);
    CHECK(BumpFamily::phi(u, 1) == doctest::Approx(fd1).epsilon(1e-7));
    double fd2 = (BumpFamily::phi(u + step, 1) - BumpFamily::phi(u - step, 1)) /
                 (2.0 * step);
    CHECK(BumpFamily::phi(u, 2) == doctest::Approx(fd2).epsilon(1e-6));
  }
}

TEST_CASE("window is the product of per-coordinate bumps") {
  double eps = 0.25;
  BumpFamily b(2, eps);
  Vec x = zero_vec();
  x[0] = 99.0;  // ignored slot
  x[1] = 0.1;
  x[2] = -0.15;
  x[3] = 0.05;
  double expected = BumpFamily::phi(x[1] / eps, 0) *
                    BumpFamily::phi(x[2] / eps, 0) *
                    BumpFamily::phi(x[3] / eps, 0);
  CHECK(b.window(x, 3) == doctest::Approx(expected).epsilon(1e-15));

  x[2] = eps;  // one factor dies, the product dies
  CHECK(b.window(x, 3) == 0.0);
}

TEST_CASE("measured sup of r matches the closed form") {
  // |r_n| peaks where (u^2)' balance gives u^2 = 1/(2n+1):
  // sup = (1/8) (1/(2n+1)) (1 - 1/(2n+1))^{2n}.
  for (int order = 2; order <= 3; ++order) {
    BumpFamily b(order, 0.1);
    double q = 1.0 / (2.0 * order + 1.0);
    double analytic = 0.125 * q * std::pow(1.0 - q, 2.0 * order);
    CHECK(b.sup_abs_r() == doctest::Approx(analytic).epsilon(1e-6));
  }
}
