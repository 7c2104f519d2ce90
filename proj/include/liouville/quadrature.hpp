#pragma once

#include <functional>
#include <span>
#include <vector>

namespace liouville {

/// Gauss-Legendre rule on [-1, 1] with n nodes. Rules are computed once per
/// n and cached; the returned reference stays valid for the program lifetime.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]; either bound may be
/// infinite. Stops once the error estimate is below tol * max(1, |value|) or
/// the panel budget is spent; the caller sees the achieved error either way.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol = 1e-10,
                                    unsigned max_panels = 2000);

/// Quadrature weights for the trapezoid rule on a uniform grid of n points
/// with spacing h, with fourth-order Gregory end corrections.
std::vector<double> gregory_weights(std::size_t n, double h);

/// Cubic Lagrange weights for the interpolant through the four abscissae
/// xs evaluated at x.
void lagrange4(std::span<const double, 4> xs, double x, std::span<double, 4> w);

}  // namespace liouville
