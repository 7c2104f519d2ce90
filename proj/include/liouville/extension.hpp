#pragma once

#include <optional>
#include <vector>

#include "liouville/conformal.hpp"
#include "liouville/profiles.hpp"

namespace liouville {

/// Gauss-Legendre in theta (x = xi + mu tan theta), starting at min_nodes and
/// doubling until successive values differ by less than tol.
struct ExtensionQuadSpec {
  int min_nodes = 200;
  int max_nodes = 12800;
  double tol = 1e-10;
};

struct GammaJet {
  double value = 0.0;
  Vec2 grad{};  ///< (d/dxi, d/dmu)
  Mat2 hess{};
  int nodes = 0;
  double change = 0.0;  ///< last doubling difference
};

/// Harmonic extension of a profile to the upper half-plane (Poisson integral).
/// Immutable; point evaluations are independent.
class ExtensionEvaluator {
 public:
  explicit ExtensionEvaluator(KappaProfile profile, ExtensionQuadSpec quad = {});

  double gamma(HalfPlanePoint p) const;
  Vec2 grad(HalfPlanePoint p) const;
  Mat2 hess(HalfPlanePoint p) const;
  /// Value, gradient and Hessian from one shared set of nodes.
  GammaJet jet(HalfPlanePoint p) const;

  const KappaProfile& profile() const { return profile_; }
  const ExtensionQuadSpec& quad() const { return quad_; }

 private:
  KappaProfile profile_;
  ExtensionQuadSpec quad_;
};

double gamma(const ExtensionEvaluator& ev, HalfPlanePoint p);
Vec2 grad_gamma(const ExtensionEvaluator& ev, HalfPlanePoint p);
Mat2 hess_gamma(const ExtensionEvaluator& ev, HalfPlanePoint p);

/// Even extension across the boundary: value Gamma(xi, delta^2) (kappa(xi) at
/// delta = 0) and gradient (d_xi Gamma, 2 delta d_mu Gamma) at (xi, delta^2).
struct GammaTilde {
  double value = 0.0;
  Vec2 grad{};
};
GammaTilde gamma_tilde(const ExtensionEvaluator& ev, double xi, double delta);

/// Log-log fit of |Gamma(xi, mu) - kappa(xi) + mu (-D)^{1/2} kappa(xi)|.
struct AsymptoticFit {
  bool saturated = false;  ///< remainders all at the quadrature floor
  double slope = 0.0;
  double half_laplacian = 0.0;
  double floor = 0.0;
  std::vector<double> mu;
  std::vector<double> remainder;
};
AsymptoticFit asymptotic_check(const ExtensionEvaluator& ev, double xi,
                               const std::vector<double>& mu_sequence);

/// Geometric sequence from mu_max down to mu_min, `count` values.
std::vector<double> geometric_mu_sequence(double mu_max, double mu_min, int count);

}  // namespace liouville
