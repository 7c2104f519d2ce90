#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "liouville/profiles.hpp"

namespace liouville {

struct DiskPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Point of the closed upper half-plane; mu = 0 only for boundary evaluation.
struct HalfPlanePoint {
  double xi = 0.0;
  double mu = 0.0;
};

/// Half-plane -> unit disk. The boundary goes to the unit circle minus e2 and
/// (0, 1) goes to the origin.
DiskPoint psi_map(HalfPlanePoint p);

/// Unit disk minus e2 = (0, 1) -> closed half-plane; inverse of psi_map.
/// Throws DomainError at e2.
HalfPlanePoint phi_map(DiskPoint p);

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Harmonic function on the disk given as Re f(z) for a complex polynomial
/// f(z) = sum_k c_k z^k. Value, gradient and Hessian are exact.
class DiskHarmonic {
 public:
  DiskHarmonic(std::string name, std::vector<std::complex<double>> coefficients);

  double value(DiskPoint p) const;
  Vec2 gradient(DiskPoint p) const;
  Mat2 hessian(DiskPoint p) const;

  /// Zeros of the gradient inside the open unit disk (roots of f').
  std::vector<DiskPoint> critical_points() const;

  const std::string& name() const { return name_; }
  const std::vector<std::complex<double>>& coefficients() const { return c_; }

 private:
  std::string name_;
  std::vector<std::complex<double>> c_;
};

/// Named harmonic functions: "g1" (x^2 - y^2 + 1), "g2", "g3",
/// "kNa-ext" (params N, a) and "const" (param c).
DiskHarmonic disk_harmonic(std::string_view name,
                           const std::map<std::string, double>& params = {});

/// Boundary trace xi -> h(psi_map(xi, 0)), derivatives by the chain rule
/// through the Jacobian of psi_map.
KappaProfile pullback_profile(const DiskHarmonic& h, double beta = 0.5);

/// psi_map(xi, 0) and its first two xi-derivatives.
struct BoundaryChart {
  DiskPoint p;
  Vec2 d1;
  Vec2 d2;
};
BoundaryChart boundary_chart(double xi);

}  // namespace liouville
