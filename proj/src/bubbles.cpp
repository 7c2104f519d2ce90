#include "liouville/bubbles.hpp"

#include <algorithm>
#include <cmath>

#include "liouville/errors.hpp"

namespace liouville {

void validate(const BubbleParams& p) {
  if (!(p.mu > 0.0) || !std::isfinite(p.mu) || !std::isfinite(p.xi))
    throw ValidationError("bubble parameters need mu > 0 and finite xi");
}

double bubble(const BubbleParams& p, double x) {
  const double r = x - p.xi;
  return std::log(2.0 * p.mu) - std::log(p.mu * p.mu + r * r);
}

double bubble_exp(const BubbleParams& p, double x) {
  const double r = x - p.xi;
  return 2.0 * p.mu / (p.mu * p.mu + r * r);
}

double bubble_mass_outside(const BubbleParams& p, double a, double b) {
  // 2 atan((x - xi)/mu) is an antiderivative; use atan of the reciprocal to
  // keep precision far out.
  auto tail = [&](double d) {
    if (d == 0.0) return std::numbers::pi;
    return d > 0.0 ? 2.0 * std::atan(p.mu / d) : 2.0 * std::numbers::pi - 2.0 * std::atan(-p.mu / d);
  };
  double m = 0.0;
  if (std::isfinite(b)) m += tail(b - p.xi);
  if (std::isfinite(a)) m += tail(p.xi - a);
  return m;
}

KernelPair kernels(const BubbleParams& p, double x) {
  const double r = x - p.xi;
  const double q = p.mu * p.mu + r * r;
  return {1.0 / p.mu - 2.0 * p.mu / q, 2.0 * r / q};
}

double CutoffSpec::operator()(double r) const {
  const double t = std::abs(r) - rbar;
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  // 126t^5 - 420t^6 + 540t^7 - 315t^8 + 70t^9
  const double t5 = t * t * t * t * t;
  return std::clamp(1.0 - t5 * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t)))),
                    0.0, 1.0);
}

double error_term(const BubbleParams& p, const KappaProfile& profile, double eps, double x) {
  return -eps * profile(x) * bubble_exp(p, x);
}

double nonlinear_value(double eu, double kappa, double eps, double phi) {
  const double em1 = std::expm1(phi);
  return eu * ((em1 - phi) + eps * kappa * em1);
}

DiscreteField nonlinear_term(const BubbleParams& p, const KappaProfile& profile, double eps,
                             const DiscreteField& phi) {
  validate(p);
  DiscreteField out;
  out.x = phi.x;
  out.values.resize(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (!(std::abs(phi.values[j]) <= 1.0))
      throw DomainError("nonlinear term: |phi| > 1 at x = " + std::to_string(phi.x[j]));
    out.values[j] = nonlinear_value(bubble_exp(p, phi.x[j]), profile(phi.x[j]), eps, phi.values[j]);
  }
  return out;
}

DiscreteField apply_L(const BubbleParams& p, const DiscreteField& phi) {
  validate(p);
  auto h = half_laplacian_field(phi);
  for (std::size_t j = 0; j < h.size(); ++j)
    h.values[j] -= bubble_exp(p, phi.x[j]) * phi.values[j];
  return h;
}

}  // namespace liouville
