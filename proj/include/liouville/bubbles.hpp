#pragma once

#include <numbers>
#include <vector>

#include "liouville/halflap.hpp"
#include "liouville/profiles.hpp"

namespace liouville {

/// Bubble U(x) = log(2 mu / (mu^2 + (x - xi)^2)), mu > 0.
struct BubbleParams {
  double mu = 1.0;
  double xi = 0.0;
};

void validate(const BubbleParams& p);

inline constexpr double kBubbleMass = 2.0 * std::numbers::pi;

double bubble(const BubbleParams& p, double x);
/// e^U = 2 mu / (mu^2 + (x - xi)^2), evaluated without the log.
double bubble_exp(const BubbleParams& p, double x);
/// int e^U over (-inf, a] and [b, inf), closed form.
double bubble_mass_outside(const BubbleParams& p, double a, double b);

struct KernelPair {
  double z0 = 0.0;  ///< d/dmu U
  double z1 = 0.0;  ///< d/dxi U
};
KernelPair kernels(const BubbleParams& p, double x);

/// Even C^4 bump: 1 on |r| <= rbar, 0 for |r| >= rbar + 1, degree-9
/// smoothstep between. (With only C^2 the grid moments of chi Z_i converge at
/// third order.)
struct CutoffSpec {
  double rbar = 2.0;
  double operator()(double r) const;
};

/// E = (-D)^{1/2} U - (1 + eps k) e^U = -eps k(x) e^U(x).
double error_term(const BubbleParams& p, const KappaProfile& profile, double eps, double x);

/// e^U {(e^phi - 1 - phi) + eps k (e^phi - 1)} nodewise. Throws DomainError if
/// sup |phi| > 1.
DiscreteField nonlinear_term(const BubbleParams& p, const KappaProfile& profile, double eps,
                             const DiscreteField& phi);
/// Single-node version without the sup check.
double nonlinear_value(double eu, double kappa, double eps, double phi);

/// (-D)^{1/2} phi - e^U phi on the nodes of phi (tail model required).
DiscreteField apply_L(const BubbleParams& p, const DiscreteField& phi);

}  // namespace liouville
