#pragma once

#include <string>
#include <vector>

#include "liouville/reduction.hpp"

namespace liouville {

/// psi = sqrt((1 + eps k) e^u) and V = (eps k')^2 / (4 (1 + eps k)^2) on the
/// solve grid, with the total mass Lambda = int (1 + eps k) e^u.
struct SolitonProfile {
  std::vector<double> x, psi, potential;
  double lambda = 0.0;
  double lambda_error = 0.0;
};

/// Throws DomainError when 1 + eps k <= 0 at a node.
SolitonProfile assemble_soliton(const SolveReport& report, const KappaProfile& profile);

/// Error bars combine quadrature error with the share of the PDE residual r:
/// for u = U + phi with phi bounded, Lambda - 2 pi = -int r, and the Pohozaev
/// identity picks up (2 + sup |x u'|) int |r|, where int |r| <= 4 |r|_w.
struct PohozaevReport {
  double lambda = 0.0, lambda_error = 0.0;
  double residual_share = 0.0;  ///< 4 |r|_w, bounds int |r|
  double mass_defect = 0.0;  ///< |Lambda - 2 pi|
  double moment = 0.0;       ///< int x k'(x) e^u
  double moment_error = 0.0;  ///< quadrature only
  /// Lambda (Lambda - 2 pi) / (2 pi) against eps * moment.
  double identity_lhs = 0.0, identity_rhs = 0.0, identity_bar = 0.0;
  bool identity_consistent = false;
  /// False when |k'| (1 + |x|)^beta is not bounded; the other fields are then
  /// left at zero.
  bool applicable = true;
  /// x k' has one sign (not identically zero) and the moment is nonzero with
  /// that sign beyond its error bar: no bounded-phi solution can exist.
  bool sign_contradiction = false;
  std::string note;
};

PohozaevReport pohozaev_check(const SolveReport& report, const KappaProfile& profile);

/// A report for u = U (phi = 0) on the standard grid: the eps = 0 solution,
/// or a candidate to test the identities against.
SolveReport bubble_report(const KappaProfile& profile, double eps, const BubbleParams& p,
                          const SolverConfig& config = {});

}  // namespace liouville
