#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liouville/extension.hpp"

namespace liouville {

enum class Classification { Saddle, Max, Min, Degenerate };
std::string to_string(Classification c);

struct CriticalPoint {
  HalfPlanePoint location;
  double gradient_norm = 0.0;
  Mat2 hessian{};
  double det = 0.0;
  Classification classification = Classification::Degenerate;
  int index = 0;
  int iterations = 0;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_steps = 50;
  /// |det H| <= degeneracy * |H|_F^2 counts as singular.
  double degeneracy = 1e-8;
  /// Give up once |(xi, mu)| exceeds this (the iterate is running away).
  double escape_radius = 1e8;
};

/// Classifies a Hessian: saddle (index -1), max/min (index +1) or degenerate.
void classify(CriticalPoint& cp, double degeneracy = 1e-8);

/// Damped Newton on grad Gamma. Throws DegenerateStepError on a singular
/// Hessian, BoundaryEscapeError when the iterate collapses onto mu = 0 and
/// ConvergenceError after max_steps.
CriticalPoint newton_refine(const ExtensionEvaluator& ev, HalfPlanePoint start,
                            const NewtonOptions& options = {});

/// Newton from a grid of starts over [-R, R] x (1/R, R) (xi sinh-spaced, mu
/// log-spaced), deduplicated at `dedup_radius`. Converged points anywhere in
/// the half-plane are returned; callers filter by region.
std::vector<CriticalPoint> multistart_search(const ExtensionEvaluator& ev, double R,
                                             int grid = 40, double dedup_radius = 1e-6,
                                             const NewtonOptions& options = {});

/// Total rotation of `field` along a closed polyline (first point repeated
/// last), in turns. Segments are bisected until each angle increment is below
/// pi/2. Throws DegreeUndefinedError if the field nearly vanishes on the
/// contour, ValidationError if the polyline is not closed.
using PlanarField = std::function<Vec2(Vec2)>;
int winding_degree(const PlanarField& field, const std::vector<Vec2>& contour,
                   double relative_floor = 1e-10);

/// Circle of radius r about c as a closed polyline with `segments` sides.
std::vector<Vec2> circle_contour(Vec2 c, double r, int segments = 64);

struct DegreeOptions {
  double R_start = 8.0;
  double R_max = 512.0;
  int arc_samples = 256;
  int grid = 40;
  double kappa_search_radius = 1e4;
};

struct DegreeReport {
  double R = 0.0;
  int degree = 0;
  int M_plus = 0;
  int m_plus = 0;
  int formula_rhs = 0;
  /// Extrema of kappa whose half-Laplacian is zero within its error bar. They
  /// are left out of M+ and m+; either sign is possible, so the formula only
  /// pins the degree to [formula_lo, formula_hi].
  int borderline_max = 0, borderline_min = 0;
  int formula_lo = 0, formula_hi = 0;
  std::vector<CriticalPoint> critical_points;
  std::vector<KappaCriticalPoint> kappa_points;
  bool contour_certified = false;  ///< grad Gamma . (xi, mu) < 0 on the arc
  bool kappa_counts_reliable = true;
  int index_sum = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

/// Winding of grad Gamma around {xi^2 + mu^2 < R^2, mu > 1/R} together with
/// the counts M+ and m+ from the critical points of kappa. R starts at
/// `R` (or options.R_start when R <= 0) and is doubled until the arc is
/// certified and no critical point lies within 2/R of the contour.
DegreeReport degree_on_halfplane(const ExtensionEvaluator& ev, double R = 0.0,
                                 const DegreeOptions& options = {});

/// Number of critical points equals M+ - m+ - 1 and each has index -1.
/// NotApplicable when any found point is degenerate. With borderline kappa
/// extrema the count can only be ruled out: Inconclusive if it fits some
/// assignment of signs, Fail otherwise. Flat extrema (kappa'' ~ 0) are not
/// covered by the range; the result is then at best Inconclusive.
Verdict exact_count_check(const DegreeReport& report);

}  // namespace liouville
