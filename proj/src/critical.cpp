#include "liouville/critical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <numbers>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Saddle: return "saddle";
    case Classification::Max: return "max";
    case Classification::Min: return "min";
    case Classification::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

double frob2(const Mat2& h) {
  return h[0][0] * h[0][0] + h[0][1] * h[0][1] + h[1][0] * h[1][0] + h[1][1] * h[1][1];
}

}  // namespace

void classify(CriticalPoint& cp, double degeneracy) {
  const auto& h = cp.hessian;
  cp.det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
  if (std::abs(cp.det) <= degeneracy * frob2(h)) {
    cp.classification = Classification::Degenerate;
    cp.index = 0;
  } else if (cp.det < 0.0) {
    cp.classification = Classification::Saddle;
    cp.index = -1;
  } else {
    cp.classification = h[0][0] + h[1][1] < 0.0 ? Classification::Max : Classification::Min;
    cp.index = 1;
  }
}

namespace {

// Newton iteration; returns nullopt as soon as `skip` accepts an iterate.
std::optional<CriticalPoint> newton_core(const ExtensionEvaluator& ev, HalfPlanePoint start,
                                         const NewtonOptions& options,
                                         const std::function<bool(HalfPlanePoint)>& skip) {
  if (!(start.mu > 0.0)) throw ValidationError("newton_refine: start must have mu > 0");
  HalfPlanePoint p = start;
  for (int it = 0; it <= options.max_steps; ++it) {
    if (skip && it > 0 && skip(p)) return std::nullopt;
    const auto jet = ev.jet(p);
    const auto& g = jet.grad;
    const auto& h = jet.hess;
    const double gn = std::hypot(g[0], g[1]);
    const double hn2 = frob2(h);
    if (hn2 <= 1e-28) throw DegenerateStepError("newton_refine: Hessian vanishes");
    if (gn < options.tol) {
      CriticalPoint cp;
      cp.location = p;
      cp.gradient_norm = gn;
      cp.hessian = h;
      cp.iterations = it;
      classify(cp, options.degeneracy);
      return cp;
    }
    if (it == options.max_steps) break;
    const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if (std::abs(det) <= options.degeneracy * hn2)
      throw DegenerateStepError("newton_refine: singular Hessian along the iteration");
    double dx = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
    double dm = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
    // Keep mu positive: never move more than 3/4 of the way to the boundary.
    double lambda = 1.0;
    while (p.mu + lambda * dm < 0.25 * p.mu) lambda *= 0.5;
    p.xi += lambda * dx;
    p.mu += lambda * dm;
    if (p.mu < 1e-10) throw BoundaryEscapeError("newton_refine: iterate reached mu = 0");
    if (!std::isfinite(p.xi) || std::hypot(p.xi, p.mu) > options.escape_radius)
      throw ConvergenceError("newton_refine: iterate ran off to infinity");
  }
  std::ostringstream os;
  os << "newton_refine: no convergence in " << options.max_steps << " steps from (" << start.xi
     << ", " << start.mu << ")";
  throw ConvergenceError(os.str());
}

}  // namespace

CriticalPoint newton_refine(const ExtensionEvaluator& ev, HalfPlanePoint start,
                            const NewtonOptions& options) {
  return *newton_core(ev, start, options, {});
}

std::vector<CriticalPoint> multistart_search(const ExtensionEvaluator& ev, double R, int grid,
                                             double dedup_radius, const NewtonOptions& options) {
  if (!(R > 1.0) || grid < 2) throw ValidationError("multistart_search: need R > 1, grid >= 2");
  std::vector<CriticalPoint> found;
  NewtonOptions opt = options;
  opt.escape_radius = std::min(opt.escape_radius, 4.0 * R);
  // Good starts converge in a handful of steps; wanderers are not worth chasing.
  opt.max_steps = std::min(opt.max_steps, 20);
  auto near_known = [&](HalfPlanePoint q, double radius) {
    return std::any_of(found.begin(), found.end(), [&](const CriticalPoint& c) {
      const double scale = radius * std::max(1.0, c.location.mu);
      return std::hypot(c.location.xi - q.xi, c.location.mu - q.mu) < scale;
    });
  };
  // An iterate this close to a known nondegenerate point would only reproduce it.
  auto skip = [&](HalfPlanePoint q) { return near_known(q, 1e-3); };
  const double a = std::asinh(R);
  for (int i = 0; i < grid; ++i) {
    const double t = -1.0 + 2.0 * (i + 0.5) / grid;
    const double xi = std::sinh(a * t);
    for (int j = 0; j < grid; ++j) {
      const double mu = std::exp(-std::log(R) + 2.0 * std::log(R) * (j + 0.5) / grid);
      try {
        auto cp = newton_core(ev, {xi, mu}, opt, skip);
        if (cp && !near_known(cp->location, dedup_radius)) found.push_back(*cp);
      } catch (const NumericalError&) {
        // a failed start says nothing about the critical set
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const CriticalPoint& l, const CriticalPoint& r) {
    return l.location.xi < r.location.xi ||
           (l.location.xi == r.location.xi && l.location.mu < r.location.mu);
  });
  return found;
}

int winding_degree(const PlanarField& field, const std::vector<Vec2>& contour,
                   double relative_floor) {
  if (contour.size() < 4) throw ValidationError("winding_degree: contour needs >= 3 segments");
  if (contour.front() != contour.back())
    throw ValidationError("winding_degree: contour is not closed");
  double total = 0.0, fmax = 0.0, fmin = std::numeric_limits<double>::infinity();
  auto eval = [&](Vec2 p) {
    const Vec2 f = field(p);
    const double m = std::hypot(f[0], f[1]);
    if (!std::isfinite(m)) throw DegreeUndefinedError("winding_degree: non-finite field");
    fmax = std::max(fmax, m);
    fmin = std::min(fmin, m);
    return f;
  };
  auto angle = [](Vec2 a, Vec2 b) {
    return std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
  };
  // Explicit stack instead of recursion; depth is bounded.
  struct Seg { Vec2 a, b, fa, fb; int depth; };
  for (std::size_t k = 0; k + 1 < contour.size(); ++k) {
    std::vector<Seg> stack{{contour[k], contour[k + 1], eval(contour[k]), eval(contour[k + 1]), 0}};
    while (!stack.empty()) {
      Seg s = stack.back();
      stack.pop_back();
      const double d = angle(s.fa, s.fb);
      if (std::abs(d) < 0.5 * std::numbers::pi) {
        total += d;
        continue;
      }
      if (s.depth > 48)
        throw DegreeUndefinedError("winding_degree: field rotates too fast near a contour point");
      const Vec2 m{0.5 * (s.a[0] + s.b[0]), 0.5 * (s.a[1] + s.b[1])};
      const Vec2 fm = eval(m);
      // Push the second half first so segments are consumed in order.
      stack.push_back({m, s.b, fm, s.fb, s.depth + 1});
      stack.push_back({s.a, m, s.fa, fm, s.depth + 1});
    }
  }
  if (fmin <= relative_floor * fmax)
    throw DegreeUndefinedError("winding_degree: field nearly vanishes on the contour");
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw DegreeUndefinedError("winding_degree: accumulated angle is not a whole turn");
  return int(rounded);
}

std::vector<Vec2> circle_contour(Vec2 c, double r, int segments) {
  std::vector<Vec2> pts;
  for (int k = 0; k < segments; ++k) {
    const double t = 2.0 * std::numbers::pi * k / segments;
    pts.push_back({c[0] + r * std::cos(t), c[1] + r * std::sin(t)});
  }
  pts.push_back(pts.front());
  return pts;
}

namespace {

// Boundary of {xi^2 + mu^2 < R^2, mu > 1/R}, counterclockwise: bottom segment
// left to right, then the arc back.
std::vector<Vec2> halfdisk_contour(double R, int arc_samples) {
  const double h = 1.0 / R;
  const double w = std::sqrt(R * R - h * h);
  const double t0 = std::atan2(h, w), t1 = std::numbers::pi - t0;
  std::vector<Vec2> pts;
  const int bottom = 64;
  for (int k = 0; k < bottom; ++k) {
    // denser near the middle, where kappa lives
    const double s = -1.0 + 2.0 * k / bottom;
    pts.push_back({w * std::sinh(6.0 * s) / std::sinh(6.0), h});
  }
  for (int k = 0; k < arc_samples; ++k) {
    const double t = t0 + (t1 - t0) * k / arc_samples;
    pts.push_back({R * std::cos(t), R * std::sin(t)});
  }
  pts.push_back(pts.front());
  return pts;
}

// |kappa''| below this and an extremum is treated as flat.
constexpr double kFlatCurvature = 1e-10;

double distance_to_contour(HalfPlanePoint p, double R) {
  const double bottom = std::abs(p.mu - 1.0 / R);
  const double arc = std::abs(R - std::hypot(p.xi, p.mu));
  return std::min(bottom, arc);
}

}  // namespace

DegreeReport degree_on_halfplane(const ExtensionEvaluator& ev, double R,
                                 const DegreeOptions& options) {
  DegreeReport rep;
  bool flat_extremum = false;  // kappa'' ~ 0: the range below does not cover it
  // Kappa side of the formula: maxima/minima where the half-Laplacian is > 0.
  rep.kappa_points = kappa_critical_points(ev.profile(), options.kappa_search_radius, 40000);
  for (const auto& c : rep.kappa_points) {
    const bool unsure_h = std::abs(c.half_laplacian) <= 10.0 * c.half_laplacian_error;
    const bool unsure_d2 = std::abs(c.d2) <= kFlatCurvature;
    if (unsure_h || unsure_d2) rep.kappa_counts_reliable = false;
    if (unsure_d2) flat_extremum = true;
    if (unsure_h && !unsure_d2)
      (c.is_max() ? rep.borderline_max : rep.borderline_min) += 1;
    else if (c.half_laplacian > 0.0)
      (c.is_max() ? rep.M_plus : rep.m_plus) += 1;
  }
  rep.formula_rhs = 1 - rep.M_plus + rep.m_plus;
  rep.formula_lo = rep.formula_rhs - rep.borderline_max;
  rep.formula_hi = rep.formula_rhs + rep.borderline_min;

  auto field = [&ev](Vec2 p) { return ev.grad({p[0], p[1]}); };
  // Critical points are searched on a box twice the contour size, so points
  // just outside the region (or next to its edge) force a larger R.
  std::vector<CriticalPoint> all;
  double searched = 0.0;
  double r = R > 0.0 ? R : options.R_start;
  for (;; r *= 2.0) {
    rep.R = r;
    rep.note.clear();
    const auto contour = halfdisk_contour(r, options.arc_samples);
    rep.contour_certified = true;
    for (std::size_t k = 64; k + 1 < contour.size(); ++k) {
      const auto g = field(contour[k]);
      if (g[0] * contour[k][0] + g[1] * contour[k][1] >= 0.0) {
        rep.contour_certified = false;
        break;
      }
    }
    bool near = false;
    if (rep.contour_certified) {
      if (searched < 2.0 * r) {
        searched = 2.0 * r;
        all = multistart_search(ev, searched, options.grid);
      }
      rep.critical_points.clear();
      for (const auto& c : all) {
        const auto& p = c.location;
        const bool inside = std::hypot(p.xi, p.mu) < r && p.mu > 1.0 / r;
        if (inside) rep.critical_points.push_back(c);
        if (distance_to_contour(p, r) < 2.0 / r ||
            (!inside && std::hypot(p.xi, p.mu) < 2.0 * r && p.mu > 0.5 / r))
          near = true;
      }
    }
    if (rep.contour_certified && !near) {
      try {
        rep.degree = winding_degree(field, contour);
        break;
      } catch (const DegreeUndefinedError& e) {
        rep.note = e.what();
      }
    } else {
      rep.note = !rep.contour_certified ? "grad Gamma . (xi, mu) >= 0 somewhere on the arc"
                                        : "critical point near or just outside the contour";
    }
    if (2.0 * r > options.R_max) {
      rep.verdict = Verdict::Inconclusive;
      rep.note += "; R limit reached";
      return rep;
    }
  }
  rep.index_sum = 0;
  for (const auto& c : rep.critical_points) rep.index_sum += c.index;
  if (!flat_extremum && (rep.degree < rep.formula_lo || rep.degree > rep.formula_hi)) {
    rep.verdict = Verdict::Fail;
  } else if (!rep.kappa_counts_reliable) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "a critical point of kappa is degenerate or has a vanishing half-Laplacian";
  } else {
    rep.verdict = rep.degree == rep.formula_rhs ? Verdict::Pass : Verdict::Fail;
  }
  return rep;
}

Verdict exact_count_check(const DegreeReport& report) {
  for (const auto& c : report.critical_points)
    if (c.classification == Classification::Degenerate) return Verdict::NotApplicable;
  // expected count is -degree, so the borderline points widen it the other way
  const int lo = -report.formula_hi, hi = -report.formula_lo;
  const int n = int(report.critical_points.size());
  bool flat = false;
  for (const auto& c : report.kappa_points) flat = flat || std::abs(c.d2) <= kFlatCurvature;
  if (!flat && (n < lo || n > hi)) return Verdict::Fail;
  for (const auto& c : report.critical_points)
    if (c.index != -1) return Verdict::Fail;
  return report.kappa_counts_reliable ? Verdict::Pass : Verdict::Inconclusive;
}

}  // namespace liouville
