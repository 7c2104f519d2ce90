#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "liouville/bubbles.hpp"
#include "liouville/critical.hpp"
#include "liouville/errors.hpp"
#include "liouville/profiles.hpp"
#include "liouville/reduction.hpp"

using namespace liouville;

namespace {

CriticalPoint seed_at(const ExtensionEvaluator& ev, HalfPlanePoint p) { return newton_refine(ev, p); }

// One solver per configuration for the whole suite; the unit operators are
// cached inside.
const ReductionSolver& k1_solver() {
  static const ReductionSolver s(builtin("k1"));
  return s;
}

std::shared_ptr<const UnitOperator> unit(std::size_t n) {
  return std::make_shared<UnitOperator>(std::asinh(1e3), n);
}

double sup(const std::vector<double>& v) {
  double m = 0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

// Linear interpolation of a field at x (x inside the node range).
double at(const DiscreteField& f, double x) {
  const auto it = std::upper_bound(f.x.begin(), f.x.end(), x);
  const std::size_t j = std::size_t(it - f.x.begin());
  const double t = (x - f.x[j - 1]) / (f.x[j] - f.x[j - 1]);
  return (1 - t) * f.values[j - 1] + t * f.values[j];
}

}  // namespace

TEST_SUITE("reduction") {

TEST_CASE("grid") {
  const BubbleParams p{0.7, 0.2};
  const auto g = build_grid(p, 1e3 * p.mu, 1200);
  CHECK(g.size() == 1200);
  for (std::size_t j = 1; j < g.size(); ++j) CHECK(g.x[j] > g.x[j - 1]);
  for (double w : g.weights) CHECK(w > 0.0);
  CHECK(g.reach() == doctest::Approx(1e3 * p.mu));
  CHECK(std::abs(bubble_mass(g) - kBubbleMass) < 1e-8);

  // The true mass beyond |x - xi| = 1e3 mu is about 4e-3; what the solver
  // relies on is the tail model, whose error is far smaller.
  const auto w2 = moment_weights(g, 2.0);
  double model = 0;
  for (std::size_t j = 0; j < g.size(); ++j) model += w2[j] * bubble_exp(p, g.x[j]);
  CHECK(std::abs(model - kBubbleMass) / kBubbleMass < 1e-6);

  CHECK_THROWS_AS(build_grid(p, 10 * p.mu, 100), ValidationError);
  CHECK_THROWS_AS(build_grid(p, 1e3, 5000), ValidationError);
  CHECK_THROWS_AS(build_grid(p, 1e3, 4), ValidationError);
}

TEST_CASE("cutoff kernel norms are stable under refinement") {
  const BubbleParams p{1.0, 0.0};
  const CutoffSpec chi;
  std::vector<std::array<double, 2>> norms;
  for (std::size_t n : {1200, 2400}) {
    const auto g = build_grid(p, 1e3, n);
    std::array<double, 2> s{};
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto z = kernels(p, g.x[j]);
      s[0] += g.weights[j] * chi(g.x[j]) * z.z0 * z.z0;
      s[1] += g.weights[j] * chi(g.x[j]) * z.z1 * z.z1;
    }
    norms.push_back(s);
  }
  for (int i = 0; i < 2; ++i) {
    CHECK(norms[0][i] > 0.0);
    CHECK(std::abs(norms[1][i] - norms[0][i]) < 1e-8);
  }
}

TEST_CASE("projected linear solve") {
  const ProjectedSystem sys(unit(600), {1.0, 0.0});
  const std::size_t n = sys.grid().size();

  const auto zero = solve_projected_linear(sys, std::vector<double>(n, 0.0));
  CHECK(sup(zero.phi.values) == 0.0);
  CHECK(zero.d0 == 0.0);
  CHECK(zero.d1 == 0.0);

  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = sys.chi()[j] * sys.z0()[j];
  const auto s = sys.solve(g);
  CHECK(s.d0 == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(s.d1) < 1e-10);
  CHECK(sup(s.phi.values) < 1e-10);

  CHECK_THROWS_AS(sys.solve(std::vector<double>(n - 1, 0.0)), ValidationError);
}

TEST_CASE("multipliers match the kernel moments") {
  const auto k1 = builtin("k1");
  const ExtensionEvaluator ev(k1);
  const auto op = unit(1200);
  for (BubbleParams p : {BubbleParams{1.0, 0.0}, BubbleParams{0.8, 0.3}}) {
    const ProjectedSystem sys(op, p);
    const std::size_t n = sys.grid().size();
    std::vector<double> g(n), c0(n), c1(n);
    for (std::size_t j = 0; j < n; ++j) {
      g[j] = -error_term(p, k1, 1.0, sys.grid().x[j]);  // -E / eps
      c0[j] = sys.chi()[j] * sys.z0()[j];
      c1[j] = sys.chi()[j] * sys.z1()[j];
    }
    const auto s = sys.solve(g);
    // 0 = int g Z_i + d_i int chi Z_i^2
    const double d0 = -sys.moment(g, 0) / sys.moment(c0, 0);
    const double d1 = -sys.moment(g, 1) / sys.moment(c1, 1);
    CHECK(std::abs(s.d0 - d0) < 1e-8 * std::max(1.0, std::abs(d0)));
    CHECK(std::abs(s.d1 - d1) < 1e-8 * std::max(1.0, std::abs(d1)));
    CHECK(std::abs(s.ortho_residuals[0]) < 1e-12);
    CHECK(std::abs(s.ortho_residuals[1]) < 1e-12);
    if (p.xi == 0.0 && p.mu == 1.0) {
      // The moment tail assumes |x|^-2 decay; k1 e^U decays like |x|^-4, which
      // leaves about 1e-8 in d0 at x_max = 1e3.
      CHECK(std::abs(s.d0) < 1e-7);
      CHECK(std::abs(s.d1) < 1e-12);
    } else {
      // int (-E/eps) Z = 2 pi grad Gamma
      const auto gr = ev.grad({p.xi, p.mu});
      CHECK(sys.moment(g, 1) == doctest::Approx(2 * M_PI * gr[0]).epsilon(1e-6));
      CHECK(sys.moment(g, 0) == doctest::Approx(2 * M_PI * gr[1]).epsilon(1e-6));
    }
  }
}

TEST_CASE("projected solve stability over bubbles") {
  // |phi|_inf / |g|_w stays bounded over mu in [1/2, 2], xi in [-2, 2].
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> um(0.5, 2.0), ux(-2, 2), amp(-1, 1), off(-4, 4);
  const auto op = unit(400);
  double lo = INFINITY, hi = 0.0;
  for (int t = 0; t < 12; ++t) {
    const BubbleParams p{um(rng), ux(rng)};
    const ProjectedSystem sys(op, p);
    const auto& x = sys.grid().x;
    const double a = amp(rng), b = amp(rng), c = off(rng);
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double r = std::abs(x[j] - p.xi);
      g[j] = (a + b * std::tanh(x[j] - p.xi - c)) * std::pow(1 + r, -1.5);
    }
    const double ratio = sup(sys.solve(g).phi.values) /
                         weighted_norm(x, g, {0.5, p.xi, WeightFlavor::Power});
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  INFO("ratio range " << lo << " .. " << hi);
  CHECK(std::isfinite(hi));
  CHECK(hi < 20.0);
}

TEST_CASE("parameter continuity") {
  const auto k1 = builtin("k1");
  const auto op = unit(400);
  const auto limit = contraction_solve(ProjectedSystem(op, {1.0, 0.0}), k1, 1e-2).solve.phi;
  double prev = INFINITY;
  for (int m = 1; m <= 4; ++m) {
    const double h = std::pow(0.1, m);
    const auto phi = contraction_solve(ProjectedSystem(op, {1.0 + h, 0.5 * h}), k1, 1e-2).solve.phi;
    double diff = 0;
    for (double x = -5; x <= 5; x += 0.05) diff = std::max(diff, std::abs(at(phi, x) - at(limit, x)));
    CAPTURE(h);
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("contraction") {
  const auto k1 = builtin("k1");
  const ProjectedSystem sys(k1_solver().unit(std::asinh(1e3)), {1.0, 0.0});
  const auto zero = contraction_solve(sys, k1, 0.0);
  CHECK(zero.iterations == 1);
  CHECK(sup(zero.solve.phi.values) == 0.0);

  std::vector<double> ratio;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto r = contraction_solve(sys, k1, eps);
    ratio.push_back(sup(r.solve.phi.values) / eps);
    if (eps == 1e-3) CHECK(r.iterations <= 8);
  }
  for (double r : ratio) CHECK(std::abs(r / ratio[0] - 1.0) < 0.2);

  CHECK_THROWS_AS(contraction_solve(sys, k1, 0.1), ValidationError);
  SolverConfig loose;
  loose.eps0 = 100.0;
  CHECK_THROWS_AS(contraction_solve(sys, builtin("k2"), 50.0, loose), EpsTooLargeError);
}

TEST_CASE("reduced gradient") {
  const auto k1 = builtin("k1");
  const auto& solver = k1_solver();
  const BubbleParams p{0.8, 0.3};
  const ProjectedSystem sys(solver.unit(std::asinh(1e3 / p.mu)), p);
  const auto g = solver.extension().grad({p.xi, p.mu});
  for (double eps : {1e-2, 1e-3}) {
    const auto c = contraction_solve(sys, k1, eps);
    const auto rg = reduced_gradient(sys, solver.extension(), eps, c.solve);
    // the nonlinear moments are O(eps^2), so the difference is O(eps)
    CHECK(std::hypot(rg[0] - g[0], rg[1] - g[1]) < 10 * eps * std::hypot(g[0], g[1]));
  }
}

TEST_CASE("outer solve for k1") {
  const auto& solver = k1_solver();
  const auto seed = seed_at(solver.extension(), {0.1, 0.9});
  std::vector<double> sups, grads;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    CAPTURE(eps);
    const auto r = solver.outer_solve(eps, seed);
    CHECK(r.certified);
    CHECK(std::abs(r.xi_eps) < 1e-3);
    CHECK(std::hypot(r.xi_eps - seed.location.xi, r.mu_eps - seed.location.mu) <= std::sqrt(eps));
    CHECK(std::max(std::abs(r.d0), std::abs(r.d1)) < 1e-8);
    CHECK(std::hypot(r.reduced_gradient[0], r.reduced_gradient[1]) < 1e-8);
    CHECK(r.ansatz_residual > r.pde_residual);
    sups.push_back(r.phi_sup);
    grads.push_back(std::hypot(r.grad_gamma[0], r.grad_gamma[1]));
  }
  const double slope = std::log(sups[0] / sups[2]) / std::log(1e-2 / 1e-4);
  CHECK(slope >= 0.9);
  CHECK(slope <= 1.1);
  CHECK(grads[1] < grads[0]);
  CHECK(grads[2] < grads[1]);
}

TEST_CASE("outer solve for k2 gives mirror solutions") {
  const ReductionSolver solver(builtin("k2"));
  const auto a = solver.outer_solve(1e-3, seed_at(solver.extension(), {0.7, 0.5}));
  const auto b = solver.outer_solve(1e-3, seed_at(solver.extension(), {-0.7, 0.5}));
  CHECK(a.certified);
  CHECK(b.certified);
  CHECK(std::abs(a.xi_eps + b.xi_eps) < 1e-8);
  CHECK(std::abs(a.mu_eps - b.mu_eps) < 1e-8);
  CHECK(std::hypot(a.xi_eps - 0.8, a.mu_eps - 0.6) < std::sqrt(1e-3));
}

TEST_CASE("residual certificate") {
  const auto k1 = builtin("k1");
  const auto& solver = k1_solver();
  const auto seed = seed_at(solver.extension(), {0.0, 1.0});

  SolverConfig coarse;
  coarse.n = 600;
  const auto r600 = ReductionSolver(k1, coarse).outer_solve(1e-3, seed);
  const auto r1200 = solver.outer_solve(1e-3, seed);
  INFO("residuals " << r600.pde_residual << " -> " << r1200.pde_residual);
  CHECK(r600.pde_residual / r1200.pde_residual > 3.0);
  CHECK(r1200.pde_residual < 10 * r1200.residual_floor);

  // eps = 0: u = U exactly, only the quadrature floor remains
  auto r0 = solver.outer_solve(0.0, seed);
  CHECK(r0.phi_sup == 0.0);
  CHECK(r0.certified);
  CHECK(r0.pde_residual < 1e-9);
}

TEST_CASE("outer solve refusals") {
  const auto& solver = k1_solver();
  CriticalPoint bad;
  bad.location = {0.0, 1.0};
  bad.classification = Classification::Degenerate;
  CHECK_THROWS_AS(solver.outer_solve(1e-3, bad), ValidationError);
  const auto seed = seed_at(solver.extension(), {0.0, 1.0});
  CHECK_THROWS_AS(solver.outer_solve(0.2, seed), ValidationError);
  CHECK_THROWS_AS(solver.outer_solve(-1e-3, seed), ValidationError);
  SolverConfig c;
  c.sigma = 1.5;
  CHECK_THROWS_AS(ReductionSolver(builtin("k1"), c), ValidationError);
}

}
