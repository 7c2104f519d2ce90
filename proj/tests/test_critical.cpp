#include <doctest.h>

#include <cmath>
#include <complex>

#include "liouville/conformal.hpp"
#include "liouville/critical.hpp"
#include "liouville/errors.hpp"
#include "liouville/extension.hpp"
#include "liouville/halflap.hpp"
#include "liouville/profiles.hpp"

using namespace liouville;

namespace {

// Phi of the N-th roots of -i^N a.
std::vector<HalfPlanePoint> kna_points(int N, double a) {
  const std::complex<double> w = -std::pow(std::complex<double>(0, 1), N) * a;
  std::vector<HalfPlanePoint> out;
  for (int k = 0; k < N; ++k) {
    const auto z = std::polar(std::pow(std::abs(w), 1.0 / N), (std::arg(w) + 2 * M_PI * k) / N);
    out.push_back(phi_map({z.real(), z.imag()}));
  }
  return out;
}

bool near_any(const HalfPlanePoint& p, const std::vector<HalfPlanePoint>& pts, double tol) {
  for (const auto& q : pts)
    if (std::hypot(p.xi - q.xi, p.mu - q.mu) < tol) return true;
  return false;
}

}  // namespace

TEST_SUITE("critical") {

TEST_CASE("newton refinement") {
  const ExtensionEvaluator k1(builtin("k1"));
  const auto c = newton_refine(k1, {0.2, 1.3});
  CHECK(std::abs(c.location.xi) < 1e-10);
  CHECK(std::abs(c.location.mu - 1.0) < 1e-10);
  CHECK(c.classification == Classification::Saddle);
  CHECK(c.index == -1);

  const ExtensionEvaluator k2(builtin("k2"));
  const auto d = newton_refine(k2, {0.7, 0.5});
  CHECK(std::abs(d.location.xi - 0.8) < 1e-8);
  CHECK(std::abs(d.location.mu - 0.6) < 1e-8);

  const ExtensionEvaluator c0(builtin("const:1"));
  CHECK_THROWS_AS(newton_refine(c0, {0.3, 0.4}), DegenerateStepError);
}

TEST_CASE("multistart") {
  const ExtensionEvaluator k1(builtin("k1"));
  const auto one = multistart_search(k1, 8.0);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0].location.xi) < 1e-8);
  CHECK(std::abs(one[0].location.mu - 1.0) < 1e-8);

  const ExtensionEvaluator none(builtin("kNa:N=3,a=1.5"));
  CHECK(multistart_search(none, 8.0).empty());

  const ExtensionEvaluator three(builtin("kNa:N=3,a=0.5"));
  const auto pts = multistart_search(three, 16.0);
  const auto expected = kna_points(3, 0.5);
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) CHECK(near_any(p.location, expected, 1e-6));
}

TEST_CASE("winding degree of analytic fields") {
  const auto circle = circle_contour({0.0, 0.0}, 3.0);
  CHECK(winding_degree([](Vec2 p) { return Vec2{-2 * p[0], -p[1]}; }, circle) == 1);
  CHECK(winding_degree([](Vec2 p) { return p; }, circle) == 1);
  CHECK(winding_degree([](Vec2 p) { return Vec2{2 * p[0], -2 * p[1]}; },
                       circle_contour({0.0, 0.0}, 1.0)) == -1);
  // z^3 has degree 3; conj(z)^2 has degree -2
  auto cube = [](Vec2 p) {
    const auto z = std::complex<double>(p[0], p[1]);
    const auto w = z * z * z;
    return Vec2{w.real(), w.imag()};
  };
  CHECK(winding_degree(cube, circle) == 3);
  auto anti = [](Vec2 p) {
    const auto z = std::conj(std::complex<double>(p[0], p[1]));
    const auto w = z * z;
    return Vec2{w.real(), w.imag()};
  };
  CHECK(winding_degree(anti, circle) == -2);
  // zero outside the contour
  CHECK(winding_degree([](Vec2 p) { return Vec2{p[0] - 5, p[1]}; }, circle) == 0);
}

TEST_CASE("winding degree is deformation invariant") {
  auto f = [](Vec2 p) {
    const auto z = std::complex<double>(p[0], p[1]);
    const auto w = (z - 0.5) * (z + std::complex<double>(0, 0.3));
    return Vec2{w.real(), w.imag()};
  };
  const std::vector<Vec2> square{{-2, -2}, {2, -2}, {2, 2}, {-2, 2}, {-2, -2}};
  CHECK(winding_degree(f, square) == winding_degree(f, circle_contour({0.1, 0.0}, 1.5)));
  CHECK(winding_degree(f, square) == 2);
}

TEST_CASE("winding degree errors") {
  const std::vector<Vec2> open{{1, 0}, {0, 1}, {-1, 0}};
  CHECK_THROWS_AS(winding_degree([](Vec2 p) { return p; }, open), ValidationError);
  CHECK_THROWS_AS(winding_degree([](Vec2 p) { return Vec2{p[0] - 1, p[1]}; },
                                 circle_contour({0, 0}, 1.0, 4)),
                  DegreeUndefinedError);
}

TEST_CASE("degree on the half-plane") {
  const auto k1 = degree_on_halfplane(ExtensionEvaluator(builtin("k1")));
  CHECK(k1.degree == -1);
  CHECK(k1.M_plus == 2);
  CHECK(k1.m_plus == 0);
  CHECK(k1.formula_rhs == -1);
  CHECK(k1.verdict == Verdict::Pass);
  CHECK(exact_count_check(k1) == Verdict::Pass);
  CHECK(k1.index_sum == k1.degree);

  const auto k3 = degree_on_halfplane(ExtensionEvaluator(builtin("kNa:N=3,a=0.5")));
  CHECK(k3.degree == -3);
  CHECK(k3.M_plus == 4);
  CHECK(k3.m_plus == 0);
  CHECK(exact_count_check(k3) == Verdict::Pass);
  for (const auto& c : k3.critical_points) {
    CHECK(c.classification == Classification::Saddle);
    CHECK(c.index == -1);
  }

  const auto big = degree_on_halfplane(ExtensionEvaluator(builtin("kNa:N=3,a=1.5")));
  CHECK(big.degree == 0);
  CHECK(big.M_plus - big.m_plus == 1);
  CHECK(big.critical_points.empty());
  CHECK(exact_count_check(big) == Verdict::Pass);
}

TEST_CASE("borderline extremum at a = 1") {
  // The disk critical point sits on the circle, over the minimum x = 0 of
  // kappa, where the half-Laplacian vanishes: m+ is either 0 or 1.
  const auto r = degree_on_halfplane(ExtensionEvaluator(builtin("kNa:N=1,a=1")));
  CHECK(r.critical_points.empty());
  CHECK(r.degree == 0);
  CHECK(r.borderline_min == 1);
  CHECK(r.borderline_max == 0);
  CHECK(r.formula_lo <= 0);
  CHECK(r.formula_hi >= 0);
  CHECK_FALSE(r.kappa_counts_reliable);
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK(exact_count_check(r) == Verdict::Inconclusive);
}

TEST_CASE("boundary classification from the even extension") {
  // At a critical point x0 of kappa, Gamma~ has Hessian
  // diag(k''(x0), -2 (-D)^{1/2} k(x0)); check the determinant sign.
  for (const char* key : {"k1", "k2", "kNa:N=2,a=0.5", "kNa:N=2,a=1.5"}) {
    CAPTURE(key);
    const auto k = builtin(key);
    const ExtensionEvaluator ev(k);
    for (const auto& cp : kappa_critical_points(k, 50.0)) {
      const double h = 1e-3;
      const double gxx = (gamma_tilde(ev, cp.x + h, 0.0).grad[0] -
                          gamma_tilde(ev, cp.x - h, 0.0).grad[0]) / (2 * h);
      const double gdd = (gamma_tilde(ev, cp.x, h).grad[1] - gamma_tilde(ev, cp.x, -h).grad[1]) /
                         (2 * h);
      const double det = gxx * gdd;
      const double expected = cp.d2 * (-cp.half_laplacian);
      CHECK(det * expected > 0.0);
    }
  }
}

}
