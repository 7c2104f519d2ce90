#include <doctest.h>

#include <cmath>

#include "liouville/bubbles.hpp"
#include "liouville/errors.hpp"
#include "liouville/extension.hpp"
#include "liouville/halflap.hpp"
#include "liouville/profiles.hpp"
#include "liouville/quadrature.hpp"
#include "liouville/reduction.hpp"

using namespace liouville;

namespace {

DiscreteField sample(const Grid& g, const std::function<double(double)>& f) {
  DiscreteField out;
  out.x = g.x;
  for (double x : g.x) out.values.push_back(f(x));
  out.tail = {TailKind::Constant, g.params.xi, 0.0};
  return out;
}

}  // namespace

TEST_SUITE("bubbles") {

TEST_CASE("closed forms") {
  CHECK(bubble({1.0, 0.0}, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bubble_exp({0.3, 2.0}, 2.5) == doctest::Approx(std::exp(bubble({0.3, 2.0}, 2.5))));
  // U + 2 log|x| -> log(2 mu)
  const BubbleParams p{0.7, 1.5};
  const double x = 1e7;
  CHECK(bubble(p, x) + 2 * std::log(x) == doctest::Approx(std::log(1.4)).epsilon(1e-6));
  // scaling: U_{mu,xi}(x) = U_{1,0}((x - xi)/mu) - log mu
  for (double t : {-3.0, 0.0, 0.4, 12.0})
    CHECK(bubble(p, t) == doctest::Approx(bubble({1.0, 0.0}, (t - p.xi) / p.mu) - std::log(p.mu)));
  CHECK_THROWS_AS(validate(BubbleParams{0.0, 0.0}), ValidationError);
}

TEST_CASE("mass is 2 pi") {
  for (BubbleParams p : {BubbleParams{1.0, 0.0}, BubbleParams{0.3, 2.0}, BubbleParams{5.0, -1.0}}) {
    CHECK(std::abs(bubble_mass(build_grid(p, 1e3 * p.mu, 1200)) - kBubbleMass) < 1e-8);
    const auto q = integrate_adaptive([&](double x) { return bubble_exp(p, x); }, -INFINITY,
                                      INFINITY, 1e-12);
    CHECK(std::abs(q.value - kBubbleMass) < 1e-8);
  }
}

TEST_CASE("kernels") {
  CHECK(kernels({1.0, 0.0}, 0.0).z0 == doctest::Approx(-1.0));
  CHECK(kernels({1.0, 0.0}, 1.0).z1 == doctest::Approx(1.0));
  const BubbleParams p{0.8, -0.3};
  const double h = 1e-6;
  for (double x : {-2.0, -0.3, 0.0, 1.7, 30.0}) {
    const double dmu = (bubble({p.mu + h, p.xi}, x) - bubble({p.mu - h, p.xi}, x)) / (2 * h);
    const double dxi = (bubble({p.mu, p.xi + h}, x) - bubble({p.mu, p.xi - h}, x)) / (2 * h);
    CHECK(std::abs(dmu - kernels(p, x).z0) < 1e-8);
    CHECK(std::abs(dxi - kernels(p, x).z1) < 1e-8);
  }
}

TEST_CASE("cutoff") {
  const CutoffSpec chi;
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(2.0) == 1.0);
  CHECK(chi(3.0) == 0.0);
  CHECK(chi(-2.5) == chi(2.5));
  for (double r = 0.0; r < 4.0; r += 0.01) CHECK((chi(r) >= 0.0 && chi(r) <= 1.0));
}

TEST_CASE("error term") {
  const BubbleParams p{1.0, 0.0};
  CHECK(error_term(p, builtin("const:0"), 0.1, 0.5) == 0.0);
  // moments of E against the kernels give -2 pi eps grad Gamma (E = -eps k e^U)
  const auto k1 = builtin("k1");
  const ExtensionEvaluator ev(k1);
  const double eps = 1e-2;
  for (BubbleParams q : {BubbleParams{0.7, 0.3}, BubbleParams{1.5, -1.0}}) {
    const auto m1 = integrate_adaptive(
        [&](double x) { return error_term(q, k1, eps, x) * kernels(q, x).z1; }, -INFINITY, INFINITY,
        1e-12);
    const auto m0 = integrate_adaptive(
        [&](double x) { return error_term(q, k1, eps, x) * kernels(q, x).z0; }, -INFINITY, INFINITY,
        1e-12);
    const auto g = ev.grad({q.xi, q.mu});
    CHECK(std::abs(m1.value + 2 * M_PI * eps * g[0]) < 1e-9);
    CHECK(std::abs(m0.value + 2 * M_PI * eps * g[1]) < 1e-9);
  }
}

TEST_CASE("nonlinear term") {
  const BubbleParams p{1.0, 0.0};
  const auto g = build_grid(p, 1e3, 200);
  const auto k1 = builtin("k1");
  for (double v : nonlinear_term(p, k1, 0.1, sample(g, [](double) { return 0.0; })).values)
    CHECK(v == 0.0);
  CHECK_THROWS_AS(nonlinear_term(p, k1, 0.1, sample(g, [](double) { return 1.5; })), DomainError);
}

TEST_CASE("L annihilates the kernels") {
  for (BubbleParams p : {BubbleParams{1.0, 0.0}, BubbleParams{0.5, 1.0}}) {
    const auto g = build_grid(p, 1e3 * p.mu, 1600);
    const WeightedNormSpec spec{0.5, p.xi, WeightFlavor::Power};
    const auto L0 = apply_L(p, sample(g, [&](double x) { return kernels(p, x).z0; }));
    const auto L1 = apply_L(p, sample(g, [&](double x) { return kernels(p, x).z1; }));
    CHECK(weighted_norm(L0, spec) * p.mu < 1e-3);  // |Z0| ~ 1/mu
    CHECK(weighted_norm(L1, spec) * p.mu < 1e-3);
  }
  const BubbleParams p{1.0, 0.0};
  const auto g = build_grid(p, 1e3, 400);
  const auto L = apply_L(p, sample(g, [](double) { return 3.0; }));
  for (std::size_t j = 0; j < g.size(); ++j)
    CHECK(std::abs(L.values[j] + 3.0 * bubble_exp(p, g.x[j])) < 1e-10);
}

TEST_CASE("cutoff orthogonality of Z0 and Z1") {
  const BubbleParams p{0.9, 0.4};
  const auto g = build_grid(p, 1e3, 1200);
  const CutoffSpec chi;
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto z = kernels(p, g.x[j]);
    s += g.weights[j] * chi(g.x[j] - p.xi) * z.z0 * z.z1;
  }
  CHECK(std::abs(s) < 1e-12);
}

}
