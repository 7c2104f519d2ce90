#include <doctest.h>

#include <cmath>

#include "liouville/bubbles.hpp"
#include "liouville/errors.hpp"
#include "liouville/extension.hpp"
#include "liouville/halflap.hpp"
#include "liouville/profiles.hpp"

using namespace liouville;

namespace {

std::vector<double> graded_nodes(double center, double scale, double x_max, int n) {
  std::vector<double> x(n);
  const double S = std::asinh(x_max / scale);
  for (int j = 0; j < n; ++j) x[j] = center + scale * std::sinh(-S + 2.0 * S * j / (n - 1));
  return x;
}

}  // namespace

TEST_SUITE("halflap") {

TEST_CASE("pointwise examples") {
  auto c = half_laplacian_point([](double) { return 3.0; }, 0.7);
  CHECK(std::abs(c.value) < 1e-12);

  auto lorentz = [](double x) { return 1.0 / (1.0 + x * x); };
  CHECK(half_laplacian_point(lorentz, 0.0).value == doctest::Approx(1.0).epsilon(1e-8));
  for (double x : {-2.0, 0.5, 1.0, 3.0}) {
    const double exact = (1 - x * x) / std::pow(1 + x * x, 2);
    CHECK(std::abs(half_laplacian_point(lorentz, x).value - exact) < 1e-8);
  }

  const BubbleParams b{1.0, 0.0};
  const auto r = half_laplacian_point([&](double x) { return bubble(b, x); }, 0.0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("pointwise refusals") {
  CHECK_THROWS_AS(half_laplacian_point([](double x) { return x; }, 0.0), DomainError);
  CHECK_THROWS_AS(half_laplacian_point([](double x) { return std::min(std::abs(x), 1.0); }, 0.0),
                                       NumericalError);
}

TEST_CASE("linearity") {
  auto f = [](double x) { return 1.0 / (1.0 + x * x); };
  auto g = [](double x) { return std::exp(-x * x); };
  const double a = 2.5, b = -0.75;
  for (double x : {0.0, 0.8, -1.7}) {
    const double lhs = half_laplacian_point([&](double y) { return a * f(y) + b * g(y); }, x).value;
    const double rhs = a * half_laplacian_point(f, x).value + b * half_laplacian_point(g, x).value;
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("field of the bubble reproduces e^U") {
  for (BubbleParams b : {BubbleParams{1.0, 0.0}, BubbleParams{0.3, 2.0}, BubbleParams{5.0, -1.0}}) {
    CAPTURE(b.mu);
    DiscreteField f;
    f.x = graded_nodes(b.xi, b.mu, 1e3 * b.mu, 1600);
    for (double x : f.x) f.values.push_back(bubble(b, x));
    f.tail = {TailKind::Logarithmic, b.xi, -2.0};
    const auto h = half_laplacian_field(f);
    double worst = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double e = bubble_exp(b, f.x[j]);
      worst = std::max(worst, std::abs(h.values[j] - e) / e);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("field of Z1 is annihilated by L") {
  const BubbleParams b{1.0, 0.0};
  DiscreteField f;
  f.x = graded_nodes(0.0, 1.0, 1e3, 1600);
  for (double x : f.x) f.values.push_back(kernels(b, x).z1);
  f.tail = {TailKind::Constant, 0.0, 0.0};
  const auto h = half_laplacian_field(f);
  double worst = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double r = h.values[j] - bubble_exp(b, f.x[j]) * f.values[j];
    worst = std::max(worst, norm_weight(f.x[j], {}) * std::abs(r));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("constant field with constant tail") {
  DiscreteField f;
  f.x = graded_nodes(0.0, 1.0, 100.0, 200);
  f.values.assign(f.size(), 4.0);
  f.tail = {TailKind::Constant, 0.0, 0.0};
  for (double v : half_laplacian_field(f).values) CHECK(std::abs(v) < 1e-10);
  f.tail = {};
  CHECK_THROWS_AS(half_laplacian_field(f), ValidationError);
}

TEST_CASE("weighted norms") {
  WeightedNormSpec spec;
  CHECK(weighted_norm([](double) { return 0.0; }, spec) == 0.0);
  const double n = weighted_norm([](double x) { return std::pow(1 + std::abs(x), -1.5); }, spec);
  CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
  spec.flavor = WeightFlavor::Log;
  CHECK(norm_weight(0.0, spec) == doctest::Approx(1.0 / std::log(2.0)));

  // |E| / eps is independent of eps
  const auto k1 = builtin("k1");
  const BubbleParams b{1.0, 0.0};
  std::vector<double> ratio;
  for (double eps : {1e-1, 1e-2, 1e-3})
    ratio.push_back(weighted_norm([&](double x) { return error_term(b, k1, eps, x); }, {}) / eps);
  CHECK(ratio[1] == doctest::Approx(ratio[0]).epsilon(1e-12));
  CHECK(ratio[2] == doctest::Approx(ratio[0]).epsilon(1e-12));
}

TEST_CASE("agrees with the normal derivative of the extension") {
  for (const char* key : {"k1", "k2", "kNa:N=3,a=0.5"}) {
    CAPTURE(key);
    const auto k = builtin(key);
    const ExtensionEvaluator ev(k);
    for (double x : {-1.3, 0.0, 0.4, 2.0}) {
      // second-order one-sided difference in mu at mu = 0
      const double h = 1e-3;
      const double fd = -(-3.0 * k(x) + 4.0 * ev.gamma({x, h}) - ev.gamma({x, 2 * h})) / (2 * h);
      CHECK(std::abs(half_laplacian_point(k, x).value - fd) < 1e-4);
    }
  }
}

TEST_CASE("signs at the global extrema of k1") {
  const auto k1 = builtin("k1");
  CHECK(half_laplacian_point(k1, 1.0).value > 0.0);
  CHECK(half_laplacian_point(k1, -1.0).value > 0.0);
  CHECK(half_laplacian_point(k1, 0.0).value < 0.0);
}

}
