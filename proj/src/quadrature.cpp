#include "liouville/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <limits>
#include <queue>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace liouville {

namespace {

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(make_rule(n));
  return *slot;
}

namespace {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = wk[0] * f0, g = wg[0] * f0, kabs = wk[0] * std::abs(f0);
  std::array<double, 15> fv{};
  fv[0] = f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double l = f(c - h * xk[i]), r = f(c + h * xk[i]);
    fv[2 * i - 1] = l;
    fv[2 * i] = r;
    k += wk[i] * (l + r);
    kabs += wk[i] * (std::abs(l) + std::abs(r));
    if (i % 2 == 0) g += wg[i / 2] * (l + r);
  }
  // QUADPACK error heuristic.
  const double mean = 0.5 * k;
  double asc = wk[0] * std::abs(f0 - mean);
  for (std::size_t i = 1; i < xk.size(); ++i)
    asc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  asc *= std::abs(h);
  double err = std::abs((k - g) * h);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double round = 50.0 * std::numeric_limits<double>::epsilon() * kabs * std::abs(h);
  if (round > std::numeric_limits<double>::min()) err = std::max(err, round);
  return {a, b, k * h, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double tol, unsigned max_panels) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_adaptive(f, b, a, tol, max_panels);
    r.value = -r.value;
    return r;
  }
  const bool inf_a = std::isinf(a), inf_b = std::isinf(b);
  if (inf_a && inf_b) {
    auto l = integrate_adaptive(f, a, 0.0, tol, max_panels);
    auto r = integrate_adaptive(f, 0.0, b, tol, max_panels);
    return {l.value + r.value, l.error + r.error};
  }
  if (inf_a || inf_b) {
    // x = base +- t/(1-t), t in [0, 1).
    const double base = inf_b ? a : b, sgn = inf_b ? 1.0 : -1.0;
    std::function<double(double)> g = [&f, base, sgn](double t) {
      const double u = 1.0 - t;
      return f(base + sgn * t / u) / (u * u);
    };
    return integrate_adaptive(g, 0.0, 1.0, tol, max_panels);
  }

  std::priority_queue<Panel> heap;
  heap.push(kronrod15(f, a, b));
  double value = heap.top().value, error = heap.top().error;
  while (heap.size() < max_panels && error > tol * std::max(1.0, std::abs(value))) {
    const Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {  // interval exhausted at machine resolution
      heap.push(p);
      break;
    }
    const Panel l = kronrod15(f, p.a, m), r = kronrod15(f, m, p.b);
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to avoid drift from the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error};
}

std::vector<double> gregory_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n < 8) {
    // Too short for the corrected rule; plain trapezoid.
    if (n >= 1) w.front() = w.back() = 0.5 * h;
    if (n == 1) w.front() = 0.0;
    return w;
  }
  constexpr double c[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int k = 0; k < 3; ++k) {
    w[k] = c[k] * h;
    w[n - 1 - k] = c[k] * h;
  }
  return w;
}

void lagrange4(std::span<const double, 4> xs, double x, std::span<double, 4> w) {
  for (int j = 0; j < 4; ++j) {
    double num = 1.0;
    double den = 1.0;
    for (int m = 0; m < 4; ++m) {
      if (m == j) continue;
      num *= x - xs[m];
      den *= xs[j] - xs[m];
    }
    w[j] = num / den;
  }
}

}  // namespace liouville
