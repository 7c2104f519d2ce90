#include "liouville/halflap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

constexpr double kPi = std::numbers::pi;

// int_delta^inf (2f(x) - f(x+y) - f(x-y)) / y^2 dy. Directly in y up to
// 10*scale, then in v = log y, where the integrand decays like e^{-v} even for
// logarithmically growing f.
QuadratureResult outer_part(const std::function<double(double)>& f, double x, double fx,
                            double delta, double scale, double tol) {
  auto g = [&](double y) { return (2.0 * fx - f(x + y) - f(x - y)) / (y * y); };
  auto gv = [&](double v) {
    const double y = std::exp(v);
    return (2.0 * fx - f(x + y) - f(x - y)) / y;
  };
  QuadratureResult total;
  const double cuts[] = {delta, scale, 10.0 * scale};
  for (int k = 0; k < 2; ++k) {
    const auto r = integrate_adaptive(g, cuts[k], cuts[k + 1], tol);
    total.value += r.value;
    total.error += r.error;
  }
  const double v0 = std::log(10.0 * scale);
  for (double a = v0; a < v0 + 48.0; a += 12.0) {
    const auto r = integrate_adaptive(gv, a, a + 12.0, tol);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

// int_Y^inf dz / ((z - c) z^2) for c < Y.
double tail_pole_integral(double y, double c) {
  const double u = c / y;
  if (std::abs(u) < 0.1) {
    double sum = 0.0, p = 1.0;
    for (int k = 0; k < 16; ++k, p *= u) sum += p / (k + 2);
    return sum / (y * y);
  }
  return (-std::log1p(-u) / c - 1.0 / y) / c;
}

void growth_probe(const std::function<double(double)>& f, double x, double fx) {
  auto m = [&](double y) {
    return std::max(std::abs(f(x + y) - fx), std::abs(f(x - y) - fx));
  };
  const double near = m(1e4), far = m(1e8);
  if (!std::isfinite(near) || !std::isfinite(far) || far > 10.0 * (1.0 + near))
    throw DomainError("half-Laplacian: f grows faster than logarithmically, tail not controllable");
}

}  // namespace

QuadratureResult half_laplacian_point(const std::function<double(double)>& f, double x,
                                      const PointQuadSpec& spec) {
  const double fx = f(x);
  if (!std::isfinite(fx)) throw DomainError("half-Laplacian: f(x) is not finite");
  growth_probe(f, x, fx);

  const double h = 1e-3 * spec.scale;
  auto fd2 = [&](double s) { return (f(x + s) - 2.0 * fx + f(x - s)) / (s * s); };
  const double a = fd2(h), b = fd2(2.0 * h);
  if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a - b) > 1e-3 * (1.0 + std::abs(a)))
    throw NumericalError("half-Laplacian: smoothness probe failed at x = " + std::to_string(x) +
                         " (second differences " + std::to_string(a) + ", " +
                         std::to_string(b) + ")");
  const double f2 = (4.0 * a - b) / 3.0;
  const double h4 = 1e-2 * spec.scale;
  const double f4 = (f(x + 2 * h4) - 4 * f(x + h4) + 6 * fx - 4 * f(x - h4) + f(x - 2 * h4)) /
                    (h4 * h4 * h4 * h4);

  const double delta = spec.delta * spec.scale;
  const double inner = -delta * f2 - delta * delta * delta * f4 / 36.0;
  const auto outer = outer_part(f, x, fx, delta, spec.scale, spec.tol);
  return {(inner + outer.value) / kPi,
          (outer.error + std::abs(delta * delta * delta * f4) * 1e-2 + 1e-13 * std::abs(f2)) / kPi};
}

QuadratureResult half_laplacian_point(const KappaProfile& profile, double x,
                                      const PointQuadSpec& spec) {
  std::function<double(double)> f = [&profile](double y) { return profile(y); };
  const double fx = profile(x);
  growth_probe(f, x, fx);
  const double h4 = 1e-2 * spec.scale;
  const double f2 = profile.deriv2(x);
  const double f4 = (profile.deriv2(x + h4) - 2.0 * f2 + profile.deriv2(x - h4)) / (h4 * h4);
  const double delta = spec.delta * spec.scale;
  const double inner = -delta * f2 - delta * delta * delta * f4 / 36.0;
  const auto outer = outer_part(f, x, fx, delta, spec.scale, spec.tol);
  return {(inner + outer.value) / kPi,
          (outer.error + std::abs(delta * delta * delta * f4) * 1e-2) / kPi};
}

// --- dense grid operator -----------------------------------------------------
//
// Row i approximates (1/pi) PV int (f_i - f(y)) / (y - x_i)^2 dy.
//  * [x_{i-1}, x_{i+1}]: quartic through the five nearest nodes, integrated
//    in closed form (the principal value only sees the odd linear term).
//  * other cells: cubic Lagrange interpolant, Gauss-Legendre against the
//    kernel. Diagonal takes the same Gauss sums so constants map to zero.
//  * beyond the grid: the declared tail model, in closed form where possible.
// At the two end rows the window is made symmetric by extrapolating the
// quartic one spacing past the grid and the tail starts there.

HalfLaplacianOperator::HalfLaplacianOperator(std::vector<double> nodes, TailKind tail,
                                             double center)
    : nodes_(std::move(nodes)), tail_(tail), center_(center) {
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  if (tail == TailKind::None)
    throw ValidationError("half-Laplacian field needs a tail model");
  if (n < 6) throw ValidationError("half-Laplacian field needs at least 6 nodes");
  if (std::size_t(n) > kMaxGridNodes)
    throw ValidationError("half-Laplacian field: more than 4000 nodes");
  for (Eigen::Index j = 1; j < n; ++j)
    if (!(nodes_[j] > nodes_[j - 1]))
      throw ValidationError("half-Laplacian field: nodes must be strictly increasing");

  const auto& x = nodes_;
  matrix_.setZero(n, n);
  log_column_.setZero(n);
  const auto& g8 = gauss_legendre(8);
  const auto& g4 = gauss_legendre(4);
  const auto& g32 = gauss_legendre(32);
  Eigen::VectorXd r(n);

  const double x_left = x.front(), x_right = x.back();
  auto inv_sq = [&](double y) { return 1.0 / (1.0 + (y - center_) * (y - center_)); };

  for (Eigen::Index i = 0; i < n; ++i) {
    r.setZero();
    const double xi = x[i];

    // Near window.
    double h_l = i > 0 ? xi - x[i - 1] : x[1] - x[0];
    double h_r = i + 1 < n ? x[i + 1] - xi : xi - x[n - 2];
    {
      const Eigen::Index j0 = std::clamp<Eigen::Index>(i - 2, 0, n - 5);
      const double sc = std::max(h_l, h_r);
      Eigen::Matrix<double, 5, 5> v;
      for (int m = 0; m < 5; ++m) {
        const double t = (x[j0 + m] - xi) / sc;
        double p = 1.0;
        for (int k = 0; k < 5; ++k, p *= t) v(m, k) = p;
      }
      const Eigen::Matrix<double, 5, 5> vinv = v.inverse();
      // Coefficients a_k (in scaled t) pick up sc^{-k}; the window integral is
      // -[a1 log(hr/hl) + a2 (hr+hl) + a3 (hr^2-hl^2)/2 + a4 (hr^3+hl^3)/3].
      const double w1 = std::log(h_r / h_l) / sc;
      const double w2 = (h_r + h_l) / (sc * sc);
      const double w3 = 0.5 * (h_r * h_r - h_l * h_l) / (sc * sc * sc);
      const double w4 = (h_r * h_r * h_r + h_l * h_l * h_l) / (3.0 * sc * sc * sc * sc);
      for (int m = 0; m < 5; ++m)
        r(j0 + m) -= w1 * vinv(1, m) + w2 * vinv(2, m) + w3 * vinv(3, m) + w4 * vinv(4, m);
    }

    // Far cells.
    std::array<double, 4> lw{};
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (k == i || k == i - 1) continue;
      const auto& rule = std::abs(k - i) <= 16 ? g8 : g4;
      const double a = x[k], b = x[k + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      const Eigen::Index j0 = std::clamp<Eigen::Index>(k - 1, 0, n - 4);
      const std::array<double, 4> xs{x[j0], x[j0 + 1], x[j0 + 2], x[j0 + 3]};
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double y = mid + half * rule.nodes[q];
        const double kern = half * rule.weights[q] / ((y - xi) * (y - xi));
        lagrange4(xs, y, lw);
        r(i) += kern;
        for (int m = 0; m < 4; ++m) r(j0 + m) -= kern * lw[m];
      }
    }
    // Constants are annihilated exactly by the interior part.
    r(i) -= r.sum();

    // Tails. Each side starts at the grid end, or one spacing beyond it for
    // the end row itself.
    for (int side = 0; side < 2; ++side) {
      const bool right = side == 1;
      const Eigen::Index e = right ? n - 1 : 0;
      const double edge = right ? x_right : x_left;
      const double start = (i == e) ? (right ? edge + h_r : edge - h_l) : edge;
      const double y0 = std::abs(start - xi);  // distance to the tail start
      switch (tail_) {
        case TailKind::None:
          break;
        case TailKind::Constant: {
          // f(y) = A + B |edge-c| / |y-c|, A and B fitted to the last two
          // nodes; B = 0 for constants so they are still annihilated.
          const Eigen::Index e2 = right ? n - 2 : 1;
          r(i) += 1.0 / y0;
          r(e) -= 1.0 / y0;
          const double d_edge = std::abs(edge - center_), d_in = std::abs(x[e2] - center_);
          const bool inside = right ? x[e2] > center_ : x[e2] < center_;
          if (!inside || d_in <= 0.0) break;
          const double rho = d_edge / d_in;  // > 1
          const double cp = right ? center_ - xi : xi - center_;
          const double coef = (1.0 / y0 - d_edge * tail_pole_integral(y0, cp)) / (rho - 1.0);
          r(e2) += coef;
          r(e) -= coef;
          break;
        }
        case TailKind::InverseSquare: {
          // int_{start}^inf g(y)/(y-x_i)^2 dy with t = y0/|y-x_i| in (0, 1].
          double j = 0.0;
          for (std::size_t q = 0; q < g32.nodes.size(); ++q) {
            const double t = 0.5 * (g32.nodes[q] + 1.0);
            const double y = right ? xi + y0 / t : xi - y0 / t;
            j += 0.5 * g32.weights[q] * inv_sq(y) / y0;
          }
          r(i) += 1.0 / y0;
          r(e) -= j / inv_sq(edge);
          break;
        }
        case TailKind::Logarithmic: {
          // f(y) = f_e + a (log|y-c| - log|edge-c|) + B ((edge-c)^2/(y-c)^2 - 1),
          // B fitted to the second-to-last node. The a-part of the log term is
          // -a [ -log1p(-c'/Y)/c' + (log|start-c| - log|edge-c|)/Y ].
          r(i) += 1.0 / y0;
          r(e) -= 1.0 / y0;
          const double cp = right ? center_ - xi : xi - center_;
          const double ratio = cp / y0;
          const double ipart = std::abs(ratio) < 1e-8 ? 1.0 / y0 : -std::log1p(-ratio) / cp;
          const double d_edge = std::abs(edge - center_);
          const double shift = (std::log(std::abs(start - center_)) - std::log(d_edge)) / y0;
          log_column_(i) -= ipart + shift;

          const Eigen::Index e2 = right ? n - 2 : 1;
          const bool inside = right ? x[e2] > center_ : x[e2] < center_;
          const double d_in = std::abs(x[e2] - center_);
          if (!inside || d_in <= 0.0) break;
          const double rho2 = (d_edge / d_in) * (d_edge / d_in);
          double g_int = 0.0;  // int_start^inf (d_edge/(y-c))^2 / (y-x_i)^2 dy
          for (std::size_t q = 0; q < g32.nodes.size(); ++q) {
            const double t = 0.5 * (g32.nodes[q] + 1.0);
            const double ratio_q = d_edge * t / (y0 - t * cp);
            g_int += 0.5 * g32.weights[q] * ratio_q * ratio_q / y0;
          }
          const double coef = (1.0 / y0 - g_int) / (rho2 - 1.0);
          r(e2) += coef;
          r(e) -= coef;
          log_column_(i) -= coef * (std::log(d_in) - std::log(d_edge));
          break;
        }
      }
    }
    matrix_.row(i) = r.transpose() / kPi;
  }
  log_column_ /= kPi;
}

Eigen::VectorXd HalfLaplacianOperator::apply(const Eigen::VectorXd& values,
                                             double log_slope) const {
  if (values.size() != matrix_.cols())
    throw ValidationError("half-Laplacian: value count does not match the grid");
  Eigen::VectorXd out = matrix_ * values;
  if (tail_ == TailKind::Logarithmic) out += log_slope * log_column_;
  return out;
}

DiscreteField half_laplacian_field(const DiscreteField& field) {
  if (field.tail.kind == TailKind::None)
    throw ValidationError(
        "half_laplacian_field: no tail model declared; the operator is nonlocal and a "
        "truncated field would give silently wrong values");
  if (field.x.size() != field.values.size())
    throw ValidationError("half_laplacian_field: x and values differ in length");
  HalfLaplacianOperator op(field.x, field.tail.kind, field.tail.center);
  const Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(field.values.data(), Eigen::Index(field.values.size()));
  const Eigen::VectorXd h = op.apply(v, field.tail.log_slope);
  DiscreteField out;
  out.x = field.x;
  out.values.assign(h.data(), h.data() + h.size());
  return out;
}

double norm_weight(double x, const WeightedNormSpec& spec) {
  const double r = std::abs(x - spec.xi);
  return spec.flavor == WeightFlavor::Power ? std::pow(1.0 + r, 1.0 + spec.sigma)
                                            : 1.0 / std::log(2.0 + r);
}

double weighted_norm(std::span<const double> x, std::span<const double> g,
                     const WeightedNormSpec& spec) {
  if (!(spec.sigma > 0.0 && spec.sigma < 1.0))
    throw ValidationError("weighted norm: sigma must lie in (0, 1)");
  if (x.size() != g.size()) throw ValidationError("weighted norm: size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s = std::max(s, norm_weight(x[j], spec) * std::abs(g[j]));
  return s;
}

double weighted_norm(const DiscreteField& g, const WeightedNormSpec& spec) {
  return weighted_norm(g.x, g.values, spec);
}

double weighted_norm(const std::function<double(double)>& g, const WeightedNormSpec& spec,
                     const SamplingSpec& sampling) {
  const double s_max = std::asinh(sampling.x_max);
  std::vector<double> x(sampling.intervals + 1), v(sampling.intervals + 1);
  for (std::size_t j = 0; j <= sampling.intervals; ++j) {
    x[j] = spec.xi + std::sinh(-s_max + 2.0 * s_max * double(j) / double(sampling.intervals));
    v[j] = g(x[j]);
  }
  return weighted_norm(x, v, spec);
}

}  // namespace liouville
