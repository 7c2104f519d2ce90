#include "liouville/extension.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/halflap.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

namespace {

using cd = std::complex<double>;

// Theta-integrals on (-pi/2, pi/2):
//   s0 = int k, s2 = int k e^{-2i theta}, s3 = int k cos(theta) e^{-3i theta}.
struct Moments {
  double s0 = 0.0;
  cd s2, s3;
};

// Composite Gauss-Legendre in theta. Panels halve towards both ends (where
// x = xi + mu tan(theta) runs off to infinity) and also break at the images of
// sinh-spaced x points, so the profile's own structure is resolved even when
// mu is small and xi far away.
std::vector<double> theta_breaks(double xi, double mu) {
  const double half = 0.5 * std::numbers::pi;
  const int depth =
      std::clamp(int(std::ceil(std::log2((std::abs(xi) + 1.0) / mu))) + 3, 2, 50);
  std::vector<double> br{-half, 0.0, half};
  for (int j = 1; j <= depth; ++j) {
    br.push_back(half * (1.0 - std::ldexp(1.0, -j)));
    br.push_back(-br.back());
  }
  for (int k = -30; k <= 30; ++k) br.push_back(std::atan((std::sinh(0.5 * k) - xi) / mu));
  std::sort(br.begin(), br.end());
  std::vector<double> out{br.front()};
  for (std::size_t j = 1; j < br.size(); ++j)
    if (br[j] - out.back() > 1e-15) out.push_back(br[j]);
  return out;
}

Moments moments(const KappaProfile& k, double xi, double mu, const std::vector<double>& br,
                int per_panel, bool derivatives) {
  const auto& rule = gauss_legendre(per_panel);
  Moments m;
  for (std::size_t j = 0; j + 1 < br.size(); ++j) {
    const double c = 0.5 * (br[j] + br[j + 1]), h = 0.5 * (br[j + 1] - br[j]);
    for (int q = 0; q < per_panel; ++q) {
      const double th = c + h * rule.nodes[q];
      const double co = std::cos(th), si = std::sin(th);
      const double kv = h * rule.weights[q] * k(xi + mu * si / co);
      m.s0 += kv;
      if (derivatives) {
        const cd e1(co, -si);
        const cd e2 = e1 * e1;
        m.s2 += kv * e2;
        m.s3 += kv * co * e2 * e1;
      }
    }
  }
  return m;
}

GammaJet evaluate(const KappaProfile& k, const ExtensionQuadSpec& quad, HalfPlanePoint p,
                  bool derivatives) {
  if (!(p.mu >= 0.0) || !std::isfinite(p.xi) || !std::isfinite(p.mu))
    throw ValidationError("extension: point must lie in the closed upper half-plane");
  GammaJet out;
  if (p.mu == 0.0) {
    if (derivatives) throw ValidationError("extension: derivatives need mu > 0");
    out.value = k(p.xi);
    return out;
  }
  const auto br = theta_breaks(p.xi, p.mu);
  const int panels = int(br.size()) - 1;
  int per = std::max(4, (quad.min_nodes + panels - 1) / panels);
  Moments prev = moments(k, p.xi, p.mu, br, per, derivatives);
  int n = per * panels;
  double change = 0.0;
  for (;;) {
    const int next = 2 * n;
    if (next > quad.max_nodes) {
      std::ostringstream os;
      os << "extension: quadrature did not converge at (" << p.xi << ", " << p.mu
         << "); achieved change " << change << " with " << n << " nodes";
      throw ConvergenceError(os.str());
    }
    per *= 2;
    const Moments cur = moments(k, p.xi, p.mu, br, per, derivatives);
    change = std::abs(cur.s0 - prev.s0);
    if (derivatives) change = std::max({change, std::abs(cur.s2 - prev.s2), std::abs(cur.s3 - prev.s3)});
    const double scale = std::max(1.0, std::abs(cur.s0));
    prev = cur;
    n = next;
    if (change <= quad.tol * scale) break;
  }
  const double pi = std::numbers::pi;
  out.value = prev.s0 / pi;
  out.nodes = n;
  out.change = change / pi;
  if (derivatives) {
    // Gamma = Re F with F analytic in z = xi + i mu.
    const cd f1 = -prev.s2 / (pi * p.mu);
    const cd f2 = (2.0 / pi) * cd(0.0, -1.0) / (p.mu * p.mu) * prev.s3;
    out.grad = {f1.imag(), f1.real()};
    out.hess = {{{f2.imag(), f2.real()}, {f2.real(), -f2.imag()}}};
  }
  return out;
}

}  // namespace

ExtensionEvaluator::ExtensionEvaluator(KappaProfile profile, ExtensionQuadSpec quad)
    : profile_(std::move(profile)), quad_(quad) {
  if (quad_.min_nodes < 2 || quad_.max_nodes < quad_.min_nodes || !(quad_.tol > 0.0))
    throw ValidationError("extension: bad quadrature spec");
}

double ExtensionEvaluator::gamma(HalfPlanePoint p) const {
  return evaluate(profile_, quad_, p, false).value;
}

Vec2 ExtensionEvaluator::grad(HalfPlanePoint p) const {
  if (!(p.mu > 0.0)) throw ValidationError("grad_gamma: mu must be positive");
  return evaluate(profile_, quad_, p, true).grad;
}

Mat2 ExtensionEvaluator::hess(HalfPlanePoint p) const {
  if (!(p.mu > 0.0)) throw ValidationError("hess_gamma: mu must be positive");
  return evaluate(profile_, quad_, p, true).hess;
}

GammaJet ExtensionEvaluator::jet(HalfPlanePoint p) const {
  if (!(p.mu > 0.0)) throw ValidationError("extension jet: mu must be positive");
  return evaluate(profile_, quad_, p, true);
}

double gamma(const ExtensionEvaluator& ev, HalfPlanePoint p) { return ev.gamma(p); }
Vec2 grad_gamma(const ExtensionEvaluator& ev, HalfPlanePoint p) { return ev.grad(p); }
Mat2 hess_gamma(const ExtensionEvaluator& ev, HalfPlanePoint p) { return ev.hess(p); }

GammaTilde gamma_tilde(const ExtensionEvaluator& ev, double xi, double delta) {
  if (delta == 0.0) {
    const Jet j = ev.profile().jet(xi);
    return {j.value, {j.d1, 0.0}};
  }
  const auto jet = ev.jet({xi, delta * delta});
  return {jet.value, {jet.grad[0], 2.0 * delta * jet.grad[1]}};
}

std::vector<double> geometric_mu_sequence(double mu_max, double mu_min, int count) {
  if (!(mu_max > mu_min && mu_min > 0.0) || count < 2)
    throw ValidationError("mu sequence: need mu_max > mu_min > 0 and at least 2 values");
  std::vector<double> mu(count);
  const double r = std::pow(mu_min / mu_max, 1.0 / (count - 1));
  for (int k = 0; k < count; ++k) mu[k] = mu_max * std::pow(r, k);
  return mu;
}

AsymptoticFit asymptotic_check(const ExtensionEvaluator& ev, double xi,
                               const std::vector<double>& mu_sequence) {
  if (mu_sequence.size() < 2) throw ValidationError("asymptotic_check: need two or more mu");
  for (std::size_t k = 0; k < mu_sequence.size(); ++k)
    if (!(mu_sequence[k] > 0.0) || (k > 0 && !(mu_sequence[k] < mu_sequence[k - 1])))
      throw ValidationError("asymptotic_check: mu sequence must decrease and stay positive");

  AsymptoticFit fit;
  const auto h = half_laplacian_point(ev.profile(), xi);
  fit.half_laplacian = h.value;
  const double k0 = ev.profile()(xi);
  // Noise in Gamma is ~ tol * |k|; the half-Laplacian error enters times mu.
  const double base = std::max(ev.quad().tol * 1e-2, 1e-14) * std::max(1.0, std::abs(k0));
  std::vector<double> lx, ly;
  for (double mu : mu_sequence) {
    const double r = std::abs(ev.gamma({xi, mu}) - k0 + mu * h.value);
    const double floor = base + mu * h.error;
    fit.mu.push_back(mu);
    fit.remainder.push_back(r);
    fit.floor = std::max(fit.floor, floor);
    if (r > 10.0 * floor) {
      lx.push_back(std::log(mu));
      ly.push_back(std::log(r));
    }
  }
  if (lx.size() < 2) {
    fit.saturated = true;
    return fit;
  }
  const double n = double(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

}  // namespace liouville
