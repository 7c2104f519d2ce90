#include "liouville/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "liouville/errors.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Grid grid_of(const SolveReport& r) {
  const Grid g = build_grid_span({r.mu_eps, r.xi_eps}, r.span, r.grid_n);
  if (r.phi.size() != g.size())
    throw ValidationError("report: phi does not match the grid size");
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g.x[j] - r.phi.x[j]) > 1e-9 * (1.0 + std::abs(g.x[j])))
      throw ValidationError("report: phi nodes do not match the grid layout");
  return g;
}

// phi beyond the grid: A + B |edge - xi| / |x - xi| through the last two nodes
// (the same model the half-Laplacian uses).
struct PhiTail {
  double a = 0.0, b = 0.0, edge = 0.0, xi = 0.0;
  double operator()(double x) const { return a + b * std::abs(edge - xi) / std::abs(x - xi); }
};

PhiTail phi_tail(const Grid& g, const std::vector<double>& phi, bool right) {
  const std::size_t n = g.size();
  const std::size_t e = right ? n - 1 : 0, e2 = right ? n - 2 : 1;
  const double rho = std::abs(g.x[e] - g.params.xi) / std::abs(g.x[e2] - g.params.xi);
  PhiTail t;
  t.b = (phi[e2] - phi[e]) / (rho - 1.0);
  t.a = phi[e] - t.b;
  t.edge = g.x[e];
  t.xi = g.params.xi;
  return t;
}

// int f over the line: grid weights inside, adaptive quadrature on the tails.
struct Integral {
  double value = 0.0;
  double tail_error = 0.0;
};

Integral integrate_line(const Grid& g, const std::vector<double>& inside,
                        const std::function<double(double)>& left_tail,
                        const std::function<double(double)>& right_tail) {
  Integral out;
  for (std::size_t j = 0; j < g.size(); ++j) out.value += g.weights[j] * inside[j];
  const auto l = integrate_adaptive(left_tail, -std::numeric_limits<double>::infinity(), g.x.front(), 1e-12);
  const auto r = integrate_adaptive(right_tail, g.x.back(), std::numeric_limits<double>::infinity(), 1e-12);
  out.value += l.value + r.value;
  out.tail_error = l.error + r.error;
  return out;
}

// Grid-part error of the scheme on e^U, which is known exactly; the
// integrands here are e^U times slowly varying factors.
double calibration(const Grid& g) {
  double m = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) m += g.weights[j] * bubble_exp(g.params, g.x[j]);
  const double exact = kTwoPi - bubble_mass_outside(g.params, g.x.front(), g.x.back());
  return std::abs(m - exact) / kTwoPi + 1e-15 * double(g.size());
}

}  // namespace

SolitonProfile assemble_soliton(const SolveReport& report, const KappaProfile& profile) {
  const Grid g = grid_of(report);
  const double eps = report.eps;
  const auto& phi = report.phi.values;
  SolitonProfile s;
  s.x = g.x;
  std::vector<double> dens(g.size());
  double sup = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Jet k = profile.jet(g.x[j]);
    const double a = 1.0 + eps * k.value;
    if (!(a > 0.0))
      throw DomainError("soliton: 1 + eps kappa <= 0 at x = " + std::to_string(g.x[j]));
    dens[j] = a * std::exp(bubble(g.params, g.x[j]) + phi[j]);
    sup = std::max(sup, a * std::exp(phi[j]));
    s.psi.push_back(std::sqrt(dens[j]));
    s.potential.push_back(0.25 * (eps * k.d1) * (eps * k.d1) / (a * a));
  }
  const PhiTail lt = phi_tail(g, phi, false), rt = phi_tail(g, phi, true);
  auto tail = [&](const PhiTail& t) {
    return [&, t](double x) {
      return (1.0 + eps * profile(x)) * bubble_exp(g.params, x) * std::exp(t(x));
    };
  };
  const auto I = integrate_line(g, dens, tail(lt), tail(rt));
  s.lambda = I.value;
  s.lambda_error = calibration(g) * kTwoPi * std::max(1.0, sup) + I.tail_error;
  return s;
}

PohozaevReport pohozaev_check(const SolveReport& report, const KappaProfile& profile) {
  PohozaevReport out;
  // |k'| (1 + |x|)^beta must stay bounded; compare two sampling ranges.
  auto decay_sup = [&](double xmax) {
    double m = 0.0;
    const double a = std::asinh(xmax);
    for (int k = 0; k <= 4000; ++k) {
      const double x = std::sinh(-a + 2.0 * a * k / 4000);
      m = std::max(m, std::pow(1.0 + std::abs(x), profile.beta()) * std::abs(profile.deriv1(x)));
    }
    return m;
  };
  const double m4 = decay_sup(1e4), m8 = decay_sup(1e8);
  if (!std::isfinite(m8) || m8 > 1.01 * m4 + 1e-12) {
    out.applicable = false;
    out.note = "kappa' does not decay like (1+|x|)^-beta; identities not applicable";
    return out;
  }

  const auto sol = assemble_soliton(report, profile);
  out.residual_share = 4.0 * report.pde_residual;
  out.lambda = sol.lambda;
  out.lambda_error = sol.lambda_error + out.residual_share;
  out.mass_defect = std::abs(sol.lambda - kTwoPi);

  const Grid g = grid_of(report);
  const auto& phi = report.phi.values;
  std::vector<double> f(g.size());
  double sup = 0.0, sup_xu = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r = g.x[j] - g.params.xi;
    sup_xu = std::max(sup_xu, std::abs(g.x[j] * 2.0 * r / (g.params.mu * g.params.mu + r * r)));
    const double xk = g.x[j] * profile.deriv1(g.x[j]);
    f[j] = xk * std::exp(bubble(g.params, g.x[j]) + phi[j]);
    sup = std::max(sup, std::abs(xk) * std::exp(phi[j]));
  }
  const PhiTail lt = phi_tail(g, phi, false), rt = phi_tail(g, phi, true);
  auto tail = [&](const PhiTail& t) {
    return [&, t](double x) {
      return x * profile.deriv1(x) * bubble_exp(g.params, x) * std::exp(t(x));
    };
  };
  const auto P = integrate_line(g, f, tail(lt), tail(rt));
  out.moment = P.value;
  out.moment_error = calibration(g) * kTwoPi * std::max(1.0, sup) + P.tail_error;

  out.identity_lhs = sol.lambda * (sol.lambda - kTwoPi) / kTwoPi;
  out.identity_rhs = report.eps * out.moment;
  out.identity_bar = std::abs(2.0 * sol.lambda - kTwoPi) / kTwoPi * sol.lambda_error +
                     report.eps * out.moment_error + (2.0 + sup_xu) * out.residual_share;
  out.identity_consistent =
      std::abs(out.identity_lhs - out.identity_rhs) <= out.identity_bar;

  // Sign of x k' over a wide sampling.
  bool nonpos = true, nonneg = true, nonzero = false;
  const double a = std::asinh(1e6);
  for (int k = 0; k <= 20000; ++k) {
    const double x = std::sinh(-a + 2.0 * a * k / 20000);
    const double v = x * profile.deriv1(x);
    if (v < -1e-300) nonneg = false;
    if (v > 1e-300) nonpos = false;
    if (v != 0.0) nonzero = true;
  }
  if (nonzero && ((nonpos && out.moment < -out.moment_error) ||
                  (nonneg && out.moment > out.moment_error))) {
    out.sign_contradiction = true;
    out.note = "x kappa' has one sign, so int x kappa' e^u cannot vanish: no bounded-phi solution";
  }
  return out;
}

SolveReport bubble_report(const KappaProfile& profile, double eps, const BubbleParams& p,
                          const SolverConfig& config) {
  validate(config);
  const Grid g = build_grid(p, config.x_max, config.n);
  SolveReport r;
  r.profile = profile.name();
  r.eps = eps;
  r.seed = {p.xi, p.mu};
  r.xi_eps = p.xi;
  r.mu_eps = p.mu;
  r.span = g.span;
  r.grid_n = g.size();
  r.x_max = config.x_max;
  r.sigma = config.sigma;
  r.rbar = config.rbar;
  r.phi.x = g.x;
  r.phi.values.assign(g.size(), 0.0);
  r.phi.tail = g.tail;
  r.note = "bare bubble, phi = 0";
  const auto c = residual_certificate(r, profile);
  r.pde_residual = c.residual;
  r.residual_floor = c.floor;
  r.ansatz_residual = c.ansatz_residual;
  r.certified = c.certified;
  return r;
}

}  // namespace liouville
