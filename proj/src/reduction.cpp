#include "liouville/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

namespace {

std::vector<double> uniform_s(double span, std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = -span + 2.0 * span * double(j) / double(n - 1);
  return s;
}

// Unit kernel elements: Z_i(x) = z_i(y) / mu.
double z0_unit(double y) { return 1.0 - 2.0 / (1.0 + y * y); }
double z1_unit(double y) { return 2.0 * y / (1.0 + y * y); }

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

double sup_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Decay power of f * Z_i when f ~ 1/r^2: Z0 tends to a constant, Z1 ~ 1/r.
constexpr double kMomentPower[2] = {2.0, 3.0};

}  // namespace

Grid build_grid_span(const BubbleParams& p, double span, std::size_t n) {
  validate(p);
  if (n < 8 || n > kMaxGridNodes) throw ValidationError("grid: need 8 <= n <= 4000");
  if (!(span > 0.0) || !std::isfinite(span)) throw ValidationError("grid: bad span");
  Grid g;
  g.params = p;
  g.span = span;
  g.s = uniform_s(span, n);
  const double ds = g.s[1] - g.s[0];
  const auto gw = gregory_weights(n, ds);
  g.y.resize(n);
  g.x.resize(n);
  g.weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.y[j] = std::sinh(g.s[j]);
    g.x[j] = p.xi + p.mu * g.y[j];
    g.weights[j] = gw[j] * p.mu * std::cosh(g.s[j]);
  }
  g.tail = {TailKind::Constant, p.xi, 0.0};
  return g;
}

Grid build_grid(const BubbleParams& p, double x_max, std::size_t n) {
  validate(p);
  if (!(x_max >= 50.0 * p.mu)) throw ValidationError("grid: need x_max >= 50 mu");
  return build_grid_span(p, std::asinh(x_max / p.mu), n);
}

std::vector<double> moment_weights(const Grid& g, double power) {
  if (!(power > 1.0)) throw ValidationError("moment_weights: tail power must exceed 1");
  auto w = g.weights;
  // int_X^inf (X/r)^p dr = X / (p - 1)
  const double t = g.reach() / (power - 1.0);
  w.front() += t;
  w.back() += t;
  return w;
}

double bubble_mass(const Grid& g) {
  double m = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) m += g.weights[j] * bubble_exp(g.params, g.x[j]);
  return m + bubble_mass_outside(g.params, g.x.front(), g.x.back());
}

void validate(const SolverConfig& c) {
  if (c.n < 8 || c.n > kMaxGridNodes) throw ValidationError("solver: grid n must be in [8, 4000]");
  if (!(c.x_max > 0.0)) throw ValidationError("solver: x_max must be positive");
  if (!(c.sigma > 0.0 && c.sigma < 1.0)) throw ValidationError("solver: sigma must be in (0, 1)");
  if (!(c.eps0 > 0.0 && c.eps0 < 1.0)) throw ValidationError("solver: eps0 must be in (0, 1)");
  if (!(c.rbar > 1.0)) throw ValidationError("solver: cutoff radius must exceed 1");
  if (!(c.inner_tol > 0.0) || !(c.outer_tol > 0.0) || c.inner_max < 1 || c.outer_max < 1)
    throw ValidationError("solver: bad tolerances or iteration caps");
}

UnitOperator::UnitOperator(double span, std::size_t n, bool kernel_correction) : span_(span) {
  const Grid g = build_grid_span({1.0, 0.0}, span, n);
  s_ = g.s;
  y_ = g.y;
  wy_ = g.weights;
  H_ = std::make_shared<HalfLaplacianOperator>(y_, TailKind::Constant, 0.0);
  K_ = H_->matrix();
  Eigen::VectorXd e(n);
  Eigen::MatrixXd Z(n, 2), W(n, 2), B(n, 2);
  for (std::size_t j = 0; j < n; ++j) {
    e(j) = 2.0 / (1.0 + y_[j] * y_[j]);
    K_(j, j) -= e(j);
    Z(j, 0) = z0_unit(y_[j]);
    Z(j, 1) = z1_unit(y_[j]);
  }
  for (int i = 0; i < 2; ++i) {
    const auto mw = moment_weights(g, kMomentPower[i]);
    for (std::size_t j = 0; j < n; ++j) W(j, i) = mw[j] * Z(j, i);
    B.col(i) = e.cwiseProduct(Z.col(i));
  }
  WeightedNormSpec spec{0.5, 0.0, WeightFlavor::Power};
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd r = K_ * Z.col(i);
    defect_ = std::max(defect_, weighted_norm(y_, std::vector<double>(r.data(), r.data() + n), spec) /
                                    sup_abs(Eigen::VectorXd(Z.col(i))));
  }
  // Discrete analogue of int (L phi) Z_i = 0: remove the component of the
  // adjoint defect K^T W along e^U Z, which leaves the far field untouched.
  const Eigen::MatrixXd R = K_.transpose() * W;
  adjoint_defect_ = R.cwiseAbs().maxCoeff();
  if (kernel_correction) {
    const Eigen::Matrix2d G = W.transpose() * B;
    K_ -= (B * G.inverse()) * R.transpose();
  }
}

ProjectedSystem::ProjectedSystem(std::shared_ptr<const UnitOperator> op, const BubbleParams& p,
                                 const CutoffSpec& cutoff, double sigma)
    : op_(std::move(op)), grid_(build_grid_span(p, op_->span(), op_->size())), sigma_(sigma) {
  const std::size_t n = grid_.size();
  eu_.resize(n);
  z0_.resize(n);
  z1_.resize(n);
  chi_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    eu_[j] = bubble_exp(p, grid_.x[j]);
    const auto z = kernels(p, grid_.x[j]);
    z0_[j] = z.z0;
    z1_[j] = z.z1;
    chi_[j] = cutoff(grid_.x[j] - p.xi);
  }
  m0_ = moment_weights(grid_, kMomentPower[0]);
  m1_ = moment_weights(grid_, kMomentPower[1]);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 2, n + 2);
  M.topLeftCorner(n, n) = op_->matrix() / p.mu;
  for (std::size_t j = 0; j < n; ++j) {
    M(j, n) = -chi_[j] * z0_[j];
    M(j, n + 1) = -chi_[j] * z1_[j];
    M(n, j) = grid_.weights[j] * chi_[j] * z0_[j];
    M(n + 1, j) = grid_.weights[j] * chi_[j] * z1_[j];
  }
  lu_.compute(M);
  const double rc = lu_.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream os;
    os << "projected system is numerically singular (rcond " << rc
       << "); the grid is too coarse for the kernel directions";
    throw NumericalError(os.str());
  }
}

double ProjectedSystem::moment(const std::vector<double>& f, int i) const {
  const auto& w = i == 0 ? m0_ : m1_;
  const auto& z = i == 0 ? z0_ : z1_;
  double m = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) m += w[j] * f[j] * z[j];
  return m;
}

ProjectedSolve ProjectedSystem::solve(const std::vector<double>& g) const {
  const std::size_t n = grid_.size();
  if (g.size() != n) throw ValidationError("projected solve: right-hand side has the wrong size");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(g[j])) throw ValidationError("projected solve: non-finite right-hand side");
    rhs(j) = g[j];
  }
  const Eigen::VectorXd sol = lu_.solve(rhs);
  ProjectedSolve out;
  out.phi.x = grid_.x;
  out.phi.values.assign(sol.data(), sol.data() + n);
  out.phi.tail = grid_.tail;
  out.d0 = sol(n);
  out.d1 = sol(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    out.ortho_residuals[0] += grid_.weights[j] * chi_[j] * z0_[j] * sol(j);
    out.ortho_residuals[1] += grid_.weights[j] * chi_[j] * z1_[j] * sol(j);
  }
  const Eigen::VectorXd hp = op_->half_laplacian().matrix() * sol.head(n) / params().mu;
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j)
    r[j] = hp(j) - eu_[j] * sol(j) - g[j] - out.d0 * chi_[j] * z0_[j] - out.d1 * chi_[j] * z1_[j];
  out.linear_residual = weighted_norm(grid_.x, r, {sigma_, params().xi, WeightFlavor::Power});
  return out;
}

ProjectedSolve solve_projected_linear(const ProjectedSystem& system, const std::vector<double>& g) {
  return system.solve(g);
}

ContractionResult contraction_solve(const ProjectedSystem& system, const KappaProfile& profile,
                                    double eps, const SolverConfig& config) {
  if (!(eps >= 0.0) || eps > config.eps0) {
    std::ostringstream os;
    os << "contraction: eps = " << eps << " is outside [0, eps0 = " << config.eps0 << "]";
    throw ValidationError(os.str());
  }
  const auto& grid = system.grid();
  const std::size_t n = grid.size();
  std::vector<double> kap(n), g0(n);
  for (std::size_t j = 0; j < n; ++j) {
    kap[j] = profile(grid.x[j]);
    g0[j] = eps * kap[j] * system.eu()[j];  // -E
  }
  ContractionResult res;
  std::vector<double> phi(n, 0.0), g(n);
  double prev = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int k = 1; k <= config.inner_max; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(std::abs(phi[j]) <= 1.0))
        throw EpsTooLargeError("contraction: |phi| exceeded 1; eps is too large for this bubble");
      g[j] = g0[j] + nonlinear_value(system.eu()[j], kap[j], eps, phi[j]);
    }
    res.solve = system.solve(g);
    double inc = 0.0;
    for (std::size_t j = 0; j < n; ++j) inc = std::max(inc, std::abs(res.solve.phi.values[j] - phi[j]));
    phi = res.solve.phi.values;
    res.increments.push_back(inc);
    res.iterations = k;
    if (inc < config.inner_tol) return res;
    growth = inc > prev ? growth + 1 : 0;
    if (growth >= 3) {
      std::ostringstream os;
      os << "contraction: increments grew three times in a row at eps = " << eps;
      throw EpsTooLargeError(os.str());
    }
    prev = inc;
  }
  throw ConvergenceError("contraction: no fixed point within the iteration cap");
}

Vec2 reduced_gradient(const ProjectedSystem& system, const ExtensionEvaluator& ev, double eps,
                      const ProjectedSolve& solve) {
  const auto& p = system.params();
  Vec2 rg = ev.grad({p.xi, p.mu});
  if (eps == 0.0) return rg;
  const auto& grid = system.grid();
  std::vector<double> nl(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    nl[j] = nonlinear_value(system.eu()[j], ev.profile()(grid.x[j]), eps, solve.phi.values[j]);
  const double c = 1.0 / (2.0 * std::numbers::pi * eps);
  rg[0] += c * system.moment(nl, 1);
  rg[1] += c * system.moment(nl, 0);
  return rg;
}

namespace {

// Weighted sup of L z_i over sup |z_i| for a unit-variable operator, in the
// physical weight of the bubble p.
double physical_defect(const HalfLaplacianOperator& H, const BubbleParams& p, double sigma) {
  const auto& y = H.nodes();
  const std::size_t n = y.size();
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = p.xi + p.mu * y[j];
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd z(n);
    for (std::size_t j = 0; j < n; ++j) z(j) = i == 0 ? z0_unit(y[j]) : z1_unit(y[j]);
    const Eigen::VectorXd hz = H.matrix() * z;
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j)
      r[j] = (hz(j) - 2.0 / (1.0 + y[j] * y[j]) * z(j)) / (p.mu * p.mu);
    worst = std::max(worst, weighted_norm(x, r, {sigma, p.xi, WeightFlavor::Power}) /
                                (sup_abs(z) / p.mu));
  }
  return worst;
}

}  // namespace

Certificate residual_certificate(const SolveReport& report, const KappaProfile& profile,
                                 std::size_t fine_n) {
  const std::size_t n = report.grid_n;
  if (report.phi.size() != n || n < 8)
    throw ValidationError("certificate: report phi does not match its grid size");
  const BubbleParams p{report.mu_eps, report.xi_eps};
  validate(p);
  Certificate c;
  c.fine_n = fine_n ? fine_n : std::min<std::size_t>(2 * n, kMaxGridNodes);
  const Grid coarse = build_grid_span(p, report.span, n);
  const Grid fine = build_grid_span(p, report.span, c.fine_n);
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(coarse.x[j] - report.phi.x[j]) > 1e-9 * (1.0 + std::abs(coarse.x[j])))
      throw ValidationError("certificate: report phi nodes do not match the grid layout");

  // Cubic interpolation in s (phi is smooth in s, nodes are uniform there).
  const double ds = coarse.s[1] - coarse.s[0];
  std::vector<double> phi(c.fine_n);
  for (std::size_t k = 0; k < c.fine_n; ++k) {
    const double t = (fine.s[k] - coarse.s[0]) / ds;
    const auto i0 = std::size_t(std::clamp<long>(long(std::floor(t)) - 1, 0, long(n) - 4));
    const std::array<double, 4> xs{coarse.s[i0], coarse.s[i0 + 1], coarse.s[i0 + 2], coarse.s[i0 + 3]};
    std::array<double, 4> w{};
    lagrange4(xs, fine.s[k], w);
    double v = 0.0;
    for (int q = 0; q < 4; ++q) v += w[q] * report.phi.values[i0 + q];
    phi[k] = v;
  }
  const HalfLaplacianOperator Hf(fine.y, TailKind::Constant, 0.0);
  const Eigen::VectorXd hp =
      Hf.matrix() * Eigen::Map<const Eigen::VectorXd>(phi.data(), Eigen::Index(phi.size())) / p.mu;
  std::vector<double> r(c.fine_n), e(c.fine_n), eu(c.fine_n);
  for (std::size_t k = 0; k < c.fine_n; ++k) {
    eu[k] = bubble_exp(p, fine.x[k]);
    const double ek = report.eps * profile(fine.x[k]);
    // (-D)^{1/2}(U + phi) - (1 + eps k) e^{U + phi}, using (-D)^{1/2} U = e^U.
    r[k] = hp(k) - eu[k] * (std::expm1(phi[k]) + ek * std::exp(phi[k]));
    e[k] = eu[k] * ek;
  }
  const WeightedNormSpec spec{report.sigma, p.xi, WeightFlavor::Power};
  c.residual = weighted_norm(fine.x, r, spec);
  c.ansatz_residual = weighted_norm(fine.x, e, spec);

  // Discretisation floor: relative operator error on kernel-like functions,
  // on both the solve grid and the verification grid, times sup |phi|.
  const HalfLaplacianOperator Hc(coarse.y, TailKind::Constant, 0.0);
  const double tau = physical_defect(Hc, p, report.sigma) + physical_defect(Hf, p, report.sigma);
  c.floor = sup_abs(report.phi.values) * tau + 1e-13 * weighted_norm(fine.x, eu, spec);
  c.certified = c.residual < 10.0 * c.floor;
  return c;
}

std::vector<double> nodal_residual(const SolveReport& report, const KappaProfile& profile) {
  const BubbleParams p{report.mu_eps, report.xi_eps};
  const Grid g = build_grid_span(p, report.span, report.grid_n);
  if (report.phi.size() != g.size()) throw ValidationError("residual: phi does not match the grid");
  const HalfLaplacianOperator H(g.y, TailKind::Constant, 0.0);
  const auto& phi = report.phi.values;
  const Eigen::VectorXd hp =
      H.matrix() * Eigen::Map<const Eigen::VectorXd>(phi.data(), Eigen::Index(phi.size())) / p.mu;
  std::vector<double> r(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double eu = bubble_exp(p, g.x[j]);
    r[j] = hp(j) - eu * (std::expm1(phi[j]) + report.eps * profile(g.x[j]) * std::exp(phi[j]));
  }
  return r;
}

ReductionSolver::ReductionSolver(KappaProfile profile, SolverConfig config, ExtensionQuadSpec quad)
    : ev_(std::move(profile), quad), config_(config) {
  validate(config_);
}

std::shared_ptr<const UnitOperator> ReductionSolver::unit(double span) const {
  auto& slot = cache_[{span, config_.n}];
  if (!slot) slot = std::make_shared<UnitOperator>(span, config_.n, config_.kernel_correction);
  return slot;
}

SolveReport ReductionSolver::outer_solve(double eps, const CriticalPoint& seed) const {
  if (!(eps >= 0.0) || eps > config_.eps0) {
    std::ostringstream os;
    os << "solve: eps = " << eps << " is outside [0, eps0 = " << config_.eps0 << "]";
    throw ValidationError(os.str());
  }
  if (seed.classification == Classification::Degenerate)
    throw ValidationError("solve: the seed critical point is degenerate");
  const HalfPlanePoint p0 = seed.location;
  if (!(p0.mu > 0.0)) throw ValidationError("solve: seed needs mu > 0");
  if (!(config_.x_max >= 50.0 * p0.mu)) throw ValidationError("solve: need x_max >= 50 mu");

  SolveReport rep;
  rep.profile = ev_.profile().name();
  rep.eps = eps;
  rep.seed = p0;
  rep.span = std::asinh(config_.x_max / p0.mu);
  rep.grid_n = config_.n;
  rep.x_max = config_.x_max;
  rep.sigma = config_.sigma;
  rep.rbar = config_.rbar;
  const auto op = unit(rep.span);
  rep.kernel_defect = op->kernel_defect();

  // The proof confines the fixed point to a ball of radius sqrt(eps); a small
  // floor lets eps = 0 polish a seed that is only converged to Newton tolerance.
  const double radius = std::max(std::sqrt(eps), 1e-6);
  Mat2 J = ev_.hess(p0);
  HalfPlanePoint p = p0, p_prev{};
  Vec2 rg_prev{};
  for (int it = 0;; ++it) {
    const ProjectedSystem system(op, {p.mu, p.xi}, CutoffSpec{config_.rbar}, config_.sigma);
    const auto cres = contraction_solve(system, ev_.profile(), eps, config_);
    const Vec2 rg = reduced_gradient(system, ev_, eps, cres.solve);
    if (it > 0) {
      // Broyden update of the Jacobian from the last secant pair.
      const double dx = p.xi - p_prev.xi, dm = p.mu - p_prev.mu;
      const double nn = dx * dx + dm * dm;
      if (nn > 0.0) {
        const double y0 = rg[0] - rg_prev[0] - (J[0][0] * dx + J[0][1] * dm);
        const double y1 = rg[1] - rg_prev[1] - (J[1][0] * dx + J[1][1] * dm);
        J[0][0] += y0 * dx / nn;
        J[0][1] += y0 * dm / nn;
        J[1][0] += y1 * dx / nn;
        J[1][1] += y1 * dm / nn;
      }
    }
    if (std::hypot(rg[0], rg[1]) < config_.outer_tol) {
      rep.xi_eps = p.xi;
      rep.mu_eps = p.mu;
      rep.phi = cres.solve.phi;
      rep.d0 = cres.solve.d0;
      rep.d1 = cres.solve.d1;
      rep.reduced_gradient = rg;
      rep.grad_gamma = ev_.grad(p);
      rep.phi_sup = sup_abs(rep.phi.values);
      rep.outer_iters = it;
      rep.inner_iters = cres.iterations;
      break;
    }
    if (it >= config_.outer_max) {
      std::ostringstream os;
      os << "solve: reduced gradient still " << std::hypot(rg[0], rg[1]) << " after "
         << config_.outer_max << " outer steps";
      throw ConvergenceError(os.str());
    }
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0) throw DegenerateStepError("solve: outer Jacobian became singular");
    p_prev = p;
    rg_prev = rg;
    p.xi -= (J[1][1] * rg[0] - J[0][1] * rg[1]) / det;
    p.mu -= (-J[1][0] * rg[0] + J[0][0] * rg[1]) / det;
    if (!(std::hypot(p.xi - p0.xi, p.mu - p0.mu) <= radius) || !(p.mu > 0.0)) {
      std::ostringstream os;
      os << "solve: outer iterate left the sqrt(eps) ball around the seed (" << p0.xi << ", "
         << p0.mu << "); the seed may be degenerate";
      throw ConvergenceError(os.str());
    }
  }
  const auto cert = residual_certificate(rep, ev_.profile());
  rep.pde_residual = cert.residual;
  rep.residual_floor = cert.floor;
  rep.ansatz_residual = cert.ansatz_residual;
  rep.certified = cert.certified;
  if (!rep.certified) rep.note = "residual above ten times the discretisation floor";
  return rep;
}

}  // namespace liouville
