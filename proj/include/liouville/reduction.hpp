#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liouville/bubbles.hpp"
#include "liouville/critical.hpp"
#include "liouville/extension.hpp"
#include "liouville/halflap.hpp"

namespace liouville {

/// Nodes x_j = xi + mu sinh(s_j), s_j uniform on [-S, S]. Weights integrate
/// in x (Gregory in s times dx/ds). Beyond the last node fields are modelled
/// as constant plus a 1/|x - xi| correction.
struct Grid {
  BubbleParams params;
  double span = 0.0;  ///< S
  std::vector<double> s, y, x, weights;
  TailModel tail;

  std::size_t size() const { return x.size(); }
  /// Outermost |x - xi|.
  double reach() const { return params.mu * y.back(); }
};

/// Grid reaching |x - xi| = x_max. Needs x_max >= 50 mu and 8 <= n <= 4000.
Grid build_grid(const BubbleParams& p, double x_max, std::size_t n);
/// Same layout in s (same S and n), re-centred and re-scaled to p.
Grid build_grid_span(const BubbleParams& p, double span, std::size_t n);

/// Weights for int f over the real line when f decays like |x - xi|^{-power}
/// beyond the grid (the two end weights absorb the tail). power > 1.
std::vector<double> moment_weights(const Grid& g, double power);

/// int e^U: grid sum plus the exact tail.
double bubble_mass(const Grid& g);

struct SolverConfig {
  std::size_t n = 1200;
  double x_max = 1e3;
  double sigma = 0.5;
  double eps0 = 0.05;
  double rbar = 2.0;
  double inner_tol = 1e-10;
  int inner_max = 60;
  double outer_tol = 1e-10;
  int outer_max = 30;
  /// Rank-two fix making the discrete operator annihilate the kernel moments
  /// exactly, so the multipliers match the quadrature moments.
  bool kernel_correction = true;
};

void validate(const SolverConfig& c);

/// Everything that depends only on (S, n): in the unit variable y = (x-xi)/mu
/// the linearised operator is (H - 2/(1+y^2)) / mu for every bubble.
class UnitOperator {
 public:
  UnitOperator(double span, std::size_t n, bool kernel_correction = true);

  double span() const { return span_; }
  std::size_t size() const { return y_.size(); }
  const std::vector<double>& s() const { return s_; }
  const std::vector<double>& y() const { return y_; }
  /// dy-weights (no tail).
  const std::vector<double>& weights() const { return wy_; }
  const HalfLaplacianOperator& half_laplacian() const { return *H_; }
  /// Linearised operator, corrected if requested.
  const Eigen::MatrixXd& matrix() const { return K_; }
  /// Weighted sup (sigma = 1/2) of L z_i over sup |z_i|, uncorrected; the
  /// operator's relative discretisation error on kernel-like functions.
  double kernel_defect() const { return defect_; }
  /// Size of the correction: max |K^T w z_i| before it was removed.
  double adjoint_defect() const { return adjoint_defect_; }

 private:
  double span_;
  std::vector<double> s_, y_, wy_;
  std::shared_ptr<HalfLaplacianOperator> H_;
  Eigen::MatrixXd K_;
  double defect_ = 0.0;
  double adjoint_defect_ = 0.0;
};

struct ProjectedSolve {
  DiscreteField phi;
  double d0 = 0.0, d1 = 0.0;
  std::array<double, 2> ortho_residuals{};
  /// Weighted norm of L phi - g - sum d_i chi Z_i with the uncorrected L.
  double linear_residual = 0.0;
};

/// The bordered system [[L, -chi Z], [w chi Z^T, 0]] for one bubble, factored
/// once and reused for any right-hand side.
class ProjectedSystem {
 public:
  ProjectedSystem(std::shared_ptr<const UnitOperator> op, const BubbleParams& p,
                  const CutoffSpec& cutoff = {}, double sigma = 0.5);

  const Grid& grid() const { return grid_; }
  const BubbleParams& params() const { return grid_.params; }
  const UnitOperator& unit() const { return *op_; }
  const std::vector<double>& eu() const { return eu_; }
  const std::vector<double>& z0() const { return z0_; }
  const std::vector<double>& z1() const { return z1_; }
  const std::vector<double>& chi() const { return chi_; }
  double sigma() const { return sigma_; }

  /// L phi = g + d0 chi Z0 + d1 chi Z1, int phi chi Z_i = 0. Throws
  /// NumericalError when the system is singular.
  ProjectedSolve solve(const std::vector<double>& g) const;

  /// int f Z_i with a tail decaying like the kernel element times 1/r^2.
  double moment(const std::vector<double>& f, int i) const;

 private:
  std::shared_ptr<const UnitOperator> op_;
  Grid grid_;
  double sigma_;
  std::vector<double> eu_, z0_, z1_, chi_, m0_, m1_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

ProjectedSolve solve_projected_linear(const ProjectedSystem& system, const std::vector<double>& g);

struct ContractionResult {
  ProjectedSolve solve;
  int iterations = 0;
  std::vector<double> increments;  ///< sup |phi_{k+1} - phi_k|
};

/// phi = T(phi) with T = L^{-1}(-E + N(phi)), from phi = 0. Throws
/// ValidationError for eps > eps0 and EpsTooLargeError when the increments
/// grow three times in a row.
ContractionResult contraction_solve(const ProjectedSystem& system, const KappaProfile& profile,
                                    double eps, const SolverConfig& config = {});

/// grad Gamma + (1/(2 pi eps)) (int N Z1, int N Z0), ordered (d/dxi, d/dmu).
/// Vanishes exactly when both multipliers do.
Vec2 reduced_gradient(const ProjectedSystem& system, const ExtensionEvaluator& ev, double eps,
                      const ProjectedSolve& solve);

struct Certificate {
  double residual = 0.0;  ///< weighted sup of the PDE residual on the fine grid
  double floor = 0.0;
  double ansatz_residual = 0.0;  ///< same norm with phi = 0 (u = U alone)
  std::size_t fine_n = 0;
  bool certified = false;
};

struct SolveReport {
  std::string profile;
  double eps = 0.0;
  HalfPlanePoint seed;
  double xi_eps = 0.0, mu_eps = 0.0;
  double span = 0.0;
  std::size_t grid_n = 0;
  double x_max = 0.0;
  double sigma = 0.5;
  double rbar = 2.0;
  DiscreteField phi;
  double d0 = 0.0, d1 = 0.0;
  Vec2 reduced_gradient{};
  Vec2 grad_gamma{};
  double phi_sup = 0.0;
  double pde_residual = 0.0;
  double residual_floor = 0.0;
  double ansatz_residual = 0.0;
  bool certified = false;
  int outer_iters = 0;
  int inner_iters = 0;  ///< contraction steps in the final solve
  double kernel_defect = 0.0;
  std::string note;
};

/// PDE residual of u = U + phi on a fresh grid with fine_n nodes over the same
/// span; phi is carried over by cubic interpolation in s.
Certificate residual_certificate(const SolveReport& report, const KappaProfile& profile,
                                 std::size_t fine_n = 0);

/// (-D)^{1/2}u - (1 + eps k) e^u at the solve-grid nodes (uncorrected operator).
std::vector<double> nodal_residual(const SolveReport& report, const KappaProfile& profile);

/// Drives the reduction for one profile. Unit operators are cached per
/// (S, n), so seeds with the same mu share assembly work.
class ReductionSolver {
 public:
  explicit ReductionSolver(KappaProfile profile, SolverConfig config = {},
                           ExtensionQuadSpec quad = {});

  const SolverConfig& config() const { return config_; }
  const ExtensionEvaluator& extension() const { return ev_; }

  std::shared_ptr<const UnitOperator> unit(double span) const;

  /// Newton-Broyden on the reduced gradient, started from the seed with
  /// Jacobian D^2 Gamma(seed). The iterate must stay within sqrt(eps) of the
  /// seed (ConvergenceError otherwise). The result is certified on a grid
  /// with twice the nodes.
  SolveReport outer_solve(double eps, const CriticalPoint& seed) const;

 private:
  ExtensionEvaluator ev_;
  SolverConfig config_;
  mutable std::map<std::pair<double, std::size_t>, std::shared_ptr<const UnitOperator>> cache_;
};

}  // namespace liouville
