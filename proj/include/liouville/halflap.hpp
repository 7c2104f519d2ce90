#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "liouville/profiles.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

/// Options for the pointwise half-Laplacian. The singular piece [0, delta] is
/// handled by a Taylor expansion, the rest by adaptive quadrature in y out to
/// 10*scale and in log y beyond.
struct PointQuadSpec {
  double tol = 1e-10;
  double delta = 1e-2;  ///< inner radius, in units of `scale`
  double scale = 1.0;   ///< local length scale of f around x
};

/// (1/pi) * int_0^inf (2f(x) - f(x+y) - f(x-y)) / y^2 dy.
/// Accepts f with at most logarithmic growth. Throws DomainError for
/// faster growth and NumericalError when f is not C^2 near x.
QuadratureResult half_laplacian_point(const std::function<double(double)>& f,
                                      double x, const PointQuadSpec& spec = {});

/// Same, using the profile's exact second derivative for the inner piece.
QuadratureResult half_laplacian_point(const KappaProfile& profile, double x,
                                      const PointQuadSpec& spec = {});

/// Far-field behaviour of a sampled function beyond the first and last node.
/// Constant: f(y) = f(end). InverseSquare: f(y) = f(end) g(y)/g(end) with
/// g = 1/(1+(y-center)^2). Logarithmic: f(y) = f(end) + log_slope *
/// (log|y-center| - log|end-center|).
enum class TailKind { None, Constant, InverseSquare, Logarithmic };

struct TailModel {
  TailKind kind = TailKind::None;
  double center = 0.0;
  double log_slope = 0.0;
};

struct DiscreteField {
  std::vector<double> x;
  std::vector<double> values;
  TailModel tail;

  std::size_t size() const { return x.size(); }
};

/// Dense matrix of the half-Laplacian on a fixed node set. Built once, then
/// read-only. For a Logarithmic tail the operator is affine:
/// H f = matrix * f + log_slope * log_column.
class HalfLaplacianOperator {
 public:
  HalfLaplacianOperator(std::vector<double> nodes, TailKind tail, double center = 0.0);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& log_column() const { return log_column_; }
  const std::vector<double>& nodes() const { return nodes_; }
  TailKind tail() const { return tail_; }
  double center() const { return center_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& values, double log_slope = 0.0) const;

 private:
  std::vector<double> nodes_;
  TailKind tail_;
  double center_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd log_column_;
};

/// Grid cap for the dense operator.
inline constexpr std::size_t kMaxGridNodes = 4000;

/// Half-Laplacian at each node. Throws ValidationError when the field has no
/// tail model.
DiscreteField half_laplacian_field(const DiscreteField& field);

enum class WeightFlavor { Power, Log };

struct WeightedNormSpec {
  double sigma = 0.5;
  double xi = 0.0;
  WeightFlavor flavor = WeightFlavor::Power;
};

/// (1+|x-xi|)^{1+sigma} for Power, 1/log(2+|x-xi|) for Log.
double norm_weight(double x, const WeightedNormSpec& spec);

/// sup over nodes of weight * |g|.
double weighted_norm(const DiscreteField& g, const WeightedNormSpec& spec);
double weighted_norm(std::span<const double> x, std::span<const double> g,
                     const WeightedNormSpec& spec);

/// sup over a sinh-graded sampling centred at spec.xi.
double weighted_norm(const std::function<double(double)>& g,
                     const WeightedNormSpec& spec, const SamplingSpec& sampling = {});

}  // namespace liouville
