#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liouville {

enum class ProfileKind { ClosedForm, DiskPullback, Sampled };

std::string to_string(ProfileKind kind);

/// Value and first two derivatives of a profile at one point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Boundary curvature profile kappa on the real line.
///
/// Immutable after construction; copies share the underlying callables, and
/// evaluation is reentrant.
class KappaProfile {
 public:
  using ValueFn = std::function<double(double)>;
  using JetFn = std::function<Jet(double)>;

  KappaProfile(std::string name, ProfileKind kind, ValueFn value, JetFn jet,
               double beta = 0.5);

  double operator()(double x) const { return value_(x); }
  double value(double x) const { return value_(x); }
  double deriv1(double x) const { return jet_(x).d1; }
  double deriv2(double x) const { return jet_(x).d2; }
  Jet jet(double x) const { return jet_(x); }

  /// Decay exponent of the weighted C^2 norm.
  double beta() const { return beta_; }
  ProfileKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  ProfileKind kind_;
  ValueFn value_;
  JetFn jet_;
  double beta_;
};

/// Sampling of the real line used by sup-type norms: nodes x = sinh(s) with s
/// uniform on [-asinh(x_max), asinh(x_max)]. Doubling `intervals` nests grids.
struct SamplingSpec {
  double x_max = 1e3;
  std::size_t intervals = 16384;
};

struct WeightedC2Norm {
  double value = 0.0;  ///< sum of the three sup terms
  double sup_value = 0.0;
  double sup_weighted_d1 = 0.0;
  double sup_d2 = 0.0;
  /// False when the weighted derivative term keeps growing with the sampling
  /// range, i.e. the profile is not in the weighted space.
  bool bounded = true;
};

/// sup|k| + sup (1 + |x|^{2+beta}) |k'| + sup |k''| over the sampling.
/// Throws NumericalError naming x on a non-finite evaluation.
WeightedC2Norm weighted_c2_norm(const KappaProfile& profile,
                                const SamplingSpec& sampling = {});

/// inf and sup of the profile over the sampling (used by maximum-principle
/// checks).
std::pair<double, double> profile_range(const KappaProfile& profile,
                                        const SamplingSpec& sampling = {});

enum class Verdict { Pass, Fail, Inconclusive, NotApplicable };
std::string to_string(Verdict v);

/// A stationary point of kappa together with the data the degree counts use.
struct KappaCriticalPoint {
  double x = 0.0;
  double d2 = 0.0;
  double half_laplacian = 0.0;
  double half_laplacian_error = 0.0;
  bool is_max() const { return d2 < 0.0; }
};

/// Roots of kappa' in [-radius, radius] located from sign changes on a
/// uniform sampling and polished with a bracketing solver. Half-Laplacian
/// values are filled in.
std::vector<KappaCriticalPoint> kappa_critical_points(const KappaProfile& profile,
                                                      double radius,
                                                      std::size_t samples = 20000);

struct HypothesisReport {
  WeightedC2Norm norm;
  /// kappa in C^{1,alpha}: bounded with bounded kappa'' on the sampling.
  bool c1alpha_ok = false;

  Verdict decay_sign = Verdict::Inconclusive;  ///< x k'(x) < 0 for |x| > R0
  std::optional<double> r0;

  Verdict integral_sign = Verdict::Inconclusive;  ///< int k'(x) x dx < 0
  double integral_xkprime = 0.0;
  double integral_error = 0.0;

  Verdict morse = Verdict::Inconclusive;  ///< k''!=0 and (-D)^{1/2}k != 0 at k'=0
  std::vector<KappaCriticalPoint> critical_points;
  std::vector<double> morse_violations;
};

struct HypothesisOptions {
  double search_x_max = 1e4;
  double integral_tol = 1e-10;
  double degeneracy_tol = 1e-8;
};

HypothesisReport validate_hypotheses(const KappaProfile& profile,
                                     const HypothesisOptions& options = {});

/// kappa + 2 eps_j / (1 + x^2). eps_j == 0 returns the profile unchanged.
KappaProfile perturb_nondegenerate(const KappaProfile& profile, double eps_j);

/// Catalog lookup. Keys: "k1", "k2", "kNa:N=<int>,a=<float>",
/// "disk-poly:name=g1|g2|g3", "const:<c>", "lorentz".
KappaProfile builtin(std::string_view key);

/// Keys with a one-line description, for `catalog`.
std::vector<std::pair<std::string, std::string>> catalog_entries();

/// Natural cubic spline through (x, k) with the decay model c/(1+x^2) beyond
/// the sample range. x must be strictly increasing.
KappaProfile make_sampled_profile(std::string name, std::vector<double> x,
                                  std::vector<double> k, double beta = 0.5);

/// Two-column CSV (x, kappa(x)); an optional non-numeric header row is skipped.
KappaProfile load_profile_csv(const std::string& path, double beta = 0.5);

/// Parses "name:k1=v1,k2=v2" into a name and parameter map.
struct CatalogKey {
  std::string name;
  std::map<std::string, std::string> params;
};
CatalogKey parse_catalog_key(std::string_view key);

}  // namespace liouville
