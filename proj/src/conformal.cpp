#include "liouville/conformal.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "liouville/errors.hpp"

namespace liouville {

DiskPoint psi_map(HalfPlanePoint p) {
  const double den = p.xi * p.xi + (p.mu + 1.0) * (p.mu + 1.0);
  return {2.0 * p.xi / den, (p.xi * p.xi + p.mu * p.mu - 1.0) / den};
}

HalfPlanePoint phi_map(DiskPoint p) {
  const double den = p.x * p.x + (p.y - 1.0) * (p.y - 1.0);
  if (den == 0.0) throw DomainError("phi_map: e2 = (0, 1) has no image");
  return {2.0 * p.x / den, (1.0 - p.x * p.x - p.y * p.y) / den};
}

DiskHarmonic::DiskHarmonic(std::string name,
                           std::vector<std::complex<double>> coefficients)
    : name_(std::move(name)), c_(std::move(coefficients)) {
  if (c_.empty()) c_.push_back(0.0);
}

namespace {

// f, f', f'' by Horner.
std::array<std::complex<double>, 3> eval_poly(
    const std::vector<std::complex<double>>& c, std::complex<double> z) {
  std::complex<double> f = 0.0, df = 0.0, d2f = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    d2f = d2f * z + 2.0 * df;
    df = df * z + f;
    f = f * z + *it;
  }
  return {f, df, d2f};
}

}  // namespace

double DiskHarmonic::value(DiskPoint p) const {
  return eval_poly(c_, {p.x, p.y})[0].real();
}

Vec2 DiskHarmonic::gradient(DiskPoint p) const {
  const auto d = eval_poly(c_, {p.x, p.y})[1];
  return {d.real(), -d.imag()};
}

Mat2 DiskHarmonic::hessian(DiskPoint p) const {
  const auto d2 = eval_poly(c_, {p.x, p.y})[2];
  return {{{d2.real(), -d2.imag()}, {-d2.imag(), -d2.real()}}};
}

std::vector<DiskPoint> DiskHarmonic::critical_points() const {
  // Roots of f' via the companion matrix.
  std::vector<std::complex<double>> d;
  for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(double(k) * c_[k]);
  while (!d.empty() && std::abs(d.back()) == 0.0) d.pop_back();
  std::vector<DiskPoint> out;
  if (d.size() < 2) return out;
  const auto deg = static_cast<Eigen::Index>(d.size() - 1);
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -d[i] / d.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  for (Eigen::Index i = 0; i < deg; ++i) {
    const auto z = es.eigenvalues()(i);
    if (std::abs(z) < 1.0) out.push_back({z.real(), z.imag()});
  }
  return out;
}

DiskHarmonic disk_harmonic(std::string_view name,
                           const std::map<std::string, double>& params) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  auto param = [&](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end())
      throw ValidationError("disk_harmonic " + std::string(name) +
                            ": missing parameter " + key);
    return it->second;
  };
  if (name == "g1") return DiskHarmonic("g1", {1.0, 0.0, 1.0});
  if (name == "g2") return DiskHarmonic("g2", {10.0, 3.0 * i, 1.0, -4.0 * i, -2.0});
  if (name == "g3") return DiskHarmonic("g3", {0.0, -2.0, 0.0, 1.0 / 3.0});
  if (name == "const") return DiskHarmonic("const", {param("c")});
  if (name == "kNa-ext") {
    const double n_real = param("N");
    const double a = param("a");
    const int n = static_cast<int>(std::lround(n_real));
    if (n < 1 || n != n_real) throw ValidationError("kNa-ext: N must be a positive integer");
    if (!(a >= 0.0)) throw ValidationError("kNa-ext: a must be nonnegative");
    // 1/(N+1) + a - (-i z)^{N+1}/(N+1) + a i z
    std::vector<C> c(n + 2, 0.0);
    c[0] = 1.0 / (n + 1) + a;
    c[1] = a * i;
    c[n + 1] = -std::pow(-i, n + 1) / double(n + 1);
    return DiskHarmonic("kNa-ext", std::move(c));
  }
  throw ValidationError("disk_harmonic: unknown name '" + std::string(name) + "'");
}

BoundaryChart boundary_chart(double xi) {
  const double q = 1.0 + xi * xi;
  BoundaryChart c;
  c.p = {2.0 * xi / q, (xi * xi - 1.0) / q};
  c.d1 = {2.0 * (1.0 - xi * xi) / (q * q), 4.0 * xi / (q * q)};
  c.d2 = {4.0 * xi * (xi * xi - 3.0) / (q * q * q),
          4.0 * (1.0 - 3.0 * xi * xi) / (q * q * q)};
  return c;
}

KappaProfile pullback_profile(const DiskHarmonic& h, double beta) {
  const double at_infinity = h.value({0.0, 1.0});
  if (!std::isfinite(at_infinity))
    throw DomainError("pullback_profile: no finite limit at e2");
  auto value = [h](double xi) {
    if (std::isinf(xi)) return h.value({0.0, 1.0});
    return h.value(boundary_chart(xi).p);
  };
  auto jet = [h](double xi) {
    const auto c = boundary_chart(xi);
    const auto g = h.gradient(c.p);
    const auto H = h.hessian(c.p);
    Jet j;
    j.value = h.value(c.p);
    j.d1 = g[0] * c.d1[0] + g[1] * c.d1[1];
    j.d2 = c.d1[0] * (H[0][0] * c.d1[0] + H[0][1] * c.d1[1]) +
           c.d1[1] * (H[1][0] * c.d1[0] + H[1][1] * c.d1[1]) +
           g[0] * c.d2[0] + g[1] * c.d2[1];
    return j;
  };
  return KappaProfile("pullback:" + h.name(), ProfileKind::DiskPullback, value, jet,
                      beta);
}

}  // namespace liouville
