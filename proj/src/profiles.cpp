#include "liouville/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "liouville/conformal.hpp"
#include "liouville/errors.hpp"
#include "liouville/halflap.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::ClosedForm: return "closed-form";
    case ProfileKind::DiskPullback: return "disk-pullback";
    case ProfileKind::Sampled: return "sampled";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

KappaProfile::KappaProfile(std::string name, ProfileKind kind, ValueFn value, JetFn jet,
                           double beta)
    : name_(std::move(name)), kind_(kind), value_(std::move(value)), jet_(std::move(jet)),
      beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ValidationError("profile beta must lie in (0, 1)");
}

namespace {

std::vector<double> sinh_nodes(double x_max, std::size_t intervals) {
  const double s_max = std::asinh(x_max);
  std::vector<double> x(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j)
    x[j] = std::sinh(-s_max + 2.0 * s_max * double(j) / double(intervals));
  return x;
}

void require_finite(const Jet& j, double x, const std::string& name) {
  if (!std::isfinite(j.value) || !std::isfinite(j.d1) || !std::isfinite(j.d2)) {
    std::ostringstream os;
    os.precision(17);
    os << "profile " << name << ": non-finite evaluation at x = " << x;
    throw NumericalError(os.str());
  }
}

WeightedC2Norm norm_on(const KappaProfile& p, const std::vector<double>& xs) {
  WeightedC2Norm n;
  const double b = p.beta();
  for (double x : xs) {
    const Jet j = p.jet(x);
    require_finite(j, x, p.name());
    n.sup_value = std::max(n.sup_value, std::abs(j.value));
    n.sup_weighted_d1 =
        std::max(n.sup_weighted_d1, (1.0 + std::pow(std::abs(x), 2.0 + b)) * std::abs(j.d1));
    n.sup_d2 = std::max(n.sup_d2, std::abs(j.d2));
  }
  n.value = n.sup_value + n.sup_weighted_d1 + n.sup_d2;
  return n;
}

}  // namespace

WeightedC2Norm weighted_c2_norm(const KappaProfile& profile, const SamplingSpec& sampling) {
  if (!(sampling.x_max > 0.0) || sampling.intervals < 2)
    throw ValidationError("weighted_c2_norm: bad sampling");
  auto n = norm_on(profile, sinh_nodes(sampling.x_max, sampling.intervals));
  // A profile in the weighted space has a sup that settles; compare against
  // a range 16x wider at the same density in s.
  const double s_ratio = std::asinh(16.0 * sampling.x_max) / std::asinh(sampling.x_max);
  const auto wide = norm_on(
      profile, sinh_nodes(16.0 * sampling.x_max,
                          std::size_t(std::ceil(double(sampling.intervals) * s_ratio))));
  n.bounded = wide.sup_weighted_d1 <= 1.01 * n.sup_weighted_d1 + 1e-300 &&
              wide.sup_value <= 1.01 * n.sup_value + 1e-300;
  return n;
}

std::pair<double, double> profile_range(const KappaProfile& profile,
                                        const SamplingSpec& sampling) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : sinh_nodes(sampling.x_max, sampling.intervals)) {
    const double v = profile(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::vector<KappaCriticalPoint> kappa_critical_points(const KappaProfile& profile,
                                                      double radius, std::size_t samples) {
  const auto xs = sinh_nodes(radius, samples);
  std::vector<double> d1(xs.size());
  double scale = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    d1[j] = profile.deriv1(xs[j]);
    scale = std::max(scale, std::abs(d1[j]));
  }
  std::vector<KappaCriticalPoint> out;
  if (scale == 0.0) return out;  // constant: no isolated critical points

  auto add = [&](double x) {
    KappaCriticalPoint c;
    c.x = x;
    c.d2 = profile.deriv2(x);
    const auto h = half_laplacian_point(profile, x);
    c.half_laplacian = h.value;
    c.half_laplacian_error = h.error;
    out.push_back(c);
  };
  auto f = [&](double x) { return profile.deriv1(x); };
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
    if (d1[j] == 0.0) {
      add(xs[j]);
      continue;
    }
    if (d1[j + 1] == 0.0 || (d1[j] > 0.0) == (d1[j + 1] > 0.0)) continue;
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a)); };
    const auto r = boost::math::tools::toms748_solve(f, xs[j], xs[j + 1], d1[j], d1[j + 1],
                                                     tol, iters);
    const double x = 0.5 * (r.first + r.second);
    add(x);
  }
  if (d1.back() == 0.0) add(xs.back());
  return out;
}

namespace {

// Largest |x| in the sampled range where x k'(x) >= 0, refined by bisection.
std::optional<double> find_r0(const KappaProfile& p, double x_max, bool& hit_edge) {
  const auto xs = sinh_nodes(x_max, 40000);
  auto g = [&](double x) { return x * p.deriv1(x); };
  hit_edge = false;
  double r0 = 0.0;
  // Right half: scan inward from the edge.
  auto side = [&](int sgn) {
    const std::size_t mid = xs.size() / 2;
    std::size_t last = mid;
    for (std::size_t k = 0; k <= mid; ++k) {
      const std::size_t j = sgn > 0 ? xs.size() - 1 - k : k;
      if (g(xs[j]) >= 0.0) {
        last = j;
        break;
      }
    }
    if (last == (sgn > 0 ? xs.size() - 1 : 0)) {
      hit_edge = true;
      return std::abs(xs[last]);
    }
    const std::size_t next = sgn > 0 ? last + 1 : last - 1;
    double a = xs[last], b = xs[next];  // g(a) >= 0 > g(b)
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      (g(m) >= 0.0 ? a : b) = m;
    }
    return std::abs(a);
  };
  r0 = std::max(side(+1), side(-1));
  return r0;
}

}  // namespace

HypothesisReport validate_hypotheses(const KappaProfile& profile,
                                     const HypothesisOptions& options) {
  HypothesisReport rep;
  rep.norm = weighted_c2_norm(profile);
  rep.c1alpha_ok = rep.norm.bounded && std::isfinite(rep.norm.sup_d2);

  bool hit_edge = false;
  const auto r0 = find_r0(profile, options.search_x_max, hit_edge);
  if (hit_edge) {
    rep.decay_sign = Verdict::Fail;
  } else {
    rep.decay_sign = Verdict::Pass;
    rep.r0 = r0;
  }

  // int x k'(x) dx in the variable x = sinh(s); the weighted norm bounds the
  // tail beyond |x| = X by 2 W X^{-beta} / beta.
  const double big_x = 1e30;
  const double s_max = std::asinh(big_x);
  auto integrand = [&](double s) {
    const double x = std::sinh(s);
    return x * profile.deriv1(x) * std::cosh(s);
  };
  const auto q = integrate_adaptive(integrand, -s_max, s_max, options.integral_tol);
  const double tail =
      2.0 * rep.norm.sup_weighted_d1 * std::pow(big_x, -profile.beta()) / profile.beta();
  rep.integral_xkprime = q.value;
  rep.integral_error = q.error + tail;
  if (rep.integral_xkprime < -10.0 * rep.integral_error) {
    rep.integral_sign = Verdict::Pass;
  } else if (rep.integral_xkprime > 10.0 * rep.integral_error) {
    rep.integral_sign = Verdict::Fail;
  } else {
    const bool flat = rep.norm.sup_weighted_d1 == 0.0;
    rep.integral_sign = flat ? Verdict::Fail : Verdict::Inconclusive;
  }

  if (rep.norm.sup_weighted_d1 == 0.0) {
    // Every point is critical and degenerate.
    rep.morse = Verdict::Fail;
    rep.morse_violations.push_back(0.0);
    return rep;
  }
  const double search = rep.r0 ? std::max(2.0 * *rep.r0, 10.0) : options.search_x_max;
  rep.critical_points = kappa_critical_points(profile, search);
  bool unsure = false;
  for (const auto& c : rep.critical_points) {
    const bool flat2 = std::abs(c.d2) <= options.degeneracy_tol * std::max(1.0, rep.norm.sup_d2);
    const bool flat_h = std::abs(c.half_laplacian) <= options.degeneracy_tol;
    if (flat2 || flat_h) {
      rep.morse_violations.push_back(c.x);
    } else if (std::abs(c.half_laplacian) <= 10.0 * c.half_laplacian_error) {
      unsure = true;
    }
  }
  rep.morse = !rep.morse_violations.empty() ? Verdict::Fail
              : unsure                      ? Verdict::Inconclusive
                                            : Verdict::Pass;
  return rep;
}

KappaProfile perturb_nondegenerate(const KappaProfile& profile, double eps_j) {
  if (!(eps_j >= 0.0)) throw ValidationError("perturb_nondegenerate: eps_j must be >= 0");
  if (eps_j == 0.0) return profile;
  auto value = [profile, eps_j](double x) { return profile(x) + 2.0 * eps_j / (1.0 + x * x); };
  auto jet = [profile, eps_j](double x) {
    Jet j = profile.jet(x);
    const double q = 1.0 + x * x;
    j.value += 2.0 * eps_j / q;
    j.d1 += -4.0 * eps_j * x / (q * q);
    j.d2 += 4.0 * eps_j * (3.0 * x * x - 1.0) / (q * q * q);
    return j;
  };
  std::ostringstream name;
  name << profile.name() << "+perturb(" << eps_j << ")";
  return KappaProfile(name.str(), profile.kind(), value, jet, profile.beta());
}

// --- catalog ---------------------------------------------------------------

CatalogKey parse_catalog_key(std::string_view key) {
  CatalogKey out;
  const auto colon = key.find(':');
  out.name = std::string(key.substr(0, colon));
  if (colon == std::string_view::npos) return out;
  std::string_view rest = key.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      out.params.emplace("", std::string(item));
    else
      out.params.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

namespace {

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
    throw ValidationError("catalog: bad value for " + what + ": '" + s + "'");
  return v;
}

const std::string& need(const CatalogKey& k, const std::string& p) {
  auto it = k.params.find(p);
  if (it == k.params.end())
    throw ValidationError("catalog: " + k.name + " needs parameter " + p);
  return it->second;
}

KappaProfile closed_form(std::string name, KappaProfile::ValueFn v, KappaProfile::JetFn j) {
  return KappaProfile(std::move(name), ProfileKind::ClosedForm, std::move(v), std::move(j));
}

KappaProfile k1() {
  auto v = [](double x) {
    const double q = 1.0 + x * x;
    return 8.0 * x * x / (q * q);
  };
  auto j = [v](double x) {
    const double x2 = x * x, q = 1.0 + x2;
    return Jet{v(x), -16.0 * x * (x2 - 1.0) / (q * q * q),
               16.0 * (3.0 * x2 * x2 - 8.0 * x2 + 1.0) / (q * q * q * q)};
  };
  return closed_form("k1", v, j);
}

KappaProfile k2() {
  auto v = [](double x) {
    const double x2 = x * x, q = 1.0 + x2;
    const double q2 = q * q;
    return 2.0 * (((75.0 * x2 - 35.0) * x2 + 25.0) * x2 + 7.0) / (q2 * q2);
  };
  auto j = [v](double x) {
    const double x2 = x * x, q = 1.0 + x2;
    const double q2 = q * q, q4 = q2 * q2;
    const double d1 = -4.0 * x * (5.0 * x2 - 3.0) * ((15.0 * x2 - 50.0) * x2 - 1.0) / (q4 * q);
    const double d2 =
        4.0 * ((((225.0 * x2 - 2000.0) * x2 + 2490.0) * x2 - 408.0) * x2 - 3.0) / (q4 * q2);
    return Jet{v(x), d1, d2};
  };
  return closed_form("k2", v, j);
}

KappaProfile constant(double c) {
  std::ostringstream name;
  name.precision(17);
  name << "const:" << c;
  return closed_form(name.str(), [c](double) { return c; },
                     [c](double) { return Jet{c, 0.0, 0.0}; });
}

KappaProfile lorentz() {
  auto v = [](double x) { return 1.0 / (1.0 + x * x); };
  auto j = [](double x) {
    const double q = 1.0 + x * x;
    return Jet{1.0 / q, -2.0 * x / (q * q), (6.0 * x * x - 2.0) / (q * q * q)};
  };
  return closed_form("lorentz", v, j);
}

}  // namespace

KappaProfile builtin(std::string_view key) {
  const auto k = parse_catalog_key(key);
  if (k.name == "k1") return k1();
  if (k.name == "k2") return k2();
  if (k.name == "lorentz") return lorentz();
  if (k.name == "const") {
    auto it = k.params.find("c");
    if (it == k.params.end()) it = k.params.find("");
    if (it == k.params.end()) throw ValidationError("catalog: const needs a value");
    return constant(to_double(it->second, "c"));
  }
  if (k.name == "kNa") {
    const double n = to_double(need(k, "N"), "N");
    const double a = to_double(need(k, "a"), "a");
    if (n < 1 || n != std::floor(n) || n > 64)
      throw ValidationError("catalog: kNa needs a positive integer N");
    if (a < 0.0) throw ValidationError("catalog: kNa needs a >= 0");
    auto p = pullback_profile(disk_harmonic("kNa-ext", {{"N", n}, {"a", a}}));
    std::ostringstream name;
    name << "kNa:N=" << int(n) << ",a=" << need(k, "a");
    return KappaProfile(name.str(), p.kind(), [p](double x) { return p(x); },
                        [p](double x) { return p.jet(x); }, p.beta());
  }
  if (k.name == "disk-poly") {
    const auto& g = need(k, "name");
    if (g != "g1" && g != "g2" && g != "g3")
      throw ValidationError("catalog: disk-poly name must be g1, g2 or g3");
    auto p = pullback_profile(disk_harmonic(g));
    return KappaProfile("disk-poly:name=" + g, p.kind(), [p](double x) { return p(x); },
                        [p](double x) { return p.jet(x); }, p.beta());
  }
  if (k.name == "csv") return load_profile_csv(need(k, "path"));
  throw ValidationError("catalog: unknown profile '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> catalog_entries() {
  return {
      {"k1", "8x^2/(1+x^2)^2, boundary trace of x^2-y^2+1 on the disk"},
      {"k2", "2(75x^6-35x^4+25x^2+7)/(1+x^2)^4, trace of the quartic g2"},
      {"kNa:N=<int>,a=<float>", "trace of the disk harmonic whose circle values are k_{N,a}"},
      {"disk-poly:name=g1|g2|g3", "trace of a named harmonic polynomial on the disk"},
      {"const:<c>", "constant profile"},
      {"lorentz", "1/(1+x^2)"},
      {"csv:path=<file>", "sampled profile, two columns x,kappa"},
  };
}

// --- sampled profiles --------------------------------------------------------

namespace {

struct Spline {
  std::vector<double> x, y, m;  // m = second derivatives at nodes
  double c_left = 0.0, c_right = 0.0;

  std::size_t cell(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t k = it == x.begin() ? 0 : std::size_t(it - x.begin()) - 1;
    return std::min(k, x.size() - 2);
  }

  Jet jet(double t) const {
    if (t < x.front() || t > x.back()) {
      const double c = t < x.front() ? c_left : c_right;
      const double q = 1.0 + t * t;
      return {c / q, -2.0 * c * t / (q * q), c * (6.0 * t * t - 2.0) / (q * q * q)};
    }
    const std::size_t k = cell(t);
    const double h = x[k + 1] - x[k];
    const double a = (x[k + 1] - t) / h, b = (t - x[k]) / h;
    Jet j;
    j.value = a * y[k] + b * y[k + 1] + ((a * a * a - a) * m[k] + (b * b * b - b) * m[k + 1]) * h * h / 6.0;
    j.d1 = (y[k + 1] - y[k]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m[k] +
           (3.0 * b * b - 1.0) / 6.0 * h * m[k + 1];
    j.d2 = a * m[k] + b * m[k + 1];
    return j;
  }
};

}  // namespace

KappaProfile make_sampled_profile(std::string name, std::vector<double> x,
                                  std::vector<double> k, double beta) {
  if (x.size() != k.size() || x.size() < 4)
    throw ValidationError("sampled profile: need at least 4 (x, kappa) pairs");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j]) || !std::isfinite(k[j]))
      throw ValidationError("sampled profile: non-finite sample");
    if (j > 0 && !(x[j] > x[j - 1]))
      throw ValidationError("sampled profile: x must be strictly increasing");
  }
  auto s = std::make_shared<Spline>();
  const std::size_t n = x.size();
  s->m.assign(n, 0.0);
  // Natural spline: tridiagonal solve for interior second derivatives.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    const double diag = (hl + hr) / 3.0 - hl / 6.0 * c[i - 1];
    c[i] = hr / 6.0 / diag;
    const double rhs = (k[i + 1] - k[i]) / hr - (k[i] - k[i - 1]) / hl;
    d[i] = (rhs - hl / 6.0 * d[i - 1]) / diag;
  }
  for (std::size_t i = n - 2; i >= 1; --i) s->m[i] = d[i] - c[i] * s->m[i + 1];
  s->c_left = k.front() * (1.0 + x.front() * x.front());
  s->c_right = k.back() * (1.0 + x.back() * x.back());
  s->x = std::move(x);
  s->y = std::move(k);
  return KappaProfile(std::move(name), ProfileKind::Sampled,
                      [s](double t) { return s->jet(t).value; },
                      [s](double t) { return s->jet(t); }, beta);
}

KappaProfile load_profile_csv(const std::string& path, double beta) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open profile file " + path);
  std::vector<double> xs, ks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected two columns");
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    const std::string a = trim(line.substr(0, comma)), b = trim(line.substr(comma + 1));
    double xv = 0.0, kv = 0.0;
    const auto ra = std::from_chars(a.data(), a.data() + a.size(), xv);
    const auto rb = std::from_chars(b.data(), b.data() + b.size(), kv);
    const bool ok = ra.ec == std::errc() && rb.ec == std::errc() &&
                    ra.ptr == a.data() + a.size() && rb.ptr == b.data() + b.size();
    if (!ok) {
      if (xs.empty()) continue;  // header
      throw ValidationError(path + ":" + std::to_string(lineno) + ": not a number");
    }
    xs.push_back(xv);
    ks.push_back(kv);
  }
  return make_sampled_profile("csv:path=" + path, std::move(xs), std::move(ks), beta);
}

}  // namespace liouville
