#include "liouville/report_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

// JSON has no inf/nan; they become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json pair(const Vec2& v) { return Json::array({num(v[0]), num(v[1])}); }

Json matrix(const Mat2& m) { return Json::array({pair(m[0]), pair(m[1])}); }

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("report: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("report: field '") + key + "' has the wrong type");
  }
}

std::string tail_name(TailKind k) {
  switch (k) {
    case TailKind::None: return "none";
    case TailKind::Constant: return "constant";
    case TailKind::InverseSquare: return "inverse-square";
    case TailKind::Logarithmic: return "logarithmic";
  }
  return "none";
}

TailKind tail_kind(const std::string& s) {
  if (s == "none") return TailKind::None;
  if (s == "constant") return TailKind::Constant;
  if (s == "inverse-square") return TailKind::InverseSquare;
  if (s == "logarithmic") return TailKind::Logarithmic;
  throw ValidationError("report: unknown tail model '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

Json to_json(const HalfPlanePoint& p) { return Json{{"xi", num(p.xi)}, {"mu", num(p.mu)}}; }

Json to_json(const CriticalPoint& c) {
  Json j;
  j["xi"] = num(c.location.xi);
  j["mu"] = num(c.location.mu);
  j["classification"] = to_string(c.classification);
  j["index"] = c.index;
  j["gradient_norm"] = num(c.gradient_norm);
  j["hessian"] = matrix(c.hessian);
  j["det"] = num(c.det);
  j["iterations"] = c.iterations;
  return j;
}

Json to_json(const KappaCriticalPoint& c) {
  Json j;
  j["x"] = num(c.x);
  j["type"] = c.is_max() ? "max" : "min";
  j["kappa_dd"] = num(c.d2);
  j["half_laplacian"] = num(c.half_laplacian);
  j["half_laplacian_error"] = num(c.half_laplacian_error);
  return j;
}

Json to_json(const DegreeReport& r) {
  Json j;
  j["R"] = num(r.R);
  j["degree"] = r.degree;
  j["M_plus"] = r.M_plus;
  j["m_plus"] = r.m_plus;
  j["formula_rhs"] = r.formula_rhs;
  j["borderline_max"] = r.borderline_max;
  j["borderline_min"] = r.borderline_min;
  j["formula_range"] = Json::array({r.formula_lo, r.formula_hi});
  j["verdict"] = to_string(r.verdict);
  j["exact_count"] = to_string(exact_count_check(r));
  j["index_sum"] = r.index_sum;
  j["contour_certified"] = r.contour_certified;
  j["kappa_counts_reliable"] = r.kappa_counts_reliable;
  j["points"] = Json::array();
  for (const auto& c : r.critical_points) j["points"].push_back(to_json(c));
  j["kappa_points"] = Json::array();
  for (const auto& c : r.kappa_points) j["kappa_points"].push_back(to_json(c));
  j["note"] = r.note;
  return j;
}

Json to_json(const AsymptoticFit& f) {
  Json j;
  j["saturated"] = f.saturated;
  j["slope"] = num(f.slope);
  j["half_laplacian"] = num(f.half_laplacian);
  j["floor"] = num(f.floor);
  j["mu"] = Json::array();
  j["remainder"] = Json::array();
  for (double m : f.mu) j["mu"].push_back(num(m));
  for (double r : f.remainder) j["remainder"].push_back(num(r));
  return j;
}

Json to_json(const HypothesisReport& h) {
  Json j;
  j["c1alpha"] = h.c1alpha_ok;
  j["weighted_c2_norm"] = num(h.norm.value);
  j["weighted_c2_bounded"] = h.norm.bounded;
  j["decay_sign"] = to_string(h.decay_sign);
  j["r0"] = h.r0 ? num(*h.r0) : Json(nullptr);
  j["integral_sign"] = to_string(h.integral_sign);
  j["integral_xkprime"] = num(h.integral_xkprime);
  j["integral_error"] = num(h.integral_error);
  j["morse"] = to_string(h.morse);
  j["morse_violations"] = h.morse_violations;
  return j;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["profile"] = r.profile;
  j["eps"] = num(r.eps);
  j["seed"] = to_json(r.seed);
  j["xi_eps"] = num(r.xi_eps);
  j["mu_eps"] = num(r.mu_eps);
  j["d0"] = num(r.d0);
  j["d1"] = num(r.d1);
  j["reduced_gradient"] = pair(r.reduced_gradient);
  j["grad_gamma"] = pair(r.grad_gamma);
  j["phi_sup"] = num(r.phi_sup);
  j["pde_residual"] = num(r.pde_residual);
  j["residual_floor"] = num(r.residual_floor);
  j["ansatz_residual"] = num(r.ansatz_residual);
  j["certified"] = r.certified;
  j["outer_iters"] = r.outer_iters;
  j["inner_iters"] = r.inner_iters;
  j["kernel_defect"] = num(r.kernel_defect);
  j["grid"] = Json{{"n", r.grid_n}, {"span", num(r.span)}, {"x_max", num(r.x_max)},
                   {"sigma", num(r.sigma)}, {"rbar", num(r.rbar)}};
  j["phi"] = Json{{"tail", tail_name(r.phi.tail.kind)},
                  {"tail_center", num(r.phi.tail.center)},
                  {"x", r.phi.x},
                  {"values", r.phi.values}};
  j["note"] = r.note;
  return j;
}

SolveReport solve_report_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("report: expected a JSON object");
  SolveReport r;
  r.profile = get<std::string>(j, "profile");
  r.eps = get<double>(j, "eps");
  const auto& seed = j.at("seed");
  r.seed = {get<double>(seed, "xi"), get<double>(seed, "mu")};
  r.xi_eps = get<double>(j, "xi_eps");
  r.mu_eps = get<double>(j, "mu_eps");
  r.d0 = get<double>(j, "d0");
  r.d1 = get<double>(j, "d1");
  const auto rg = get<std::vector<double>>(j, "reduced_gradient");
  const auto gg = get<std::vector<double>>(j, "grad_gamma");
  if (rg.size() != 2 || gg.size() != 2) throw ValidationError("report: gradients need two entries");
  r.reduced_gradient = {rg[0], rg[1]};
  r.grad_gamma = {gg[0], gg[1]};
  r.phi_sup = get<double>(j, "phi_sup");
  r.pde_residual = get<double>(j, "pde_residual");
  r.residual_floor = get<double>(j, "residual_floor");
  r.ansatz_residual = get<double>(j, "ansatz_residual");
  r.certified = get<bool>(j, "certified");
  r.outer_iters = get<int>(j, "outer_iters");
  r.inner_iters = get<int>(j, "inner_iters");
  r.kernel_defect = get<double>(j, "kernel_defect");
  if (!j.contains("grid") || !j.contains("phi")) throw ValidationError("report: missing grid or phi");
  const auto& g = j.at("grid");
  r.grid_n = get<std::size_t>(g, "n");
  r.span = get<double>(g, "span");
  r.x_max = get<double>(g, "x_max");
  r.sigma = get<double>(g, "sigma");
  r.rbar = get<double>(g, "rbar");
  const auto& p = j.at("phi");
  r.phi.tail = {tail_kind(get<std::string>(p, "tail")), get<double>(p, "tail_center"), 0.0};
  r.phi.x = get<std::vector<double>>(p, "x");
  r.phi.values = get<std::vector<double>>(p, "values");
  if (r.phi.x.size() != r.phi.values.size() || r.phi.x.size() != r.grid_n)
    throw ValidationError("report: phi arrays do not match the grid size");
  r.note = j.value("note", std::string());
  return r;
}

Json to_json(const PohozaevReport& p) {
  Json j;
  j["applicable"] = p.applicable;
  j["lambda"] = num(p.lambda);
  j["lambda_error"] = num(p.lambda_error);
  j["mass_defect"] = num(p.mass_defect);
  j["residual_share"] = num(p.residual_share);
  j["moment_xkprime"] = num(p.moment);
  j["moment_error"] = num(p.moment_error);
  j["identity_lhs"] = num(p.identity_lhs);
  j["identity_rhs"] = num(p.identity_rhs);
  j["identity_bar"] = num(p.identity_bar);
  j["identity_consistent"] = p.identity_consistent;
  j["sign_contradiction"] = p.sign_contradiction;
  j["note"] = p.note;
  return j;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw ValidationError("csv: header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw ValidationError("csv: columns have different lengths");
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k][r];
    os << '\n';
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  std::ofstream f(path);
  if (!f) throw ValidationError("csv: cannot open '" + path + "' for writing");
  write_csv(f, header, columns);
}

}  // namespace liouville
