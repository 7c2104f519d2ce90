// liouville: command-line driver for the extension / degree / reduction
// pipeline. Prints JSON on stdout; CSV and full reports go to --out.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "liouville/critical.hpp"
#include "liouville/errors.hpp"
#include "liouville/extension.hpp"
#include "liouville/profiles.hpp"
#include "liouville/reduction.hpp"
#include "liouville/report_io.hpp"
#include "liouville/soliton.hpp"

using namespace liouville;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string command;
  std::string profile = "k1";
  double sigma = 0.5;
  std::size_t grid_n = 1200;
  double xmax = 1e3;
  std::vector<double> eps{1e-3};
  double R = 0.0;  // 0: command default
  std::string out;
  std::vector<double> seed_point;
  bool asymptotic = false;
  bool scaling = false;
  std::vector<double> at;
  double xi = 0.0;
  std::string from;
  std::string config;
};

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["profile"] = c.profile;
  j["sigma"] = c.sigma;
  j["grid_n"] = c.grid_n;
  j["xmax"] = c.xmax;
  j["eps"] = c.eps;
  j["R"] = c.R;
  j["out"] = c.out;
  j["seed_point"] = c.seed_point;
  j["asymptotic"] = c.asymptotic;
  j["scaling"] = c.scaling;
  j["at"] = c.at;
  j["xi"] = c.xi;
  j["from"] = c.from;
  j["config"] = c.config;
  return j;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(trim(item), &used));
      if (used != trim(item).size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("config: '" + key + "' expects numbers, got '" + v + "'");
    }
  }
  return out;
}

double parse_number(const std::string& key, const std::string& v) {
  const auto l = parse_list(key, v);
  if (l.size() != 1) throw ValidationError("config: '" + key + "' expects one number");
  return l[0];
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError("config: '" + key + "' expects true or false");
}

// Flat key=value file; keys are the long flag names. Values apply only where
// the flag was not given on the command line.
void apply_config_file(RunConfig& c, const CLI::App& app) {
  std::ifstream f(c.config);
  if (!f) throw ValidationError("config: cannot read '" + c.config + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(lineno) + " is not key=value");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    const CLI::Option* opt = nullptr;
    try {
      opt = app.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw ValidationError("config: unknown key '" + key + "'");
    }
    if (opt->count() > 0 || key == "config") continue;
    if (key == "profile") c.profile = val;
    else if (key == "sigma") c.sigma = parse_number(key, val);
    else if (key == "grid-n") c.grid_n = std::size_t(parse_number(key, val));
    else if (key == "xmax") c.xmax = parse_number(key, val);
    else if (key == "eps") c.eps = parse_list(key, val);
    else if (key == "R") c.R = parse_number(key, val);
    else if (key == "out") c.out = val;
    else if (key == "seed-point") c.seed_point = parse_list(key, val);
    else if (key == "asymptotic") c.asymptotic = parse_bool(key, val);
    else if (key == "scaling") c.scaling = parse_bool(key, val);
    else if (key == "at") c.at = parse_list(key, val);
    else if (key == "xi") c.xi = parse_number(key, val);
    else if (key == "from") c.from = val;
  }
}

void validate(const RunConfig& c) {
  if (!(c.sigma > 0.0 && c.sigma < 1.0)) throw ValidationError("--sigma must lie in (0, 1)");
  if (c.grid_n < 8 || c.grid_n > kMaxGridNodes) throw ValidationError("--grid-n must lie in [8, 4000]");
  if (!(c.xmax > 0.0)) throw ValidationError("--xmax must be positive");
  if (c.eps.empty()) throw ValidationError("--eps needs at least one value");
  for (double e : c.eps)
    if (!(e >= 0.0)) throw ValidationError("--eps values must be >= 0");
  if (c.R < 0.0 || (c.R > 0.0 && c.R <= 1.0)) throw ValidationError("--R must exceed 1");
  if (!c.seed_point.empty() && (c.seed_point.size() != 2 || !(c.seed_point[1] > 0.0)))
    throw ValidationError("--seed-point expects xi,mu with mu > 0");
  if (!c.at.empty() && (c.at.size() != 2 || !(c.at[1] >= 0.0)))
    throw ValidationError("--at expects xi,mu with mu >= 0");
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.n = c.grid_n;
  s.x_max = c.xmax;
  s.sigma = c.sigma;
  validate(s);
  return s;
}

void ensure_out(const RunConfig& c) {
  if (c.out.empty()) return;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw ValidationError("cannot create output directory '" + c.out + "'");
}

std::string out_path(const RunConfig& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

std::string tag(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void print(const Json& j) { std::cout << j.dump(2) << std::endl; }

// --- commands -------------------------------------------------------------

int cmd_catalog(const RunConfig& c, bool profile_given) {
  Json j;
  j["config"] = to_json(c);
  j["profiles"] = Json::array();
  for (const auto& [key, what] : catalog_entries())
    j["profiles"].push_back(Json{{"key", key}, {"description", what}});
  if (profile_given) {
    const auto p = builtin(c.profile);
    j["hypotheses"] = to_json(validate_hypotheses(p));
  }
  print(j);
  return 0;
}

int cmd_extend(const RunConfig& c) {
  const ExtensionEvaluator ev(builtin(c.profile));
  Json j;
  j["config"] = to_json(c);
  if (!c.at.empty()) {
    const HalfPlanePoint p{c.at[0], c.at[1]};
    if (p.mu > 0.0) {
      const auto jet = ev.jet(p);
      j["gamma"] = jet.value;
      j["grad"] = Json::array({jet.grad[0], jet.grad[1]});
      j["hessian"] = Json::array({Json::array({jet.hess[0][0], jet.hess[0][1]}),
                                  Json::array({jet.hess[1][0], jet.hess[1][1]})});
      j["nodes"] = jet.nodes;
    } else {
      j["gamma"] = ev.gamma(p);
    }
  }
  if (c.asymptotic) {
    auto fit = asymptotic_check(ev, c.xi, geometric_mu_sequence(1e-2, 1e-4, 9));
    j["asymptotic"] = to_json(fit);
    j["asymptotic"]["xi"] = c.xi;
  }
  // Field over [-R, R] x [1/R, R]: xi sinh-spaced, mu log-spaced.
  const double R = c.R > 0.0 ? c.R : 8.0;
  const int m = 41;
  std::vector<double> xs, ms, gs, gx, gm;
  double lo = INFINITY, hi = -INFINITY;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double xi = std::sinh(std::asinh(R) * (-1.0 + 2.0 * a / (m - 1)));
      const double mu = std::exp(std::log(R) * (-1.0 + 2.0 * b / (m - 1)));
      const auto jet = ev.jet({xi, mu});
      xs.push_back(xi);
      ms.push_back(mu);
      gs.push_back(jet.value);
      gx.push_back(jet.grad[0]);
      gm.push_back(jet.grad[1]);
      lo = std::min(lo, jet.value);
      hi = std::max(hi, jet.value);
    }
  j["field"] = Json{{"R", R}, {"points", m * m}, {"min", lo}, {"max", hi}};
  if (!c.out.empty()) {
    ensure_out(c);
    const auto path = out_path(c, "extend_field.csv");
    write_csv(path, {"xi", "mu", "gamma", "dgamma_dxi", "dgamma_dmu"}, {xs, ms, gs, gx, gm});
    j["field"]["csv"] = path;
  }
  print(j);
  return 0;
}

int cmd_critical(const RunConfig& c) {
  const ExtensionEvaluator ev(builtin(c.profile));
  const double R = c.R > 0.0 ? c.R : 8.0;
  const auto pts = multistart_search(ev, R);
  Json j;
  j["config"] = to_json(c);
  j["R"] = R;
  j["points"] = Json::array();
  for (const auto& p : pts) {
    const bool inside = std::hypot(p.location.xi, p.location.mu) < R && p.location.mu > 1.0 / R;
    if (inside) j["points"].push_back(to_json(p));
  }
  print(j);
  return 0;
}

int cmd_degree(const RunConfig& c) {
  const ExtensionEvaluator ev(builtin(c.profile));
  const auto rep = degree_on_halfplane(ev, c.R);
  Json j;
  j["config"] = to_json(c);
  j["degree"] = to_json(rep);
  print(j);
  return 0;
}

std::vector<CriticalPoint> seeds_for(const RunConfig& c, const ExtensionEvaluator& ev) {
  if (!c.seed_point.empty()) return {newton_refine(ev, {c.seed_point[0], c.seed_point[1]})};
  return degree_on_halfplane(ev, c.R).critical_points;
}

Json summary(const SolveReport& r) {
  Json j = to_json(r);
  j.erase("phi");
  return j;
}

// Runs every (seed, eps) pair; failures are recorded and turn into exit 3.
struct SolveBatch {
  std::vector<SolveReport> reports;
  Json results = Json::array();
  bool failed = false;
};

SolveBatch run_solves(const RunConfig& c, const KappaProfile& profile) {
  const ReductionSolver solver(profile, solver_config(c));
  for (double e : c.eps)
    if (e > solver.config().eps0)
      throw ValidationError("--eps " + tag(e) + " exceeds eps0 = " + tag(solver.config().eps0));
  const auto seeds = seeds_for(c, solver.extension());
  SolveBatch b;
  for (std::size_t k = 0; k < seeds.size(); ++k)
    for (double e : c.eps) {
      try {
        auto r = solver.outer_solve(e, seeds[k]);
        Json s = summary(r);
        s["seed_index"] = k;
        if (!c.out.empty()) {
          const std::string stem = "solve_" + std::to_string(k) + "_eps" + tag(e);
          std::ofstream(out_path(c, stem + ".json")) << to_json(r).dump(2) << '\n';
          const auto res = nodal_residual(r, profile);
          std::vector<double> u(r.phi.size());
          for (std::size_t i = 0; i < u.size(); ++i)
            u[i] = bubble({r.mu_eps, r.xi_eps}, r.phi.x[i]) + r.phi.values[i];
          write_csv(out_path(c, stem + ".csv"), {"x", "phi", "u", "residual"},
                    {r.phi.x, r.phi.values, u, res});
          s["report"] = out_path(c, stem + ".json");
        }
        b.results.push_back(s);
        if (!r.certified) b.failed = true;
        b.reports.push_back(std::move(r));
      } catch (const NumericalError& err) {
        b.failed = true;
        b.results.push_back(Json{{"seed_index", k},
                                 {"seed", to_json(seeds[k].location)},
                                 {"eps", e},
                                 {"error", err.what()}});
      }
    }
  return b;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_solve(const RunConfig& c) {
  ensure_out(c);
  const auto profile = builtin(c.profile);
  auto b = run_solves(c, profile);
  Json j;
  j["config"] = to_json(c);
  j["solutions"] = b.results;
  j["certified"] = std::count_if(b.reports.begin(), b.reports.end(),
                                 [](const SolveReport& r) { return r.certified; });
  if (c.scaling) {
    // Per seed: slope of log sup|phi| against log eps, and |grad Gamma| at the
    // solutions as eps decreases.
    std::map<std::pair<double, double>, std::vector<const SolveReport*>> by_seed;
    for (const auto& r : b.reports) by_seed[{r.seed.xi, r.seed.mu}].push_back(&r);
    j["scaling"] = Json::array();
    for (auto& [seed, rs] : by_seed) {
      std::sort(rs.begin(), rs.end(), [](auto* a, auto* z) { return a->eps > z->eps; });
      std::vector<double> le, lp;
      Json grads = Json::array();
      bool monotone = true;
      double prev = INFINITY;
      for (auto* r : rs) {
        if (r->eps <= 0.0) continue;
        le.push_back(std::log(r->eps));
        lp.push_back(std::log(r->phi_sup));
        const double g = std::hypot(r->grad_gamma[0], r->grad_gamma[1]);
        grads.push_back(Json{{"eps", r->eps}, {"grad_gamma_norm", g}});
        if (!(g < prev)) monotone = false;
        prev = g;
      }
      Json s{{"seed", Json{{"xi", seed.first}, {"mu", seed.second}}}};
      s["phi_slope"] = le.size() >= 2 ? Json(fit_slope(le, lp)) : Json(nullptr);
      s["grad_gamma"] = grads;
      s["grad_gamma_monotone"] = monotone;
      j["scaling"].push_back(s);
    }
  }
  print(j);
  return b.failed ? 3 : 0;
}

Json soliton_json(const SolveReport& r, const KappaProfile& profile, const RunConfig& c,
                  const std::string& stem) {
  Json j;
  j["profile"] = r.profile;
  j["eps"] = r.eps;
  j["xi_eps"] = r.xi_eps;
  j["mu_eps"] = r.mu_eps;
  j["identities"] = to_json(pohozaev_check(r, profile));
  if (!c.out.empty()) {
    const auto s = assemble_soliton(r, profile);
    const auto path = out_path(c, stem + ".csv");
    write_csv(path, {"x", "psi", "V"}, {s.x, s.psi, s.potential});
    j["csv"] = path;
  }
  return j;
}

int cmd_soliton(const RunConfig& c) {
  ensure_out(c);
  Json j;
  j["config"] = to_json(c);
  j["solitons"] = Json::array();
  if (!c.from.empty()) {
    std::ifstream f(c.from);
    if (!f) throw ValidationError("cannot read report '" + c.from + "'");
    Json in;
    try {
      in = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("report is not valid JSON: ") + e.what());
    }
    const auto r = solve_report_from_json(in);
    j["solitons"].push_back(soliton_json(r, builtin(r.profile), c, "soliton"));
    print(j);
    return 0;
  }
  const auto profile = builtin(c.profile);
  auto b = run_solves(c, profile);
  for (std::size_t k = 0; k < b.reports.size(); ++k)
    j["solitons"].push_back(soliton_json(b.reports[k], profile, c, "soliton_" + std::to_string(k)));
  j["solve_results"] = b.results;
  print(j);
  return b.failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Liouville equation: harmonic extension, degree counts, reduction solver"};
  app.require_subcommand(1);
  RunConfig c;
  app.add_option("--profile", c.profile, "catalog key, e.g. k1, k2, kNa:N=3,a=0.5, const:2");
  app.add_option("--sigma", c.sigma, "weight exponent of the decay norm");
  app.add_option("--grid-n", c.grid_n, "solve-grid nodes");
  app.add_option("--xmax", c.xmax, "grid reach |x - xi|");
  app.add_option("--eps", c.eps, "comma-separated eps values")->delimiter(',');
  app.add_option("--R", c.R, "contour / search radius");
  app.add_option("--out", c.out, "output directory for CSV and full reports");
  app.add_option("--seed-point", c.seed_point, "xi,mu start for the critical point")
      ->delimiter(',');
  app.add_flag("--asymptotic", c.asymptotic, "fit Gamma - k + mu H k against mu");
  app.add_flag("--scaling", c.scaling, "report eps-scaling of the solutions");
  app.add_option("--at", c.at, "xi,mu point for extend")->delimiter(',');
  app.add_option("--xi", c.xi, "boundary point for --asymptotic");
  app.add_option("--from", c.from, "solve report JSON for soliton");
  app.add_option("--config", c.config, "key=value file; flags override it");
  const std::map<std::string, std::string> commands{
      {"catalog", "list profiles (with --profile: check hypotheses)"},
      {"extend", "harmonic extension values, field and asymptotics"},
      {"critical", "critical points of Gamma by multistart Newton"},
      {"degree", "winding degree against 1 - M+ + m+"},
      {"solve", "reduction solve from the critical points"},
      {"soliton", "soliton profile and integral identities"}};
  for (const auto& [name, what] : commands) app.add_subcommand(name, what)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (const auto* sub : app.get_subcommands()) c.command = sub->get_name();

  try {
    if (!c.config.empty()) apply_config_file(c, app);
    validate(c);
    const bool profile_given = app.get_option("--profile")->count() > 0 || !c.config.empty();
    if (c.command == "catalog") return cmd_catalog(c, profile_given);
    if (c.command == "extend") return cmd_extend(c);
    if (c.command == "critical") return cmd_critical(c);
    if (c.command == "degree") return cmd_degree(c);
    if (c.command == "solve") return cmd_solve(c);
    if (c.command == "soliton") return cmd_soliton(c);
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
