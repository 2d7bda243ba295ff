// Command-line front end: constants, moment identities, expansion orders,
// the windowed-mean counterexample, and the DPP solver.  Every run writes a
// JSON manifest next to its outputs.
//
// Exit codes: 0 success / all checks pass, 1 checks ran but failed their
// tolerances, 2 invalid input, 3 solver non-convergence.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "hmvp/io.hpp"
#include "hmvp/parallel.hpp"
#include "hmvp/polynomial.hpp"
#include "hmvp/solver.hpp"

namespace {

constexpr const char* kVersion = "hmvp 0.1.0";

using hmvp::json;

hmvp::PExponent parse_p(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return hmvp::PExponent::infinity();
  return hmvp::PExponent::finite(std::stod(text));
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& parameters, const std::vector<std::string>& outputs,
                    double wall_time) {
  hmvp::RunManifest m;
  m.command = command;
  m.parameters = parameters;
  m.tool_version = kVersion;
  m.outputs = outputs;
  m.wall_time_seconds = wall_time;
  hmvp::write_json(out_dir + "/" + command + "_manifest.json", hmvp::to_json(m));
}

hmvp::ScalarField resolve_field(const std::string& id_or_expr, int n) {
  for (const auto& e : hmvp::builtin_field_catalogue())
    if (e.id == id_or_expr) return hmvp::builtin_field(id_or_expr);
  return hmvp::Polynomial::parse(id_or_expr, n).field(id_or_expr);
}

// ---------------------------------------------------------------------------

int cmd_constants(const std::vector<int>& n_list, const std::vector<std::string>& p_list,
                  const std::string& out_dir) {
  Timer timer;
  hmvp::CsvWriter csv(out_dir + "/constants.csv");
  csv.row({"n", "M", "p", "alpha", "beta"});
  std::cout << "n       M(n)            p        alpha           beta\n";
  for (int n : n_list) {
    const double M = hmvp::M_constant(n);
    for (const std::string& ps : p_list) {
      const hmvp::PExponent p = parse_p(ps);
      const auto [alpha, beta] = hmvp::alpha_beta(p, n);
      csv.row({std::to_string(n), hmvp::format_number(M), ps, hmvp::format_number(alpha),
               hmvp::format_number(beta)});
      std::cout << n << "  " << hmvp::format_number(M) << "  " << ps << "  "
                << hmvp::format_number(alpha) << "  " << hmvp::format_number(beta) << "\n";
    }
  }
  json params;
  params["n"] = n_list;
  params["p"] = json::array();
  for (const auto& ps : p_list) params["p"].push_back(ps);
  write_manifest(out_dir, "constants", params, {out_dir + "/constants.csv"}, timer.seconds());
  return 0;
}

int cmd_moments(int n, double eps, const std::string& resolution, const std::string& out_dir) {
  Timer timer;
  const std::vector<int> res =
      resolution.empty() ? hmvp::default_resolution(n) : parse_ints(resolution);
  const hmvp::QuadratureRule rule = hmvp::build_rule(n, eps, res);
  const hmvp::MomentReport rep = hmvp::moment_check(n, eps, rule);
  hmvp::write_json(out_dir + "/moments.json", hmvp::to_json(rep));

  const double M = hmvp::M_constant(n);
  const bool pass = rep.odd_moments <= 1e-12 && rep.cross_moments <= 1e-12 &&
                    rep.vertical_moment <= 1e-12 && std::abs(rep.M_estimate - M) / M <= 1e-6;
  std::cout << "odd " << rep.odd_moments << "  vertical " << rep.vertical_moment << "  cross "
            << rep.cross_moments << "  M_estimate " << rep.M_estimate << " (closed form " << M
            << ")  -> " << (pass ? "pass" : "FAIL") << "\n";
  json params;
  params["n"] = n;
  params["eps"] = eps;
  params["resolution"] = res;
  write_manifest(out_dir, "moments", params, {out_dir + "/moments.json"}, timer.seconds());
  return pass ? 0 : 1;
}

int cmd_expand(const std::string& field_id, const std::string& p_text,
               const std::string& ladder_text, const std::string& at_text, double window_scale,
               const std::string& out_dir) {
  Timer timer;
  const hmvp::PExponent p = parse_p(p_text);
  const std::vector<double> ladder =
      ladder_text.empty() ? std::vector<double>{0.4, 0.2, 0.1, 0.05} : parse_doubles(ladder_text);

  hmvp::ScalarField u = resolve_field(field_id, 1);
  std::vector<double> at = at_text.empty() ? std::vector<double>{0.0, 0.3, 0.2, 0.1}
                                           : parse_doubles(at_text);
  if (static_cast<int>(at.size()) != 2 * u.n + 2)
    throw CLI::ValidationError("--at needs t followed by 2n+1 coordinates");
  const double t = at[0];
  Eigen::VectorXd coords(2 * u.n + 1);
  for (int i = 0; i < 2 * u.n + 1; ++i) coords[i] = at[1 + i];
  const hmvp::HPoint x(u.n, coords);

  const hmvp::ExpansionReport rep = hmvp::expansion_study(u, t, x, p, ladder, window_scale);
  hmvp::write_json(out_dir + "/expand.json", hmvp::to_json(rep));
  hmvp::CsvWriter csv(out_dir + "/expand.csv");
  csv.row({"eps", "residual", "predicted_term", "value"});
  for (std::size_t i = 0; i < ladder.size(); ++i)
    csv.numeric_row({ladder[i], rep.residuals[i], rep.predicted_terms[i], rep.values[i]});

  const bool pass = rep.exact || rep.fitted_order > 2.2;
  std::cout << "field " << field_id << "  p " << p_text << "  fitted order "
            << hmvp::format_number(rep.fitted_order) << "  -> " << (pass ? "pass" : "FAIL")
            << "\n";
  json params;
  params["field"] = field_id;
  params["p"] = p_text;
  params["eps_ladder"] = ladder;
  params["at"] = at;
  params["window_scale"] = window_scale;
  write_manifest(out_dir, "expand", params, {out_dir + "/expand.json", out_dir + "/expand.csv"},
                 timer.seconds());
  return pass ? 0 : 1;
}

int cmd_counterexample(const std::string& ladder_text, const std::string& out_dir) {
  Timer timer;
  const std::vector<double> ladder =
      ladder_text.empty() ? std::vector<double>{0.4, 0.2, 0.1, 0.05} : parse_doubles(ladder_text);
  const hmvp::CounterexampleReport rep = hmvp::counterexample_report(ladder);
  hmvp::write_json(out_dir + "/counterexample.json", hmvp::to_json(rep));

  bool pass = rep.pde_residual_max <= 1e-8 && rep.psi_mass_rel_err_max <= 1e-10 &&
              rep.spatial_mean_rel_err_max <= 1e-9 && std::abs(rep.fitted_order - 4.0) <= 0.1;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    // The whole point: the windowed mean misses the point value.
    if (rep.mean_minus_value[i] == 0.0) pass = false;
    if (ladder[i] <= 0.1 + 1e-12) {
      const double rel = std::abs(rep.mean_minus_value[i] - rep.predicted[i]) /
                         std::abs(rep.predicted[i]);
      if (rel > 0.01) pass = false;
    }
  }
  std::cout << "pde residual " << rep.pde_residual_max << "  psi mass rel err "
            << rep.psi_mass_rel_err_max << "  spatial mean rel err "
            << rep.spatial_mean_rel_err_max << "  fitted order " << rep.fitted_order << "  -> "
            << (pass ? "pass" : "FAIL") << "\n";
  json params;
  params["eps_ladder"] = ladder;
  write_manifest(out_dir, "counterexample", params, {out_dir + "/counterexample.json"},
                 timer.seconds());
  return pass ? 0 : 1;
}

// Flat key=value config ('#' comments).  Documented keys: n, p, eps, delta_t,
// domain_radius, T, data, reference, interpolation, fp_tolerance,
// max_inner_iters, window_slices, mean_resolution, horizontal_factor,
// vertical_factor, out.
std::map<std::string, std::string> parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

int cmd_solve(const std::string& config_path, const std::string& out_dir) {
  Timer timer;
  const auto kv = parse_config(config_path);
  auto get = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };

  hmvp::GridConfig gc;
  gc.n = std::stoi(get("n", "1"));
  gc.domain_radius = std::stod(get("domain_radius", "1"));
  gc.epsilon = std::stod(get("eps", "0.1"));
  gc.T = std::stod(get("T", "0.2"));
  gc.delta_t = std::stod(get("delta_t", "-1"));
  gc.horizontal_factor = std::stod(get("horizontal_factor", "0.6"));
  gc.vertical_factor = std::stod(get("vertical_factor", "1.2"));

  hmvp::SolverConfig sc;
  sc.params = hmvp::MvpParams::make(gc.n, parse_p(get("p", "2")), gc.epsilon);
  sc.fp_tolerance = std::stod(get("fp_tolerance", "1e-10"));
  sc.max_inner_iters = std::stoi(get("max_inner_iters", "500"));
  const std::string interp = get("interpolation", "cubic");
  if (interp == "cubic")
    sc.interpolation = hmvp::Interpolation::Cubic;
  else if (interp == "multilinear")
    sc.interpolation = hmvp::Interpolation::Multilinear;
  else
    throw std::invalid_argument("interpolation must be cubic or multilinear");
  if (!get("mean_resolution", "").empty()) sc.mean_resolution = parse_ints(kv.at("mean_resolution"));
  sc.window_slices = std::stoi(get("window_slices", "0"));

  const std::string data_id = get("data", "");
  if (data_id.empty()) throw std::invalid_argument("config needs a 'data' field id/expression");
  const hmvp::ScalarField data = resolve_field(data_id, gc.n);

  const hmvp::SpaceTimeGrid grid = hmvp::build_grid(gc);
  const hmvp::DiscreteField field = hmvp::solve(
      grid, sc, [&](const hmvp::HPoint& x) { return data(0.0, x); },
      [&](double t, const hmvp::HPoint& x) { return data(t, x); });

  const std::string csv_path = out_dir + "/" + get("out", "solve.csv");
  hmvp::export_csv(csv_path, field);

  std::vector<std::string> outputs = {csv_path};
  json params;
  for (const auto& [k, v] : kv) params[k] = v;
  params["config_file"] = config_path;

  const std::string ref_id = get("reference", "");
  int code = 0;
  if (!ref_id.empty()) {
    const hmvp::ScalarField ref = ref_id == "data" ? data : resolve_field(ref_id, gc.n);
    const auto errors = hmvp::error_report(field, ref);
    hmvp::CsvWriter ecsv(out_dir + "/solve_errors.csv");
    ecsv.row({"k", "t", "max_error", "l2_error"});
    for (std::size_t k = 0; k < errors.size(); ++k) {
      ecsv.numeric_row({static_cast<double>(k), errors[k].t, errors[k].max_error,
                        errors[k].l2_error});
      std::cout << "slab " << k << "  t " << errors[k].t << "  max "
                << errors[k].max_error << "  l2 " << errors[k].l2_error << "\n";
    }
    outputs.push_back(out_dir + "/solve_errors.csv");
  }
  write_manifest(out_dir, "solve", params, outputs, timer.seconds());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-value calculus on the Heisenberg group"};
  app.set_version_flag("--version", kVersion);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (HMVP_THREADS overrides)");
  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "directory for CSV/JSON artifacts");

  std::string n_text = "1", p_text_list = "2,4,inf";
  auto* constants = app.add_subcommand("constants", "M(n) and the (alpha, beta) pairs");
  constants->add_option("--n", n_text, "group indices, comma separated");
  constants->add_option("--p", p_text_list, "exponents, comma separated ('inf' allowed)");

  int mn = 1;
  double meps = 0.5;
  std::string mres;
  auto* moments = app.add_subcommand("moments", "ball moment identities");
  moments->add_option("--n", mn);
  moments->add_option("--eps", meps);
  moments->add_option("--resolution", mres, "per-axis counts, comma separated");

  std::string efield = "heat-quartic", ep = "2", eladder, eat, ewin = "1";
  auto* expand = app.add_subcommand("expand", "asymptotic expansion order of a field");
  expand->add_option("--field", efield, "built-in id or polynomial expression");
  expand->add_option("--p", ep);
  expand->add_option("--eps", eladder, "ladder, comma separated (default 0.4,0.2,0.1,0.05)");
  expand->add_option("--at", eat, "t,x1,...,x_{2n+1}");
  expand->add_option("--window-scale", ewin);

  std::string cladder;
  auto* counter = app.add_subcommand("counterexample", "windowed-mean counterexample report");
  counter->add_option("--eps", cladder, "ladder, comma separated");

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "DPP time-slab solver");
  solve->add_option("--config", config_path, "flat key=value config file")->required();

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (const char* env = std::getenv("HMVP_THREADS")) {
    hmvp::set_thread_count(std::atoi(env));
  } else if (threads > 0) {
    hmvp::set_thread_count(threads);
  }

  try {
    if (*constants) return cmd_constants(parse_ints(n_text), [&] {
      std::vector<std::string> out;
      std::stringstream ss(p_text_list);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(item);
      return out;
    }(), out_dir);
    if (*moments) return cmd_moments(mn, meps, mres, out_dir);
    if (*expand) return cmd_expand(efield, ep, eladder, eat, std::stod(ewin), out_dir);
    if (*counter) return cmd_counterexample(cladder, out_dir);
    if (*solve) return cmd_solve(config_path, out_dir);
  } catch (const hmvp::convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hmvp::invalid_grid_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
