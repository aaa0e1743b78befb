#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "oswr/analysis.hpp"
#include "oswr/config.hpp"
#include "oswr/error.hpp"
#include "oswr/oswr.hpp"
#include "oswr/validate.hpp"

namespace oswr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Loaded {
  ExperimentConfig cfg;
  std::string text;
};

/// Reads a configuration file or the config echo of a run manifest.
Loaded load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json manifest;
    try {
      manifest = json::parse(text);
    } catch (const json::exception &e) {
      throw ParseError(std::string("malformed manifest: ") + e.what(), 0, 0);
    }
    if (!manifest.contains("config") || !manifest["config"].is_string()) {
      throw ParseError("manifest has no config echo", 0, 0);
    }
    text = manifest["config"].get<std::string>();
  }
  return {parse_config(text), text};
}

void check(const ExperimentConfig &cfg, std::ostream &err) {
  const auto diags = validate_problem(cfg);
  for (const auto &d : diags) {
    if (!d.is_error()) err << "warning: " << d.message << "\n";
  }
  require_valid(diags);
}

std::optional<Coupling> coupling_of(const std::string &name) {
  if (name == "auto") return std::nullopt;
  if (name == "conforming") return Coupling::conforming;
  if (name == "mortar") return Coupling::mortar;
  throw ValidationError("unknown coupling '" + name + "'");
}

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

json history_json(const std::vector<IterationHistory> &histories) {
  json out = json::array();
  for (const auto &h : histories) {
    json w = json::array();
    for (const auto &r : h.records) w.push_back(r.residual);
    out.push_back(w);
  }
  return out;
}

void write_manifest(const fs::path &dir, const std::string &command, const Loaded &loaded,
                    const json &flags, const std::vector<std::string> &outputs,
                    double wall, const json &residuals) {
  json m;
  m["command"] = command;
  m["config"] = serialize_config(loaded.cfg);
  m["flags"] = flags;
  m["outputs"] = outputs;
  m["wall_seconds"] = wall;
  m["residual_history"] = residuals;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

int cmd_run(const std::string &config, const std::string &out_dir, const std::string &coupling,
            std::ostream &out, std::ostream &err) {
  const auto t0 = std::chrono::steady_clock::now();
  const Loaded loaded = load(config);
  check(loaded.cfg, err);
  const ExperimentConfig &cfg = loaded.cfg;
  MultidomainProblem problem(cfg, coupling_of(coupling));
  IterateOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.tolerance = cfg.tolerance;
  const MultidomainSolution sol = run_windows(problem, opts);

  fs::create_directories(out_dir);
  std::ostringstream snap;
  snap << "subdomain,time,node,x,y,u\n";
  std::vector<double> times = cfg.snapshots.empty() ? std::vector<double>{cfg.T} : cfg.snapshots;
  for (double t : times) {
    for (std::size_t s = 0; s < problem.size(); ++s) {
      const Eigen::VectorXd u = sol.evaluate(s, t);
      const Mesh &mesh = problem.operators(s).space.mesh;
      for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
        snap << cfg.subdomains[s].id << "," << format_double(t) << "," << v << ","
             << format_double(mesh.nodes[v][0]) << "," << format_double(mesh.nodes[v][1]) << ","
             << format_double(u[static_cast<Eigen::Index>(v)]) << "\n";
      }
    }
  }
  write_file(fs::path(out_dir) / "snapshots.csv", snap.str());

  std::ostringstream res;
  res << "window,iteration,residual";
  for (const auto &s : cfg.subdomains) res << ",norm_" << s.id;
  res << "\n";
  for (std::size_t w = 0; w < sol.histories.size(); ++w) {
    for (const auto &r : sol.histories[w].records) {
      res << w << "," << r.iteration << "," << format_double(r.residual);
      for (double n : r.solution_norms) res << "," << format_double(n);
      res << "\n";
    }
  }
  write_file(fs::path(out_dir) / "residuals.csv", res.str());

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_dir, "run", loaded, {{"coupling", coupling}},
                 {"snapshots.csv", "residuals.csv", "manifest.json"}, wall,
                 history_json(sol.histories));
  bool converged = true;
  for (const auto &h : sol.histories) converged = converged && h.converged;
  out << "run: " << sol.histories.size() << " window(s), "
      << (converged ? "converged" : "iteration budget reached") << ", last residual "
      << format_double(sol.histories.back().last_residual()) << "\n";
  return kSuccess;
}

int cmd_study(const std::string &config, const std::string &axis, int levels, int ref_factor,
              double tolerance, int max_iterations, const std::string &coupling,
              const std::string &out_dir, std::ostream &out, std::ostream &err) {
  const auto t0 = std::chrono::steady_clock::now();
  if (levels < 3) throw ValidationError("--levels must be at least 3 to fit a slope");
  const Loaded loaded = load(config);
  check(loaded.cfg, err);
  StudyOptions opts;
  opts.axis = axis == "time" ? StudyAxis::time
              : axis == "space" ? StudyAxis::space
                                : StudyAxis::spacetime;
  opts.levels = levels;
  opts.reference_factor = ref_factor;
  opts.tolerance = tolerance;
  opts.max_iterations = max_iterations;
  opts.coupling = coupling_of(coupling);
  const StudyTable table = convergence_study(loaded.cfg, opts);

  const std::size_t ns = table.ids.size();
  std::ostringstream csv;
  csv << "level";
  for (int id : table.ids) csv << ",h_" << id << ",k_" << id;
  for (const char *name : {"e_inf", "e_l2", "e_T_l2", "e_T_h1"}) {
    for (int id : table.ids) csv << "," << name << "_" << id;
  }
  csv << "\n";
  auto norms = [](const SubdomainErrors &e) {
    return std::array<double, 4>{e.e_inf, e.e_l2, e.e_T_l2, e.e_T_h1};
  };
  for (const auto &row : table.rows) {
    csv << row.level;
    for (std::size_t s = 0; s < ns; ++s) csv << "," << format_double(row.h[s]) << "," << format_double(row.k[s]);
    for (int n = 0; n < 4; ++n) {
      for (std::size_t s = 0; s < ns; ++s) csv << "," << format_double(norms(row.errors[s])[n]);
    }
    csv << "\n";
  }
  csv << "slope";
  for (std::size_t s = 0; s < ns; ++s) csv << ",,";
  for (int n = 0; n < 4; ++n) {
    for (std::size_t s = 0; s < ns; ++s) csv << "," << format_double(norms(table.slopes[s])[n]);
  }
  csv << "\n";
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "study.csv", csv.str());

  std::ostringstream gp;
  gp << "set datafile separator ','\nset key autotitle columnhead\nset logscale y 2\n"
     << "set xlabel 'refinement level'\nset ylabel 'error'\nset terminal pngcairo\n"
     << "set output 'study.png'\nplot \\\n";
  for (std::size_t s = 0; s < ns; ++s) {
    const std::size_t base = 2 + 2 * ns;
    gp << "  'study.csv' every ::0::" << table.rows.size() - 1 << " using 1:" << base + s
       << " with linespoints" << (s + 1 < ns ? ", \\\n" : ", \\\n");
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const std::size_t base = 2 + 2 * ns + 2 * ns;
    gp << "  'study.csv' every ::0::" << table.rows.size() - 1 << " using 1:" << base + s
       << " with linespoints" << (s + 1 < ns ? ", \\\n" : "\n");
  }
  write_file(fs::path(out_dir) / "study.gp", gp.str());

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json iterations = json::array();
  for (const auto &row : table.rows) iterations.push_back(row.iterations);
  write_manifest(out_dir, "study", loaded,
                 {{"axis", axis}, {"levels", levels}, {"ref_factor", ref_factor},
                  {"tolerance", tolerance}, {"max_iterations", max_iterations},
                  {"coupling", coupling}},
                 {"study.csv", "study.gp", "manifest.json"}, wall, iterations);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto &sl = table.slopes[s];
    out << "subdomain " << table.ids[s] << ": slopes e_inf " << format_double(sl.e_inf)
        << ", e_l2 " << format_double(sl.e_l2) << ", e_T_l2 " << format_double(sl.e_T_l2)
        << ", e_T_h1 " << format_double(sl.e_T_h1) << "\n";
  }
  return kSuccess;
}

int cmd_sweep(const std::string &config, const std::string &p_list, const std::string &q_list,
              std::uint64_t seed, const std::string &mode, double target, int max_iterations,
              const std::string &coupling, const std::string &out_dir, std::ostream &out,
              std::ostream &err) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepOptions opts;
  opts.p_values = parse_list(p_list);
  opts.q_values = parse_list(q_list);
  if (opts.p_values.empty()) throw ValidationError("--p needs at least one value");
  if (opts.q_values.empty()) throw ValidationError("--q needs at least one value");
  for (double p : opts.p_values) {
    if (!(p > 0.0)) throw ValidationError("--p values must be positive");
  }
  for (double q : opts.q_values) {
    if (!(q >= 0.0)) throw ValidationError("--q values must be nonnegative");
  }
  const Loaded loaded = load(config);
  check(loaded.cfg, err);
  opts.seed = seed;
  opts.mode = mode == "full" ? SweepMode::full : SweepMode::error;
  opts.target = target;
  opts.max_iterations = max_iterations;
  opts.coupling = coupling_of(coupling);
  const auto rows = sweep_parameters(loaded.cfg, opts);

  std::ostringstream csv;
  csv << "p,q,iterations,converged,best\n";
  for (const auto &r : rows) {
    csv << format_double(r.p) << "," << format_double(r.q) << "," << r.iterations << ","
        << (r.converged ? 1 : 0) << "," << (r.best ? 1 : 0) << "\n";
  }
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "sweep.csv", csv.str());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json iterations = json::array();
  for (const auto &r : rows) iterations.push_back(r.iterations);
  write_manifest(out_dir, "sweep", loaded,
                 {{"p", p_list}, {"q", q_list}, {"seed", seed}, {"mode", mode},
                  {"target", target}, {"max_iterations", max_iterations}, {"coupling", coupling}},
                 {"sweep.csv", "manifest.json"}, wall, iterations);
  for (const auto &r : rows) {
    if (r.best) {
      out << "best: p = " << format_double(r.p) << ", q = " << format_double(r.q) << ", "
          << r.iterations << " iterations\n";
    }
  }
  return kSuccess;
}

}  // namespace

std::vector<double> parse_list(const std::string &text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    const std::string tok = item.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) {
      throw ValidationError("malformed number '" + tok + "' in list");
    }
    out.push_back(v);
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Optimized Schwarz waveform relaxation with DG time stepping", "oswr"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", coupling = "auto";
  auto *run = app.add_subcommand("run", "solve the configured problem");
  run->add_option("config", config, "configuration file or manifest")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--coupling", coupling, "auto | conforming | mortar")
      ->check(CLI::IsMember({"auto", "conforming", "mortar"}));

  std::string axis = "time";
  int levels = 0, ref_factor = 4, max_iterations = 200;
  double tolerance = 1e-10;
  auto *study = app.add_subcommand("study", "convergence-order study");
  study->add_option("config", config, "configuration file or manifest")->required();
  study->add_option("--axis", axis, "time | space | spacetime")
      ->required()
      ->check(CLI::IsMember({"time", "space", "spacetime"}));
  study->add_option("--levels", levels, "number of refinement levels")->required();
  study->add_option("--ref-factor", ref_factor, "reference refinement factor");
  study->add_option("--tolerance", tolerance, "OSWR residual tolerance per level");
  study->add_option("--max-iterations", max_iterations, "OSWR iteration budget per window");
  study->add_option("--coupling", coupling, "auto | conforming | mortar")
      ->check(CLI::IsMember({"auto", "conforming", "mortar"}));
  study->add_option("--out", out_dir, "output directory");

  std::string p_list, q_list = "0", mode = "error";
  std::uint64_t seed = 1;
  double target = 1e-6;
  int sweep_iterations = 60;
  auto *sweep = app.add_subcommand("sweep", "transmission parameter sweep");
  sweep->add_option("config", config, "configuration file or manifest")->required();
  sweep->add_option("--p", p_list, "comma separated p values")->required();
  sweep->add_option("--q", q_list, "comma separated q values");
  sweep->add_option("--seed", seed, "seed of the random initial data");
  sweep->add_option("--mode", mode, "error | full")->check(CLI::IsMember({"error", "full"}));
  sweep->add_option("--target", target, "residual target");
  sweep->add_option("--max-iterations", sweep_iterations, "iteration budget");
  sweep->add_option("--coupling", coupling, "auto | conforming | mortar")
      ->check(CLI::IsMember({"auto", "conforming", "mortar"}));
  sweep->add_option("--out", out_dir, "output directory");

  std::vector<std::string> argv_store{"oswr"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (auto &a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*run) return cmd_run(config, out_dir, coupling, out, err);
    if (*study) {
      return cmd_study(config, axis, levels, ref_factor, tolerance, max_iterations, coupling,
                       out_dir, out, err);
    }
    return cmd_sweep(config, p_list, q_list, seed, mode, target, sweep_iterations, coupling,
                     out_dir, out, err);
  } catch (const ParseError &e) {
    err << "error: " << config << ": " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SolverError &e) {
    err << "solver failure: " << e.what() << " (residual " << format_double(e.residual())
        << ")\n";
    return kSolver;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace oswr::cli
