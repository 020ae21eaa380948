#ifndef QLAX_TOOLS_CLI_HPP
#define QLAX_TOOLS_CLI_HPP

// Command-line driver.  run_cli is the whole program minus main(), so tests
// can drive it in-process with captured streams.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlax/qlax.hpp"

namespace qlax::cli {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kUsage = 2, kIo = 3 };

struct Config {
  std::vector<double> qs{1.3};
  std::vector<std::size_t> sites{2};
  std::size_t tower_depth = 3;
  std::vector<double> times{0.1, 0.5, 1.0};
  double tolerance = 1e-9;
  std::string suite = "all";
  std::string observable = "lax-residual";
  std::string out;
  std::string format = "auto";
  bool full_grid = false;

  Grid grid() const {
    if (full_grid) {
      Grid g = Grid::defaults();
      g.times = times;
      g.tower_depth = tower_depth;
      return g;
    }
    return Grid{qs, sites, times, tower_depth};
  }
};

struct Output {
  std::string body;
  int code = kOk;
  std::string log;  // stderr only; keeps report files deterministic
};

inline std::size_t threads_from_env() {
  const char* raw = std::getenv("QLAX_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    std::size_t pos = 0;
    const long v = std::stol(raw, &pos);
    if (pos != std::string(raw).size() || v < 0) throw std::invalid_argument(raw);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError("QLAX_THREADS must be a nonnegative integer, got '" + std::string(raw) + "'");
  }
}

inline std::string resolved_format(const Config& cfg, const char* fallback) {
  return cfg.format == "auto" ? fallback : cfg.format;
}

inline Output cmd_verify(const Config& cfg) {
  const VerificationReport report = run_suite(cfg.suite, cfg.grid(), threads_from_env());
  const std::string body =
      resolved_format(cfg, "json") == "csv" ? checks_to_csv(report) : to_json(report).dump(2) + "\n";
  std::ostringstream log;
  for (const auto& t : report.timings) log << "suite " << t.suite << ": " << format_plain(t.seconds) << " s\n";
  log << report.passed() << "/" << report.total() << " checks passed\n";
  return {body, report.all_pass() ? kOk : kChecksFailed, log.str()};
}

// Entries (0,0), (0,D/2), (D/2,0), (D-1,D-1) of a D x D operator.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> sampled_entries(Eigen::Index dim) {
  return {{0, 0}, {0, dim / 2}, {dim / 2, 0}, {dim - 1, dim - 1}};
}

inline Output cmd_simulate(const Config& cfg) {
  const Grid grid = cfg.grid();
  validate_grid(grid);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "q,n_sites,t,object,row,col,re,im,residual_heisenberg,residual_gminus\n";
  bool pass = true;
  for (double q : grid.qs)
    for (std::size_t n_sites : grid.sites) {
      const auto chain = build_chain(build_r(q), n_sites, 1);
      for (double t : grid.times) {
        auto emit = [&](const std::string& object, const LaxSolution& sol) {
          pass = pass && sol.heisenberg_residual < cfg.tolerance && sol.minus_residual < cfg.tolerance;
          for (const auto& [r, c] : sampled_entries(sol.value.matrix().rows())) {
            const Complex v = sol.value(r, c);
            csv << format_plain(q) << ',' << n_sites << ',' << format_plain(t) << ',' << object << ',' << r << ','
                << c << ',' << format_sci(v.real()) << ',' << format_sci(v.imag()) << ','
                << format_sci(sol.heisenberg_residual) << ',' << format_sci(sol.minus_residual) << '\n';
            rows.push_back({{"q", q}, {"n_sites", n_sites}, {"t", t}, {"object", object}, {"row", r}, {"col", c},
                            {"re", v.real()}, {"im", v.imag()}, {"residual_heisenberg", sol.heisenberg_residual},
                            {"residual_gminus", sol.minus_residual}});
          }
        };
        emit("T", solve_lax(*chain, t));
        for (std::size_t n = 1; n <= n_sites; ++n) emit("L" + std::to_string(n), solve_chain_lax(*chain, n, t));
      }
    }
  const std::string body = resolved_format(cfg, "csv") == "json" ? rows.dump(2) + "\n" : csv.str();
  return {body, pass ? kOk : kChecksFailed, {}};
}

inline nlohmann::json factorize_point(const ChainSystem& c, double t, double tol) {
  const Operator g = g_full(c, t);
  const Operator gp = g_plus(c, t);
  const Operator gm = g_minus(c, t);
  const FactorizationResult lu = gauss_factorize(g, Normalization::unit_lower);
  const Operator id = Operator::identity(g.shape());
  auto rel = [](double x, const Operator& o) { return x / std::max(1.0, o.norm()); };

  const Operator gauge = gauge_factor(gm, lu.lower);
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t i = 0; i < c.local_dim(); ++i) blocks.push_back(leading_block(gauge, i, i).norm());

  const double reconstruction = lu.reconstruction_residual;
  const double lower_tri = rel(strictly_upper_norm(lu.lower), lu.lower);
  const double upper_tri = rel(strictly_lower_norm(lu.upper), lu.upper);
  const double gauge_res = diagonal_gauge_residual(gm, lu.lower);
  return {{"normalization", to_string(lu.normalization)},
          {"reconstruction_residual", reconstruction},
          {"lower_triangular_residual", lower_tri},
          {"upper_triangular_residual", upper_tri},
          {"gauge_residual", gauge_res},
          {"closed_form_residual", rel_residual(gm * gp, g)},
          {"lower_identity_deviation", rel_residual(lu.lower, id)},
          {"upper_identity_deviation", rel_residual(lu.upper, id)},
          {"gauge_block_norms", blocks},
          {"pass", reconstruction < tol && lower_tri < tol && upper_tri < tol && gauge_res < tol}};
}

inline Output cmd_factorize(const Config& cfg) {
  const Grid grid = cfg.grid();
  validate_grid(grid);
  nlohmann::json points = nlohmann::json::array();
  std::size_t failed = 0;
  for (double q : grid.qs)
    for (std::size_t n_sites : grid.sites) {
      const auto chain = build_chain(build_r(q), n_sites, 1);
      for (double t : grid.times) {
        nlohmann::json point{{"q", q}, {"n_sites", n_sites}, {"t", t}};
        try {
          point.update(factorize_point(*chain, t, cfg.tolerance));
        } catch (const Error& e) {
          point["pass"] = false;
          point["error"] = e.what();
        }
        if (!point["pass"].get<bool>()) ++failed;
        points.push_back(std::move(point));
      }
    }
  nlohmann::json out{{"config", config_json("factorize", grid)},
                     {"tolerance", cfg.tolerance},
                     {"points", points},
                     {"summary", {{"total", points.size()}, {"passed", points.size() - failed}, {"failed", failed}}}};
  if (resolved_format(cfg, "json") == "csv") {
    std::ostringstream csv;
    csv << "q,n_sites,t,reconstruction_residual,lower_triangular_residual,upper_triangular_residual,gauge_residual,"
           "closed_form_residual,pass\n";
    for (const auto& p : points) {
      auto num = [&](const char* key) { return p.contains(key) ? format_sci(p[key].get<double>()) : std::string(); };
      csv << format_plain(p["q"].get<double>()) << ',' << p["n_sites"].get<std::size_t>() << ','
          << format_plain(p["t"].get<double>()) << ',' << num("reconstruction_residual") << ','
          << num("lower_triangular_residual") << ',' << num("upper_triangular_residual") << ','
          << num("gauge_residual") << ',' << num("closed_form_residual") << ','
          << (p["pass"].get<bool>() ? "true" : "false") << '\n';
    }
    return {csv.str(), failed == 0 ? kOk : kChecksFailed, {}};
  }
  return {out.dump(2) + "\n", failed == 0 ? kOk : kChecksFailed, {}};
}

inline Output cmd_sweep(const Config& cfg) {
  const auto rows = sweep(cfg.observable, cfg.grid(), threads_from_env());
  const std::string body = resolved_format(cfg, "csv") == "json" ? sweep_to_json(rows).dump(2) + "\n" : sweep_to_csv(rows);
  return {body, kOk, {}};
}

inline void add_grid_options(CLI::App& app, Config& cfg) {
  app.add_option("--q", cfg.qs, "deformation parameter; repeatable, nonzero")
      ->capture_default_str()
      ->check(CLI::Number)
      ->check(CLI::Validator(
          [](std::string& s) -> std::string {
            const double v = std::stod(s);
            return (v == 0.0 || !std::isfinite(v)) ? "q must be finite and nonzero" : "";
          },
          "NONZERO"));
  app.add_option("--sites", cfg.sites, "chain length N; repeatable")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, kMaxSites));
  app.add_option("--tower-depth", cfg.tower_depth, "number of conserved charges h_1..h_k")
      ->capture_default_str()
      ->check(CLI::Range(1, 6));
  app.add_option("--t", cfg.times, "evaluation time; repeatable, |t| <= 2")
      ->capture_default_str()
      ->check(CLI::Range(-2.0, 2.0));
  app.add_option("--tol", cfg.tolerance, "pass threshold for simulate and factorize")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--suite", cfg.suite, "verification suite")
      ->capture_default_str()
      ->check(CLI::IsMember([] {
        auto names = suite_names();
        names.push_back("all");
        return names;
      }()));
  app.add_option("--observable", cfg.observable, "sweep observable")
      ->capture_default_str()
      ->check(CLI::IsMember(observable_names()));
  app.add_option("--out", cfg.out, "output file [stdout]")->capture_default_str();
  app.add_option("--format", cfg.format, "json, csv, or auto (json for verify/factorize, csv otherwise)")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "json", "csv"}));
  app.add_flag("--full-grid", cfg.full_grid,
               "use q in {0.7,1,1.3,2} and N in {1,2,3}, ignoring --q and --sites [off]");
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Quantized Lax equations on a GL_q(2) spin chain: verify, simulate, factorize, sweep", "qlax"};
  app.set_config("--config", "", "key=value file mirroring the long flags [none]");
  app.require_subcommand(1);
  add_grid_options(app, cfg);
  auto* verify = app.add_subcommand("verify", "run a verification suite and write a JSON report")->fallthrough();
  auto* simulate = app.add_subcommand("simulate", "time series of T(t) and L^n(t) entries")->fallthrough();
  auto* factorize = app.add_subcommand("factorize", "block Gauss factorization of exp(-itM)")->fallthrough();
  auto* sweeper = app.add_subcommand("sweep", "tabulate an observable over the grid")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Output result;
  try {
    if (*verify) result = cmd_verify(cfg);
    else if (*simulate) result = cmd_simulate(cfg);
    else if (*factorize) result = cmd_factorize(cfg);
    else if (*sweeper) result = cmd_sweep(cfg);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kChecksFailed;
  }

  err << result.log;
  if (cfg.out.empty()) {
    out << result.body;
    out.flush();
    if (!out) {
      err << "error: failed writing to stdout\n";
      return kIo;
    }
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    file << result.body;
    file.close();
    if (!file) {
      err << "error: cannot write '" << cfg.out << "'\n";
      return kIo;
    }
  }
  return result.code;
}

}  // namespace qlax::cli

#endif  // QLAX_TOOLS_CLI_HPP
