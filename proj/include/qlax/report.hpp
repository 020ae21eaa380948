#ifndef QLAX_REPORT_HPP
#define QLAX_REPORT_HPP

// Verification suites over (q, N, t) grids.  A failed identity is a data
// point, not an exception: every check yields a CheckResult, and errors
// raised while evaluating one are recorded as failed checks.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qlax/chain.hpp"
#include "qlax/errors.hpp"
#include "qlax/evolution.hpp"
#include "qlax/rmatrix.hpp"
#include "qlax/tensor.hpp"

namespace qlax {

// Pass thresholds, one per identity family.
namespace tol {
inline constexpr double ybe = 1e-12;
inline constexpr double r_inverse = 1e-12;
inline constexpr double triangular_split = 1e-12;
inline constexpr double hecke = 1e-12;
inline constexpr double qtrace = 1e-11;
inline constexpr double qtrace_diagonal = 1e-12;
inline constexpr double qtrace_unit = 1e-15;
inline constexpr double rtt = 1e-11;
inline constexpr double ultralocality = 1e-12;
inline constexpr double tower_commute = 1e-11;
inline constexpr double trace_cyclicity = 1e-11;
inline constexpr double prop1 = 1e-10;
inline constexpr double prop5 = 1e-10;
inline constexpr double closure = 1e-11;
inline constexpr double commzero = 1e-10;
inline constexpr double factorization = 1e-10;
inline constexpr double solution = 1e-9;
inline constexpr double ode_fd = 1e-6;
inline constexpr double triangular = 1e-10;
inline constexpr double commutes_t0 = 1e-10;
inline constexpr double initial = 1e-14;
inline constexpr double chain_solution = 1e-9;
inline constexpr double gn_identity = 1e-9;
inline constexpr double conjugation = 1e-11;
inline constexpr double shifted = 1e-11;
inline constexpr double reconstruction = 1e-10;
inline constexpr double factor_triangular = 1e-11;
inline constexpr double gauge = 1e-9;
inline constexpr double conservation = 1e-10;
inline constexpr double spectrum = 1e-8;
inline constexpr double rk4 = 1e-6;
inline constexpr double rk4_order = 0.5;
}  // namespace tol

struct Grid {
  std::vector<double> qs{1.3};
  std::vector<std::size_t> sites{2};
  std::vector<double> times{0.1, 0.5, 1.0};
  std::size_t tower_depth = 3;

  static Grid defaults() {
    Grid g;
    g.qs = {0.7, 1.0, 1.3, 2.0};
    g.sites = {1, 2, 3};
    return g;
  }
};

struct CheckResult {
  std::string suite;
  std::string name;
  double q = 0.0;
  std::optional<std::size_t> n_sites;
  std::optional<double> t;
  std::optional<std::size_t> site;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;
};

struct SuiteTiming {
  std::string suite;
  double seconds = 0.0;
};

struct VerificationReport {
  std::string suite;
  Grid config;
  std::vector<CheckResult> checks;
  std::vector<SuiteTiming> timings;

  std::size_t total() const { return checks.size(); }
  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.pass; }));
  }
  std::size_t failed() const { return total() - passed(); }
  bool all_pass() const { return failed() == 0; }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"ybe",  "rmatrix", "qtrace", "rtt",          "prop1",     "prop5",
                                              "app1", "thm1",    "thm2",   "app2", "conservation", "ode-oracle"};
  return names;
}

inline const std::vector<std::string>& observable_names() {
  static const std::vector<std::string> names{"lax-residual", "conservation-drift", "factorization-residual",
                                              "triangularity-residual"};
  return names;
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

using Task = std::function<std::vector<CheckResult>()>;

// Runs tasks on up to `threads` workers; output order follows task order.
template <typename Result>
std::vector<Result> run_parallel(const std::vector<std::function<Result()>>& tasks, std::size_t threads) {
  std::vector<Result> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) out[i] = tasks[i]();
  };
  const std::size_t n = std::min(resolve_threads(threads), std::max<std::size_t>(1, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

class ChainCache {
 public:
  ChainCache(const Grid& grid, std::size_t threads) {
    std::vector<std::pair<double, std::size_t>> keys;
    for (double q : grid.qs)
      for (std::size_t n : grid.sites) keys.emplace_back(q, n);
    std::vector<std::function<std::shared_ptr<const ChainSystem>()>> build;
    for (const auto& [q, n] : keys) {
      build.emplace_back([q = q, n = n, k = grid.tower_depth] { return build_chain(build_r(q), n, k); });
    }
    auto chains = run_parallel(build, threads);
    for (std::size_t i = 0; i < keys.size(); ++i) chains_[keys[i]] = chains[i];
  }

  const ChainSystem& get(double q, std::size_t n) const { return *chains_.at({q, n}); }

 private:
  std::map<std::pair<double, std::size_t>, std::shared_ptr<const ChainSystem>> chains_;
};

struct Params {
  double q = 0.0;
  std::optional<std::size_t> n_sites;
  std::optional<double> t;
  std::optional<std::size_t> site;
};

inline CheckResult check(const std::string& suite, const std::string& name, const Params& p, double residual,
                         double tolerance) {
  return {suite, name, p.q, p.n_sites, p.t, p.site, residual, tolerance, residual < tolerance, {}};
}

inline CheckResult failure(const std::string& suite, const Params& p, const std::string& what) {
  return {suite,   suite + ".error", p.q, p.n_sites, p.t, p.site, std::numeric_limits<double>::infinity(),
          0.0,     false,            what};
}

inline Task guarded(const std::string& suite, Params p, std::function<std::vector<CheckResult>()> body) {
  return [suite, p, body = std::move(body)]() -> std::vector<CheckResult> {
    try {
      return body();
    } catch (const std::exception& e) {
      return {failure(suite, p, e.what())};
    }
  };
}

inline Params with_site(Params p, std::size_t n) {
  p.site = n;
  return p;
}

// Step-size ladder for the RK4 order estimate: dt = 0.25 / 2^k.
inline constexpr int kOrderLadder = 7;
inline constexpr double kOrderFloor = 1e-13;

inline double rk4_order_residual(const ChainSystem& c, double t_end, const Operator& exact) {
  std::vector<double> errors;
  for (int k = 0; k < kOrderLadder; ++k) {
    const double dt = 0.25 / std::pow(2.0, k);
    errors.push_back(rel_residual(lax_ode_integrate(c, t_end, dt), exact));
  }
  // Finest consecutive pair whose finer error is still above roundoff.
  for (int k = kOrderLadder - 2; k >= 0; --k) {
    if (errors[static_cast<std::size_t>(k) + 1] > kOrderFloor) {
      const double order = std::log2(errors[static_cast<std::size_t>(k)] / errors[static_cast<std::size_t>(k) + 1]);
      return std::abs(order - 4.0);
    }
  }
  // Exact to roundoff even at the coarsest step: nothing to measure.
  return errors.front() > kOrderFloor ? std::numeric_limits<double>::infinity() : 0.0;
}

inline double max_tower_drift(const ChainSystem& c, const Operator& evolved) {
  const auto now = hamiltonian_tower(evolved, c.tower_depth());
  double worst = 0.0;
  for (std::size_t k = 1; k <= c.tower_depth(); ++k) worst = std::max(worst, rel_residual(now[k - 1], c.tower(k)));
  return worst;
}

inline std::vector<Task> tasks_for(const std::string& suite, const Grid& grid, const ChainCache& cache) {
  std::vector<Task> tasks;
  const std::string s = suite;
  auto per_q = [&](auto body) {
    for (double q : grid.qs) {
      const Params p{q, std::nullopt, std::nullopt, std::nullopt};
      tasks.push_back(guarded(s, p, [=] { return body(p); }));
    }
  };
  auto per_chain = [&](auto body) {
    for (double q : grid.qs)
      for (std::size_t n : grid.sites) {
        Params p{q, n, std::nullopt, std::nullopt};
        tasks.push_back(guarded(s, p, [=, &cache] { return body(p, cache.get(q, n)); }));
      }
  };
  auto per_time = [&](auto body) {
    for (double q : grid.qs)
      for (std::size_t n : grid.sites)
        for (double t : grid.times) {
          Params p{q, n, t, std::nullopt};
          tasks.push_back(guarded(s, p, [=, &cache] { return body(p, cache.get(q, n), t); }));
        }
  };

  if (suite == "ybe") {
    per_q([s](Params p) {
      return std::vector{check(s, "ybe.residual", p, yang_baxter_residual(build_r(p.q)), tol::ybe)};
    });
  } else if (suite == "rmatrix") {
    per_q([s](Params p) {
      const RMatrix r = build_r(p.q);
      const Operator rm = r_pm(r, Sign::minus);
      const Operator id = Operator::identity(r.op().shape());
      const double inv = std::max(rel_residual(rm * r.op(), id), rel_residual(r.op() * rm, id));
      return std::vector{check(s, "rmatrix.inverse", p, inv, tol::r_inverse),
                         check(s, "rmatrix.triangular_split", p, triangular_split_residual(r), tol::triangular_split),
                         check(s, "rmatrix.hecke", p, hecke_residual(r), tol::hecke)};
    });
  } else if (suite == "qtrace") {
    per_q([s](Params p) {
      const RMatrix r = build_r(p.q);
      const QTraceMatrix qt = quantum_trace_matrix(r);
      const Matrix diag = qt.dmat.diagonal().asDiagonal();
      std::vector<CheckResult> out{check(s, "qtrace.identity", p, d_identity_residual(r, qt), tol::qtrace),
                                   check(s, "qtrace.diagonal", p, (qt.dmat - diag).norm(), tol::qtrace_diagonal)};
      if (p.q == 1.0) {
        const auto d = qt.dmat.rows();
        out.push_back(check(s, "qtrace.unit", p, (qt.dmat - Matrix::Identity(d, d)).norm(), tol::qtrace_unit));
      }
      return out;
    });
  } else if (suite == "rtt") {
    per_chain([s](Params p, const ChainSystem& c) {
      std::vector<CheckResult> out;
      out.push_back(check(s, "rtt.monodromy", p, rtt_residual(c, c.monodromy()), tol::rtt));
      for (std::size_t n = 1; n <= c.n_sites() + 1; ++n) {
        out.push_back(check(s, "rtt.psi", with_site(p, n), rtt_residual(c, c.psi(n)), tol::rtt));
      }
      for (std::size_t n = 1; n <= c.n_sites(); ++n) {
        out.push_back(check(s, "rtt.site", with_site(p, n), rtt_residual(c, c.site_op(n)), tol::rtt));
      }
      if (c.n_sites() > 1) {
        double worst = 0.0;
        for (std::size_t i = 1; i <= c.n_sites(); ++i)
          for (std::size_t j = 1; j <= c.n_sites(); ++j)
            if (i != j) worst = std::max(worst, ultralocality_residual(c, i, j));
        out.push_back(check(s, "rtt.ultralocality", p, worst, tol::ultralocality));
      }
      double tower = 0.0;
      for (std::size_t j = 1; j <= c.tower_depth(); ++j)
        for (std::size_t k = 1; k <= c.tower_depth(); ++k)
          tower = std::max(tower, rel_residual(c.tower(j) * c.tower(k), c.tower(k) * c.tower(j)));
      out.push_back(check(s, "rtt.tower_commute", p, tower, tol::tower_commute));
      for (std::size_t n = 1; n <= c.n_sites() + 1; ++n) {
        out.push_back(check(s, "rtt.trace_cyclicity", with_site(p, n),
                            rel_residual(aux_trace(shifted_monodromy(c, n)), c.hamiltonian()), tol::trace_cyclicity));
      }
      return out;
    });
  } else if (suite == "prop1") {
    per_chain([s](Params p, const ChainSystem& c) {
      const auto [plus, minus] = prop1_residuals(c);
      return std::vector{check(s, "prop1.plus", p, plus, tol::prop1), check(s, "prop1.minus", p, minus, tol::prop1)};
    });
  } else if (suite == "prop5") {
    per_chain([s](Params p, const ChainSystem& c) {
      std::vector<CheckResult> out;
      for (std::size_t n = 1; n <= c.n_sites(); ++n) {
        out.push_back(check(s, "prop5.plus", with_site(p, n), prop5_residual(c, n, Sign::plus), tol::prop5));
        out.push_back(check(s, "prop5.minus", with_site(p, n), prop5_residual(c, n, Sign::minus), tol::prop5));
      }
      out.push_back(check(s, "prop5.closure.plus", p, periodic_closure_residual(c, Sign::plus), tol::closure));
      out.push_back(check(s, "prop5.closure.minus", p, periodic_closure_residual(c, Sign::minus), tol::closure));
      return out;
    });
  } else if (suite == "app1") {
    per_chain([s](Params p, const ChainSystem& c) {
      const Operator& h = c.lifted_hamiltonian();
      const Operator a = h - c.lax_matrix(1, Sign::minus);
      const Operator b = h - c.lax_matrix(1, Sign::plus);
      return std::vector{check(s, "app1.commzero", p, rel_residual(a * b, b * a), tol::commzero)};
    });
  } else if (suite == "thm1") {
    per_chain([s](Params p, const ChainSystem& c) {
      Params p0 = p;
      p0.t = 0.0;
      const Operator id = Operator::identity(c.shape());
      const double dev = std::max({rel_residual(g_plus(c, 0.0), id), rel_residual(g_minus(c, 0.0), id),
                                   rel_residual(g_full(c, 0.0), id),
                                   rel_residual(solve_lax(c, 0.0).value, c.monodromy())});
      return std::vector{check(s, "thm1.initial", p0, dev, tol::initial)};
    });
    per_time([s](Params p, const ChainSystem& c, double t) {
      const Operator gp = g_plus(c, t);
      const Operator gm = g_minus(c, t);
      const Operator g = g_full(c, t);
      const LaxSolution sol = solve_lax(c, t);
      const OdeResiduals ode = g_ode_residuals(c, t);
      return std::vector{
          check(s, "thm1.factorization", p, rel_residual(gm * gp, g), tol::factorization),
          check(s, "thm1.solution.minus", p, sol.minus_residual, tol::solution),
          check(s, "thm1.solution.heisenberg", p, sol.heisenberg_residual, tol::solution),
          check(s, "thm1.ode.plus", p, ode.plus, tol::ode_fd),
          check(s, "thm1.ode.minus", p, ode.minus, tol::ode_fd),
          check(s, "thm1.lax_equation", p, lax_equation_residual(c, t), tol::ode_fd),
          check(s, "thm1.triangular.plus", p, strictly_lower_norm(gp) / std::max(1.0, gp.norm()), tol::triangular),
          check(s, "thm1.triangular.minus", p, strictly_upper_norm(gm) / std::max(1.0, gm.norm()), tol::triangular),
          check(s, "thm1.commutes_t0", p, rel_residual(g * c.monodromy(), c.monodromy() * g), tol::commutes_t0)};
    });
  } else if (suite == "thm2") {
    per_chain([s](Params p, const ChainSystem& c) {
      std::vector<CheckResult> out;
      for (std::size_t n = 1; n <= c.n_sites(); ++n) {
        const Params pn = with_site(p, n);
        for (Sign sign : {Sign::plus, Sign::minus}) {
          const ConjugationResiduals r = thm2_conjugation_residuals(c, n, sign);
          out.push_back(check(s, std::string("thm2.conjugation.") + to_string(sign), pn, r.legwise, tol::conjugation));
          out.push_back(
              check(s, std::string("thm2.conjugation_traced.") + to_string(sign), pn, r.traced, tol::conjugation));
        }
        // Reordered product L^n ... L^N L^1 ... L^{n-1}.
        Operator reordered = Operator::identity(c.shape());
        for (std::size_t k = 0; k < c.n_sites(); ++k) reordered = reordered * c.site_op((n - 1 + k) % c.n_sites() + 1);
        out.push_back(check(s, "thm2.shifted_monodromy", pn, rel_residual(shifted_monodromy(c, n), reordered),
                            tol::shifted));
      }
      return out;
    });
    per_time([s](Params p, const ChainSystem& c, double t) {
      std::vector<CheckResult> out;
      for (std::size_t n = 1; n <= c.n_sites() + 1; ++n) {
        const Params pn = with_site(p, n);
        const SiteFactors f = g_site(c, n, t);
        out.push_back(check(s, "thm2.gn_identity", pn, rel_residual(f.g, f.shifted_exp), tol::gn_identity));
        out.push_back(check(s, "thm2.site_factorization", pn, rel_residual(f.g_minus * f.g_plus, f.g),
                            tol::gn_identity));
        const double tri = std::max(strictly_lower_norm(f.g_plus) / std::max(1.0, f.g_plus.norm()),
                                    strictly_upper_norm(f.g_minus) / std::max(1.0, f.g_minus.norm()));
        out.push_back(check(s, "thm2.site_triangular", pn, tri, tol::triangular));
      }
      for (std::size_t n = 1; n <= c.n_sites(); ++n) {
        const Params pn = with_site(p, n);
        const LaxSolution sol = solve_chain_lax(c, n, t);
        out.push_back(check(s, "thm2.chain_lax.heisenberg", pn, sol.heisenberg_residual, tol::chain_solution));
        out.push_back(check(s, "thm2.chain_lax.minus", pn, sol.minus_residual, tol::chain_solution));
      }
      return out;
    });
  } else if (suite == "app2") {
    per_time([s](Params p, const ChainSystem& c, double t) {
      const Operator g = g_full(c, t);
      const FactorizationResult lu = gauss_factorize(g, Normalization::unit_lower);
      const FactorizationResult crout = gauss_factorize(g, Normalization::unit_upper);
      auto rel = [](double x, const Operator& o) { return x / std::max(1.0, o.norm()); };
      return std::vector{
          check(s, "app2.reconstruction", p, std::max(lu.reconstruction_residual, crout.reconstruction_residual),
                tol::reconstruction),
          check(s, "app2.lower_triangular", p,
                std::max(rel(strictly_upper_norm(lu.lower), lu.lower), rel(strictly_upper_norm(crout.lower), crout.lower)),
                tol::factor_triangular),
          check(s, "app2.upper_triangular", p,
                std::max(rel(strictly_lower_norm(lu.upper), lu.upper), rel(strictly_lower_norm(crout.upper), crout.upper)),
                tol::factor_triangular),
          check(s, "app2.gauge", p, diagonal_gauge_residual(g_minus(c, t), lu.lower), tol::gauge),
          check(s, "app2.gauge_uniqueness", p, diagonal_gauge_residual(lu.lower, crout.lower), tol::gauge)};
    });
  } else if (suite == "conservation") {
    per_time([s](Params p, const ChainSystem& c, double t) {
      const Operator evolved = solve_lax(c, t).value;
      const auto now = hamiltonian_tower(evolved, c.tower_depth());
      std::vector<CheckResult> out;
      for (std::size_t k = 1; k <= c.tower_depth(); ++k) {
        out.push_back(check(s, "conservation.h" + std::to_string(k), p, rel_residual(now[k - 1], c.tower(k)),
                            tol::conservation));
      }
      out.push_back(check(s, "conservation.spectrum", p, spectral_distance(evolved, c.monodromy()), tol::spectrum));
      return out;
    });
  } else if (suite == "ode-oracle") {
    per_chain([s](Params p, const ChainSystem& c) {
      constexpr double t_end = 0.5;
      p.t = t_end;
      const Operator exact = solve_lax(c, t_end).value;
      return std::vector{check(s, "ode.rk4", p, rel_residual(lax_ode_integrate(c, t_end, 1e-3), exact), tol::rk4),
                         check(s, "ode.rk4_order", p, rk4_order_residual(c, t_end, exact), tol::rk4_order)};
    });
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  return tasks;
}

inline auto sort_key(const CheckResult& c) { return std::tie(c.suite, c.q, c.n_sites, c.t, c.site, c.name); }

}  // namespace detail

inline void validate_grid(const Grid& grid) {
  if (grid.qs.empty() || grid.sites.empty()) throw UsageError("grid needs at least one q and one chain length");
  for (double q : grid.qs) {
    if (!std::isfinite(q) || q == 0.0) throw UsageError("q must be finite and nonzero");
  }
  for (double t : grid.times) {
    if (!std::isfinite(t) || std::abs(t) > 2.0) throw UsageError("times must satisfy |t| <= 2");
  }
  for (std::size_t n : grid.sites) {
    if (n < 1 || n > kMaxSites) throw UsageError("chain length must be in 1.." + std::to_string(kMaxSites));
  }
  if (grid.tower_depth < 1) throw UsageError("tower depth must be at least 1");
}

inline VerificationReport run_suite(const std::string& suite, const Grid& grid, std::size_t threads = 0) {
  const bool all = suite == "all";
  if (!all && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    throw UsageError("unknown suite '" + suite + "'");
  }
  validate_grid(grid);
  VerificationReport report{suite, grid, {}, {}};
  const std::vector<std::string> selected = all ? suite_names() : std::vector<std::string>{suite};

  // Suites that only touch the R-matrix do not need chains.
  const bool needs_chains = std::any_of(selected.begin(), selected.end(), [](const std::string& s) {
    return s != "ybe" && s != "rmatrix" && s != "qtrace";
  });
  const Grid chain_grid = needs_chains ? grid : Grid{grid.qs, {}, grid.times, grid.tower_depth};
  const detail::ChainCache cache(chain_grid, threads);

  for (const auto& name : selected) {
    const auto start = std::chrono::steady_clock::now();
    const auto tasks = detail::tasks_for(name, grid, cache);
    for (auto& batch : detail::run_parallel(tasks, threads)) {
      for (auto& c : batch) report.checks.push_back(std::move(c));
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.timings.push_back({name, elapsed.count()});
  }
  std::stable_sort(report.checks.begin(), report.checks.end(),
                   [](const CheckResult& a, const CheckResult& b) { return detail::sort_key(a) < detail::sort_key(b); });
  return report;
}

struct SweepRow {
  double q = 0.0;
  std::size_t n_sites = 0;
  double t = 0.0;
  std::size_t site = 0;  // 0: global quantity
  std::string observable;
  double value = 0.0;
};

inline double observable_value(const std::string& observable, const ChainSystem& c, double t) {
  if (observable == "lax-residual") return lax_equation_residual(c, t);
  if (observable == "conservation-drift") return detail::max_tower_drift(c, solve_lax(c, t).value);
  if (observable == "factorization-residual") return rel_residual(g_minus(c, t) * g_plus(c, t), g_full(c, t));
  if (observable == "triangularity-residual") {
    const Operator gp = g_plus(c, t);
    const Operator gm = g_minus(c, t);
    return std::max(strictly_lower_norm(gp) / std::max(1.0, gp.norm()),
                    strictly_upper_norm(gm) / std::max(1.0, gm.norm()));
  }
  throw UsageError("unknown observable '" + observable + "'");
}

inline std::vector<SweepRow> sweep(const std::string& observable, const Grid& grid, std::size_t threads = 0) {
  if (std::find(observable_names().begin(), observable_names().end(), observable) == observable_names().end()) {
    throw UsageError("unknown observable '" + observable + "'");
  }
  validate_grid(grid);
  const detail::ChainCache cache(grid, threads);
  std::vector<std::function<SweepRow()>> tasks;
  for (double q : grid.qs)
    for (std::size_t n : grid.sites)
      for (double t : grid.times) {
        tasks.emplace_back([&cache, &observable, q, n, t] {
          return SweepRow{q, n, t, 0, observable, observable_value(observable, cache.get(q, n), t)};
        });
      }
  return detail::run_parallel(tasks, threads);
}

// Scientific notation with 10 significant digits.
inline std::string format_sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", x);
  return buf;
}

inline std::string format_plain(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline nlohmann::json config_json(const std::string& suite, const Grid& g) {
  return {{"suite", suite}, {"q", g.qs}, {"n_sites", g.sites}, {"times", g.times}, {"tower_depth", g.tower_depth}};
}

inline nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  auto opt = [](const auto& o) -> nlohmann::json {
    if (o) return *o;
    return nullptr;
  };
  for (const auto& c : r.checks) {
    nlohmann::json j{{"name", c.name},
                     {"q", c.q},
                     {"n_sites", opt(c.n_sites)},
                     {"t", opt(c.t)},
                     {"site", opt(c.site)},
                     {"residual", std::isfinite(c.residual) ? nlohmann::json(c.residual) : nlohmann::json(nullptr)},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass}};
    if (!c.error.empty()) j["error"] = c.error;
    checks.push_back(std::move(j));
  }
  return {{"config", config_json(r.suite, r.config)},
          {"checks", std::move(checks)},
          {"summary", {{"total", r.total()}, {"passed", r.passed()}, {"failed", r.failed()}}}};
}

inline std::string checks_to_csv(const VerificationReport& r) {
  std::ostringstream out;
  out << "name,q,n_sites,t,site,residual,tolerance,pass\n";
  for (const auto& c : r.checks) {
    out << c.name << ',' << format_plain(c.q) << ',' << (c.n_sites ? std::to_string(*c.n_sites) : "") << ','
        << (c.t ? format_plain(*c.t) : "") << ',' << (c.site ? std::to_string(*c.site) : "") << ','
        << format_sci(c.residual) << ',' << format_sci(c.tolerance) << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "q,n_sites,t,site,observable,value\n";
  for (const auto& r : rows) {
    out << format_plain(r.q) << ',' << r.n_sites << ',' << format_plain(r.t) << ',' << r.site << ',' << r.observable
        << ',' << format_sci(r.value) << '\n';
  }
  return out.str();
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"q", r.q}, {"n_sites", r.n_sites}, {"t", r.t}, {"site", r.site}, {"observable", r.observable},
                   {"value", r.value}});
  }
  return out;
}

}  // namespace qlax

#endif  // QLAX_REPORT_HPP
