#ifndef QLAX_EVOLUTION_HPP
#define QLAX_EVOLUTION_HPP

// Time evolution of the chain and its factorized solution.
//
// Dynamics follow i x' = [h, x], so x(t) = exp(-ith) x exp(ith).  The closed
// forms
//
//   g+(t) = exp(-it h) exp(-it(M+ - h))
//   g-(t) = exp(-it(h - M-)) exp(it h)
//
// solve i g+' = M+(t) g+ and i g-' = -g- M-(t) with g(0) = 1, and
// g-(t) g+(t) = exp(-it(M+ - M-)).  Everything here is evaluated with dense
// matrix exponentials; the RK4 integrator is only an independent oracle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qlax/chain.hpp"
#include "qlax/errors.hpp"
#include "qlax/tensor.hpp"

namespace qlax {

inline bool acts_on_sites_only(const LegShape& shape) {
  return std::all_of(shape.legs().begin(), shape.legs().end(),
                     [](const Leg& l) { return l.kind == LegKind::site; });
}

// exp(-ith) x exp(ith): solves i x' = [h, x] with x(0) = x.  h need not be
// Hermitian.
inline Operator heisenberg_evolve(const Operator& x, const Operator& h, double t) {
  if (!acts_on_sites_only(h.shape())) throw ShapeError("heisenberg_evolve: h must act on site legs only");
  const Operator lifted = embed(h, x.shape());
  return mat_exp(Complex(0.0, -t) * lifted) * x * mat_exp(Complex(0.0, t) * lifted);
}

namespace detail {

inline Operator g_plus_from(const Operator& lifted_h, const Operator& m_plus, double t) {
  return mat_exp(Complex(0.0, -t) * lifted_h) * mat_exp(Complex(0.0, -t) * (m_plus - lifted_h));
}

inline Operator g_minus_from(const Operator& lifted_h, const Operator& m_minus, double t) {
  return mat_exp(Complex(0.0, -t) * (lifted_h - m_minus)) * mat_exp(Complex(0.0, t) * lifted_h);
}

}  // namespace detail

inline Operator g_plus(const ChainSystem& c, double t) {
  return detail::g_plus_from(c.lifted_hamiltonian(), c.lax_matrix(1, Sign::plus), t);
}

inline Operator g_minus(const ChainSystem& c, double t) {
  return detail::g_minus_from(c.lifted_hamiltonian(), c.lax_matrix(1, Sign::minus), t);
}

// exp(-it M(0)), M = M+ - M-.
inline Operator g_full(const ChainSystem& c, double t) { return mat_exp(Complex(0.0, -t) * c.m()); }

struct LaxSolution {
  Operator value;            // g+ X g+'^{-1}
  Operator via_minus;        // g-^{-1} X g-'
  Operator via_heisenberg;   // exp(-ith) X exp(ith)
  double minus_residual = 0.0;
  double heisenberg_residual = 0.0;
};

// T(t) = g+(t) T(0) g+(t)^{-1}, cross-checked against the g- and Heisenberg
// forms.
inline LaxSolution solve_lax(const ChainSystem& c, double t) {
  const Operator& t0 = c.monodromy();
  const Operator gp = g_plus(c, t);
  const Operator gm = g_minus(c, t);
  LaxSolution s{gp * t0 * mat_inv(gp), mat_inv(gm) * t0 * gm, heisenberg_evolve(t0, c.hamiltonian(), t)};
  s.minus_residual = rel_residual(s.via_minus, s.value);
  s.heisenberg_residual = rel_residual(s.via_heisenberg, s.value);
  return s;
}

struct SiteFactors {
  Operator g;            // (psi^n)^{-1} exp(-itM(0)) psi^n
  Operator g_plus;       // closed form with M^{+n}
  Operator g_minus;      // closed form with M^{-n}
  Operator shifted_exp;  // exp(-it(M^{+n} - M^{-n}))
};

inline SiteFactors g_site(const ChainSystem& c, std::size_t n, double t) {
  const Operator& psi = c.psi(n);
  const LaxPair& m = c.lax(n);
  return {mat_inv(psi) * g_full(c, t) * psi,
          detail::g_plus_from(c.lifted_hamiltonian(), m.plus, t),
          detail::g_minus_from(c.lifted_hamiltonian(), m.minus, t),
          mat_exp(Complex(0.0, -t) * (m.plus - m.minus))};
}

// L^n(t) = g+^n L^n(0) (g+^{n+1})^{-1} = (g-^n)^{-1} L^n(0) g-^{n+1}, with
// n+1 read periodically.
inline LaxSolution solve_chain_lax(const ChainSystem& c, std::size_t n, double t) {
  const Operator& l0 = c.site_op(n);
  const SiteFactors here = g_site(c, n, t);
  const SiteFactors next = g_site(c, c.next_site(n), t);
  LaxSolution s{here.g_plus * l0 * mat_inv(next.g_plus), mat_inv(here.g_minus) * l0 * next.g_minus,
                heisenberg_evolve(l0, c.hamiltonian(), t)};
  s.minus_residual = rel_residual(s.via_minus, s.value);
  s.heisenberg_residual = rel_residual(s.via_heisenberg, s.value);
  return s;
}

inline constexpr double kFiniteDifferenceStep = 1e-4;

struct OdeResiduals {
  double plus = 0.0;   // i g+' = M+(t) g+
  double minus = 0.0;  // i g-' = -g- M-(t)
};

// Central differences of the closed forms against the right-hand sides, with
// M+-(t) recomputed from T(t).
inline OdeResiduals g_ode_residuals(const ChainSystem& c, double t, double eps = kFiniteDifferenceStep) {
  const LaxPair m_t = lax_m(c.r(), solve_lax(c, t).value);
  const Complex scale(0.0, 1.0 / (2.0 * eps));
  const Operator dgp = scale * (g_plus(c, t + eps) - g_plus(c, t - eps));
  const Operator dgm = scale * (g_minus(c, t + eps) - g_minus(c, t - eps));
  return {rel_residual(dgp, m_t.plus * g_plus(c, t)), rel_residual(dgm, -(g_minus(c, t) * m_t.minus))};
}

// i T'(t) against [M+(T(t)), T(t)] by central differences.
inline double lax_equation_residual(const ChainSystem& c, double t, double eps = kFiniteDifferenceStep) {
  const Operator tt = solve_lax(c, t).value;
  const Operator dt = Complex(0.0, 1.0 / (2.0 * eps)) * (solve_lax(c, t + eps).value - solve_lax(c, t - eps).value);
  return rel_residual(dt, commutator(lax_m(c.r(), tt).plus, tt));
}

enum class Normalization { unit_lower, unit_upper };

inline const char* to_string(Normalization n) {
  return n == Normalization::unit_lower ? "unit-lower" : "unit-upper";
}

struct FactorizationResult {
  Operator lower;
  Operator upper;
  Normalization normalization = Normalization::unit_lower;
  double reconstruction_residual = 0.0;
};

namespace detail {

inline Operator assemble_blocks(const LegShape& shape, const std::vector<std::vector<Matrix>>& blocks) {
  const std::size_t d = blocks.size();
  const auto s = static_cast<Eigen::Index>(shape.stride(0));
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(shape.total_dim()), static_cast<Eigen::Index>(shape.total_dim()));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (blocks[i][j].size() != 0)
        out.block(static_cast<Eigen::Index>(i) * s, static_cast<Eigen::Index>(j) * s, s, s) = blocks[i][j];
  return Operator(shape, std::move(out));
}

inline Matrix invert_corner(const Matrix& m, std::size_t k) {
  Eigen::PartialPivLU<Matrix> lu(m);
  if (!(lu.rcond() > 1.0 / kMaxCondition)) {
    throw DegeneracyError("gauss_factorize: corner block " + std::to_string(k + 1) + " is singular");
  }
  return lu.inverse();
}

}  // namespace detail

// Block LU over the leading aux leg with operator-valued entries and no
// pivoting.  Pivoting would mix aux rows and destroy the triangular
// structure, so a singular corner is reported instead.
//
// For d = 2 and g = [[a, b], [c, e]]:
//   unit-lower: lower = [[1, 0], [c a^{-1}, 1]],  upper = [[a, b], [0, e - c a^{-1} b]]
//   unit-upper: lower = [[a, 0], [c, e - c a^{-1} b]],  upper = [[1, a^{-1} b], [0, 1]]
inline FactorizationResult gauss_factorize(const Operator& g, Normalization norm) {
  const LegShape& shape = g.shape();
  if (shape.size() == 0 || shape[0].kind != LegKind::aux) {
    throw ShapeError("gauss_factorize: leading leg must be an aux leg");
  }
  for (std::size_t i = 1; i < shape.size(); ++i) {
    if (shape[i].kind == LegKind::aux) throw ShapeError("gauss_factorize: expected exactly one aux leg");
  }
  const std::size_t d = shape[0].dim;
  const auto s = static_cast<Eigen::Index>(shape.stride(0));
  auto block = [&](std::size_t i, std::size_t j) -> Matrix {
    return g.matrix().block(static_cast<Eigen::Index>(i) * s, static_cast<Eigen::Index>(j) * s, s, s);
  };
  const Matrix id = Matrix::Identity(s, s);
  const Matrix zero = Matrix::Zero(s, s);
  std::vector<std::vector<Matrix>> lo(d, std::vector<Matrix>(d, zero));
  std::vector<std::vector<Matrix>> up(d, std::vector<Matrix>(d, zero));

  if (norm == Normalization::unit_lower) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k][k] = id;
      for (std::size_t j = k; j < d; ++j) {
        Matrix acc = block(k, j);
        for (std::size_t m = 0; m < k; ++m) acc -= lo[k][m] * up[m][j];
        up[k][j] = std::move(acc);
      }
      const Matrix pivot_inv = detail::invert_corner(up[k][k], k);
      for (std::size_t i = k + 1; i < d; ++i) {
        Matrix acc = block(i, k);
        for (std::size_t m = 0; m < k; ++m) acc -= lo[i][m] * up[m][k];
        lo[i][k] = acc * pivot_inv;
      }
    }
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      up[k][k] = id;
      for (std::size_t i = k; i < d; ++i) {
        Matrix acc = block(i, k);
        for (std::size_t m = 0; m < k; ++m) acc -= lo[i][m] * up[m][k];
        lo[i][k] = std::move(acc);
      }
      const Matrix pivot_inv = detail::invert_corner(lo[k][k], k);
      for (std::size_t j = k + 1; j < d; ++j) {
        Matrix acc = block(k, j);
        for (std::size_t m = 0; m < k; ++m) acc -= lo[k][m] * up[m][j];
        up[k][j] = pivot_inv * acc;
      }
    }
  }

  FactorizationResult r{detail::assemble_blocks(shape, lo), detail::assemble_blocks(shape, up), norm};
  r.reconstruction_residual = rel_residual(r.lower * r.upper, g);
  return r;
}

// lower_a^{-1} lower_b: aux-diagonal whenever both are lower factors of
// triangular factorizations of the same operator.
inline Operator gauge_factor(const Operator& lower_a, const Operator& lower_b) {
  return mat_inv(lower_a) * lower_b;
}

inline double diagonal_gauge_residual(const Operator& lower_a, const Operator& lower_b) {
  const Operator gauge = gauge_factor(lower_a, lower_b);
  return off_diagonal_norm(gauge) / std::max(1.0, gauge.norm());
}

inline constexpr double kMaxOdeSteps = 1e6;

// Classical RK4 for i T' = [M+(T), T], with M+ recomputed from the current T
// at every stage.
inline Operator lax_ode_integrate(const ChainSystem& c, double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t_end)) {
    throw ParameterError("lax_ode_integrate: dt must be positive and finite");
  }
  if (std::abs(t_end) / dt > kMaxOdeSteps) throw ParameterError("lax_ode_integrate: step size underflow");
  Operator x = c.monodromy();
  if (t_end == 0.0) return x;
  const auto steps = std::max<long>(1, std::lround(std::abs(t_end) / dt));
  const double h = t_end / static_cast<double>(steps);
  const RMatrix& r = c.r();
  auto field = [&r](const Operator& y) {
    const Operator mp = lax_m(r, y).plus;
    return Complex(0.0, -1.0) * commutator(mp, y);
  };
  for (long i = 0; i < steps; ++i) {
    const Operator k1 = field(x);
    const Operator k2 = field(x + Complex(h / 2) * k1);
    const Operator k3 = field(x + Complex(h / 2) * k2);
    const Operator k4 = field(x + Complex(h) * k3);
    x = x + Complex(h / 6) * (k1 + Complex(2.0) * k2 + Complex(2.0) * k3 + k4);
  }
  return x;
}

// Maximum distance between the spectra of a and b after greedy
// nearest-neighbour matching, relative to max(1, spectral radius of b).
inline double spectral_distance(const Operator& a, const Operator& b) {
  Eigen::ComplexEigenSolver<Matrix> ea(a.matrix(), false);
  Eigen::ComplexEigenSolver<Matrix> eb(b.matrix(), false);
  if (ea.info() != Eigen::Success || eb.info() != Eigen::Success) {
    throw NumericError("spectral_distance: eigenvalue solver did not converge");
  }
  std::vector<Complex> va(ea.eigenvalues().begin(), ea.eigenvalues().end());
  std::vector<Complex> vb(eb.eigenvalues().begin(), eb.eigenvalues().end());
  auto lex = [](Complex x, Complex y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
  std::sort(va.begin(), va.end(), lex);
  std::sort(vb.begin(), vb.end(), lex);
  double scale = 1.0;
  for (auto v : vb) scale = std::max(scale, std::abs(v));
  std::vector<bool> used(vb.size(), false);
  double worst = 0.0;
  for (auto v : va) {
    std::size_t best = vb.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < vb.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(v - vb[j]);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst / scale;
}

}  // namespace qlax

#endif  // QLAX_EVOLUTION_HPP
