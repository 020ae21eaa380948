#ifndef QLAX_CHAIN_HPP
#define QLAX_CHAIN_HPP

// Periodic quantum chain built from one R-matrix: site L-operators,
// partial products psi^n = L^1 ... L^{n-1}, the monodromy T = L^1 ... L^N,
// the trace Hamiltonians h_k and the Lax matrices M^{+-n}.
//
// Every chain operator lives on the shape (a, s1, ..., sN).  Site indices
// n are 1-based throughout, matching the usual chain notation.

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qlax/errors.hpp"
#include "qlax/rmatrix.hpp"
#include "qlax/tensor.hpp"

namespace qlax {

inline constexpr std::size_t kMaxSites = 10;
// Largest dense side we allow: two aux legs plus all sites.
inline constexpr std::size_t kMaxTotalDim = 4096;

inline constexpr const char* kAux = "a";
inline constexpr const char* kAux2 = "b";

struct LaxPair {
  Operator plus;
  Operator minus;

  const Operator& get(Sign s) const { return s == Sign::plus ? plus : minus; }
};

// M^{-+}_2 = Tr_1[(1 - (R^{+-}_12)^{-1}) Y_1] for a monodromy-like Y on
// (aux, sites).  M^+ pairs with (R^-)^{-1} = R_12 and M^- with
// (R^+)^{-1} = R_21^{-1}.  The result is returned on Y's own shape.
//
// With X = sum x_{(jl),(km)} E_jk (x) E_lm the trace over leg 1 is
// sum x_{(jl),(km)} E_lm (x) Y_kj, which avoids building the two-aux-leg
// space.
inline Operator contract_first_leg(const Matrix& x, const Operator& y) {
  const std::size_t d = y.shape()[0].dim;
  const LegShape& shape = y.shape();
  const auto s = static_cast<Eigen::Index>(shape.stride(0));
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(y.dim()), static_cast<Eigen::Index>(y.dim()));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      const auto yb = y.matrix().block(static_cast<Eigen::Index>(k) * s, static_cast<Eigen::Index>(j) * s, s, s);
      for (std::size_t l = 0; l < d; ++l)
        for (std::size_t m = 0; m < d; ++m) {
          const Complex c = x(static_cast<Eigen::Index>(j * d + l), static_cast<Eigen::Index>(k * d + m));
          if (c == Complex(0.0)) continue;
          out.block(static_cast<Eigen::Index>(l) * s, static_cast<Eigen::Index>(m) * s, s, s) += c * yb;
        }
    }
  return Operator(shape, std::move(out));
}

inline LaxPair lax_m(const RMatrix& r, const Operator& y) {
  const std::size_t d = r.dim();
  const auto dd = static_cast<Eigen::Index>(d * d);
  const Matrix id = Matrix::Identity(dd, dd);
  const Matrix r12 = r.op().matrix();
  const Matrix r21_inv = r_pm(r, Sign::plus).matrix().inverse();
  return {contract_first_leg(id - r12, y), contract_first_leg(id - r21_inv, y)};
}

// Tr over the leading aux leg: an operator on the site legs.
inline Operator aux_trace(const Operator& y) { return partial_trace(y, y.shape()[0].label); }

// h_k = Tr_{1..k}(T_1 ... T_k).  Each T_j touches only aux leg j, so the
// trace peels from the right: W_k = Tr T, W_j = Tr_1(T_1 W_{j+1}).
inline std::vector<Operator> hamiltonian_tower(const Operator& monodromy, std::size_t depth) {
  std::vector<Operator> tower;
  if (depth == 0) return tower;
  const Operator h = aux_trace(monodromy);
  tower.reserve(depth);
  tower.push_back(h);
  for (std::size_t k = 2; k <= depth; ++k) {
    const Operator lifted = embed(tower.back(), monodromy.shape());
    tower.push_back(aux_trace(monodromy * lifted));
  }
  return tower;
}

class ChainSystem;
inline std::shared_ptr<const ChainSystem> build_chain(const RMatrix& r, std::size_t n_sites,
                                                      std::size_t tower_depth = 1);

class ChainSystem {
 public:
  const RMatrix& r() const { return r_; }
  std::size_t n_sites() const { return n_sites_; }
  std::size_t tower_depth() const { return tower_.size(); }
  std::size_t local_dim() const { return r_.dim(); }

  // (a, s1, ..., sN)
  const LegShape& shape() const { return shape_; }
  const LegShape& site_shape() const { return site_shape_; }

  const Operator& site_op(std::size_t n) const { return site_ops_.at(checked_site(n, n_sites_) - 1); }
  const std::vector<Operator>& site_ops() const { return site_ops_; }

  // psi^n for 1 <= n <= N+1; psi^1 = 1, psi^{N+1} = T.
  const Operator& psi(std::size_t n) const { return psi_.at(checked_site(n, n_sites_ + 1) - 1); }

  const Operator& monodromy() const { return psi_.back(); }

  // h = h_1 = Tr_a T, on site legs only.
  const Operator& hamiltonian() const { return tower_.front(); }
  const Operator& tower(std::size_t k) const {
    if (k < 1 || k > tower_.size()) throw ParameterError("tower level out of range");
    return tower_[k - 1];
  }

  // 1 (x) h on the chain shape.
  const Operator& lifted_hamiltonian() const { return lifted_h_; }

  // M^{+-n} for 1 <= n <= N+1.
  const LaxPair& lax(std::size_t n) const { return lax_.at(checked_site(n, n_sites_ + 1) - 1); }
  const Operator& lax_matrix(std::size_t n, Sign s) const { return lax(n).get(s); }

  // Global M = M^+ - M^- (site 1).
  Operator m() const { return lax_.front().plus - lax_.front().minus; }

  std::size_t next_site(std::size_t n) const { return n == n_sites_ ? 1 : n + 1; }

  static std::size_t checked_site(std::size_t n, std::size_t max) {
    if (n < 1 || n > max) {
      throw ParameterError("site index " + std::to_string(n) + " outside 1.." + std::to_string(max));
    }
    return n;
  }

 private:
  friend std::shared_ptr<const ChainSystem> build_chain(const RMatrix&, std::size_t, std::size_t);

  ChainSystem(RMatrix r, std::size_t n) : r_(std::move(r)), n_sites_(n) {}

  RMatrix r_;
  std::size_t n_sites_;
  LegShape shape_;
  LegShape site_shape_;
  std::vector<Operator> site_ops_;
  std::vector<Operator> psi_;
  std::vector<Operator> tower_;
  Operator lifted_h_;
  std::vector<LaxPair> lax_;
};

// (psi^n)^{-1} T psi^n = L^n ... L^N L^1 ... L^{n-1}.
inline Operator shifted_monodromy(const ChainSystem& c, std::size_t n) {
  const Operator& p = c.psi(n);
  return mat_inv(p) * c.monodromy() * p;
}

inline std::shared_ptr<const ChainSystem> build_chain(const RMatrix& r, std::size_t n_sites,
                                                      std::size_t tower_depth) {
  if (n_sites < 1) throw ParameterError("build_chain: need at least one site");
  if (tower_depth < 1) throw ParameterError("build_chain: tower depth must be at least 1");
  std::size_t dim2 = r.dim() * r.dim();
  for (std::size_t n = 0; n < n_sites && dim2 <= kMaxTotalDim; ++n) dim2 *= r.dim();
  if (n_sites > kMaxSites || dim2 > kMaxTotalDim) {
    throw CapacityError("build_chain: " + std::to_string(n_sites) + " sites exceed the dense capacity");
  }

  std::shared_ptr<ChainSystem> c(new ChainSystem(r, n_sites));
  const std::size_t d = r.dim();
  c->site_shape_ = site_legs(n_sites, d);
  c->shape_ = aux_legs({kAux}, d).concat(c->site_shape_);

  const Leg aux = c->shape_[0];
  for (std::size_t n = 1; n <= n_sites; ++n) {
    c->site_ops_.push_back(embed(place(r.op(), aux, c->shape_[n]), c->shape_));
  }
  c->psi_.push_back(Operator::identity(c->shape_));
  for (std::size_t n = 1; n <= n_sites; ++n) c->psi_.push_back(c->psi_.back() * c->site_ops_[n - 1]);

  c->tower_ = hamiltonian_tower(c->monodromy(), tower_depth);
  c->lifted_h_ = embed(c->tower_.front(), c->shape_);

  for (std::size_t n = 1; n <= n_sites + 1; ++n) c->lax_.push_back(lax_m(r, shifted_monodromy(*c, n)));
  return c;
}

inline const Operator& lax_m_site(const ChainSystem& c, std::size_t n, Sign sign) { return c.lax_matrix(n, sign); }

// Shape (a, b, s1, ..., sN) used for two-aux-leg identities.
inline LegShape two_aux_shape(const ChainSystem& c) {
  return aux_legs({kAux, kAux2}, c.local_dim()).concat(c.site_shape());
}

// Y on (a, sites) moved to aux leg b inside (a, b, sites).
inline Operator on_second_aux(const Operator& y, const LegShape& two) {
  return embed(relabel(y, kAux, kAux2), two);
}

inline Operator r_on_aux_pair(const Operator& two_leg, const LegShape& two) {
  return embed(place(two_leg, two[0], two[1]), two);
}

// ||R12 Y1 Y2 - Y2 Y1 R12|| (relative).
inline double rtt_residual(const ChainSystem& c, const Operator& y) {
  const LegShape two = two_aux_shape(c);
  const Operator r12 = r_on_aux_pair(c.r().op(), two);
  const Operator y1 = embed(y, two);
  const Operator y2 = on_second_aux(y, two);
  return rel_residual(r12 * y1 * y2, y2 * y1 * r12);
}

// [L^i_1, L^j_2] for i != j.
inline double ultralocality_residual(const ChainSystem& c, std::size_t i, std::size_t j) {
  const LegShape two = two_aux_shape(c);
  const Operator li = embed(c.site_op(i), two);
  const Operator lj = on_second_aux(c.site_op(j), two);
  return rel_residual(li * lj, lj * li);
}

// Relative residuals of [1(x)h, T] = [M^+-, T], returned as (plus, minus).
inline std::pair<double, double> prop1_residuals(const ChainSystem& c) {
  const Operator& t = c.monodromy();
  const Operator lhs = commutator(c.lifted_hamiltonian(), t);
  return {rel_residual(commutator(c.lax_matrix(1, Sign::plus), t), lhs),
          rel_residual(commutator(c.lax_matrix(1, Sign::minus), t), lhs)};
}

// [1(x)h, L^n] = M^{+-n} L^n - L^n M^{+-(n+1)}, n+1 read periodically.
inline double prop5_residual(const ChainSystem& c, std::size_t n, Sign sign) {
  const Operator& l = c.site_op(n);
  const Operator lhs = commutator(c.lifted_hamiltonian(), l);
  const Operator rhs = c.lax_matrix(n, sign) * l - l * c.lax_matrix(c.next_site(n), sign);
  return rel_residual(rhs, lhs);
}

// M^{+-(N+1)} (from psi^{N+1} = T) against M^{+-1}.
inline double periodic_closure_residual(const ChainSystem& c, Sign sign) {
  return rel_residual(c.lax_matrix(c.n_sites() + 1, sign), c.lax_matrix(1, sign));
}

struct ConjugationResiduals {
  double legwise = 0.0;
  double traced = 0.0;
};

// psi_1 X psi_1^{-1} T_1 = psi_2^{-1} X T_1 psi_2 with X = (R^{+-}_12)^{-1}.
// `legwise` compares the two-aux-leg operators; `traced` compares them after
// Tr_1.
inline ConjugationResiduals thm2_conjugation_residuals(const ChainSystem& c, std::size_t n, Sign sign) {
  ChainSystem::checked_site(n, c.n_sites());
  const LegShape two = two_aux_shape(c);
  const Operator x = r_on_aux_pair(mat_inv(r_pm(c.r(), sign)), two);
  const Operator psi1 = embed(c.psi(n), two);
  const Operator psi2 = on_second_aux(c.psi(n), two);
  const Operator t1 = embed(c.monodromy(), two);
  const Operator lhs = psi1 * x * mat_inv(psi1) * t1;
  const Operator rhs = mat_inv(psi2) * x * t1 * psi2;
  return {rel_residual(lhs, rhs), rel_residual(partial_trace(lhs, kAux), partial_trace(rhs, kAux))};
}

inline double thm2_conjugation_residual(const ChainSystem& c, std::size_t n, Sign sign) {
  return thm2_conjugation_residuals(c, n, sign).legwise;
}

}  // namespace qlax

#endif  // QLAX_CHAIN_HPP
