#ifndef QLAX_RMATRIX_HPP
#define QLAX_RMATRIX_HPP

// Constant GL_q(d) R-matrix in the "first leg lower, second leg upper"
// convention:
//
//   R = q sum_i E_ii (x) E_ii + sum_{i!=j} E_ii (x) E_jj
//       + (q - 1/q) sum_{i>j} E_ij (x) E_ji
//
// so every nontrivial term has a lower-triangular first factor and an
// upper-triangular second factor.  At q = 1 it is exactly the identity.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>

#include "qlax/errors.hpp"
#include "qlax/tensor.hpp"

namespace qlax {

enum class Sign { plus, minus };

inline const char* to_string(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

inline constexpr double kYangBaxterTolerance = 1e-12;

// Two-leg operator on legs "x", "y" (both aux, dim d).
inline LegShape pair_shape(std::size_t d) { return aux_legs({"x", "y"}, d); }

// Moves a two-leg operator onto the legs `first` and `second`.
inline Operator place(const Operator& two_leg, const Leg& first, const Leg& second) {
  const auto& s = two_leg.shape();
  if (s.size() != 2 || s[0].dim != first.dim || s[1].dim != second.dim) {
    throw ShapeError("place: operator is not a matching two-leg operator");
  }
  return Operator(LegShape({first, second}), two_leg.matrix());
}

inline Operator flip(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      p(static_cast<Eigen::Index>(i * d + j), static_cast<Eigen::Index>(j * d + i)) = 1.0;
  return Operator(pair_shape(d), std::move(p));
}

class RMatrix {
 public:
  // Wraps an arbitrary d^2 x d^2 matrix without validating Yang-Baxter.
  static RMatrix from_matrix(Complex q, std::size_t d, const Matrix& m) {
    return RMatrix(q, d, Operator(pair_shape(d), m));
  }

  Complex q() const { return q_; }
  std::size_t dim() const { return d_; }
  const Operator& op() const { return r_; }

  // The convention tag: which triangular split the matrix is built in.
  static constexpr const char* convention() { return "first-leg-lower/second-leg-upper"; }

 private:
  RMatrix(Complex q, std::size_t d, Operator r) : q_(q), d_(d), r_(std::move(r)) {}

  Complex q_;
  std::size_t d_;
  Operator r_;
};

inline double yang_baxter_residual(const RMatrix& r);

inline RMatrix build_r(Complex q, std::size_t d = 2) {
  if (q == Complex(0.0) || !std::isfinite(q.real()) || !std::isfinite(q.imag())) {
    throw ParameterError("build_r: q must be finite and nonzero");
  }
  if (d < 1) throw ParameterError("build_r: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix m = Matrix::Zero(n, n);
  auto at = [d](std::size_t a, std::size_t b) { return static_cast<Eigen::Index>(a * d + b); };
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      // E_ii (x) E_jj sits on the diagonal at (i, j).
      m(at(i, j), at(i, j)) = (i == j) ? q : Complex(1.0);
      // E_ij (x) E_ji: row (i, j), column (j, i).
      if (i > j) m(at(i, j), at(j, i)) = q - 1.0 / q;
    }
  }
  RMatrix r = RMatrix::from_matrix(q, d, m);
  if (double ybe = yang_baxter_residual(r); !(ybe < kYangBaxterTolerance)) {
    throw NumericError("build_r: Yang-Baxter residual " + std::to_string(ybe) + " above tolerance");
  }
  return r;
}

// R+ = R_21 = P R P, R- = R_12^{-1}.
inline Operator r_pm(const RMatrix& r, Sign sign) {
  if (sign == Sign::plus) {
    const Operator p = flip(r.dim());
    return p * r.op() * p;
  }
  return mat_inv(r.op());
}

// Relative residual of R12 R13 R23 = R23 R13 R12 on three legs.
inline double yang_baxter_residual(const RMatrix& r) {
  const std::size_t d = r.dim();
  const LegShape three = aux_legs({"1", "2", "3"}, d);
  const Leg l1 = three[0], l2 = three[1], l3 = three[2];
  const Operator r12 = embed(place(r.op(), l1, l2), three);
  const Operator r13 = embed(place(r.op(), l1, l3), three);
  const Operator r23 = embed(place(r.op(), l2, l3), three);
  return rel_residual(r12 * r13 * r23, r23 * r13 * r12);
}

// Norm of the coefficients of E_ij (x) E_kl with i < j (first leg not lower)
// or k > l (second leg not upper).
inline double triangular_split_residual(const Operator& two_leg) {
  const std::size_t d = two_leg.shape()[0].dim;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) {
          if (i >= j && k <= l) continue;
          const Complex c = two_leg(static_cast<Eigen::Index>(i * d + k), static_cast<Eigen::Index>(j * d + l));
          acc += std::norm(c);
        }
  return std::sqrt(acc);
}

inline double triangular_split_residual(const RMatrix& r) { return triangular_split_residual(r.op()); }

// ||(PR - q)(PR + 1/q)||_F.
inline double hecke_residual(const RMatrix& r) {
  const Operator rhat = flip(r.dim()) * r.op();
  const Operator id = Operator::identity(rhat.shape());
  const Complex q = r.q();
  return ((rhat - q * id) * (rhat + (1.0 / q) * id)).norm();
}

struct QTraceMatrix {
  Matrix dmat;
};

// Tr_1(Rhat_12^{-1} D_1) with Rhat = P R, as a d x d matrix on leg 2.
inline Matrix quantum_trace_map(const Operator& rhat_inv, const Matrix& dmat) {
  const std::size_t d = static_cast<std::size_t>(dmat.rows());
  const LegShape one = aux_legs({"x"}, d);
  const Operator d1 = embed(Operator(one, dmat), rhat_inv.shape());
  return partial_trace(rhat_inv * d1, "x").matrix();
}

inline double d_identity_residual(const RMatrix& r, const QTraceMatrix& qt) {
  const Operator rhat_inv = mat_inv(flip(r.dim()) * r.op());
  const Matrix lhs = quantum_trace_map(rhat_inv, qt.dmat);
  const auto d = static_cast<Eigen::Index>(r.dim());
  return rel_residual(lhs, Matrix::Identity(d, d));
}

// Unique D solving Tr_1(Rhat_12^{-1} D_1) = 1; the map is linear in D, so this
// is a d^2 x d^2 linear system.
inline QTraceMatrix quantum_trace_matrix(const RMatrix& r) {
  const std::size_t d = r.dim();
  const auto dd = static_cast<Eigen::Index>(d * d);
  const Operator rhat_inv = mat_inv(flip(d) * r.op());
  Matrix system(dd, dd);
  for (Eigen::Index k = 0; k < dd; ++k) {
    Matrix unit = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    unit(k / static_cast<Eigen::Index>(d), k % static_cast<Eigen::Index>(d)) = 1.0;
    Matrix image = quantum_trace_map(rhat_inv, unit);
    system.col(k) = image.reshaped<Eigen::RowMajor>();
  }
  Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > 1.0 / kMaxCondition)) {
    throw DegeneracyError("quantum_trace_matrix: D -> Tr_1(Rhat^{-1} D_1) is not invertible");
  }
  const Eigen::VectorXcd rhs =
      Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)).reshaped<Eigen::RowMajor>();
  Eigen::VectorXcd sol = lu.solve(rhs);
  Matrix dmat(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < dd; ++k) dmat(k / static_cast<Eigen::Index>(d), k % static_cast<Eigen::Index>(d)) = sol(k);
  return {std::move(dmat)};
}

}  // namespace qlax

#endif  // QLAX_RMATRIX_HPP
