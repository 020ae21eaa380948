#ifndef QLAX_TENSOR_HPP
#define QLAX_TENSOR_HPP

// Leg-labelled dense complex operators on spaces of the form
// (aux C^d)^{(x)a} (x) (site C^d)^{(x)N}.
//
// Composite indices are row-major over the leg list: the first leg is the
// most significant digit.  Shapes built by this library put auxiliary legs
// first, in declaration order, then site legs 1..N, so a trace over the
// leading aux leg is a sum of contiguous diagonal blocks.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qlax/errors.hpp"

namespace qlax {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class LegKind { aux, site };

struct Leg {
  std::string label;
  std::size_t dim = 0;
  LegKind kind = LegKind::site;

  friend bool operator==(const Leg&, const Leg&) = default;
};

class LegShape {
 public:
  LegShape() = default;

  explicit LegShape(std::vector<Leg> legs) : legs_(std::move(legs)) {
    for (std::size_t i = 0; i < legs_.size(); ++i) {
      if (legs_[i].dim == 0) {
        throw ShapeError("leg '" + legs_[i].label + "' has zero dimension");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (legs_[j].label == legs_[i].label) {
          throw ShapeError("duplicate leg label '" + legs_[i].label + "'");
        }
      }
    }
  }

  const std::vector<Leg>& legs() const { return legs_; }
  std::size_t size() const { return legs_.size(); }
  const Leg& operator[](std::size_t i) const { return legs_[i]; }

  std::size_t total_dim() const {
    return std::accumulate(legs_.begin(), legs_.end(), std::size_t{1},
                           [](std::size_t acc, const Leg& l) { return acc * l.dim; });
  }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < legs_.size(); ++i) {
      if (legs_[i].label == label) return i;
    }
    return std::nullopt;
  }

  bool contains(const std::string& label) const { return index_of(label).has_value(); }

  std::size_t position(const std::string& label) const {
    auto i = index_of(label);
    if (!i) throw ShapeError("unknown leg label '" + label + "'");
    return *i;
  }

  // Product of the dimensions of all legs after position i.
  std::size_t stride(std::size_t i) const {
    std::size_t s = 1;
    for (std::size_t k = i + 1; k < legs_.size(); ++k) s *= legs_[k].dim;
    return s;
  }

  LegShape without(const std::string& label) const {
    auto pos = position(label);
    std::vector<Leg> rest;
    rest.reserve(legs_.size() - 1);
    for (std::size_t i = 0; i < legs_.size(); ++i) {
      if (i != pos) rest.push_back(legs_[i]);
    }
    return LegShape(std::move(rest));
  }

  LegShape concat(const LegShape& other) const {
    std::vector<Leg> all = legs_;
    all.insert(all.end(), other.legs_.begin(), other.legs_.end());
    return LegShape(std::move(all));
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(legs_.size());
    for (const auto& l : legs_) out.push_back(l.label);
    return out;
  }

  friend bool operator==(const LegShape&, const LegShape&) = default;

 private:
  std::vector<Leg> legs_;
};

inline LegShape aux_legs(const std::vector<std::string>& labels, std::size_t dim) {
  std::vector<Leg> legs;
  for (const auto& l : labels) legs.push_back({l, dim, LegKind::aux});
  return LegShape(std::move(legs));
}

inline std::string site_label(std::size_t n) { return "s" + std::to_string(n); }

// Site legs s1..sN.
inline LegShape site_legs(std::size_t n_sites, std::size_t dim) {
  std::vector<Leg> legs;
  for (std::size_t n = 1; n <= n_sites; ++n) legs.push_back({site_label(n), dim, LegKind::site});
  return LegShape(std::move(legs));
}

class Operator {
 public:
  Operator() : data_(Matrix::Identity(1, 1)) {}

  Operator(LegShape shape, Matrix data) : shape_(std::move(shape)), data_(std::move(data)) {
    const auto n = static_cast<Eigen::Index>(shape_.total_dim());
    if (data_.rows() != n || data_.cols() != n) {
      throw ShapeError("matrix is " + std::to_string(data_.rows()) + "x" +
                       std::to_string(data_.cols()) + ", shape needs side " + std::to_string(n));
    }
  }

  static Operator identity(const LegShape& shape) {
    const auto n = static_cast<Eigen::Index>(shape.total_dim());
    return Operator(shape, Matrix::Identity(n, n));
  }

  static Operator zero(const LegShape& shape) {
    const auto n = static_cast<Eigen::Index>(shape.total_dim());
    return Operator(shape, Matrix::Zero(n, n));
  }

  const LegShape& shape() const { return shape_; }
  const Matrix& matrix() const { return data_; }
  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return data_(r, c); }

  double norm() const { return data_.norm(); }

  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_shape(a, b, "product");
    return Operator(a.shape_, a.data_ * b.data_);
  }
  friend Operator operator+(const Operator& a, const Operator& b) {
    require_same_shape(a, b, "sum");
    return Operator(a.shape_, a.data_ + b.data_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    require_same_shape(a, b, "difference");
    return Operator(a.shape_, a.data_ - b.data_);
  }
  friend Operator operator-(const Operator& a) { return Operator(a.shape_, -a.data_); }
  friend Operator operator*(Complex s, const Operator& a) { return Operator(a.shape_, s * a.data_); }
  friend Operator operator*(const Operator& a, Complex s) { return s * a; }

 private:
  static void require_same_shape(const Operator& a, const Operator& b, const char* what) {
    if (!(a.shape_ == b.shape_)) throw ShapeError(std::string("shape mismatch in operator ") + what);
  }

  LegShape shape_;
  Matrix data_;
};

// ||x - y||_F / max(1, ||y||_F).
inline double rel_residual(const Matrix& x, const Matrix& y) {
  return (x - y).norm() / std::max(1.0, y.norm());
}

inline double rel_residual(const Operator& x, const Operator& y) {
  if (!(x.shape() == y.shape())) throw ShapeError("shape mismatch in residual");
  return rel_residual(x.matrix(), y.matrix());
}

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline Operator kron(const Operator& a, const Operator& b) {
  LegShape shape = a.shape().concat(b.shape());
  return Operator(std::move(shape), Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

// Reorders legs to `order` (a permutation of the operator's labels).
inline Operator permute_legs(const Operator& x, const std::vector<std::string>& order) {
  const LegShape& from = x.shape();
  if (order.size() != from.size()) throw ShapeError("permutation has wrong number of legs");
  std::vector<Leg> legs;
  std::vector<std::size_t> src_pos;
  for (const auto& label : order) {
    auto p = from.position(label);
    if (std::find(src_pos.begin(), src_pos.end(), p) != src_pos.end()) {
      throw ShapeError("leg '" + label + "' repeated in permutation");
    }
    src_pos.push_back(p);
    legs.push_back(from[p]);
  }
  LegShape to(std::move(legs));

  const std::size_t n = to.total_dim();
  const std::size_t k = to.size();
  if (k == 0) return x;
  // src_index[I] maps a composite index of `to` to the one of `from`.
  std::vector<std::size_t> src_index(n, 0);
  std::vector<std::size_t> src_stride(k);
  for (std::size_t i = 0; i < k; ++i) src_stride[i] = from.stride(src_pos[i]);
  std::vector<std::size_t> digit(k, 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < k; ++i) s += digit[i] * src_stride[i];
    src_index[idx] = s;
    for (std::size_t i = k; i-- > 0;) {
      if (++digit[i] < to[i].dim) break;
      digit[i] = 0;
    }
  }
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const Matrix& src = x.matrix();
  for (std::size_t c = 0; c < n; ++c) {
    const auto sc = static_cast<Eigen::Index>(src_index[c]);
    for (std::size_t r = 0; r < n; ++r) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          src(static_cast<Eigen::Index>(src_index[r]), sc);
    }
  }
  return Operator(std::move(to), std::move(out));
}

// Places `op` on its legs inside `target`, acting as the identity elsewhere.
inline Operator embed(const Operator& op, const LegShape& target) {
  std::vector<Leg> missing;
  for (const auto& leg : op.shape().legs()) {
    auto p = target.index_of(leg.label);
    if (!p) throw ShapeError("leg '" + leg.label + "' not present in target shape");
    if (target[*p].dim != leg.dim) throw ShapeError("dimension mismatch on leg '" + leg.label + "'");
  }
  for (const auto& leg : target.legs()) {
    if (!op.shape().contains(leg.label)) missing.push_back(leg);
  }
  if (missing.empty()) return permute_legs(op, target.labels());
  Operator padded = kron(op, Operator::identity(LegShape(std::move(missing))));
  return permute_legs(padded, target.labels());
}

inline Operator partial_trace(const Operator& x, const std::string& label) {
  const LegShape& shape = x.shape();
  const std::size_t pos = shape.position(label);
  const std::size_t d = shape[pos].dim;
  const std::size_t inner = shape.stride(pos);
  const std::size_t outer = shape.total_dim() / (d * inner);
  LegShape rest = shape.without(label);
  const std::size_t m = outer * inner;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const Matrix& src = x.matrix();
  auto full = [&](std::size_t hi, std::size_t i, std::size_t lo) {
    return static_cast<Eigen::Index>(hi * d * inner + i * inner + lo);
  };
  for (std::size_t rh = 0; rh < outer; ++rh)
    for (std::size_t rl = 0; rl < inner; ++rl)
      for (std::size_t ch = 0; ch < outer; ++ch)
        for (std::size_t cl = 0; cl < inner; ++cl) {
          Complex acc = 0.0;
          for (std::size_t i = 0; i < d; ++i) acc += src(full(rh, i, rl), full(ch, i, cl));
          out(static_cast<Eigen::Index>(rh * inner + rl), static_cast<Eigen::Index>(ch * inner + cl)) = acc;
        }
  return Operator(std::move(rest), std::move(out));
}

// Renames one leg; data is unchanged.
inline Operator relabel(const Operator& x, const std::string& from, const std::string& to) {
  std::vector<Leg> legs = x.shape().legs();
  legs[x.shape().position(from)].label = to;
  return Operator(LegShape(std::move(legs)), x.matrix());
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// Padé scaling-and-squaring (Eigen MatrixFunctions).
inline Operator mat_exp(const Operator& a) {
  if (!all_finite(a.matrix())) throw NumericError("mat_exp: non-finite input");
  Matrix e = a.matrix().exp();
  if (!all_finite(e)) throw NumericError("mat_exp: overflow");
  return Operator(a.shape(), std::move(e));
}

inline constexpr double kMaxCondition = 1e12;

inline Operator mat_inv(const Operator& a) {
  if (!all_finite(a.matrix())) throw NumericError("mat_inv: non-finite input");
  Eigen::PartialPivLU<Matrix> lu(a.matrix());
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kMaxCondition) {
    throw SingularityError("mat_inv: condition estimate exceeds 1e12");
  }
  return Operator(a.shape(), lu.inverse());
}

// Block (i, j) of the leading leg, as an operator on the remaining legs.
inline Operator leading_block(const Operator& x, std::size_t i, std::size_t j) {
  const LegShape& shape = x.shape();
  if (shape.size() == 0) throw ShapeError("leading_block on a scalar operator");
  const auto s = static_cast<Eigen::Index>(shape.stride(0));
  return Operator(shape.without(shape[0].label),
                  x.matrix().block(static_cast<Eigen::Index>(i) * s, static_cast<Eigen::Index>(j) * s, s, s));
}

// Frobenius norms of the strictly lower / strictly upper block triangles
// with respect to the leading leg.
inline double strictly_lower_norm(const Operator& x) {
  const auto d = x.shape()[0].dim;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) acc += leading_block(x, i, j).matrix().squaredNorm();
  return std::sqrt(acc);
}

inline double strictly_upper_norm(const Operator& x) {
  const auto d = x.shape()[0].dim;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) acc += leading_block(x, i, j).matrix().squaredNorm();
  return std::sqrt(acc);
}

inline double off_diagonal_norm(const Operator& x) {
  return std::hypot(strictly_lower_norm(x), strictly_upper_norm(x));
}

}  // namespace qlax

#endif  // QLAX_TENSOR_HPP
