#ifndef QLAX_TESTS_SUPPORT_HPP
#define QLAX_TESTS_SUPPORT_HPP

// Seeded generators for property tests.

#include <cstdint>
#include <random>

#include "qlax/tensor.hpp"

namespace qlax::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Complex complex(double scale = 1.0) { return {real(-scale, scale), real(-scale, scale)}; }
  std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }

  Matrix matrix(Eigen::Index n, double scale = 1.0) {
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = complex(scale);
    return m;
  }

  // Frobenius norm exactly `norm`.
  Matrix matrix_with_norm(Eigen::Index n, double norm) {
    Matrix m = matrix(n);
    return m * (norm / m.norm());
  }

  // Identity plus a perturbation of norm 1/2: condition number at most 3.
  Matrix well_conditioned(Eigen::Index n) { return Matrix::Identity(n, n) + matrix_with_norm(n, 0.5); }

  Operator op(const LegShape& shape, double scale = 1.0) {
    return Operator(shape, matrix(static_cast<Eigen::Index>(shape.total_dim()), scale));
  }

 private:
  std::mt19937_64 rng_;
};

inline LegShape sites(std::initializer_list<const char*> labels, std::size_t d = 2) {
  std::vector<Leg> legs;
  for (const char* l : labels) legs.push_back({l, d, LegKind::site});
  return LegShape(std::move(legs));
}

}  // namespace qlax::testing

#endif  // QLAX_TESTS_SUPPORT_HPP
