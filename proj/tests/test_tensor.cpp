#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qlax/tensor.hpp"
#include "support.hpp"

using namespace qlax;
using qlax::testing::Gen;
using qlax::testing::sites;

namespace {

Operator unit(const std::string& label, std::size_t i, std::size_t j, std::size_t d = 2) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return Operator(LegShape({{label, d, LegKind::site}}), m);
}

// Sum_i <i| (x) 1 . X . |i> (x) 1, written with explicit indices.
Matrix trace_first_by_index_sum(const Matrix& x, Eigen::Index d1, Eigen::Index d2) {
  Matrix out = Matrix::Zero(d2, d2);
  for (Eigen::Index i = 0; i < d1; ++i) {
    Eigen::VectorXcd bra = Eigen::VectorXcd::Zero(d1);
    bra(i) = 1.0;
    Matrix row_select = Eigen::kroneckerProduct(Matrix(bra.transpose()), Matrix::Identity(d2, d2)).eval();
    out += row_select * x * row_select.transpose();
  }
  return out;
}

}  // namespace

TEST(LegShape, RejectsDuplicateLabels) {
  EXPECT_THROW(LegShape({{"a", 2, LegKind::aux}, {"a", 2, LegKind::site}}), ShapeError);
}

TEST(LegShape, RejectsZeroDimension) { EXPECT_THROW(LegShape({{"a", 0, LegKind::aux}}), ShapeError); }

TEST(LegShape, TotalDimIsProductAndEmptyShapeIsOne) {
  EXPECT_EQ(LegShape().total_dim(), 1u);
  const LegShape s({{"a", 2, LegKind::aux}, {"s1", 3, LegKind::site}, {"s2", 2, LegKind::site}});
  EXPECT_EQ(s.total_dim(), 12u);
  EXPECT_EQ(s.stride(0), 6u);
  EXPECT_EQ(s.stride(1), 2u);
  EXPECT_EQ(s.stride(2), 1u);
  EXPECT_THROW(s.position("zz"), ShapeError);
}

TEST(Operator, RejectsWrongSize) {
  EXPECT_THROW(Operator(sites({"s1"}), Matrix::Identity(3, 3)), ShapeError);
}

TEST(Operator, ArithmeticRequiresMatchingShapes) {
  const Operator a = Operator::identity(sites({"s1"}));
  const Operator b = Operator::identity(sites({"s2"}));
  EXPECT_THROW(a * b, ShapeError);
  EXPECT_THROW(a + b, ShapeError);
}

TEST(Kron, IdentityTimesIdentity) {
  const Operator k = kron(Operator::identity(sites({"s1"})), Operator::identity(sites({"s2"})));
  EXPECT_EQ(k.matrix(), Matrix::Identity(4, 4));
  EXPECT_EQ(k.shape().labels(), (std::vector<std::string>{"s1", "s2"}));
}

TEST(Kron, BasisPlacementIsRowMajor) {
  const Operator k = kron(unit("s1", 0, 0), unit("s2", 1, 1));
  Matrix expected = Matrix::Zero(4, 4);
  expected(1, 1) = 1.0;
  EXPECT_EQ(k.matrix(), expected);
}

TEST(Kron, DuplicateLabelIsShapeError) {
  EXPECT_THROW(kron(unit("s1", 0, 0), unit("s1", 0, 0)), ShapeError);
}

TEST(Kron, InversePairGivesIdentity) {
  Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = gen.well_conditioned(2);
    const Matrix b = gen.well_conditioned(2);
    const Operator ab = kron(Operator(sites({"s1"}), a), Operator(sites({"s2"}), b));
    const Operator inv = kron(Operator(sites({"s1"}), a.inverse()), Operator(sites({"s2"}), b.inverse()));
    EXPECT_LT(((ab * inv).matrix() - Matrix::Identity(4, 4)).norm(), 1e-12);
  }
}

TEST(Kron, MixedProductAssociativityAndBilinearity) {
  Gen gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator a = gen.op(sites({"x"})), b = gen.op(sites({"y"})), c = gen.op(sites({"z"}));
    const Operator a2 = gen.op(sites({"x"})), b2 = gen.op(sites({"y"}));
    EXPECT_LT(rel_residual(kron(kron(a, b), c).matrix(), kron(a, kron(b, c)).matrix()), 1e-12);
    EXPECT_LT(rel_residual(kron(a, b) * kron(a2, b2), kron(a * a2, b * b2)), 1e-12);
    const Complex s = gen.complex();
    EXPECT_LT(rel_residual(kron(a + s * a2, b), kron(a, b) + s * kron(a2, b)), 1e-12);
  }
}

TEST(Embed, IdentityOnOneLegIsIdentity) {
  EXPECT_EQ(embed(Operator::identity(sites({"s1"})), sites({"s1", "s2"})).matrix(), Matrix::Identity(4, 4));
}

TEST(Embed, NoOpWhenShapesAgree) {
  Gen gen(13);
  const Operator x = gen.op(sites({"s1"}));
  EXPECT_EQ(embed(x, sites({"s1"})).matrix(), x.matrix());
}

TEST(Embed, OperatorsOnDisjointLegsCommute) {
  Gen gen(14);
  const LegShape target = sites({"s1", "s2"});
  for (int trial = 0; trial < 20; ++trial) {
    const Operator x = embed(gen.op(sites({"s2"})), target);
    const Operator y = embed(gen.op(sites({"s1"})), target);
    EXPECT_LT(rel_residual(x * y, y * x), 1e-14);
  }
}

TEST(Embed, SecondLegMatchesKronWithIdentityFirst) {
  Gen gen(15);
  const Operator x = gen.op(sites({"s2"}));
  const Matrix expected = Eigen::kroneckerProduct(Matrix::Identity(2, 2), x.matrix()).eval();
  EXPECT_EQ(embed(x, sites({"s1", "s2"})).matrix(), expected);
}

TEST(Embed, IsAnAlgebraHomomorphism) {
  Gen gen(16);
  const LegShape target = sites({"s1", "s2", "s3"});
  for (int trial = 0; trial < 10; ++trial) {
    const Operator a = gen.op(sites({"s3", "s1"}));
    const Operator b = gen.op(sites({"s3", "s1"}));
    EXPECT_LT(rel_residual(embed(a, target) * embed(b, target), embed(a * b, target)), 1e-13);
  }
}

TEST(Embed, MissingLegOrDimMismatchIsShapeError) {
  EXPECT_THROW(embed(Operator::identity(sites({"s9"})), sites({"s1", "s2"})), ShapeError);
  EXPECT_THROW(embed(Operator::identity(sites({"s1"}, 3)), sites({"s1", "s2"})), ShapeError);
}

TEST(PermuteLegs, RoundTripIsBitExact) {
  Gen gen(17);
  const LegShape shape({{"a", 2, LegKind::aux}, {"s1", 3, LegKind::site}, {"s2", 2, LegKind::site}});
  for (int trial = 0; trial < 10; ++trial) {
    const Operator x = gen.op(shape);
    const Operator there = permute_legs(x, {"s2", "a", "s1"});
    const Operator back = permute_legs(there, {"a", "s1", "s2"});
    EXPECT_EQ(back.matrix(), x.matrix());
    EXPECT_EQ(back.shape(), x.shape());
  }
}

TEST(PermuteLegs, SwapOfKronIsKronOfSwapped) {
  Gen gen(18);
  const Operator a = gen.op(sites({"s1"})), b = gen.op(LegShape({{"s2", 3, LegKind::site}}));
  EXPECT_EQ(permute_legs(kron(a, b), {"s2", "s1"}).matrix(), kron(b, a).matrix());
}

TEST(PartialTrace, OfIdentityTensorA) {
  Gen gen(19);
  const Operator a = gen.op(sites({"s2"}));
  const Operator traced = partial_trace(kron(Operator::identity(sites({"s1"})), a), "s1");
  EXPECT_EQ(traced.matrix(), (2.0 * a).matrix());
  EXPECT_EQ(traced.shape(), a.shape());
}

TEST(PartialTrace, FactorizesOnProducts) {
  Gen gen(20);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator a = gen.op(sites({"s1"})), b = gen.op(LegShape({{"s2", 3, LegKind::site}}));
    const Matrix got = partial_trace(kron(a, b), "s1").matrix();
    EXPECT_LT((got - a.matrix().trace() * b.matrix()).norm(), 1e-14);
    const Matrix got2 = partial_trace(kron(a, b), "s2").matrix();
    EXPECT_LT((got2 - b.matrix().trace() * a.matrix()).norm(), 1e-14);
  }
}

TEST(PartialTrace, MatchesIndexSum) {
  Gen gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator x = gen.op(sites({"s1", "s2"}));
    EXPECT_LT((partial_trace(x, "s1").matrix() - trace_first_by_index_sum(x.matrix(), 2, 2)).norm(), 1e-14);
  }
}

TEST(PartialTrace, MiddleLegMatchesPermuteThenTraceFirst) {
  Gen gen(22);
  const Operator x = gen.op(sites({"s1", "s2", "s3"}));
  const Operator via_permute = partial_trace(permute_legs(x, {"s2", "s1", "s3"}), "s2");
  EXPECT_LT(rel_residual(partial_trace(x, "s2"), via_permute), 1e-14);
}

TEST(PartialTrace, UnknownLabelIsShapeError) {
  EXPECT_THROW(partial_trace(Operator::identity(sites({"s1"})), "s2"), ShapeError);
}

TEST(MatExp, ZeroGivesIdentity) {
  EXPECT_EQ(mat_exp(Operator::zero(sites({"s1", "s2"}))).matrix(), Matrix::Identity(4, 4));
}

TEST(MatExp, DiagonalIsScalarExponential) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = Complex(0.0, std::numbers::pi);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = -1.0;
  expected(1, 1) = 1.0;
  EXPECT_LT((mat_exp(Operator(sites({"s1"}), a)).matrix() - expected).norm(), 1e-15);
}

TEST(MatExp, InversePair) {
  Gen gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator a(sites({"s1", "s2"}), gen.matrix_with_norm(4, gen.real(0.1, 2.0)));
    EXPECT_LT(rel_residual(mat_exp(a) * mat_exp(-1.0 * a), Operator::identity(a.shape())), 1e-11);
  }
}

TEST(MatExp, GroupLaw) {
  Gen gen(24);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator a(sites({"s1", "s2"}), gen.matrix_with_norm(4, gen.real(0.1, 2.0)));
    const double s = gen.real(-1.0, 1.0), t = gen.real(-1.0, 1.0);
    EXPECT_LT(rel_residual(mat_exp(Complex(s) * a) * mat_exp(Complex(t) * a), mat_exp(Complex(s + t) * a)), 1e-10);
  }
}

TEST(MatExp, NonFiniteInputIsNumericError) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(mat_exp(Operator(sites({"s1"}), a)), NumericError);
}

TEST(MatInv, IdentityAndDiagonal) {
  EXPECT_EQ(mat_inv(Operator::identity(sites({"s1"}))).matrix(), Matrix::Identity(2, 2));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.5;
  expected(1, 1) = 0.25;
  EXPECT_LT((mat_inv(Operator(sites({"s1"}), d)).matrix() - expected).norm(), 1e-16);
}

TEST(MatInv, WellConditionedResidual) {
  Gen gen(25);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator a(sites({"s1", "s2", "s3"}), gen.well_conditioned(8));
    EXPECT_LT(((a * mat_inv(a)).matrix() - Matrix::Identity(8, 8)).norm(), 1e-11);
  }
}

TEST(MatInv, SingularOrIllConditionedIsSingularityError) {
  EXPECT_THROW(mat_inv(Operator::zero(sites({"s1"}))), SingularityError);
  Matrix near = Matrix::Identity(2, 2);
  near(1, 1) = 1e-14;
  EXPECT_THROW(mat_inv(Operator(sites({"s1"}), near)), SingularityError);
}

TEST(RelResidual, UsesUnitFloorOnTheReference) {
  Matrix y = Matrix::Zero(2, 2);
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 1e-3;
  EXPECT_DOUBLE_EQ(rel_residual(x, y), 1e-3);
  y(0, 0) = 100.0;
  x(0, 0) = 101.0;
  EXPECT_DOUBLE_EQ(rel_residual(x, y), 0.01);
}

TEST(BlockNorms, LeadingLegTriangles) {
  const LegShape shape({{"a", 2, LegKind::aux}, {"s1", 2, LegKind::site}});
  Matrix m = Matrix::Zero(4, 4);
  m(2, 0) = 3.0;  // block (1,0)
  m(0, 3) = 4.0;  // block (0,1)
  m(1, 0) = 7.0;  // inside block (0,0)
  const Operator x(shape, m);
  EXPECT_DOUBLE_EQ(strictly_lower_norm(x), 3.0);
  EXPECT_DOUBLE_EQ(strictly_upper_norm(x), 4.0);
  EXPECT_DOUBLE_EQ(off_diagonal_norm(x), 5.0);
  EXPECT_EQ(leading_block(x, 0, 0).matrix()(1, 0), Complex(7.0));
}
