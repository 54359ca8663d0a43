#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "qfd/linalg.hpp"
#include "support.hpp"

using namespace qfd;
using qfd::testing::random_unitary;
using qfd::testing::unitary_with_phases;

namespace {

const double kS = 1 / std::numbers::sqrt2;

TEST(Linalg, MatmulAndAdjoint) {
  const CMatrix a{{1, Complex(0, 1)}, {2, 3}};
  const CMatrix b{{0, 1}, {1, 0}};
  const CMatrix ab = matmul(a, b);
  EXPECT_EQ(ab, (CMatrix{{Complex(0, 1), 1}, {3, 2}}));
  EXPECT_EQ(adjoint(a), (CMatrix{{1, 2}, {Complex(0, -1), 3}}));
  EXPECT_THROW(matmul(a, CMatrix(3, 3)), DimensionError);
}

TEST(Linalg, TensorOrdersLeftFactorAsHighBits) {
  const CMatrix x{{0, 1}, {1, 0}};
  const CMatrix id = CMatrix::identity(2);
  const CVector v = matvec(tensor(x, id), CVector::basis(4, 0));
  EXPECT_EQ(v, CVector::basis(4, 2));
}

TEST(Linalg, TensorRefusesMoreThanTwelveQubits) {
  const CMatrix big = CMatrix::identity(std::size_t{1} << 7);
  EXPECT_THROW(tensor(big, big), DimensionError);
}

TEST(Linalg, InnerIsConjugateLinearInFirstArgument) {
  const CVector u{Complex(0, 1), 0};
  const CVector v{1, 0};
  EXPECT_EQ(inner(u, v), Complex(0, -1));
}

TEST(Linalg, UnitarityCheck) {
  EXPECT_TRUE(is_unitary(CMatrix{{kS, kS}, {kS, -kS}}));
  EXPECT_FALSE(is_unitary(CMatrix{{1, 1}, {0, 1}}));
  EXPECT_FALSE(is_unitary(CMatrix(2, 3)));
}

TEST(Linalg, WrapPhase) {
  EXPECT_NEAR(wrap_phase(3 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_phase(-std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(phase_distance(3.1, -3.1), 2 * std::numbers::pi - 6.2, 1e-12);
}

TEST(Linalg, HermitianJacobiDiagonalizes) {
  std::mt19937_64 rng(3);
  for (std::size_t dim : {2, 3, 5, 8}) {
    const CMatrix u = random_unitary(dim, rng);
    const CMatrix h = 0.5 * (u + adjoint(u));
    const HermitianEigen e = eig_hermitian(h);
    for (std::size_t j = 0; j < dim; ++j) {
      const CVector v = e.vectors.column(j);
      EXPECT_LT((matvec(h, v) - Complex(e.values[j]) * v).norm(), 1e-10);
      if (j) {
        EXPECT_LE(e.values[j - 1], e.values[j]);
      }
    }
    EXPECT_TRUE(is_unitary(e.vectors, 1e-10));
  }
}

TEST(Linalg, UnitaryEigenpairsOfHadamard) {
  const auto pairs = eig_unitary(CMatrix{{kS, kS}, {kS, -kS}});
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_NEAR(pairs[0].phase, 0, 1e-12);
  EXPECT_NEAR(pairs[1].phase, std::numbers::pi, 1e-12);
}

TEST(Linalg, UnitaryEigenpairsRandom) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = std::size_t{2} << (trial % 3);
    const CMatrix s = random_unitary(dim, rng);
    const auto pairs = eig_unitary(s);
    ASSERT_EQ(pairs.size(), dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const auto& p = pairs[j];
      EXPECT_GT(p.phase, -std::numbers::pi);
      EXPECT_LE(p.phase, std::numbers::pi);
      EXPECT_LT((matvec(s, p.vector) - p.value * p.vector).norm(), 1e-9);
      EXPECT_NEAR(p.vector.norm(), 1, 1e-10);
      if (j) {
        EXPECT_LE(pairs[j - 1].phase, p.phase);
      }
      for (std::size_t l = 0; l < j; ++l) EXPECT_LT(std::abs(inner(pairs[l].vector, p.vector)), 1e-9);
    }
  }
}

TEST(Linalg, DegenerateEigenspacesStayOrthonormal) {
  std::mt19937_64 rng(5);
  const CMatrix s = unitary_with_phases({0.3, 0.3, 0.3, -2.0, -2.0, 1.0, 1.0, 1.0}, rng);
  const auto pairs = eig_unitary(s);
  for (std::size_t j = 0; j < pairs.size(); ++j)
    for (std::size_t l = 0; l < j; ++l) EXPECT_LT(std::abs(inner(pairs[l].vector, pairs[j].vector)), 1e-9);
  EXPECT_NEAR(pairs[0].phase, -2.0, 1e-9);
  EXPECT_NEAR(pairs[7].phase, 1.0, 1e-9);
}

TEST(Linalg, EigenvectorPhaseIsCanonical) {
  const auto pairs = eig_unitary(CMatrix{{0, 1}, {1, 0}});
  for (const auto& p : pairs) {
    EXPECT_NEAR(p.vector[1].imag(), 0, 1e-12);
    EXPECT_GT(p.vector[1].real(), 0);
  }
}

TEST(Linalg, EigUnitaryRejectsNonUnitary) {
  EXPECT_THROW(eig_unitary(CMatrix{{1, 1}, {0, 1}}), NotUnitaryError);
  EXPECT_THROW(eig_unitary(CMatrix(2, 3)), DimensionError);
}

}  // namespace
