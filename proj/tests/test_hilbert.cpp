#include "pcsft/errors.hpp"
#include "pcsft/hilbert.hpp"
#include "test_support.hpp"

#include <algorithm>

namespace pcsft {
namespace {

using namespace pcsft::testing;

TEST(SymOperator, RejectsAsymmetricAndNonSquare) {
  Matrix m(2, 2);
  m << 1, 2, 2.001, 1;
  EXPECT_THROW(SymOperator{m}, ValidationError);
  EXPECT_THROW(SymOperator{Matrix::Zero(2, 3)}, ValidationError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(SymOperator{bad}, ValidationError);
}

TEST(SymOperator, SymmetrizesWithinTolerance) {
  Matrix m(2, 2);
  m << 1, 2, 2 + 1e-13, 1;
  SymOperator a(m);
  EXPECT_EQ(a.matrix()(0, 1), a.matrix()(1, 0));
}

TEST(BipartiteState, RequiresUnitNorm) {
  EXPECT_THROW(BipartiteState{Matrix::Identity(2, 2)}, ValidationError);
  EXPECT_NO_THROW(BipartiteState::normalized(Matrix::Identity(2, 2)));
  EXPECT_THROW(BipartiteState::normalized(Matrix::Zero(2, 2)), ValidationError);
}

TEST(BipartiteState, RowMajorFlattening) {
  Matrix c(2, 3);
  c << 1, 2, 3, 4, 5, 6;
  const auto psi = BipartiteState::normalized(c);
  const Vector f = psi.flat();
  EXPECT_NEAR(f(1) / f(0), 2.0, 1e-15);
  EXPECT_NEAR(f(3) / f(0), 4.0, 1e-15);
  const auto back = BipartiteState::from_flat(2, 3, f);
  EXPECT_EQ(max_abs(back.coeffs() - psi.coeffs()), 0.0);
}

TEST(TensorProduct, BasisVectors) {
  const auto psi = tensor_product(basis_vector(2, 0), basis_vector(2, 0));
  Matrix expected(2, 2);
  expected << 1, 0, 0, 0;
  EXPECT_EQ(max_abs(psi.coeffs() - expected), 0.0);
}

TEST(TensorProduct, SuperposedFirstFactor) {
  const Vector plus = (basis_vector(2, 0) + basis_vector(2, 1)) / std::sqrt(2.0);
  const auto psi = tensor_product(plus, basis_vector(2, 0));
  const double s = 1.0 / std::sqrt(2.0);
  Matrix expected(2, 2);
  expected << s, 0, s, 0;
  EXPECT_LE(max_abs(psi.coeffs() - expected), 1e-15);
}

TEST(TensorProduct, RandomFactorsHaveSchmidtRankOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto psi = tensor_product(random_unit_vector(3, seed), random_unit_vector(4, seed + 100));
    EXPECT_EQ(schmidt(psi).rank, 1);
  }
}

TEST(TensorProduct, RejectsUnnormalizedFactors) {
  EXPECT_THROW(tensor_product(Vector::Ones(2), basis_vector(2, 0)), ValidationError);
  EXPECT_THROW(tensor_product(basis_vector(2, 0), 1.001 * basis_vector(3, 1)), ValidationError);
}

TEST(AsOperator, BellIsScaledIdentity) {
  EXPECT_LE(max_abs(as_operator(bell()) - Matrix::Identity(2, 2) / std::sqrt(2.0)), 1e-15);
}

TEST(AsOperator, SingleEntry) {
  const auto psi = tensor_product(basis_vector(2, 0), basis_vector(2, 1));
  Matrix expected(2, 2);
  expected << 0, 1, 0, 0;
  EXPECT_EQ(max_abs(as_operator(psi) - expected), 0.0);
}

TEST(AsOperator, MatchesInnerProductWithProductVectors) {
  std::mt19937_64 eng(11);
  const auto psi = random_state({3, 4}, 5);
  for (int t = 0; t < 20; ++t) {
    const Vector u = gaussian_vector(3, eng);
    const Vector phi = gaussian_vector(4, eng);
    const double lhs = (as_operator(psi) * phi).dot(u);
    // (Psi, u (x) phi) summed over the product basis directly.
    double rhs = 0.0;
    const Vector flat = psi.flat();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) rhs += flat(i * 4 + j) * u(i) * phi(j);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(ReducedDensity, BellIsMaximallyMixed) {
  EXPECT_LE(max_abs(reduced_density(bell(), Side::first).matrix() - 0.5 * Matrix::Identity(2, 2)), 1e-15);
  EXPECT_LE(max_abs(reduced_density(bell(), Side::second).matrix() - 0.5 * Matrix::Identity(2, 2)), 1e-15);
}

TEST(ReducedDensity, ProductStateGivesProjector) {
  const Vector a = random_unit_vector(3, 1), b = random_unit_vector(2, 2);
  const auto rho = reduced_density(tensor_product(a, b), Side::first);
  EXPECT_LE(max_abs(rho.matrix() - a * a.transpose()), 1e-14);
}

TEST(ReducedDensity, MarginalsShareNonzeroSpectrum) {
  std::mt19937_64 eng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto [n1, n2] = random_dims(eng, 1, 6, 6);
    const auto psi = random_state({n1, n2}, seed);
    const auto r1 = reduced_density(psi, Side::first), r2 = reduced_density(psi, Side::second);
    EXPECT_NEAR(r1.trace(), 1.0, 1e-10);
    EXPECT_NEAR(r2.trace(), 1.0, 1e-10);
    Vector e1 = Eigen::SelfAdjointEigenSolver<Matrix>(r1.matrix()).eigenvalues().reverse();
    Vector e2 = Eigen::SelfAdjointEigenSolver<Matrix>(r2.matrix()).eigenvalues().reverse();
    const Eigen::Index k = std::min(n1, n2);
    EXPECT_LE((e1.head(k) - e2.head(k)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(e1.minCoeff(), -1e-12);
  }
}

TEST(Schmidt, Bell) {
  const SchmidtForm sf = schmidt(bell());
  ASSERT_EQ(sf.rank, 2);
  EXPECT_NEAR(sf.alphas(0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sf.alphas(1), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Schmidt, ProductState) {
  const SchmidtForm sf = schmidt(tensor_product(random_unit_vector(3, 4), random_unit_vector(5, 6)));
  ASSERT_EQ(sf.rank, 1);
  EXPECT_NEAR(sf.alphas(0), 1.0, 1e-14);
}

TEST(Schmidt, ChosenCoefficientsRoundTrip) {
  std::mt19937_64 eng(21);
  const Matrix left = random_frame(3, 2, eng), right = random_frame(4, 2, eng);
  Vector alphas(2);
  alphas << 0.8, 0.6;
  const auto psi = state_from_schmidt(alphas, left, right);
  const SchmidtForm sf = schmidt(psi);
  ASSERT_EQ(sf.rank, 2);
  EXPECT_NEAR(sf.alphas(0), 0.8, 1e-12);
  EXPECT_NEAR(sf.alphas(1), 0.6, 1e-12);
  EXPECT_LE(max_abs(sf.reconstruct() - psi.coeffs()), 1e-10);
}

TEST(Schmidt, FramesOrthonormalAndSignFixed) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto psi = random_state({4, 3}, seed);
    const SchmidtForm sf = schmidt(psi);
    const Eigen::Index r = sf.rank;
    EXPECT_LE(max_abs(sf.left_frame.transpose() * sf.left_frame - Matrix::Identity(r, r)), 1e-10);
    EXPECT_LE(max_abs(sf.right_frame.transpose() * sf.right_frame - Matrix::Identity(r, r)), 1e-10);
    EXPECT_NEAR(sf.alphas.squaredNorm(), 1.0, 1e-10);
    EXPECT_LE(max_abs(sf.reconstruct() - psi.coeffs()), 1e-10);
    for (Eigen::Index k = 0; k < r; ++k) {
      Eigen::Index arg = 0;
      sf.left_frame.col(k).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(sf.left_frame(arg, k), 0.0);
    }
    for (Eigen::Index k = 1; k < r; ++k) EXPECT_GE(sf.alphas(k - 1), sf.alphas(k));
  }
}

TEST(Schmidt, ToleranceMustBeSmallAndPositive) {
  EXPECT_THROW(schmidt(bell(), 0.0), ValidationError);
  EXPECT_THROW(schmidt(bell(), 1e-3), ValidationError);
}

TEST(OperatorTensor, Identities) {
  EXPECT_EQ(max_abs(operator_tensor(SymOperator::identity(2), SymOperator::identity(2)).matrix() -
                    Matrix::Identity(4, 4)),
            0.0);
}

TEST(OperatorTensor, DiagonalKronecker) {
  const Matrix k = operator_tensor(pauli_z(), pauli_z()).matrix();
  Vector expected(4);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(max_abs(k - Matrix(expected.asDiagonal())), 0.0);
}

TEST(OperatorTensor, ActsFactorwiseOnProductVectors) {
  std::mt19937_64 eng(8);
  const SymOperator a1 = random_observable(3, 1), a2 = random_observable(4, 2);
  const Matrix k = operator_tensor(a1, a2).matrix();
  for (int t = 0; t < 20; ++t) {
    const Vector u = gaussian_vector(3, eng), v = gaussian_vector(4, eng);
    const Vector uv = BipartiteState::normalized(u * v.transpose()).flat() * (u.norm() * v.norm());
    const Vector a1u = a1.matrix() * u, a2v = a2.matrix() * v;
    Vector expected(12);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) expected(i * 4 + j) = a1u(i) * a2v(j);
    EXPECT_LE((k * uv - expected).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + expected.norm()));
  }
}

TEST(RandomState, RankOneIsFactorizable) {
  EXPECT_EQ(schmidt(random_state({2, 2}, 9, 1)).rank, 1);
}

TEST(RandomState, NormalizedWithoutRankConstraint) {
  EXPECT_NEAR(random_state({3, 4}, 1).coeffs().norm(), 1.0, 1e-12);
}

TEST(RandomState, DeterministicPerSeed) {
  EXPECT_EQ(max_abs(random_state({3, 4}, 77).coeffs() - random_state({3, 4}, 77).coeffs()), 0.0);
  EXPECT_GT(max_abs(random_state({3, 4}, 77).coeffs() - random_state({3, 4}, 78).coeffs()), 0.0);
}

TEST(RandomState, RequestedRankIsExact) {
  std::mt19937_64 eng(5);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto [n1, n2] = random_dims(eng, 1, 5, 5);
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(seed % std::min(n1, n2));
    const auto psi = random_state({n1, n2}, seed, r);
    const Vector s = Eigen::JacobiSVD<Matrix>(psi.coeffs()).singularValues();
    EXPECT_EQ((s.array() > 1e-10).count(), r);
    EXPECT_EQ(schmidt(psi).rank, r);
  }
}

TEST(RandomState, RejectsInvalidRank) {
  EXPECT_THROW(random_state({2, 3}, 1, 0), ValidationError);
  EXPECT_THROW(random_state({2, 3}, 1, 3), ValidationError);
}

TEST(BipartiteState, SwapTransposes) {
  const auto psi = random_state({2, 5}, 3);
  EXPECT_EQ(psi.swapped().n1(), 5);
  EXPECT_EQ(max_abs(psi.swapped().coeffs() - psi.coeffs().transpose()), 0.0);
}

}  // namespace
}  // namespace pcsft
