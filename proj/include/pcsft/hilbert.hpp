#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>

namespace pcsft {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Plain real vector of a finite-dimensional Hilbert space.
using HVector = Vector;

enum class Side { first = 1, second = 2 };

/// Tolerance used when a state or vector is required to have unit norm.
inline constexpr double kStateNormTol = 1e-12;
/// Tolerance on the norm of factors handed to tensor_product.
inline constexpr double kFactorNormTol = 1e-10;
/// Default relative cut separating genuine Schmidt coefficients from zeros.
inline constexpr double kSchmidtTol = 1e-10;

/// Real symmetric matrix: an observable or a covariance block.
class SymOperator {
 public:
  SymOperator() = default;

  /// Throws ValidationError unless the matrix is square, finite and symmetric
  /// within 1e-12 (max norm). The stored matrix is exactly symmetrized.
  explicit SymOperator(Matrix m);

  static SymOperator identity(Eigen::Index n);
  static SymOperator zero(Eigen::Index n);
  static SymOperator diagonal(const Vector& d);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace(); }

  SymOperator operator+(const SymOperator& o) const;
  SymOperator operator-(const SymOperator& o) const;
  SymOperator operator*(double s) const;

 private:
  Matrix m_;
};

/// Normalized pure state of H1 (x) H2 stored as its n1 x n2 coefficient
/// matrix C, Psi = sum_ij C_ij e_i (x) f_j. The flattened vector uses
/// row-major order, index i*n2 + j.
class BipartiteState {
 public:
  /// Throws ValidationError unless entries are finite and ||C||_F = 1 within 1e-12.
  explicit BipartiteState(Matrix coeffs);

  /// Rescales a nonzero coefficient matrix to unit norm.
  static BipartiteState normalized(Matrix coeffs);

  /// Reads a row-major flattened vector of length n1*n2.
  static BipartiteState from_flat(Eigen::Index n1, Eigen::Index n2, const Vector& flat);

  Eigen::Index n1() const { return c_.rows(); }
  Eigen::Index n2() const { return c_.cols(); }
  const Matrix& coeffs() const { return c_; }

  /// Row-major flattening, the coordinate vector of Psi in the product basis.
  Vector flat() const;

  /// The same vector viewed in H2 (x) H1.
  BipartiteState swapped() const;

 private:
  Matrix c_;
};

/// Psi = sum_i alpha_i e_{i1} (x) e_{i2}, with alphas sorted descending.
struct SchmidtForm {
  Vector alphas;
  Matrix left_frame;   // n1 x rank, orthonormal columns
  Matrix right_frame;  // n2 x rank, orthonormal columns
  Eigen::Index rank = 0;

  /// Rebuilds the coefficient matrix sum_i alpha_i e_{i1} e_{i2}^T.
  Matrix reconstruct() const;
};

/// psi1 (x) psi2; both factors must be unit vectors within 1e-10.
BipartiteState tensor_product(const HVector& psi1, const HVector& psi2);

/// Matrix of the map H2 -> H1, phi -> sum_j (phi, chi_j) psi_j.
/// In the product basis it is exactly the coefficient matrix.
const Matrix& as_operator(const BipartiteState& psi);

/// side 1: Psi^ Psi^*, side 2: Psi^* Psi^.
SymOperator reduced_density(const BipartiteState& psi, Side side);

/// SVD-based Schmidt decomposition. Coefficients at or below
/// tol * alpha_max are dropped. Each left frame vector is signed so that its
/// largest-magnitude entry is positive.
SchmidtForm schmidt(const BipartiteState& psi, double tol = kSchmidtTol);

/// Kronecker product matching the row-major state flattening.
SymOperator operator_tensor(const SymOperator& a1, const SymOperator& a2);

/// Random normalized state with i.i.d. standard-normal coefficients,
/// optionally truncated to the given Schmidt rank.
BipartiteState random_state(std::pair<Eigen::Index, Eigen::Index> dims, std::uint64_t seed,
                            std::optional<Eigen::Index> schmidt_rank = std::nullopt);

/// Builds sum_i alphas_i u_i (x) v_i from given frames and renormalizes.
BipartiteState state_from_schmidt(const Vector& alphas, const Matrix& left, const Matrix& right);

/// (e_1 (x) f_1 + ... + e_n (x) f_n) / sqrt(n) in R^n (x) R^n.
BipartiteState maximally_entangled(Eigen::Index n);

/// Basis vector e_k of R^n (zero-based k).
HVector basis_vector(Eigen::Index n, Eigen::Index k);

/// Random unit vector drawn from the isotropic Gaussian.
HVector random_unit_vector(Eigen::Index n, std::uint64_t seed);

/// Random symmetric matrix (G + G^T) / 2 with standard-normal G.
SymOperator random_observable(Eigen::Index n, std::uint64_t seed);

}  // namespace pcsft
