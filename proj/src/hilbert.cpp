#include "pcsft/hilbert.hpp"

#include "pcsft/errors.hpp"
#include "rng.hpp"

#include <cmath>
#include <string>

namespace pcsft {
namespace {

constexpr double kSymTol = 1e-12;

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& eng) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal(eng);
  return g;
}

}  // namespace

SymOperator::SymOperator(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValidationError("SymOperator: matrix must be square and non-empty");
  if (!all_finite(m)) throw ValidationError("SymOperator: non-finite entry");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol)
    throw ValidationError("SymOperator: matrix not symmetric (max |A - A^T| = " +
                          std::to_string(asym) + ")");
  m_ = 0.5 * (m + m.transpose());
}

SymOperator SymOperator::identity(Eigen::Index n) { return SymOperator(Matrix::Identity(n, n)); }

SymOperator SymOperator::zero(Eigen::Index n) { return SymOperator(Matrix::Zero(n, n)); }

SymOperator SymOperator::diagonal(const Vector& d) { return SymOperator(Matrix(d.asDiagonal())); }

SymOperator SymOperator::operator+(const SymOperator& o) const {
  if (dim() != o.dim()) throw ValidationError("SymOperator: dimension mismatch in sum");
  return SymOperator(m_ + o.m_);
}

SymOperator SymOperator::operator-(const SymOperator& o) const {
  if (dim() != o.dim()) throw ValidationError("SymOperator: dimension mismatch in difference");
  return SymOperator(m_ - o.m_);
}

SymOperator SymOperator::operator*(double s) const { return SymOperator(m_ * s); }

BipartiteState::BipartiteState(Matrix coeffs) : c_(std::move(coeffs)) {
  if (c_.size() == 0) throw ValidationError("BipartiteState: empty coefficient matrix");
  if (!all_finite(c_)) throw ValidationError("BipartiteState: non-finite coefficient");
  const double norm = c_.norm();
  if (std::abs(norm - 1.0) > kStateNormTol)
    throw ValidationError("BipartiteState: coefficients not normalized (||C||_F = " +
                          std::to_string(norm) + ")");
}

BipartiteState BipartiteState::normalized(Matrix coeffs) {
  if (coeffs.size() == 0 || !all_finite(coeffs))
    throw ValidationError("BipartiteState: empty or non-finite coefficients");
  const double norm = coeffs.norm();
  if (norm == 0.0) throw ValidationError("BipartiteState: zero vector cannot be normalized");
  coeffs /= norm;
  return BipartiteState(std::move(coeffs));
}

BipartiteState BipartiteState::from_flat(Eigen::Index n1, Eigen::Index n2, const Vector& flat) {
  if (n1 < 1 || n2 < 1 || flat.size() != n1 * n2)
    throw ValidationError("BipartiteState: flat vector length does not match dims");
  Matrix c(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j) c(i, j) = flat(i * n2 + j);
  return BipartiteState(std::move(c));
}

Vector BipartiteState::flat() const {
  Vector v(c_.size());
  for (Eigen::Index i = 0; i < n1(); ++i)
    for (Eigen::Index j = 0; j < n2(); ++j) v(i * n2() + j) = c_(i, j);
  return v;
}

BipartiteState BipartiteState::swapped() const { return BipartiteState(c_.transpose()); }

Matrix SchmidtForm::reconstruct() const {
  return left_frame * alphas.asDiagonal() * right_frame.transpose();
}

BipartiteState tensor_product(const HVector& psi1, const HVector& psi2) {
  if (psi1.size() == 0 || psi2.size() == 0)
    throw ValidationError("tensor_product: empty factor");
  if (std::abs(psi1.norm() - 1.0) > kFactorNormTol || std::abs(psi2.norm() - 1.0) > kFactorNormTol)
    throw ValidationError("tensor_product: factors must be unit vectors");
  const Vector u = psi1.normalized();
  const Vector v = psi2.normalized();
  return BipartiteState::normalized(u * v.transpose());
}

const Matrix& as_operator(const BipartiteState& psi) { return psi.coeffs(); }

SymOperator reduced_density(const BipartiteState& psi, Side side) {
  const Matrix& c = psi.coeffs();
  Matrix rho = side == Side::first ? Matrix(c * c.transpose()) : Matrix(c.transpose() * c);
  return SymOperator(0.5 * (rho + rho.transpose()));
}

SchmidtForm schmidt(const BipartiteState& psi, double tol) {
  if (!(tol > 0.0) || tol > 1e-6) throw ValidationError("schmidt: tol must lie in (0, 1e-6]");
  Eigen::JacobiSVD<Matrix> svd(psi.coeffs(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = tol * s(0);

  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;

  SchmidtForm out;
  out.rank = rank;
  out.alphas = s.head(rank);
  out.left_frame = svd.matrixU().leftCols(rank);
  out.right_frame = svd.matrixV().leftCols(rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    Eigen::Index arg = 0;
    out.left_frame.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.left_frame(arg, k) < 0.0) {
      out.left_frame.col(k) *= -1.0;
      out.right_frame.col(k) *= -1.0;
    }
  }
  return out;
}

SymOperator operator_tensor(const SymOperator& a1, const SymOperator& a2) {
  const Eigen::Index n1 = a1.dim(), n2 = a2.dim();
  Matrix k(n1 * n2, n1 * n2);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n1; ++j)
      k.block(i * n2, j * n2, n2, n2) = a1.matrix()(i, j) * a2.matrix();
  return SymOperator(std::move(k));
}

BipartiteState random_state(std::pair<Eigen::Index, Eigen::Index> dims, std::uint64_t seed,
                            std::optional<Eigen::Index> schmidt_rank) {
  const auto [n1, n2] = dims;
  if (n1 < 1 || n2 < 1) throw ValidationError("random_state: dims must be positive");
  if (schmidt_rank && (*schmidt_rank < 1 || *schmidt_rank > std::min(n1, n2)))
    throw ValidationError("random_state: schmidt_rank must lie in [1, min(n1, n2)]");

  auto eng = detail::make_engine(seed, 0x5eed57a7e);
  if (!schmidt_rank) return BipartiteState::normalized(gaussian_matrix(n1, n2, eng));

  const Eigen::Index r = *schmidt_rank;
  // Redraw the rare ill-conditioned draws so the requested rank is
  // unambiguous at the default Schmidt tolerance.
  for (;;) {
    Eigen::JacobiSVD<Matrix> svd(gaussian_matrix(n1, n2, eng),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (s(r - 1) < 1e-3 * s(0)) continue;
    Matrix c = svd.matrixU().leftCols(r) * s.head(r).asDiagonal() *
               svd.matrixV().leftCols(r).transpose();
    return BipartiteState::normalized(std::move(c));
  }
}

BipartiteState state_from_schmidt(const Vector& alphas, const Matrix& left, const Matrix& right) {
  if (left.cols() != alphas.size() || right.cols() != alphas.size())
    throw ValidationError("state_from_schmidt: frame column count must match alphas");
  return BipartiteState::normalized(left * alphas.asDiagonal() * right.transpose());
}

BipartiteState maximally_entangled(Eigen::Index n) {
  if (n < 1) throw ValidationError("maximally_entangled: n must be positive");
  return BipartiteState::normalized(Matrix::Identity(n, n));
}

HVector basis_vector(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k >= n) throw ValidationError("basis_vector: index out of range");
  return HVector::Unit(n, k);
}

HVector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("random_unit_vector: n must be positive");
  auto eng = detail::make_engine(seed, 0xfac70b);
  return gaussian_matrix(n, 1, eng).col(0).normalized();
}

SymOperator random_observable(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("random_observable: n must be positive");
  auto eng = detail::make_engine(seed, 0x0b5e);
  const Matrix g = gaussian_matrix(n, n, eng);
  return SymOperator(0.5 * (g + g.transpose()));
}

}  // namespace pcsft
