#include "pcsft/covariance.hpp"

#include "pcsft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pcsft {
namespace {

constexpr double kSymTol = 1e-12;
constexpr double kRouteTol = 1e-10;
constexpr double kAmbiguityBand = 10.0;

}  // namespace

PsdCheck is_psd(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValidationError("is_psd: matrix must be square and non-empty");
  if (!m.allFinite()) throw ValidationError("is_psd: non-finite entry");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymTol)
    throw ValidationError("is_psd: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  PsdCheck out;
  out.lambda_min = ev.minCoeff();
  out.lambda_max = ev.maxCoeff();
  out.psd = out.lambda_min >= -tol * std::max(1.0, out.lambda_max);
  return out;
}

BlockCovariance::BlockCovariance(SymOperator d11, Matrix d12, SymOperator d22, double epsilon)
    : d11_(std::move(d11)), d12_(std::move(d12)), d22_(std::move(d22)), epsilon_(epsilon) {
  if (d12_.rows() != d11_.dim() || d12_.cols() != d22_.dim())
    throw ValidationError("BlockCovariance: off-diagonal block shape does not match diagonal blocks");
  if (!d12_.allFinite()) throw ValidationError("BlockCovariance: non-finite off-diagonal entry");
  if (!(epsilon_ >= 0.0)) throw ValidationError("BlockCovariance: epsilon must be >= 0");
  d21_ = d12_.transpose();
  check_ = is_psd(full());
}

BlockCovariance BlockCovariance::from_full(const Matrix& full, Eigen::Index n1, Eigen::Index n2,
                                           double epsilon) {
  if (n1 < 1 || n2 < 1 || full.rows() != n1 + n2 || full.cols() != n1 + n2)
    throw ValidationError("BlockCovariance::from_full: shape does not match dims");
  if ((full - full.transpose()).cwiseAbs().maxCoeff() > kSymTol)
    throw ValidationError("BlockCovariance::from_full: matrix not symmetric");
  return BlockCovariance(SymOperator(full.topLeftCorner(n1, n1)), full.topRightCorner(n1, n2),
                         SymOperator(full.bottomRightCorner(n2, n2)), epsilon);
}

Matrix BlockCovariance::full() const {
  Matrix m(dim(), dim());
  m.topLeftCorner(n1(), n1()) = d11_.matrix();
  m.topRightCorner(n1(), n2()) = d12_;
  m.bottomLeftCorner(n2(), n1()) = d21_;
  m.bottomRightCorner(n2(), n2()) = d22_.matrix();
  return m;
}

BlockCovariance naive_covariance(const BipartiteState& psi) {
  return BlockCovariance(reduced_density(psi, Side::first), as_operator(psi),
                         reduced_density(psi, Side::second), 0.0);
}

EpsilonReport min_epsilon(const BipartiteState& psi) {
  const BlockCovariance naive = naive_covariance(psi);
  const SchmidtForm sf = schmidt(psi);

  EpsilonReport out;
  out.lambda_min = naive.lambda_min();
  out.eps_star = std::max(0.0, -out.lambda_min);
  out.schmidt_alphas = sf.alphas;
  for (Eigen::Index i = 0; i < sf.rank; ++i) {
    const double a = sf.alphas(i);
    out.eps_star_closed_form = std::max(out.eps_star_closed_form, a * (1.0 - a));
  }
  if (std::abs(out.eps_star - out.eps_star_closed_form) > kRouteTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "min_epsilon: eigensolver eps* " << out.eps_star << " disagrees with closed form "
        << out.eps_star_closed_form;
    throw ConsistencyError(msg.str());
  }
  return out;
}

BlockCovariance regularized_covariance(const BipartiteState& psi, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("regularized_covariance: eps must be >= 0");
  const Matrix shift_1 = eps * Matrix::Identity(psi.n1(), psi.n1());
  const Matrix shift_2 = eps * Matrix::Identity(psi.n2(), psi.n2());
  BlockCovariance cov(SymOperator(reduced_density(psi, Side::first).matrix() + shift_1),
                      as_operator(psi),
                      SymOperator(reduced_density(psi, Side::second).matrix() + shift_2), eps);
  if (!cov.valid()) {
    const double deficit = -cov.lambda_min();
    std::ostringstream msg;
    msg.precision(10);
    msg << "regularized covariance is not positive semidefinite: epsilon " << eps
        << " is below eps* " << eps + deficit << " (deficit " << deficit << ")";
    throw NotPositiveSemidefinite(msg.str(), deficit);
  }
  return cov;
}

double auto_epsilon(const BipartiteState& psi) {
  return min_epsilon(psi).eps_star + kAutoEpsilonMargin;
}

bool entangled(const BipartiteState& psi, double tol) {
  const PsdCheck check = is_psd(naive_covariance(psi).full(), tol);
  const bool psd_verdict = !check.psd;

  const Vector s = Eigen::JacobiSVD<Matrix>(psi.coeffs()).singularValues();
  const double second = s.size() > 1 ? s(1) : 0.0;
  const bool rank_verdict = second > tol * s(0);

  if (psd_verdict != rank_verdict) {
    const double scale = std::max(1.0, check.lambda_max);
    const bool ambiguous = std::abs(check.lambda_min) <= kAmbiguityBand * tol * scale &&
                           second <= kAmbiguityBand * tol * s(0);
    if (!ambiguous) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "entangled: PSD route (lambda_min " << check.lambda_min
          << ") disagrees with Schmidt rank route (alpha_2 " << second << ")";
      throw ConsistencyError(msg.str());
    }
  }
  return psd_verdict;
}

Decomposition decompose(const BipartiteState& psi, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("decompose: eps must be >= 0");
  BlockCovariance intrinsic = naive_covariance(psi);
  if (entangled(psi)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "decompose: state is entangled, intrinsic covariance has lambda_min "
        << intrinsic.lambda_min() << " < 0 and cannot be separated from the background";
    throw InseparableBackground(msg.str(), intrinsic.lambda_min());
  }
  return {std::move(intrinsic), eps};
}

}  // namespace pcsft
