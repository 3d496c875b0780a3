#pragma once

#include "pcsft/hilbert.hpp"

namespace pcsft {

/// Relative tolerance of the PSD test: lambda_min >= -tol * max(1, lambda_max).
inline constexpr double kPsdTol = 1e-10;
/// Margin added to eps* when the background strength is left on "auto".
inline constexpr double kAutoEpsilonMargin = 0.05;

struct PsdCheck {
  bool psd = false;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Eigenvalue-based PSD test. Throws ValidationError for non-square or
/// asymmetric (beyond 1e-12) input.
PsdCheck is_psd(const Matrix& m, double tol = kPsdTol);

/// Covariance operator of a field on H1 x H2 in 2x2 block form
///
///   [ d11  d12 ]
///   [ d21  d22 ]
///
/// with d21 = d12^T. `epsilon` records the white-noise strength already
/// folded into the diagonal blocks. The spectrum is computed once at
/// construction; `valid()` tells whether the full matrix is PSD.
class BlockCovariance {
 public:
  BlockCovariance(SymOperator d11, Matrix d12, SymOperator d22, double epsilon = 0.0);

  /// Splits a full symmetric (n1 + n2) matrix into blocks.
  static BlockCovariance from_full(const Matrix& full, Eigen::Index n1, Eigen::Index n2,
                                   double epsilon = 0.0);

  Eigen::Index n1() const { return d11_.dim(); }
  Eigen::Index n2() const { return d22_.dim(); }
  Eigen::Index dim() const { return n1() + n2(); }

  const SymOperator& d11() const { return d11_; }
  const Matrix& d12() const { return d12_; }
  const Matrix& d21() const { return d21_; }
  const SymOperator& d22() const { return d22_; }
  double epsilon() const { return epsilon_; }

  Matrix full() const;

  bool valid() const { return check_.psd; }
  double lambda_min() const { return check_.lambda_min; }
  double lambda_max() const { return check_.lambda_max; }

 private:
  SymOperator d11_;
  Matrix d12_;
  Matrix d21_;
  SymOperator d22_;
  double epsilon_ = 0.0;
  PsdCheck check_;
};

struct EpsilonReport {
  double lambda_min = 0.0;            // most negative eigenvalue of the unregularized covariance
  double eps_star = 0.0;              // max(0, -lambda_min)
  double eps_star_closed_form = 0.0;  // max_i alpha_i (1 - alpha_i)
  Vector schmidt_alphas;
};

/// Field split into an intrinsic Gaussian part and independent white noise.
struct Decomposition {
  BlockCovariance intrinsic;
  double background_epsilon = 0.0;
};

/// Blocks (Psi^ Psi^*, Psi^; Psi^*, Psi^* Psi^) with no background.
BlockCovariance naive_covariance(const BipartiteState& psi);

/// Minimal background strength, by eigensolver and by the Schmidt closed
/// form. Throws ConsistencyError if the two differ by more than 1e-10.
EpsilonReport min_epsilon(const BipartiteState& psi);

/// naive_covariance(psi) + eps I. Throws NotPositiveSemidefinite when the
/// result is indefinite, and ValidationError for eps < 0.
BlockCovariance regularized_covariance(const BipartiteState& psi, double eps);

/// eps* + kAutoEpsilonMargin.
double auto_epsilon(const BipartiteState& psi);

/// True iff the unregularized covariance is not PSD. Cross-checked against
/// the Schmidt rank at the same tolerance; a disagreement outside a 10x
/// tolerance band raises ConsistencyError.
bool entangled(const BipartiteState& psi, double tol = kPsdTol);

/// Throws InseparableBackground for entangled states, ValidationError for eps < 0.
Decomposition decompose(const BipartiteState& psi, double eps);

}  // namespace pcsft
