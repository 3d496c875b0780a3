#pragma once

#include "pcsft/covariance.hpp"
#include "pcsft/kernels.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pcsft {

/// Relative cut below which covariance eigenvalues are treated as zero.
inline constexpr double kFactorTol = 1e-10;

/// Square root L (dim x rank) of a PSD covariance, L L^T = C.
struct CovarianceFactor {
  Matrix root;
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  /// Eigenvalues with |lambda| <= tol * max(1, lambda_max) that were set to zero.
  std::vector<double> clip_report;
  std::string covariance_id;
  double epsilon = 0.0;

  Eigen::Index rank() const { return root.cols(); }
  Eigen::Index dim() const { return n1 + n2; }
};

/// N paired draws (phi1, phi2), stored row-wise as one N x (n1 + n2) matrix.
class SampleBatch {
 public:
  SampleBatch(kernels::FieldMatrix fields, Eigen::Index n1, Eigen::Index n2, std::uint64_t seed,
              std::string covariance_id, double epsilon);

  Eigen::Index n() const { return fields_.rows(); }
  Eigen::Index n1() const { return n1_; }
  Eigen::Index n2() const { return n2_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& covariance_id() const { return covariance_id_; }
  double epsilon() const { return epsilon_; }

  const kernels::FieldMatrix& fields() const { return fields_; }
  auto phi1() const { return fields_.leftCols(n1_); }
  auto phi2() const { return fields_.rightCols(n2_); }

 private:
  kernels::FieldMatrix fields_;
  Eigen::Index n1_;
  Eigen::Index n2_;
  std::uint64_t seed_;
  std::string covariance_id_;
  double epsilon_;
};

/// Content hash of a covariance matrix (hex), stable within one build.
std::string covariance_id(const Matrix& full);

/// Symmetric eigendecomposition root. Throws NotPositiveSemidefinite if an
/// eigenvalue lies below -tol * max(1, lambda_max).
CovarianceFactor factorize_covariance(const BlockCovariance& c, double tol = kFactorTol);
CovarianceFactor factorize_covariance(const Matrix& full, Eigen::Index n1, Eigen::Index n2,
                                      double tol = kFactorTol, double epsilon = 0.0);

/// phi = L z, z standard normal. Deterministic in (seed, n) for any thread count.
SampleBatch sample_fields(const CovarianceFactor& factor, Eigen::Index n, std::uint64_t seed);

/// Intrinsic field drawn from `intrinsic` plus independent white noise of
/// variance `eps` on every coordinate, from a separate random stream.
SampleBatch sample_with_background(const CovarianceFactor& intrinsic, double eps, Eigen::Index n,
                                   std::uint64_t seed);

/// Uncentered second moments (1/n) sum phi phi^T, split into blocks.
BlockCovariance empirical_covariance(const SampleBatch& batch);

/// Mean of ||phi||^2 over the batch.
double dispersion(const SampleBatch& batch);

/// Entrywise standard error of the second-moment estimator for a zero-mean
/// Gaussian with covariance c: sqrt((c_aa c_bb + c_ab^2) / n).
Matrix second_moment_standard_errors(const Matrix& c, Eigen::Index n);

}  // namespace pcsft
