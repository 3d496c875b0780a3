#include "pcsft/sampler.hpp"

#include "pcsft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string_view>

namespace pcsft {
namespace {

constexpr std::uint64_t kFieldStream = 1;
constexpr std::uint64_t kBackgroundStream = 2;

}  // namespace

SampleBatch::SampleBatch(kernels::FieldMatrix fields, Eigen::Index n1, Eigen::Index n2,
                         std::uint64_t seed, std::string covariance_id, double epsilon)
    : fields_(std::move(fields)),
      n1_(n1),
      n2_(n2),
      seed_(seed),
      covariance_id_(std::move(covariance_id)),
      epsilon_(epsilon) {
  if (n1_ < 1 || n2_ < 1 || fields_.cols() != n1_ + n2_)
    throw ValidationError("SampleBatch: field width does not match dims");
  if (!fields_.allFinite()) throw ValidationError("SampleBatch: non-finite sample");
}

std::string covariance_id(const Matrix& full) {
  std::string bytes;
  const Eigen::Index dims[2] = {full.rows(), full.cols()};
  bytes.append(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (Eigen::Index i = 0; i < full.rows(); ++i)
    for (Eigen::Index j = 0; j < full.cols(); ++j) {
      const double x = full(i, j);
      bytes.append(reinterpret_cast<const char*>(&x), sizeof(x));
    }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016zx", std::hash<std::string_view>{}(bytes));
  return buf;
}

CovarianceFactor factorize_covariance(const Matrix& full, Eigen::Index n1, Eigen::Index n2,
                                      double tol, double epsilon) {
  if (n1 < 1 || n2 < 1 || full.rows() != n1 + n2 || full.cols() != n1 + n2)
    throw ValidationError("factorize_covariance: shape does not match dims");
  if ((full - full.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError("factorize_covariance: matrix not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (full + full.transpose()));
  const Vector& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.maxCoeff());
  const double cut = tol * scale;
  if (ev.minCoeff() < -cut) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "factorize_covariance: eigenvalue " << ev.minCoeff() << " below -" << cut;
    throw NotPositiveSemidefinite(msg.str(), -ev.minCoeff());
  }

  CovarianceFactor out;
  out.n1 = n1;
  out.n2 = n2;
  out.epsilon = epsilon;
  out.covariance_id = covariance_id(full);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= cut)
      out.clip_report.push_back(ev(i));
    else
      kept.push_back(i);
  }
  out.root.resize(full.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const Eigen::Index i = kept[c];
    out.root.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(i) * std::sqrt(ev(i));
  }
  return out;
}

CovarianceFactor factorize_covariance(const BlockCovariance& c, double tol) {
  return factorize_covariance(c.full(), c.n1(), c.n2(), tol, c.epsilon());
}

SampleBatch sample_fields(const CovarianceFactor& factor, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_fields: n must be >= 1");
  kernels::FieldMatrix fields(n, factor.dim());
  if (factor.rank() == 0)
    fields.setZero();
  else
    kernels::parallel::gaussian_fields(factor.root, seed, kFieldStream, fields);
  return SampleBatch(std::move(fields), factor.n1, factor.n2, seed, factor.covariance_id,
                     factor.epsilon);
}

SampleBatch sample_with_background(const CovarianceFactor& intrinsic, double eps, Eigen::Index n,
                                   std::uint64_t seed) {
  if (!(eps >= 0.0)) throw ValidationError("sample_with_background: eps must be >= 0");
  if (n < 1) throw ValidationError("sample_with_background: n must be >= 1");
  const Eigen::Index d = intrinsic.dim();

  kernels::FieldMatrix fields(n, d);
  if (intrinsic.rank() == 0)
    fields.setZero();
  else
    kernels::parallel::gaussian_fields(intrinsic.root, seed, kFieldStream, fields);

  kernels::FieldMatrix noise(n, d);
  const Matrix noise_root = std::sqrt(eps) * Matrix::Identity(d, d);
  kernels::parallel::gaussian_fields(noise_root, seed, kBackgroundStream, noise);
  fields += noise;

  const Matrix total = intrinsic.root * intrinsic.root.transpose() + eps * Matrix::Identity(d, d);
  return SampleBatch(std::move(fields), intrinsic.n1, intrinsic.n2, seed,
                     covariance_id(total), eps);
}

BlockCovariance empirical_covariance(const SampleBatch& batch) {
  if (batch.n() < 2) throw ValidationError("empirical_covariance: need at least 2 samples");
  const Matrix m = kernels::parallel::second_moment(batch.fields());
  return BlockCovariance::from_full(m, batch.n1(), batch.n2(), batch.epsilon());
}

double dispersion(const SampleBatch& batch) {
  const Eigen::Index d = batch.n1() + batch.n2();
  return kernels::parallel::mean(
      kernels::parallel::quadratic_series(batch.fields(), 0, Matrix::Identity(d, d)));
}

Matrix second_moment_standard_errors(const Matrix& c, Eigen::Index n) {
  if (n < 1) throw ValidationError("second_moment_standard_errors: n must be >= 1");
  Matrix se(c.rows(), c.cols());
  for (Eigen::Index a = 0; a < c.rows(); ++a)
    for (Eigen::Index b = 0; b < c.cols(); ++b)
      se(a, b) = std::sqrt((c(a, a) * c(b, b) + c(a, b) * c(a, b)) / static_cast<double>(n));
  return se;
}

}  // namespace pcsft
