#include "pcsft/kernels.hpp"

#include "pcsft/errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace pcsft::kernels {
namespace {

using Eigen::Index;

void check_field_shape(const Eigen::MatrixXd& root, const FieldMatrix& out) {
  if (out.cols() != root.rows())
    throw ValidationError("gaussian_fields: output width does not match covariance root");
}

// Samples [begin, end) of block `b`. Shared by both variants so the
// arithmetic, and hence the bits, are the same.
void fill_block(const Eigen::MatrixXd& root, std::uint64_t seed, std::uint64_t stream, Index b,
                FieldMatrix& out) {
  const Index begin = b * kBlockSize;
  const Index end = std::min<Index>(begin + kBlockSize, out.rows());
  const Index dim = root.rows(), rank = root.cols();
  auto eng = detail::make_engine(seed, stream, static_cast<std::uint64_t>(b));
  std::normal_distribution<double> normal;
  std::vector<double> z(static_cast<std::size_t>(rank));
  for (Index k = begin; k < end; ++k) {
    for (auto& zj : z) zj = normal(eng);
    for (Index i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (Index j = 0; j < rank; ++j) acc += root(i, j) * z[static_cast<std::size_t>(j)];
      out(k, i) = acc;
    }
  }
}

double quadratic_row(const FieldMatrix& phi, Index k, Index offset, const Eigen::MatrixXd& a) {
  const Index n = a.rows();
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j) row += a(i, j) * phi(k, offset + j);
    acc += phi(k, offset + i) * row;
  }
  return acc;
}

double bilinear_row(const FieldMatrix& phi, Index k, Index off_u, const Eigen::VectorXd& u,
                    Index off_v, const Eigen::VectorXd& v) {
  double pu = 0.0, pv = 0.0;
  for (Index i = 0; i < u.size(); ++i) pu += u(i) * phi(k, off_u + i);
  for (Index i = 0; i < v.size(); ++i) pv += v(i) * phi(k, off_v + i);
  return pu * pv;
}

void check_segment(const FieldMatrix& phi, Index offset, Index len) {
  if (offset < 0 || offset + len > phi.cols())
    throw ValidationError("kernel: field segment out of range");
}

Index batch_begin(Index n, Index batches, Index b) {
  return b * (n / batches) + std::min(b, n % batches);
}

void check_batches(Index n, Index batches) {
  if (batches < 1 || batches > n)
    throw ValidationError("batch_means: batch count must lie in [1, n]");
}

}  // namespace

namespace serial {

void gaussian_fields(const Eigen::MatrixXd& root, std::uint64_t seed, std::uint64_t stream,
                     FieldMatrix& out) {
  check_field_shape(root, out);
  for (Index b = 0; b < block_count(out.rows()); ++b) fill_block(root, seed, stream, b, out);
}

Eigen::MatrixXd second_moment(const FieldMatrix& phi) {
  const Index n = phi.rows(), d = phi.cols();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j <= i; ++j) acc(i, j) += phi(k, i) * phi(k, j);
  acc = acc.selfadjointView<Eigen::Lower>();
  return n > 0 ? Eigen::MatrixXd(acc / static_cast<double>(n)) : acc;
}

Eigen::VectorXd quadratic_series(const FieldMatrix& phi, Index offset, const Eigen::MatrixXd& a) {
  check_segment(phi, offset, a.rows());
  Eigen::VectorXd f(phi.rows());
  for (Index k = 0; k < phi.rows(); ++k) f(k) = quadratic_row(phi, k, offset, a);
  return f;
}

Eigen::VectorXd bilinear_series(const FieldMatrix& phi, Index off_u, const Eigen::VectorXd& u,
                                Index off_v, const Eigen::VectorXd& v) {
  check_segment(phi, off_u, u.size());
  check_segment(phi, off_v, v.size());
  Eigen::VectorXd g(phi.rows());
  for (Index k = 0; k < phi.rows(); ++k) g(k) = bilinear_row(phi, k, off_u, u, off_v, v);
  return g;
}

double mean(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw ValidationError("mean: empty series");
  double acc = 0.0;
  for (Index k = 0; k < x.size(); ++k) acc += x(k);
  return acc / static_cast<double>(x.size());
}

Eigen::VectorXd batch_means(const Eigen::VectorXd& x, Index batches) {
  check_batches(x.size(), batches);
  Eigen::VectorXd out(batches);
  for (Index b = 0; b < batches; ++b) {
    const Index begin = batch_begin(x.size(), batches, b);
    const Index end = batch_begin(x.size(), batches, b + 1);
    double acc = 0.0;
    for (Index k = begin; k < end; ++k) acc += x(k);
    out(b) = acc / static_cast<double>(end - begin);
  }
  return out;
}

}  // namespace serial

namespace parallel {

void gaussian_fields(const Eigen::MatrixXd& root, std::uint64_t seed, std::uint64_t stream,
                     FieldMatrix& out) {
  check_field_shape(root, out);
  const Index blocks = block_count(out.rows());
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) fill_block(root, seed, stream, b, out);
}

Eigen::MatrixXd second_moment(const FieldMatrix& phi) {
  const Index n = phi.rows(), d = phi.cols();
  const Index blocks = block_count(n);
  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(blocks),
                                       Eigen::MatrixXd::Zero(d, d));
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    Eigen::MatrixXd& acc = partial[static_cast<std::size_t>(b)];
    const Index end = std::min<Index>((b + 1) * kBlockSize, n);
    for (Index k = b * kBlockSize; k < end; ++k)
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j <= i; ++j) acc(i, j) += phi(k, i) * phi(k, j);
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (const auto& p : partial) acc += p;
  acc = acc.selfadjointView<Eigen::Lower>();
  return n > 0 ? Eigen::MatrixXd(acc / static_cast<double>(n)) : acc;
}

Eigen::VectorXd quadratic_series(const FieldMatrix& phi, Index offset, const Eigen::MatrixXd& a) {
  check_segment(phi, offset, a.rows());
  Eigen::VectorXd f(phi.rows());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < phi.rows(); ++k) f(k) = quadratic_row(phi, k, offset, a);
  return f;
}

Eigen::VectorXd bilinear_series(const FieldMatrix& phi, Index off_u, const Eigen::VectorXd& u,
                                Index off_v, const Eigen::VectorXd& v) {
  check_segment(phi, off_u, u.size());
  check_segment(phi, off_v, v.size());
  Eigen::VectorXd g(phi.rows());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < phi.rows(); ++k) g(k) = bilinear_row(phi, k, off_u, u, off_v, v);
  return g;
}

double mean(const Eigen::VectorXd& x) {
  const Index n = x.size();
  if (n == 0) throw ValidationError("mean: empty series");
  const Index blocks = block_count(n);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    const Index end = std::min<Index>((b + 1) * kBlockSize, n);
    double acc = 0.0;
    for (Index k = b * kBlockSize; k < end; ++k) acc += x(k);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc / static_cast<double>(n);
}

Eigen::VectorXd batch_means(const Eigen::VectorXd& x, Index batches) {
  check_batches(x.size(), batches);
  Eigen::VectorXd out(batches);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < batches; ++b) {
    const Index begin = batch_begin(x.size(), batches, b);
    const Index end = batch_begin(x.size(), batches, b + 1);
    double acc = 0.0;
    for (Index k = begin; k < end; ++k) acc += x(k);
    out(b) = acc / static_cast<double>(end - begin);
  }
  return out;
}

}  // namespace parallel

}  // namespace pcsft::kernels
