#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the plain
// single-threaded reference kept for testing and benchmarking, `parallel` is
// the OpenMP version the library uses.
//
// Work is cut into fixed blocks of kBlockSize samples that do not depend on
// the thread count. Random draws are addressed by (seed, stream, block), and
// reductions combine per-block partials in block order, so parallel results
// are bit-identical for any number of threads. The Gaussian generator is
// also bit-identical to its serial reference; reductions agree with theirs
// to rounding.

#include <Eigen/Dense>

#include <cstdint>

namespace pcsft::kernels {

using FieldMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr Eigen::Index kBlockSize = 1024;

inline Eigen::Index block_count(Eigen::Index n) { return (n + kBlockSize - 1) / kBlockSize; }

namespace serial {

/// out.row(k) = root * z_k with z_k standard normal; out must be pre-sized
/// to n x root.rows().
void gaussian_fields(const Eigen::MatrixXd& root, std::uint64_t seed, std::uint64_t stream,
                     FieldMatrix& out);

/// (1/n) sum_k phi_k phi_k^T.
Eigen::MatrixXd second_moment(const FieldMatrix& phi);

/// f_k = (A x_k, x_k) where x_k = phi.row(k).segment(offset, A.rows()).
Eigen::VectorXd quadratic_series(const FieldMatrix& phi, Eigen::Index offset,
                                 const Eigen::MatrixXd& a);

/// g_k = (u, phi.row(k).segment(off_u, |u|)) (v, phi.row(k).segment(off_v, |v|)).
Eigen::VectorXd bilinear_series(const FieldMatrix& phi, Eigen::Index off_u,
                                const Eigen::VectorXd& u, Eigen::Index off_v,
                                const Eigen::VectorXd& v);

double mean(const Eigen::VectorXd& x);

/// Means of `batches` contiguous, near-equal slices (sizes differ by at most one).
Eigen::VectorXd batch_means(const Eigen::VectorXd& x, Eigen::Index batches);

}  // namespace serial

namespace parallel {

void gaussian_fields(const Eigen::MatrixXd& root, std::uint64_t seed, std::uint64_t stream,
                     FieldMatrix& out);
Eigen::MatrixXd second_moment(const FieldMatrix& phi);
Eigen::VectorXd quadratic_series(const FieldMatrix& phi, Eigen::Index offset,
                                 const Eigen::MatrixXd& a);
Eigen::VectorXd bilinear_series(const FieldMatrix& phi, Eigen::Index off_u,
                                const Eigen::VectorXd& u, Eigen::Index off_v,
                                const Eigen::VectorXd& v);
double mean(const Eigen::VectorXd& x);
Eigen::VectorXd batch_means(const Eigen::VectorXd& x, Eigen::Index batches);

}  // namespace parallel

}  // namespace pcsft::kernels
