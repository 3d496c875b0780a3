#include "pcsft/quantum_oracle.hpp"

#include "pcsft/errors.hpp"

#include <cmath>
#include <sstream>

namespace pcsft {
namespace {

constexpr double kIdentityTol = 1e-10;

Eigen::Index side_dim(const BipartiteState& psi, Side side) {
  return side == Side::first ? psi.n1() : psi.n2();
}

void require_dim(const SymOperator& a, const BipartiteState& psi, Side side, const char* who) {
  if (a.dim() != side_dim(psi, side)) {
    std::ostringstream msg;
    msg << who << ": observable dimension " << a.dim() << " does not match subsystem "
        << static_cast<int>(side) << " dimension " << side_dim(psi, side);
    throw ValidationError(msg.str());
  }
}

void require_agreement(double a, double b, const char* what) {
  if (std::abs(a - b) > kIdentityTol * (1.0 + std::abs(a))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": routes disagree (" << a << " vs " << b << ")";
    throw ConsistencyError(msg.str());
  }
}

}  // namespace

double qm_average_single(const SymOperator& a, const BipartiteState& psi, Side side) {
  require_dim(a, psi, side, "qm_average_single");
  const SymOperator rho = reduced_density(psi, side);
  return (rho.matrix() * a.matrix()).trace();
}

ProductAverage qm_average_product(const SymOperator& a1, const SymOperator& a2,
                                  const BipartiteState& psi) {
  require_dim(a1, psi, Side::first, "qm_average_product");
  require_dim(a2, psi, Side::second, "qm_average_product");

  const Vector v = psi.flat();
  ProductAverage out;
  out.direct = v.dot(operator_tensor(a1, a2).matrix() * v);

  const Matrix& op = as_operator(psi);
  out.trace_route = (op * a2.matrix() * op.transpose() * a1.matrix()).trace();

  require_agreement(out.direct, out.trace_route, "qm_average_product");
  return out;
}

CenteredObservable center(const SymOperator& a, const BipartiteState& psi, Side side) {
  const double mean = qm_average_single(a, psi, side);
  return {a, mean, a - SymOperator::identity(a.dim()) * mean};
}

QuantumCovariance qm_covariance(const SymOperator& a1, const SymOperator& a2,
                                const BipartiteState& psi) {
  const CenteredObservable c1 = center(a1, psi, Side::first);
  const CenteredObservable c2 = center(a2, psi, Side::second);

  QuantumCovariance out;
  out.uncentered_route = qm_average_product(a1, a2, psi).value() - c1.mean * c2.mean;
  out.centered_route = qm_average_product(c1.centered, c2.centered, psi).value();
  require_agreement(out.uncentered_route, out.centered_route, "qm_covariance");
  return out;
}

}  // namespace pcsft
