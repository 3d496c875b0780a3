#include "pcsft/correlation.hpp"

#include "pcsft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pcsft {
namespace {

void require_square_dim(const SymOperator& a, Eigen::Index n, const char* who) {
  if (a.dim() != n) {
    std::ostringstream msg;
    msg << who << ": observable dimension " << a.dim() << " does not match " << n;
    throw ValidationError(msg.str());
  }
}

double z_of(double diff, double se) {
  if (se > 0.0) return std::abs(diff) / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

CorrelationReport make_report(Identity id, const SampleBatch& batch, double eps) {
  CorrelationReport r;
  r.identity = id;
  r.n = batch.n();
  r.seed = batch.seed();
  r.epsilon = eps;
  return r;
}

}  // namespace

std::string to_string(Identity id) {
  switch (id) {
    case Identity::q1: return "Q1";
    case Identity::t4: return "T4";
    case Identity::yy1: return "YY1";
    case Identity::yy2: return "YY2";
    case Identity::t3: return "T3";
    case Identity::cross: return "CROSS";
  }
  return "?";
}

std::optional<Identity> identity_from_string(const std::string& s) {
  for (Identity id : {Identity::q1, Identity::t4, Identity::yy1, Identity::yy2, Identity::t3,
                      Identity::cross})
    if (to_string(id) == s) return id;
  return std::nullopt;
}

double CorrelationReport::z_score() const {
  return z_of(classical_value - analytic_classical, standard_error);
}

double CorrelationReport::detection_z() const { return z_of(classical_value, standard_error); }

double CorrelationReport::algebraic_gap() const {
  return std::abs(analytic_classical - quantum_value);
}

bool CorrelationReport::pass() const {
  return z_score() <= kZThreshold &&
         algebraic_gap() <= kAlgebraTol * (1.0 + std::abs(quantum_value));
}

double quadratic_form(const SymOperator& a, const HVector& phi) {
  require_square_dim(a, phi.size(), "quadratic_form");
  return phi.dot(a.matrix() * phi);
}

double analytic_quadratic_covariance(const BlockCovariance& d, const SymOperator& a1,
                                     const SymOperator& a2) {
  require_square_dim(a1, d.n1(), "analytic_quadratic_covariance");
  require_square_dim(a2, d.n2(), "analytic_quadratic_covariance");
  return 2.0 * (d.d12() * a2.matrix() * d.d21() * a1.matrix()).trace();
}

double analytic_product_moment(const BlockCovariance& d, const SymOperator& a1,
                               const SymOperator& a2) {
  const double cov = analytic_quadratic_covariance(d, a1, a2);
  const double m1 = (d.d11().matrix() * a1.matrix()).trace();
  const double m2 = (d.d22().matrix() * a2.matrix()).trace();
  return m1 * m2 + cov;
}

double fourth_moment_oracle(const BlockCovariance& d, const SymOperator& a1,
                            const SymOperator& a2) {
  if (d.dim() > kOracleMaxDim)
    throw ValidationError("fourth_moment_oracle: n1 + n2 exceeds the oracle cap");
  require_square_dim(a1, d.n1(), "fourth_moment_oracle");
  require_square_dim(a2, d.n2(), "fourth_moment_oracle");
  const Matrix c = d.full();
  const Matrix& x = a1.matrix();
  const Matrix& y = a2.matrix();
  const Eigen::Index n1 = d.n1(), n2 = d.n2();
  double total = 0.0;
  for (Eigen::Index a = 0; a < n1; ++a)
    for (Eigen::Index b = 0; b < n1; ++b)
      for (Eigen::Index i = 0; i < n2; ++i)
        for (Eigen::Index j = 0; j < n2; ++j) {
          const Eigen::Index p = n1 + i, q = n1 + j;
          const double moment = c(a, b) * c(p, q) + c(a, p) * c(b, q) + c(a, q) * c(b, p);
          total += x(a, b) * y(i, j) * moment;
        }
  return total;
}

Estimate batch_mean_estimate(const Vector& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw ValidationError("batch_mean_estimate: need at least 2 samples");
  const Eigen::Index batches = std::min(kBatchCount, n);
  const Vector means = kernels::parallel::batch_means(series, batches);
  const double grand = kernels::parallel::mean(series);
  const double var = (means.array() - means.mean()).square().sum() / static_cast<double>(batches - 1);
  return {grand, std::sqrt(var / static_cast<double>(batches))};
}

Estimate empirical_quadratic_covariance(const SampleBatch& batch, const SymOperator& a1,
                                        const SymOperator& a2) {
  if (batch.n() < 2) throw ValidationError("empirical_quadratic_covariance: need n >= 2");
  require_square_dim(a1, batch.n1(), "empirical_quadratic_covariance");
  require_square_dim(a2, batch.n2(), "empirical_quadratic_covariance");
  const Vector x = kernels::parallel::quadratic_series(batch.fields(), 0, a1.matrix());
  const Vector y = kernels::parallel::quadratic_series(batch.fields(), batch.n1(), a2.matrix());
  const double mx = kernels::parallel::mean(x);
  const double my = kernels::parallel::mean(y);
  const Vector products = ((x.array() - mx) * (y.array() - my)).matrix();
  const Estimate e = batch_mean_estimate(products);
  const double bessel = static_cast<double>(batch.n()) / static_cast<double>(batch.n() - 1);
  return {e.value * bessel, e.standard_error * bessel};
}

FieldExperiment run_field_experiment(const BipartiteState& psi, double eps, Eigen::Index n,
                                     std::uint64_t seed) {
  BlockCovariance cov = regularized_covariance(psi, eps);
  SampleBatch batch = sample_fields(factorize_covariance(cov), n, seed);
  return {psi, std::move(cov), std::move(batch)};
}

CorrelationReport q1_report(const FieldExperiment& exp, const SymOperator& a1,
                            const SymOperator& a2) {
  const Estimate cov = empirical_quadratic_covariance(exp.batch, a1, a2);
  CorrelationReport r = make_report(Identity::q1, exp.batch, exp.covariance.epsilon());
  r.classical_value = 0.5 * cov.value;
  r.standard_error = 0.5 * cov.standard_error;
  r.analytic_classical = 0.5 * analytic_quadratic_covariance(exp.covariance, a1, a2);
  r.quantum_value = qm_average_product(a1, a2, exp.state).value();
  return r;
}

CorrelationReport t4_report(const FieldExperiment& exp, const SymOperator& a1,
                            const SymOperator& a2) {
  const CenteredObservable c1 = center(a1, exp.state, Side::first);
  const CenteredObservable c2 = center(a2, exp.state, Side::second);
  const Estimate cov = empirical_quadratic_covariance(exp.batch, c1.centered, c2.centered);
  CorrelationReport r = make_report(Identity::t4, exp.batch, exp.covariance.epsilon());
  r.classical_value = 0.5 * cov.value;
  r.standard_error = 0.5 * cov.standard_error;
  r.analytic_classical =
      0.5 * analytic_quadratic_covariance(exp.covariance, c1.centered, c2.centered);
  r.quantum_value = qm_covariance(a1, a2, exp.state).value();
  return r;
}

CorrelationReport t3_report(const FieldExperiment& exp, const SymOperator& a1,
                            const SymOperator& a2) {
  if (entangled(exp.state))
    throw ValidationError("t3_report: requires a factorizable state");
  CorrelationReport r = t4_report(exp, a1, a2);
  r.identity = Identity::t3;
  if (std::abs(r.quantum_value) > 1e-12) {
    std::ostringstream msg;
    msg << "t3_report: quantum covariance " << r.quantum_value
        << " of a factorizable state is not zero";
    throw ConsistencyError(msg.str());
  }
  return r;
}

CorrelationReport calibrated_average(const SampleBatch& batch, const BipartiteState& psi,
                                     const SymOperator& a, double eps, Side side) {
  if (batch.n() < 2) throw ValidationError("calibrated_average: need n >= 2");
  const Eigen::Index offset = side == Side::first ? 0 : batch.n1();
  const Eigen::Index dim = side == Side::first ? batch.n1() : batch.n2();
  require_square_dim(a, dim, "calibrated_average");

  const Vector f = kernels::parallel::quadratic_series(batch.fields(), offset, a.matrix());
  const Estimate e = batch_mean_estimate(f);
  const double shift = eps * a.trace();

  CorrelationReport r = make_report(side == Side::first ? Identity::yy1 : Identity::yy2, batch, eps);
  r.classical_value = e.value - shift;
  r.standard_error = e.standard_error;
  r.quantum_value = qm_average_single(a, psi, side);
  const SymOperator rho = reduced_density(psi, side);
  r.analytic_classical = ((rho.matrix() + eps * Matrix::Identity(dim, dim)) * a.matrix()).trace() - shift;
  return r;
}

CorrelationReport cross_linear_correlation(const SampleBatch& batch, const BipartiteState& psi,
                                           const HVector& u, const HVector& v) {
  if (u.size() != batch.n1() || v.size() != batch.n2() || psi.n1() != batch.n1() ||
      psi.n2() != batch.n2())
    throw ValidationError("cross_linear_correlation: probe dimensions do not match the batch");
  const Vector g = kernels::parallel::bilinear_series(batch.fields(), 0, u, batch.n1(), v);
  const Estimate e = batch_mean_estimate(g);
  CorrelationReport r = make_report(Identity::cross, batch, batch.epsilon());
  r.classical_value = e.value;
  r.standard_error = e.standard_error;
  r.analytic_classical = u.dot(as_operator(psi) * v);
  r.quantum_value = r.analytic_classical;
  return r;
}

CorrelationReport verify_q1(const BipartiteState& psi, double eps, const SymOperator& a1,
                            const SymOperator& a2, Eigen::Index n, std::uint64_t seed) {
  return q1_report(run_field_experiment(psi, eps, n, seed), a1, a2);
}

CorrelationReport verify_t4(const BipartiteState& psi, double eps, const SymOperator& a1,
                            const SymOperator& a2, Eigen::Index n, std::uint64_t seed) {
  return t4_report(run_field_experiment(psi, eps, n, seed), a1, a2);
}

}  // namespace pcsft
