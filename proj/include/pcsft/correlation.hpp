#pragma once

#include "pcsft/covariance.hpp"
#include "pcsft/quantum_oracle.hpp"
#include "pcsft/sampler.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace pcsft {

/// Monte Carlo acceptance threshold, in standard errors.
inline constexpr double kZThreshold = 5.0;
/// Number of contiguous batches used for batch-means standard errors.
inline constexpr Eigen::Index kBatchCount = 200;
/// Tolerance for identities that involve no sampling.
inline constexpr double kAlgebraTol = 1e-10;
/// Largest n1 + n2 accepted by the quartic-loop oracle.
inline constexpr Eigen::Index kOracleMaxDim = 12;

enum class Identity { q1, t4, yy1, yy2, t3, cross };

std::string to_string(Identity id);
std::optional<Identity> identity_from_string(const std::string& s);

/// One quantum-classical comparison.
///
/// `classical_value` is the Monte Carlo estimate and `standard_error` its
/// batch-means error. `analytic_classical` is the exact value of the same
/// classical quantity for the Gaussian model (no sampling), `quantum_value`
/// the oracle's answer. A report passes when the estimate lies within
/// kZThreshold standard errors of the analytic value and the analytic value
/// agrees with the quantum one to kAlgebraTol.
struct CorrelationReport {
  Identity identity = Identity::q1;
  std::string label;
  double classical_value = 0.0;
  double standard_error = 0.0;
  double analytic_classical = 0.0;
  double quantum_value = 0.0;
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;

  double z_score() const;
  /// |classical_value| / standard_error: how clearly the estimate is nonzero.
  double detection_z() const;
  double algebraic_gap() const;
  bool pass() const;
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// (A phi, phi).
double quadratic_form(const SymOperator& a, const HVector& phi);

/// E f_A1(phi1) f_A2(phi2) = (Tr D11 A1)(Tr D22 A2) + 2 Tr(D12 A2 D21 A1).
double analytic_product_moment(const BlockCovariance& d, const SymOperator& a1,
                               const SymOperator& a2);

/// cov(f_A1, f_A2) = 2 Tr(D12 A2 D21 A1).
double analytic_quadratic_covariance(const BlockCovariance& d, const SymOperator& a1,
                                     const SymOperator& a2);

/// E f_A1(phi1) f_A2(phi2) by explicit summation of the Gaussian fourth
/// moments E phi_a phi_b phi_c phi_d = d_ab d_cd + d_ac d_bd + d_ad d_bc.
/// Throws ValidationError when n1 + n2 > kOracleMaxDim.
double fourth_moment_oracle(const BlockCovariance& d, const SymOperator& a1,
                            const SymOperator& a2);

/// Mean of a series with a batch-means standard error.
Estimate batch_mean_estimate(const Vector& series);

/// Sample covariance of f_A1(phi1) and f_A2(phi2) with batch-means standard error.
Estimate empirical_quadratic_covariance(const SampleBatch& batch, const SymOperator& a1,
                                        const SymOperator& a2);

/// State, its regularized covariance and one batch of fields drawn from it.
struct FieldExperiment {
  BipartiteState state;
  BlockCovariance covariance;
  SampleBatch batch;
};

/// Throws NotPositiveSemidefinite when eps < eps*.
FieldExperiment run_field_experiment(const BipartiteState& psi, double eps, Eigen::Index n,
                                     std::uint64_t seed);

/// 1/2 cov(f_A1, f_A2) against <A1 (x) A2>_Psi.
CorrelationReport q1_report(const FieldExperiment& exp, const SymOperator& a1,
                            const SymOperator& a2);

/// 1/2 cov(f_A01, f_A02) of the centered observables against the quantum covariance.
CorrelationReport t4_report(const FieldExperiment& exp, const SymOperator& a1,
                            const SymOperator& a2);

/// t4_report for a factorizable state, tagged T3. Throws ValidationError
/// for an entangled state and ConsistencyError if the quantum covariance
/// is not zero within 1e-12.
CorrelationReport t3_report(const FieldExperiment& exp, const SymOperator& a1,
                            const SymOperator& a2);

/// E f_A(phi_side) - eps Tr A against <A>_Psi.
CorrelationReport calibrated_average(const SampleBatch& batch, const BipartiteState& psi,
                                     const SymOperator& a, double eps, Side side);

/// E (u, phi1)(v, phi2) against (Psi^ v, u).
CorrelationReport cross_linear_correlation(const SampleBatch& batch, const BipartiteState& psi,
                                           const HVector& u, const HVector& v);

CorrelationReport verify_q1(const BipartiteState& psi, double eps, const SymOperator& a1,
                            const SymOperator& a2, Eigen::Index n, std::uint64_t seed);
CorrelationReport verify_t4(const BipartiteState& psi, double eps, const SymOperator& a1,
                            const SymOperator& a2, Eigen::Index n, std::uint64_t seed);

}  // namespace pcsft
