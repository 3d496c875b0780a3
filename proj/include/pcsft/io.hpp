#pragma once

#include "pcsft/correlation.hpp"
#include "pcsft/covariance.hpp"
#include "pcsft/hilbert.hpp"
#include "pcsft/sampler.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace pcsft::io {

using nlohmann::json;

/// Loader tolerance: states within this distance of unit norm are rescaled,
/// anything further is rejected.
inline constexpr double kLoadNormTol = 1e-6;

/// Parses { "dims": [n1, n2], "coeffs": [row-major n1*n2 reals] }.
/// Throws ValidationError on any malformed or badly normalized input.
BipartiteState state_from_json(const json& j);
json state_to_json(const BipartiteState& psi);

BipartiteState load_state(const std::filesystem::path& path);
void save_state(const BipartiteState& psi, const std::filesystem::path& path);

json to_json(const EpsilonReport& r);

/// All report fields plus derived z-score, gap and pass flag.
json to_json(const CorrelationReport& r, const std::string& config_hash);

/// Header: sample_index,phi1_1..phi1_n1,phi2_1..phi2_n2.
void write_batch_csv(const SampleBatch& batch, std::ostream& out);

/// { seed, n, covariance_id, epsilon }.
json batch_metadata(const SampleBatch& batch);

/// One row of a verification summary table.
struct SummaryRow {
  std::string identity;
  std::string label;
  double classical_value = 0.0;
  double standard_error = 0.0;
  double analytic_classical = 0.0;
  double quantum_value = 0.0;
  double z_score = 0.0;
  double algebraic_gap = 0.0;
  bool sampled = true;
  bool pass = false;
};

SummaryRow summary_row(const CorrelationReport& r);

/// Writes the summary CSV; seed, epsilon, n and config hash go on every row.
void write_summary_csv(const std::vector<SummaryRow>& rows, long long n, std::uint64_t seed,
                       double epsilon, const std::string& config_hash, std::ostream& out);

/// Reads a whole file; throws ValidationError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace pcsft::io
