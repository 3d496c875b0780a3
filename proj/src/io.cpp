#include "pcsft/io.hpp"

#include "pcsft/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pcsft::io {
namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> to_vec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

BipartiteState state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("coeffs"))
    throw ValidationError("state file: expected an object with \"dims\" and \"coeffs\"");
  const json& dims = j.at("dims");
  const json& coeffs = j.at("coeffs");
  if (!dims.is_array() || dims.size() != 2 || !dims[0].is_number_integer() ||
      !dims[1].is_number_integer())
    throw ValidationError("state file: \"dims\" must be two integers");
  const long long n1 = dims[0].get<long long>(), n2 = dims[1].get<long long>();
  if (n1 < 1 || n2 < 1) throw ValidationError("state file: dims must be positive");
  if (!coeffs.is_array() || static_cast<long long>(coeffs.size()) != n1 * n2)
    throw ValidationError("state file: \"coeffs\" must hold n1*n2 numbers");

  Vector flat(n1 * n2);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!coeffs[k].is_number()) throw ValidationError("state file: non-numeric coefficient");
    flat(static_cast<Eigen::Index>(k)) = coeffs[k].get<double>();
  }
  if (!flat.allFinite()) throw ValidationError("state file: non-finite coefficient");
  const double norm = flat.norm();
  if (std::abs(norm - 1.0) > kLoadNormTol)
    throw ValidationError("state file: coefficients have norm " + num(norm) +
                          ", expected 1 within 1e-6");
  flat /= norm;
  return BipartiteState::from_flat(n1, n2, flat);
}

json state_to_json(const BipartiteState& psi) {
  return {{"dims", {psi.n1(), psi.n2()}}, {"coeffs", to_vec(psi.flat())}};
}

BipartiteState load_state(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("state file " + path.string() + ": " + e.what());
  }
  return state_from_json(j);
}

void save_state(const BipartiteState& psi, const std::filesystem::path& path) {
  write_file(path, state_to_json(psi).dump(2) + "\n");
}

json to_json(const EpsilonReport& r) {
  return {{"lambda_min", r.lambda_min},
          {"eps_star", r.eps_star},
          {"eps_star_closed_form", r.eps_star_closed_form},
          {"schmidt_alphas", to_vec(r.schmidt_alphas)}};
}

json to_json(const CorrelationReport& r, const std::string& config_hash) {
  json j = {{"identity", to_string(r.identity)},
            {"label", r.label},
            {"classical_value", r.classical_value},
            {"standard_error", r.standard_error},
            {"analytic_classical", r.analytic_classical},
            {"quantum_value", r.quantum_value},
            {"n", r.n},
            {"seed", r.seed},
            {"epsilon", r.epsilon},
            {"algebraic_gap", r.algebraic_gap()},
            {"pass", r.pass()},
            {"config_hash", config_hash}};
  // JSON has no infinity; a zero standard error with a nonzero deviation is reported as null.
  const double z = r.z_score();
  j["z_score"] = std::isfinite(z) ? json(z) : json(nullptr);
  return j;
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  out << "sample_index";
  for (Eigen::Index i = 1; i <= batch.n1(); ++i) out << ",phi1_" << i;
  for (Eigen::Index i = 1; i <= batch.n2(); ++i) out << ",phi2_" << i;
  out << '\n';
  const auto& f = batch.fields();
  for (Eigen::Index k = 0; k < batch.n(); ++k) {
    out << k;
    for (Eigen::Index c = 0; c < f.cols(); ++c) out << ',' << num(f(k, c));
    out << '\n';
  }
}

json batch_metadata(const SampleBatch& batch) {
  return {{"seed", batch.seed()},
          {"n", batch.n()},
          {"covariance_id", batch.covariance_id()},
          {"epsilon", batch.epsilon()}};
}

SummaryRow summary_row(const CorrelationReport& r) {
  SummaryRow row;
  row.identity = to_string(r.identity);
  row.label = r.label;
  row.classical_value = r.classical_value;
  row.standard_error = r.standard_error;
  row.analytic_classical = r.analytic_classical;
  row.quantum_value = r.quantum_value;
  row.z_score = r.z_score();
  row.algebraic_gap = r.algebraic_gap();
  row.sampled = true;
  row.pass = r.pass();
  return row;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, long long n, std::uint64_t seed,
                       double epsilon, const std::string& config_hash, std::ostream& out) {
  out << "row,identity,label,classical_value,standard_error,analytic_classical,quantum_value,"
         "z_score,algebraic_gap,n,seed,epsilon,config_hash,pass\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SummaryRow& r = rows[i];
    out << i << ',' << r.identity << ',' << r.label << ',' << num(r.classical_value) << ','
        << (r.sampled ? num(r.standard_error) : "") << ',' << num(r.analytic_classical) << ','
        << num(r.quantum_value) << ',' << (r.sampled ? num(r.z_score) : "") << ','
        << num(r.algebraic_gap) << ',' << (r.sampled ? std::to_string(n) : "0") << ',' << seed
        << ',' << num(epsilon) << ',' << config_hash << ',' << (r.pass ? "pass" : "fail")
        << '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
}

}  // namespace pcsft::io
