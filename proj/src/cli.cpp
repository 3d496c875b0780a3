#include "pcsft/cli.hpp"

#include "pcsft/correlation.hpp"
#include "pcsft/covariance.hpp"
#include "pcsft/errors.hpp"
#include "pcsft/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

namespace pcsft::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr Eigen::Index kMinSamples = 100;
constexpr double kEpsSlack = 1e-10;

std::string hex(std::size_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016zx", h);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("config: " + what);
}

bool non_negative_integer(const json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

Side parse_side(const json& j) {
  require(j.is_number_integer(), "observable \"side\" must be 1 or 2");
  const int s = j.get<int>();
  require(s == 1 || s == 2, "observable \"side\" must be 1 or 2");
  return s == 1 ? Side::first : Side::second;
}

std::vector<ObservableSpec> parse_observable(const json& j) {
  if (j.is_string()) {
    const std::string b = j.get<std::string>();
    require(b == "diag" || b == "random", "unknown built-in observable \"" + b + "\"");
    return {ObservableSpec{b + "1", Side::first, b, {}, std::nullopt},
            ObservableSpec{b + "2", Side::second, b, {}, std::nullopt}};
  }
  require(j.is_object(), "observable entries must be strings or objects");
  for (const auto& [key, _] : j.items())
    require(key == "name" || key == "side" || key == "matrix" || key == "builtin" || key == "seed",
            "unknown observable key \"" + key + "\"");
  require(j.contains("side"), "observable needs \"side\"");

  ObservableSpec spec;
  spec.side = parse_side(j.at("side"));
  if (j.contains("seed")) {
    require(non_negative_integer(j.at("seed")), "observable \"seed\" must be a non-negative integer");
    spec.seed = j.at("seed").get<std::uint64_t>();
  }
  require(j.contains("matrix") != j.contains("builtin"),
          "observable needs exactly one of \"matrix\" and \"builtin\"");
  if (j.contains("builtin")) {
    require(j.at("builtin").is_string(), "\"builtin\" must be a string");
    spec.builtin = j.at("builtin").get<std::string>();
    require(spec.builtin == "diag" || spec.builtin == "random",
            "unknown built-in observable \"" + spec.builtin + "\"");
  } else {
    const json& m = j.at("matrix");
    require(m.is_array() && !m.empty(), "\"matrix\" must be a non-empty array of rows");
    const std::size_t n = m.size();
    spec.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      require(m[r].is_array() && m[r].size() == n, "\"matrix\" must be square");
      for (std::size_t c = 0; c < n; ++c) {
        require(m[r][c].is_number(), "\"matrix\" entries must be numbers");
        spec.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            m[r][c].get<double>();
      }
    }
  }
  const std::string fallback =
      (spec.builtin.empty() ? std::string("A") : spec.builtin) +
      std::to_string(static_cast<int>(spec.side));
  spec.name = j.value("name", fallback);
  return {spec};
}

json observable_to_json(const ObservableSpec& o) {
  json j = {{"name", o.name}, {"side", static_cast<int>(o.side)}};
  if (!o.builtin.empty()) {
    j["builtin"] = o.builtin;
  } else {
    json rows = json::array();
    for (Eigen::Index r = 0; r < o.matrix.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < o.matrix.cols(); ++c) row.push_back(o.matrix(r, c));
      rows.push_back(row);
    }
    j["matrix"] = rows;
  }
  if (o.seed) j["seed"] = *o.seed;
  return j;
}

std::vector<ObservableSpec> default_observables() { return parse_observable(json("diag")); }

double parse_epsilon(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && std::isfinite(v) && v >= 0.0,
          "epsilon must be \"auto\" or a non-negative number, got \"" + s + "\"");
  return v;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    require(b != std::string::npos, "empty entry in epsilon grid");
    grid.push_back(parse_epsilon(item.substr(b, e - b + 1)));
  }
  return grid;
}

struct NamedObservable {
  std::string name;
  SymOperator op;
};

std::vector<NamedObservable> observables_for(const ExperimentConfig& cfg, const BipartiteState& psi,
                                             Side side) {
  std::vector<NamedObservable> out;
  for (const auto& spec : cfg.observables)
    if (spec.side == side)
      out.push_back({spec.name,
                     resolve_observable(spec, side == Side::first ? psi.n1() : psi.n2(), cfg.seed)});
  return out;
}

io::SummaryRow algebraic_row(const std::string& id, const std::string& label, double lhs,
                             double rhs) {
  io::SummaryRow row;
  row.identity = id;
  row.label = label;
  row.classical_value = lhs;
  row.analytic_classical = lhs;
  row.quantum_value = rhs;
  row.algebraic_gap = std::abs(lhs - rhs);
  row.sampled = false;
  row.pass = row.algebraic_gap <= kAlgebraTol * (1.0 + std::abs(rhs));
  return row;
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << x;
  return ss.str();
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v(i), 12);
  return s;
}

void print_rows(const std::vector<io::SummaryRow>& rows, std::ostream& out) {
  for (const auto& r : rows) {
    out << std::left << std::setw(10) << r.identity << ' ' << std::setw(18) << r.label << ' ';
    if (r.sampled)
      out << fmt(r.classical_value) << " +- " << fmt(r.standard_error) << "  analytic "
          << fmt(r.analytic_classical) << "  quantum " << fmt(r.quantum_value) << "  z "
          << fmt(r.z_score, 3);
    else
      out << fmt(r.classical_value, 12) << " vs " << fmt(r.quantum_value, 12) << "  gap "
          << fmt(r.algebraic_gap, 3);
    out << "  " << (r.pass ? "pass" : "FAIL") << '\n';
  }
}

// ---------------------------------------------------------------------------

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const BipartiteState psi = resolve_state(cfg);
  const auto side1 = observables_for(cfg, psi, Side::first);
  const auto side2 = observables_for(cfg, psi, Side::second);
  const double eps = resolve_epsilon(cfg, psi);
  const std::string hash = cfg.hash();
  const EpsilonReport eps_report = min_epsilon(psi);
  const bool factorizable = !entangled(psi);

  std::vector<io::SummaryRow> rows;
  rows.push_back(algebraic_row("ALG_EPS", "eps_star", eps_report.eps_star,
                               eps_report.eps_star_closed_form));

  const BlockCovariance cov = regularized_covariance(psi, eps);
  for (const auto& a1 : side1)
    for (const auto& a2 : side2) {
      const std::string label = a1.name + "|" + a2.name;
      const ProductAverage pa = qm_average_product(a1.op, a2.op, psi);
      rows.push_back(algebraic_row("ALG_ZUZU", label, pa.trace_route, pa.direct));
      if (cov.dim() <= kOracleMaxDim)
        rows.push_back(algebraic_row("ALG_T00", label, analytic_product_moment(cov, a1.op, a2.op),
                                     fourth_moment_oracle(cov, a1.op, a2.op)));
      rows.push_back(algebraic_row("ALG_Q1", label,
                                   0.5 * analytic_quadratic_covariance(cov, a1.op, a2.op),
                                   pa.direct));
      const QuantumCovariance qc = qm_covariance(a1.op, a2.op, psi);
      rows.push_back(algebraic_row("ALG_QCOV2", label, qc.centered_route, qc.uncentered_route));
    }

  const FieldExperiment exp = run_field_experiment(psi, eps, cfg.n_samples, cfg.seed);
  std::vector<CorrelationReport> reports;
  for (const auto& a1 : side1)
    for (const auto& a2 : side2) {
      const std::string label = a1.name + "|" + a2.name;
      reports.push_back(q1_report(exp, a1.op, a2.op));
      reports.push_back(t4_report(exp, a1.op, a2.op));
      if (factorizable) reports.push_back(t3_report(exp, a1.op, a2.op));
      for (auto it = reports.end() - (factorizable ? 3 : 2); it != reports.end(); ++it)
        it->label = label;
    }
  for (const auto& a : side1) {
    reports.push_back(calibrated_average(exp.batch, psi, a.op, eps, Side::first));
    reports.back().label = a.name;
  }
  for (const auto& a : side2) {
    reports.push_back(calibrated_average(exp.batch, psi, a.op, eps, Side::second));
    reports.back().label = a.name;
  }
  const SchmidtForm sf = schmidt(psi);
  reports.push_back(
      cross_linear_correlation(exp.batch, psi, sf.left_frame.col(0), sf.right_frame.col(0)));
  reports.back().label = "schmidt_1";

  for (const auto& r : reports) rows.push_back(io::summary_row(r));

  const fs::path dir = cfg.output_dir;
  json all = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const json j = io::to_json(reports[i], hash);
    all.push_back(j);
    std::ostringstream name;
    name << "reports/" << std::setw(2) << std::setfill('0') << i << '_'
         << to_string(reports[i].identity) << ".json";
    io::write_file(dir / name.str(), j.dump(2) + "\n");
  }
  const json summary = {{"config", cfg.to_json()},
                        {"config_hash", hash},
                        {"seed", cfg.seed},
                        {"epsilon", eps},
                        {"epsilon_report", io::to_json(eps_report)},
                        {"factorizable", factorizable},
                        {"reports", all}};
  io::write_file(dir / "verify_report.json", summary.dump(2) + "\n");
  std::ostringstream csv;
  io::write_summary_csv(rows, cfg.n_samples, cfg.seed, eps, hash, csv);
  io::write_file(dir / "verify_summary.csv", csv.str());

  out << "state " << psi.n1() << "x" << psi.n2() << (factorizable ? " separable" : " entangled")
      << ", epsilon " << fmt(eps, 10) << ", n " << cfg.n_samples << ", seed " << cfg.seed
      << ", config " << hash << '\n';
  print_rows(rows, out);

  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!rows[i].pass) {
      if (ok) err << "verification failed:\n";
      ok = false;
      err << "  row " << i << ' ' << rows[i].identity << ' ' << rows[i].label << '\n';
    }
  return ok ? kOk : kCheckFailed;
}

json entangle_json(const BipartiteState& psi, double tol, bool verdict, const EpsilonReport& er,
                   const SchmidtForm& sf) {
  return {{"verdict", verdict ? "entangled" : "separable"},
          {"tol", tol},
          {"lambda_min", er.lambda_min},
          {"eps_star", er.eps_star},
          {"eps_star_closed_form", er.eps_star_closed_form},
          {"schmidt_rank", sf.rank},
          {"schmidt_alphas", std::vector<double>(sf.alphas.data(), sf.alphas.data() + sf.alphas.size())},
          {"dims", {psi.n1(), psi.n2()}}};
}

int cmd_entangle_test(const ExperimentConfig& cfg, double tol, bool write, std::ostream& out) {
  require(tol > 0.0 && tol <= 1e-6, "--tol must lie in (0, 1e-6]");
  const BipartiteState psi = resolve_state(cfg);
  const bool verdict = entangled(psi, tol);
  const EpsilonReport er = min_epsilon(psi);
  const SchmidtForm sf = schmidt(psi, tol);
  out << (verdict ? "entangled" : "separable") << '\n'
      << "lambda_min: " << fmt(er.lambda_min, 12) << '\n'
      << "eps_star: " << fmt(er.eps_star, 12) << '\n'
      << "schmidt_rank: " << sf.rank << '\n'
      << "schmidt_alphas: " << join(sf.alphas) << '\n';
  if (write)
    io::write_file(cfg.output_dir / "entangle_test.json",
                   entangle_json(psi, tol, verdict, er, sf).dump(2) + "\n");
  return kOk;
}

int cmd_min_eps(const ExperimentConfig& cfg, bool write, std::ostream& out) {
  const BipartiteState psi = resolve_state(cfg);
  const json j = io::to_json(min_epsilon(psi));
  out << j.dump(2) << '\n';
  if (write) io::write_file(cfg.output_dir / "min_eps.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_sample(const ExperimentConfig& cfg, std::ostream& out) {
  const BipartiteState psi = resolve_state(cfg);
  const double eps = resolve_epsilon(cfg, psi);
  const SampleBatch batch =
      sample_fields(factorize_covariance(regularized_covariance(psi, eps)), cfg.n_samples, cfg.seed);
  std::ostringstream csv;
  io::write_batch_csv(batch, csv);
  io::write_file(cfg.output_dir / "batch.csv", csv.str());
  json meta = io::batch_metadata(batch);
  meta["config_hash"] = cfg.hash();
  meta["config"] = cfg.to_json();
  io::write_file(cfg.output_dir / "batch.json", meta.dump(2) + "\n");
  out << "wrote " << batch.n() << " samples (epsilon " << fmt(eps, 10) << ", covariance "
      << batch.covariance_id() << ") to " << (cfg.output_dir / "batch.csv").string() << '\n';
  return kOk;
}

int cmd_sweep_eps(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  require(!cfg.eps_grid.empty(), "sweep-eps needs an epsilon grid (--grid or \"eps_grid\")");
  const BipartiteState psi = resolve_state(cfg);
  auto side1 = observables_for(cfg, psi, Side::first);
  const NamedObservable a =
      side1.empty() ? NamedObservable{"diag1", resolve_observable(default_observables()[0],
                                                                  psi.n1(), cfg.seed)}
                    : side1.front();
  const EpsilonReport er = min_epsilon(psi);
  const std::string hash = cfg.hash();

  std::ostringstream csv;
  csv << "epsilon,feasible,lambda_min,dispersion,dispersion_expected,calibrated_value,"
         "quantum_value,calibrated_error,standard_error,z_score,observable,n,seed,config_hash\n";
  std::size_t feasible = 0;
  bool ok = true;
  for (double eps : cfg.eps_grid) {
    const double lambda_min = er.lambda_min + eps;
    csv << io::json(eps).dump() << ',';
    if (eps < er.eps_star - kEpsSlack) {
      csv << "false," << io::json(lambda_min).dump() << ",,,,,,,," << a.name << ','
          << cfg.n_samples << ',' << cfg.seed << ',' << hash << '\n';
      out << "epsilon " << fmt(eps) << ": infeasible (below eps* " << fmt(er.eps_star) << ")\n";
      continue;
    }
    ++feasible;
    const FieldExperiment exp = run_field_experiment(psi, eps, cfg.n_samples, cfg.seed);
    const CorrelationReport r = calibrated_average(exp.batch, psi, a.op, eps, Side::first);
    const double disp = dispersion(exp.batch);
    const double disp_expected = exp.covariance.full().trace();
    const double error = r.classical_value - r.quantum_value;
    csv << "true," << io::json(exp.covariance.lambda_min()).dump() << ','
        << io::json(disp).dump() << ',' << io::json(disp_expected).dump() << ','
        << io::json(r.classical_value).dump() << ',' << io::json(r.quantum_value).dump() << ','
        << io::json(error).dump() << ',' << io::json(r.standard_error).dump() << ','
        << io::json(r.z_score()).dump() << ',' << a.name << ',' << cfg.n_samples << ','
        << cfg.seed << ',' << hash << '\n';
    out << "epsilon " << fmt(eps) << ": calibrated error " << fmt(error) << " +- "
        << fmt(r.standard_error) << " (z " << fmt(r.z_score(), 3) << "), dispersion "
        << fmt(disp) << " (exact " << fmt(disp_expected) << ")\n";
    if (!r.pass()) {
      ok = false;
      err << "epsilon " << fmt(eps) << ": calibration check failed (z " << fmt(r.z_score(), 3)
          << ")\n";
    }
  }
  io::write_file(cfg.output_dir / "sweep_eps.csv", csv.str());
  if (feasible == 0) {
    err << "sweep-eps: no grid point reaches eps* = " << fmt(er.eps_star, 10) << '\n';
    return kCheckFailed;
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

// ---------------------------------------------------------------------------

json ExperimentConfig::to_json() const {
  json j;
  if (const auto* p = std::get_if<fs::path>(&state_source)) {
    j["state"] = {{"file", p->string()}};
  } else {
    const auto& g = std::get<GeneratorSpec>(state_source);
    json gen = {{"dims", {g.n1, g.n2}}, {"seed", g.seed}};
    if (g.schmidt_rank) gen["schmidt_rank"] = *g.schmidt_rank;
    j["state"] = {{"generator", gen}};
  }
  j["observables"] = json::array();
  for (const auto& o : observables) j["observables"].push_back(observable_to_json(o));
  j["epsilon"] = epsilon ? json(*epsilon) : json("auto");
  j["n_samples"] = n_samples;
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  if (!eps_grid.empty()) j["eps_grid"] = eps_grid;
  return j;
}

std::string ExperimentConfig::hash() const {
  json j = to_json();
  j.erase("output_dir");
  return hex(std::hash<std::string>{}(j.dump()));
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  require(j.is_object(), "top level must be an object");
  for (const auto& [key, _] : j.items())
    require(key == "state" || key == "observables" || key == "epsilon" || key == "n_samples" ||
                key == "seed" || key == "output_dir" || key == "eps_grid",
            "unknown key \"" + key + "\"");

  ExperimentConfig cfg;
  if (j.contains("state")) {
    const json& s = j.at("state");
    require(s.is_object() && (s.contains("file") != s.contains("generator")),
            "\"state\" needs exactly one of \"file\" and \"generator\"");
    if (s.contains("file")) {
      require(s.at("file").is_string(), "state \"file\" must be a path string");
      fs::path p = s.at("file").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.state_source = p;
    } else {
      const json& g = s.at("generator");
      require(g.is_object() && g.contains("dims") && g.at("dims").is_array() &&
                  g.at("dims").size() == 2 && g.at("dims")[0].is_number_integer() &&
                  g.at("dims")[1].is_number_integer(),
              "generator needs integer \"dims\": [n1, n2]");
      GeneratorSpec spec;
      spec.n1 = g.at("dims")[0].get<Eigen::Index>();
      spec.n2 = g.at("dims")[1].get<Eigen::Index>();
      require(spec.n1 >= 1 && spec.n2 >= 1, "generator dims must be positive");
      if (g.contains("seed")) {
        require(non_negative_integer(g.at("seed")), "generator \"seed\" must be a non-negative integer");
        spec.seed = g.at("seed").get<std::uint64_t>();
      }
      if (g.contains("schmidt_rank") && !g.at("schmidt_rank").is_null()) {
        require(g.at("schmidt_rank").is_number_integer(), "\"schmidt_rank\" must be an integer");
        spec.schmidt_rank = g.at("schmidt_rank").get<Eigen::Index>();
      }
      cfg.state_source = spec;
    }
  }
  if (j.contains("observables")) {
    require(j.at("observables").is_array(), "\"observables\" must be an array");
    for (const auto& o : j.at("observables"))
      for (auto& spec : parse_observable(o)) cfg.observables.push_back(std::move(spec));
  }
  if (cfg.observables.empty()) cfg.observables = default_observables();
  if (j.contains("epsilon")) {
    const json& e = j.at("epsilon");
    if (e.is_string()) {
      const std::string s = e.get<std::string>();
      if (s != "auto") cfg.epsilon = parse_epsilon(s);
    } else {
      require(e.is_number() && e.get<double>() >= 0.0,
              "\"epsilon\" must be \"auto\" or a non-negative number");
      cfg.epsilon = e.get<double>();
    }
  }
  if (j.contains("n_samples")) {
    require(j.at("n_samples").is_number_integer(), "\"n_samples\" must be an integer");
    cfg.n_samples = j.at("n_samples").get<Eigen::Index>();
  }
  require(cfg.n_samples >= kMinSamples, "\"n_samples\" must be at least 100");
  if (j.contains("seed")) {
    require(non_negative_integer(j.at("seed")), "\"seed\" must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    require(j.at("output_dir").is_string(), "\"output_dir\" must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("eps_grid")) {
    require(j.at("eps_grid").is_array(), "\"eps_grid\" must be an array");
    for (const auto& e : j.at("eps_grid")) {
      require(e.is_number() && e.get<double>() >= 0.0, "\"eps_grid\" entries must be >= 0");
      cfg.eps_grid.push_back(e.get<double>());
    }
  }
  return cfg;
}

BipartiteState resolve_state(const ExperimentConfig& cfg) {
  if (const auto* p = std::get_if<fs::path>(&cfg.state_source)) return io::load_state(*p);
  const auto& g = std::get<GeneratorSpec>(cfg.state_source);
  return random_state({g.n1, g.n2}, g.seed, g.schmidt_rank);
}

SymOperator resolve_observable(const ObservableSpec& spec, Eigen::Index dim,
                               std::uint64_t config_seed) {
  if (spec.builtin == "diag") {
    Vector d(dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = i % 2 == 0 ? 1.0 : -1.0;
    return SymOperator::diagonal(d);
  }
  if (spec.builtin == "random")
    return random_observable(dim, spec.seed.value_or(config_seed * 2 + static_cast<int>(spec.side)));
  if (spec.matrix.rows() != dim)
    throw ValidationError("observable \"" + spec.name + "\" has dimension " +
                          std::to_string(spec.matrix.rows()) + ", subsystem has " +
                          std::to_string(dim));
  return SymOperator(spec.matrix);
}

double resolve_epsilon(const ExperimentConfig& cfg, const BipartiteState& psi) {
  return cfg.epsilon ? *cfg.epsilon : auto_epsilon(psi);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prequantum Gaussian field workbench"};
  app.require_subcommand(1);

  std::string config_path, state_path, epsilon_arg, out_dir, grid_arg;
  std::uint64_t seed = 0;
  long long n = 0;
  double tol = kPsdTol;

  auto add_common = [&](CLI::App* sub, bool sampling) {
    sub->add_option("--config", config_path, "Experiment config (JSON)");
    sub->add_option("--state", state_path, "State file (JSON)");
    sub->add_option("--out", out_dir, "Output directory");
    if (sampling) {
      sub->add_option("--seed", seed, "Random seed");
      sub->add_option("--n", n, "Number of field samples");
      sub->add_option("--epsilon", epsilon_arg, "Background strength, a number or \"auto\"");
    }
  };
  CLI::App* verify = app.add_subcommand("verify", "Run every quantum-classical identity check");
  CLI::App* ent = app.add_subcommand("entangle-test", "PSD entanglement criterion for a state");
  CLI::App* sample = app.add_subcommand("sample", "Draw prequantum fields and export them");
  CLI::App* mineps = app.add_subcommand("min-eps", "Minimal background strength eps*");
  CLI::App* sweep = app.add_subcommand("sweep-eps", "Calibration error over an epsilon grid");
  add_common(verify, true);
  add_common(ent, false);
  add_common(sample, true);
  add_common(mineps, false);
  add_common(sweep, true);
  ent->add_option("--tol", tol, "PSD / Schmidt-rank tolerance");
  sweep->add_option("--grid", grid_arg, "Comma-separated epsilon values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const auto given = [](CLI::App* a, const std::string& name) {
    const CLI::Option* o = a->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      json j;
      try {
        j = json::parse(io::read_file(config_path));
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
      }
      cfg = parse_config(j, fs::path(config_path).parent_path());
    } else {
      cfg = parse_config(json::object());
      if (state_path.empty() && sub != verify && sub != sample)
        throw ValidationError("a state is required (--state or --config)");
    }
    if (!state_path.empty()) cfg.state_source = fs::path(state_path);
    if (given(sub, "--seed")) cfg.seed = seed;
    if (given(sub, "--n")) {
      require(n >= kMinSamples, "--n must be at least 100");
      cfg.n_samples = n;
    }
    if (given(sub, "--epsilon"))
      cfg.epsilon = epsilon_arg == "auto" ? std::nullopt : std::optional(parse_epsilon(epsilon_arg));
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!grid_arg.empty()) cfg.eps_grid = parse_grid(grid_arg);
    const bool write = !out_dir.empty() || !config_path.empty();

    if (sub == verify) return cmd_verify(cfg, out, err);
    if (sub == ent) return cmd_entangle_test(cfg, tol, write, out);
    if (sub == sample) return cmd_sample(cfg, out);
    if (sub == mineps) return cmd_min_eps(cfg, write, out);
    return cmd_sweep_eps(cfg, out, err);
  } catch (const ValidationError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NotPositiveSemidefinite& e) {
    err << "NotPositiveSemidefinite: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const InseparableBackground& e) {
    err << "InseparableBackground: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const ConsistencyError& e) {
    err << "internal consistency failure: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}

}  // namespace pcsft::cli
