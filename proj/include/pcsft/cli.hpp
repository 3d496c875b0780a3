#pragma once

#include "pcsft/hilbert.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pcsft::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2 };

struct GeneratorSpec {
  Eigen::Index n1 = 2;
  Eigen::Index n2 = 2;
  std::uint64_t seed = 0;
  std::optional<Eigen::Index> schmidt_rank;
};

/// An observable on one subsystem: an explicit matrix or a built-in
/// ("diag" = diag(1, -1, 1, ...), "random" = seeded random symmetric).
struct ObservableSpec {
  std::string name;
  Side side = Side::first;
  std::string builtin;  // empty when `matrix` is given
  Matrix matrix;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  std::variant<std::filesystem::path, GeneratorSpec> state_source = GeneratorSpec{};
  std::vector<ObservableSpec> observables;
  std::optional<double> epsilon;  // nullopt means auto: eps* + 0.05
  Eigen::Index n_samples = 200000;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "pcsft_out";
  std::vector<double> eps_grid;

  nlohmann::json to_json() const;
  /// Hash of the canonical JSON form, hex.
  std::string hash() const;
};

/// Relative state paths are resolved against `base_dir`. Throws
/// ValidationError on unknown keys, bad types or n_samples < 100.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

BipartiteState resolve_state(const ExperimentConfig& cfg);

/// Throws ValidationError if the matrix does not match the subsystem dimension.
SymOperator resolve_observable(const ObservableSpec& spec, Eigen::Index dim,
                               std::uint64_t config_seed);

/// Explicit epsilon, or eps* + 0.05 on auto.
double resolve_epsilon(const ExperimentConfig& cfg, const BipartiteState& psi);

/// Entry point shared by the pcsft executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcsft::cli
