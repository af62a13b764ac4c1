#pragma once

// Batch experiments: configuration parsing, the acceptance suite, and CSV/JSON
// artifacts. Shared by the recomb-lab CLI and the acceptance test binary.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "recomb/crossover.hpp"
#include "recomb/errors.hpp"

namespace recomb::lab {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 1;

/// A configuration that does not match the schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using Cell = std::variant<double, long long, std::string>;

/// Rows of plain cells; doubles are written with 17 significant digits.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  void add(std::vector<Cell> row);

  /// "# schema_version=N" line, header line, then one line per row.
  std::string to_csv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_cell(const Cell& cell);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::string claim;
  std::vector<Check> checks;
  Table table;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  /// Wall time; printed but never written to artifacts.
  double seconds = 0.0;

  bool passed() const;
  void check(std::string name, bool ok, std::string detail = {});
  /// JSON artifact: schema version, experiment, config, checks and summary.
  nlohmann::ordered_json to_json(const nlohmann::ordered_json& config) const;
};

struct AcceptanceExperiment {
  int index = 0;
  std::string tag;
  std::string claim;
  std::function<ExperimentResult(std::uint64_t seed)> run;
};

/// The nine acceptance experiments in order.
const std::vector<AcceptanceExperiment>& acceptance_suite();

/// Entries whose tag contains `filter` (all of them for an empty filter).
std::vector<const AcceptanceExperiment*> select_acceptance(const std::string& filter);

/// single_site, one_point, uniform or bernoulli (which uses q).
CrossoverLaw named_law(const std::string& model, double q, int n);

/// Crossover law from {"model": ..., "q": ...} on n sites.
CrossoverLaw law_from_config(const nlohmann::ordered_json& config, int n);

/// Runs one experiment object. Throws ConfigError on schema violations.
ExperimentResult run_experiment(const nlohmann::ordered_json& config);

/// The experiment objects in a config file: a single object, an array, or
/// {"experiments": [...]}.
std::vector<nlohmann::ordered_json> experiment_list(const nlohmann::ordered_json& document);

/// Output file stem: "name" if given, else the experiment name, prefixed by a
/// position when several experiments share a file.
std::string artifact_stem(const nlohmann::ordered_json& config, std::size_t position, std::size_t count);

/// Writes <dir>/<stem>.csv and <dir>/<stem>.json.
void write_artifacts(const ExperimentResult& result, const nlohmann::ordered_json& config,
                     const std::filesystem::path& dir, const std::string& stem);

/// Multi-line report of the failing checks.
std::string failure_report(const ExperimentResult& result);

}  // namespace recomb::lab
