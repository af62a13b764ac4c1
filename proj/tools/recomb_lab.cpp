// recomb-lab: runs experiment configs and the acceptance suite.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad usage or config.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "recomb/experiments.hpp"
#include "recomb/kernels.hpp"

namespace {

using recomb::lab::ConfigError;
using Json = nlohmann::ordered_json;

constexpr int kFailed = 1;
constexpr int kUsage = 2;

void apply_thread_env() {
  const char* env = std::getenv("RECOMB_LAB_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long threads = std::strtol(env, &end, 10);
  if (*end != '\0' || threads < 1 || threads > 4096) {
    throw ConfigError(std::string("RECOMB_LAB_THREADS must be a positive integer, got \"") + env + "\"");
  }
  recomb::kernels::set_thread_count(static_cast<int>(threads));
}

int run_config(const std::string& path, const std::string& out_dir) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  Json document;
  try {
    document = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  const auto experiments = recomb::lab::experiment_list(document);
  std::string report;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    const auto& config = experiments[i];
    const auto stem = recomb::lab::artifact_stem(config, i, experiments.size());
    const auto start = std::chrono::steady_clock::now();
    const auto result = recomb::lab::run_experiment(config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    recomb::lab::write_artifacts(result, config, out_dir, stem);
    std::printf("%-4s %-20s %8.2f s  -> %s/%s.{csv,json}\n", result.passed() ? "PASS" : "FAIL",
                result.experiment.c_str(), seconds, out_dir.c_str(), stem.c_str());
    report += recomb::lab::failure_report(result);
  }
  if (!report.empty()) {
    std::fprintf(stderr, "failing checks:\n%s", report.c_str());
    return kFailed;
  }
  return 0;
}

int reproduce_all(const std::string& filter, const std::string& out_dir, std::uint64_t seed) {
  const auto selected = recomb::lab::select_acceptance(filter);
  if (selected.empty()) throw ConfigError("no acceptance experiment matches \"" + filter + "\"");
  std::printf("%-3s %-18s %-6s %9s  %s\n", "#", "tag", "result", "seconds", "claim");
  std::string report;
  double total = 0.0;
  for (const auto* e : selected) {
    recomb::lab::ExperimentResult result;
    try {
      result = e->run(seed);
    } catch (const std::exception& err) {
      result.experiment = e->tag;
      result.check("completed without error", false, err.what());
    }
    total += result.seconds;
    std::printf("%-3d %-18s %-6s %9.2f  %s\n", e->index, e->tag.c_str(), result.passed() ? "PASS" : "FAIL",
                result.seconds, e->claim.c_str());
    std::fflush(stdout);
    if (!out_dir.empty()) {
      Json config{{"experiment", e->tag}, {"seed", seed}};
      recomb::lab::write_artifacts(result, config, out_dir, e->tag);
    }
    report += recomb::lab::failure_report(result);
  }
  std::printf("total %.2f s\n", total);
  if (!report.empty()) {
    std::fprintf(stderr, "failing checks:\n%s", report.c_str());
    return kFailed;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on recombination and reversible quadratic dynamics"};
  app.require_subcommand(1);

  std::string config_path, run_out = ".";
  auto* run = app.add_subcommand("run", "Run the experiments described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", run_out, "Directory for CSV and JSON artifacts");

  std::string filter, repro_out;
  std::uint64_t seed = recomb::lab::kDefaultSeed;
  auto* repro = app.add_subcommand("reproduce-all", "Run the acceptance suite and print a summary table");
  repro->add_option("--filter", filter, "Only run experiments whose tag contains this text");
  repro->add_option("--out", repro_out, "Also write per-experiment artifacts here");
  repro->add_option("--seed", seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    apply_thread_env();
    if (*run) return run_config(config_path, run_out);
    return reproduce_all(filter, repro_out, seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
}
