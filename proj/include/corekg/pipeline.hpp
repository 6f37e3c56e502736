#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corekg/baselines.hpp"
#include "corekg/coreset.hpp"
#include "corekg/kg.hpp"
#include "corekg/metrics.hpp"
#include "corekg/workload.hpp"

namespace corekg {

enum class Method { Corekg, CorekgGlobal, CorekgUniform, CorekgUnweighted, Ppr };

Method parse_method(const std::string& name);  // throws ConfigError
const char* method_name(Method m);

// Everything a run needs, resolved. CLI flags and the optional key=value
// config file both land here; flags win.
struct RunConfig {
  std::string dataset_path;
  std::string workload_path;
  std::string prefixes_path;  // optional
  std::string out_dir;

  std::size_t users = 15;
  std::size_t seeds_per_user = 5;
  double split_ratio = 0.8;

  Method method = Method::Corekg;
  std::optional<std::uint64_t> samples;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::uint64_t> budget;

  RelevanceMode relevance = RelevanceMode::JoinConsistent;
  std::uint64_t rng_seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool strict = false;
  bool dump_sensitivity = false;

  CoverageWeights coverage_weights;
  PprConfig ppr;
};

// key=value lines applied over `base`; unknown keys are ConfigErrors.
RunConfig apply_config_file(RunConfig base, const std::string& path);

// Exactly one sampling mode (samples | epsilon+delta | budget); ppr needs
// budget; ranges as documented on the flags. Throws ConfigError.
void validate_config(const RunConfig& cfg);

struct PreparedWorkload {
  std::vector<Query> queries;
  WorkloadStats stats;
  std::vector<Query> train;
  std::vector<Query> test;
  std::vector<UserProfile> profiles;
  std::vector<std::vector<Query>> train_by_user;
  std::vector<std::vector<Query>> test_by_user;
  std::vector<std::string> warnings;
};

// Load + normalize + split + personalize. Pure function of (config, files).
PreparedWorkload prepare_workload(const RunConfig& cfg);

struct UserRunReport {
  std::string user_id;
  bool excluded = false;
  std::string exclusion_reason;
  std::size_t train_queries = 0;
  std::size_t test_queries = 0;
  std::size_t answerable_train = 0;
  std::uint64_t draws = 0;
  std::size_t distinct_triples = 0;
  double total_sensitivity = 0.0;
  bool has_cost = false;
  double cost_full = 0.0;
  double cost_estimate = 0.0;
  double coverage = 0.0;
  std::size_t coverage_skipped = 0;
  Prf prf;
  std::vector<CoverageItem> coverage_items;
  std::vector<AnswerCounts> answer_items;
  std::vector<std::string> warnings;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 3 when every user was excluded
  Aggregate aggregate;
  std::vector<UserRunReport> users;
};

// The summarize verb: builds one summary per user, scores it, writes
// profiles.tsv, summary_<user>.tsv (+ .meta.json), report_<user>.json,
// aggregate.json, aggregate.csv, manifest.json under cfg.out_dir. Output
// bytes are a pure function of config + input files.
RunResult run_summarize(const RunConfig& cfg);

// Rescores the summaries found in cfg.out_dir (written by a previous
// summarize) against the dataset/workload recorded in its manifest, or the
// override paths in cfg. Rewrites reports and aggregates.
RunResult run_evaluate(const RunConfig& cfg);

// Re-aggregates existing report_<user>.json files under out_dir and
// rewrites aggregate.json/aggregate.csv.
Aggregate run_report(const std::string& out_dir);

}  // namespace corekg
