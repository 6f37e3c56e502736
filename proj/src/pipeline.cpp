#include "corekg/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "corekg/errors.hpp"
#include "corekg/rng.hpp"
#include "corekg/sensitivity.hpp"
#include "corekg/util.hpp"

namespace corekg {

namespace fs = std::filesystem;
using nlohmann::json;

Method parse_method(const std::string& name) {
  if (name == "corekg") return Method::Corekg;
  if (name == "corekg-global") return Method::CorekgGlobal;
  if (name == "corekg-uniform") return Method::CorekgUniform;
  if (name == "corekg-unweighted") return Method::CorekgUnweighted;
  if (name == "ppr") return Method::Ppr;
  throw ConfigError("unknown method '" + name +
                    "' (expected corekg, corekg-global, corekg-uniform, "
                    "corekg-unweighted, or ppr)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Corekg: return "corekg";
    case Method::CorekgGlobal: return "corekg-global";
    case Method::CorekgUniform: return "corekg-uniform";
    case Method::CorekgUnweighted: return "corekg-unweighted";
    case Method::Ppr: return "ppr";
  }
  return "?";
}

namespace {

RelevanceMode parse_relevance(const std::string& name) {
  if (name == "join") return RelevanceMode::JoinConsistent;
  if (name == "pattern") return RelevanceMode::PerPattern;
  throw ConfigError("unknown relevance mode '" + name + "' (expected join or pattern)");
}

const char* relevance_name(RelevanceMode m) {
  return m == RelevanceMode::JoinConsistent ? "join" : "pattern";
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean '" + v + "'");
}

std::string user_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "user%02zu", i);
  return buf;
}

}  // namespace

RunConfig apply_config_file(RunConfig base, const std::string& path) {
  std::string text = read_file(path);
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    std::size_t eq = v.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path + " line " + std::to_string(line_no) + ": expected key=value");
    std::string key(trim(v.substr(0, eq)));
    std::string value(trim(v.substr(eq + 1)));
    try {
      if (key == "dataset") base.dataset_path = value;
      else if (key == "workload") base.workload_path = value;
      else if (key == "prefixes") base.prefixes_path = value;
      else if (key == "out") base.out_dir = value;
      else if (key == "users") base.users = parse_u64(value);
      else if (key == "seeds-per-user") base.seeds_per_user = parse_u64(value);
      else if (key == "split") base.split_ratio = parse_double(value);
      else if (key == "method") base.method = parse_method(value);
      else if (key == "samples") base.samples = parse_u64(value);
      else if (key == "epsilon") base.epsilon = parse_double(value);
      else if (key == "delta") base.delta = parse_double(value);
      else if (key == "budget") base.budget = parse_u64(value);
      else if (key == "relevance") base.relevance = parse_relevance(value);
      else if (key == "rng-seed") base.rng_seed = parse_u64(value);
      else if (key == "threads") base.threads = parse_u64(value);
      else if (key == "strict") base.strict = parse_bool(value);
      else if (key == "dump-sensitivity") base.dump_sensitivity = parse_bool(value);
      else if (key == "coverage-node-weight") base.coverage_weights.node = parse_double(value);
      else if (key == "coverage-edge-weight") base.coverage_weights.edge = parse_double(value);
      else if (key == "ppr-damping") base.ppr.damping = parse_double(value);
      else if (key == "ppr-max-iterations") base.ppr.max_iterations = parse_u64(value);
      else if (key == "ppr-tolerance") base.ppr.l1_tolerance = parse_double(value);
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ParseError& e) {
      throw ConfigError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

void validate_config(const RunConfig& cfg) {
  int modes = 0;
  if (cfg.samples) ++modes;
  if (cfg.epsilon || cfg.delta) {
    if (!(cfg.epsilon && cfg.delta))
      throw ConfigError("epsilon and delta must be given together");
    ++modes;
  }
  if (cfg.budget) ++modes;
  if (modes != 1)
    throw ConfigError("exactly one sampling mode is required: --samples, "
                      "--epsilon/--delta, or --budget");
  if (cfg.samples && *cfg.samples == 0) throw ConfigError("samples must be positive");
  if (cfg.budget && *cfg.budget == 0) throw ConfigError("budget must be positive");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0 && *cfg.epsilon < 1.0))
    throw ConfigError("epsilon must be in (0,1)");
  if (cfg.delta && !(*cfg.delta > 0.0 && *cfg.delta < 1.0))
    throw ConfigError("delta must be in (0,1)");
  if (cfg.method == Method::Ppr && !cfg.budget)
    throw ConfigError("ppr ranks triples by score; it only supports --budget");
  if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0))
    throw ConfigError("split ratio must be in (0,1)");
  if (cfg.users == 0) throw ConfigError("need at least one user");
  if (cfg.seeds_per_user == 0) throw ConfigError("need at least one seed per user");
  if (cfg.coverage_weights.node < 0.0 || cfg.coverage_weights.edge < 0.0 ||
      cfg.coverage_weights.node + cfg.coverage_weights.edge <= 0.0)
    throw ConfigError("coverage weights must be nonnegative and not both zero");
  if (!(cfg.ppr.damping > 0.0 && cfg.ppr.damping < 1.0))
    throw ConfigError("ppr damping must be in (0,1)");
  if (cfg.ppr.max_iterations == 0) throw ConfigError("ppr max iterations must be positive");
  if (!(cfg.ppr.l1_tolerance > 0.0)) throw ConfigError("ppr tolerance must be positive");
}

PreparedWorkload prepare_workload(const RunConfig& cfg) {
  if (cfg.workload_path.empty()) throw ConfigError("--workload is required");
  PreparedWorkload prep;
  PrefixMap fixed =
      cfg.prefixes_path.empty() ? PrefixMap::builtin() : PrefixMap::load_file(cfg.prefixes_path);
  prep.queries =
      load_workload_file(cfg.workload_path, fixed, &prep.stats, cfg.strict, &prep.warnings);
  if (prep.queries.empty()) throw Error("workload holds no parseable queries");

  SplitResult split =
      split_workload(prep.queries, cfg.split_ratio, substream_seed(cfg.rng_seed, kStreamSplit));
  prep.train = std::move(split.train);
  prep.test = std::move(split.test);

  for (std::size_t i = 0; i < cfg.users; ++i) {
    prep.profiles.push_back(build_user_profile(prep.train, cfg.seeds_per_user,
                                               substream_seed(cfg.rng_seed, kStreamProfile, i),
                                               user_name(i), &prep.warnings));
    prep.train_by_user.push_back(personalize(prep.train, prep.profiles[i]));
    prep.test_by_user.push_back(personalize(prep.test, prep.profiles[i]));
  }
  return prep;
}

namespace {

std::uint64_t resolve_m(const RunConfig& cfg, std::size_t answerable) {
  if (cfg.samples) return *cfg.samples;
  return required_sample_size(*cfg.epsilon, *cfg.delta, answerable);
}

json report_json(const UserRunReport& r, const RunConfig& cfg) {
  json per_query_coverage = json::array();
  for (const CoverageItem& it : r.coverage_items) {
    per_query_coverage.push_back(json{{"query_id", std::to_string(it.query_id)},
                                      {"scored", it.scored},
                                      {"value", it.value},
                                      {"nodes", it.nodes},
                                      {"nodes_hit", it.nodes_hit},
                                      {"edges", it.edges},
                                      {"edges_hit", it.edges_hit}});
  }
  json per_query_answers = json::array();
  for (const AnswerCounts& it : r.answer_items) {
    per_query_answers.push_back(json{{"query_id", std::to_string(it.query_id)},
                                     {"tp", it.tp},
                                     {"fp", it.fp},
                                     {"fn", it.fn},
                                     {"full_answers", it.full_answers},
                                     {"summary_answers", it.summary_answers}});
  }
  json out{{"user_id", r.user_id},
           {"method", method_name(cfg.method)},
           {"excluded", r.excluded},
           {"exclusion_reason", r.exclusion_reason},
           {"train_queries", r.train_queries},
           {"test_queries", r.test_queries},
           {"answerable_train_queries", r.answerable_train},
           {"draws", r.draws},
           {"distinct_triples", r.distinct_triples},
           {"total_sensitivity", r.total_sensitivity},
           {"coverage", json{{"value", r.coverage},
                             {"skipped_queries", r.coverage_skipped},
                             {"per_query", per_query_coverage}}},
           {"answers", json{{"precision", r.prf.precision},
                            {"recall", r.prf.recall},
                            {"f1", r.prf.f1},
                            {"per_query", per_query_answers}}},
           {"warnings", r.warnings}};
  if (r.has_cost)
    out["cost"] = json{{"full", r.cost_full}, {"estimate", r.cost_estimate}};
  else
    out["cost"] = nullptr;
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path.string(), text);
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// Runs fn(0..n-1) on a small pool. Exceptions are collected and the first
// one (by index, for reproducible failures) is rethrown after the join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t hw = std::thread::hardware_concurrency();
  std::size_t nthreads = threads ? threads : (hw ? hw : 1);
  nthreads = std::min(nthreads, n);
  std::vector<std::exception_ptr> errors(n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t i = cursor.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

json config_json(const RunConfig& cfg) {
  json j{{"dataset", cfg.dataset_path},
         {"workload", cfg.workload_path},
         {"prefixes", cfg.prefixes_path},
         {"out", cfg.out_dir},
         {"users", cfg.users},
         {"seeds_per_user", cfg.seeds_per_user},
         {"split", cfg.split_ratio},
         {"method", method_name(cfg.method)},
         {"relevance", relevance_name(cfg.relevance)},
         {"rng_seed", cfg.rng_seed},
         {"strict", cfg.strict},
         {"dump_sensitivity", cfg.dump_sensitivity},
         {"coverage_node_weight", cfg.coverage_weights.node},
         {"coverage_edge_weight", cfg.coverage_weights.edge},
         {"ppr_damping", cfg.ppr.damping},
         {"ppr_max_iterations", cfg.ppr.max_iterations},
         {"ppr_tolerance", cfg.ppr.l1_tolerance}};
  j["samples"] = cfg.samples ? json(*cfg.samples) : json(nullptr);
  j["epsilon"] = cfg.epsilon ? json(*cfg.epsilon) : json(nullptr);
  j["delta"] = cfg.delta ? json(*cfg.delta) : json(nullptr);
  j["budget"] = cfg.budget ? json(*cfg.budget) : json(nullptr);
  return j;
}

RunConfig config_from_json(const json& j, RunConfig overrides) {
  RunConfig cfg;
  cfg.dataset_path = j.at("dataset").get<std::string>();
  cfg.workload_path = j.at("workload").get<std::string>();
  cfg.prefixes_path = j.at("prefixes").get<std::string>();
  cfg.out_dir = j.at("out").get<std::string>();
  cfg.users = j.at("users").get<std::size_t>();
  cfg.seeds_per_user = j.at("seeds_per_user").get<std::size_t>();
  cfg.split_ratio = j.at("split").get<double>();
  cfg.method = parse_method(j.at("method").get<std::string>());
  cfg.relevance = parse_relevance(j.at("relevance").get<std::string>());
  cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  cfg.strict = j.at("strict").get<bool>();
  cfg.dump_sensitivity = j.at("dump_sensitivity").get<bool>();
  cfg.coverage_weights.node = j.at("coverage_node_weight").get<double>();
  cfg.coverage_weights.edge = j.at("coverage_edge_weight").get<double>();
  cfg.ppr.damping = j.at("ppr_damping").get<double>();
  cfg.ppr.max_iterations = j.at("ppr_max_iterations").get<std::size_t>();
  cfg.ppr.l1_tolerance = j.at("ppr_tolerance").get<double>();
  if (!j.at("samples").is_null()) cfg.samples = j.at("samples").get<std::uint64_t>();
  if (!j.at("epsilon").is_null()) cfg.epsilon = j.at("epsilon").get<double>();
  if (!j.at("delta").is_null()) cfg.delta = j.at("delta").get<double>();
  if (!j.at("budget").is_null()) cfg.budget = j.at("budget").get<std::uint64_t>();

  if (!overrides.dataset_path.empty()) cfg.dataset_path = overrides.dataset_path;
  if (!overrides.workload_path.empty()) cfg.workload_path = overrides.workload_path;
  if (!overrides.prefixes_path.empty()) cfg.prefixes_path = overrides.prefixes_path;
  cfg.out_dir = overrides.out_dir;
  cfg.threads = overrides.threads;
  return cfg;
}

struct ScoredRun {
  std::vector<UserRunReport> reports;
  Aggregate aggregate;
};

Aggregate aggregate_reports(const std::vector<UserRunReport>& reports) {
  std::vector<UserScore> scores;
  for (const UserRunReport& r : reports) {
    UserScore s;
    s.user_id = r.user_id;
    s.excluded = r.excluded;
    s.exclusion_reason = r.exclusion_reason;
    s.coverage = r.coverage;
    s.prf = r.prf;
    scores.push_back(std::move(s));
  }
  return aggregate_users(scores);
}

void write_aggregate_files(const fs::path& out_dir, const RunConfig& cfg,
                           const std::vector<UserRunReport>& reports,
                           const Aggregate& agg) {
  json per_user = json::array();
  for (const UserRunReport& r : reports) {
    per_user.push_back(json{{"user_id", r.user_id},
                            {"excluded", r.excluded},
                            {"exclusion_reason", r.exclusion_reason},
                            {"coverage", r.coverage},
                            {"precision", r.prf.precision},
                            {"recall", r.prf.recall},
                            {"f1", r.prf.f1},
                            {"distinct_triples", r.distinct_triples},
                            {"draws", r.draws}});
  }
  json agg_json{{"method", method_name(cfg.method)},
                {"users", agg.users},
                {"scored_users", agg.scored_users},
                {"mean_coverage", agg.mean_coverage},
                {"mean_precision", agg.mean_precision},
                {"mean_recall", agg.mean_recall},
                {"mean_f1", agg.mean_f1},
                {"per_user", per_user}};
  write_json(out_dir / "aggregate.json", agg_json);

  std::string csv = "user_id,method,excluded,coverage,precision,recall,f1,distinct_triples,draws\n";
  for (const UserRunReport& r : reports) {
    csv += r.user_id;
    csv += ',';
    csv += method_name(cfg.method);
    csv += ',';
    csv += r.excluded ? "true" : "false";
    csv += ',';
    csv += fmt_double(r.coverage);
    csv += ',';
    csv += fmt_double(r.prf.precision);
    csv += ',';
    csv += fmt_double(r.prf.recall);
    csv += ',';
    csv += fmt_double(r.prf.f1);
    csv += ',';
    csv += std::to_string(r.distinct_triples);
    csv += ',';
    csv += std::to_string(r.draws);
    csv += '\n';
  }
  write_text(out_dir / "aggregate.csv", csv);
}

}  // namespace

RunResult run_summarize(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.dataset_path.empty()) throw ConfigError("--dataset is required");
  if (cfg.out_dir.empty()) throw ConfigError("--out is required");
  fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);

  ParseStats dstats;
  KnowledgeGraph graph = load_ntriples(cfg.dataset_path, &dstats, cfg.strict);
  if (graph.size() == 0) throw Error("dataset holds no triples");
  PreparedWorkload prep = prepare_workload(cfg);

  // The non-personalized ablation shares one table across users.
  SensitivityTable global_table;
  SamplingDistribution global_dist;
  if (cfg.method == Method::CorekgGlobal) {
    global_table = compute_sensitivity(graph, prep.train, cfg.relevance, "global");
    if (global_table.total > 0.0) global_dist = sampling_distribution(global_table);
  }

  std::vector<UserRunReport> reports(cfg.users);
  parallel_for(cfg.users, cfg.threads, [&](std::size_t i) {
    UserRunReport& report = reports[i];
    report.user_id = prep.profiles[i].user_id;
    const std::vector<Query>& train_u = prep.train_by_user[i];
    const std::vector<Query>& test_u = prep.test_by_user[i];
    report.train_queries = train_u.size();
    report.test_queries = test_u.size();

    // Computed for every method so exclusion never depends on the method.
    SensitivityTable table_u =
        compute_sensitivity(graph, train_u, cfg.relevance, report.user_id);
    report.answerable_train = table_u.answerable;

    if (test_u.empty())
      report.exclusion_reason = "no personalized test queries";
    else if (table_u.answerable == 0)
      report.exclusion_reason = "no answerable personalized train queries";
    else if (cfg.method == Method::CorekgGlobal && global_table.total <= 0.0)
      report.exclusion_reason = "global workload has no answerable queries";
    report.excluded = !report.exclusion_reason.empty();
    if (report.excluded) {
      write_json(out_dir / ("report_" + report.user_id + ".json"), report_json(report, cfg));
      return;
    }

    std::uint64_t seed_i = substream_seed(cfg.rng_seed, kStreamSample, i);
    WeightedSummary summary;
    bool cap_hit = false;
    switch (cfg.method) {
      case Method::Corekg: {
        SamplingDistribution dist = sampling_distribution(table_u);
        summary = cfg.budget
                      ? sample_coreset_budget(dist, table_u, *cfg.budget, seed_i, &cap_hit)
                      : sample_coreset(dist, table_u, resolve_m(cfg, table_u.answerable), seed_i);
        break;
      }
      case Method::CorekgGlobal: {
        summary = cfg.budget
                      ? sample_coreset_budget(global_dist, global_table, *cfg.budget, seed_i,
                                              &cap_hit)
                      : sample_coreset(global_dist, global_table,
                                       resolve_m(cfg, global_table.answerable), seed_i);
        break;
      }
      case Method::CorekgUniform: {
        summary = cfg.budget
                      ? uniform_coreset_budget(graph, *cfg.budget, seed_i, &cap_hit)
                      : uniform_coreset(graph, resolve_m(cfg, table_u.answerable), seed_i);
        break;
      }
      case Method::CorekgUnweighted: {
        // Equal treatment of samples: weights go to 1 and, under a budget,
        // each draw consumes budget whether or not it repeats.
        SamplingDistribution dist = sampling_distribution(table_u);
        std::uint64_t m = cfg.budget ? *cfg.budget : resolve_m(cfg, table_u.answerable);
        summary = strip_weights(sample_coreset(dist, table_u, m, seed_i));
        break;
      }
      case Method::Ppr: {
        auto scores = ppr_scores(graph, prep.profiles[i].seeds, cfg.ppr, &report.warnings);
        summary = ppr_summary(graph, scores, *cfg.budget, &report.warnings);
        break;
      }
    }
    if (cap_hit)
      report.warnings.push_back("draw cap reached before the budget was filled with distinct triples");

    report.draws = summary.draws;
    report.distinct_triples = summary.entries.size();
    report.total_sensitivity = summary.total_sensitivity;
    if (cfg.method != Method::Ppr) {
      const SensitivityTable& cost_table =
          cfg.method == Method::CorekgGlobal ? global_table : table_u;
      report.has_cost = true;
      report.cost_full = full_cost(cost_table);
      report.cost_estimate = coreset_cost(summary, cost_table);
    }

    KnowledgeGraph summary_graph = materialize_summary_graph(summary, graph);
    report.coverage = coverage(summary_graph, test_u, cfg.coverage_weights,
                               &report.coverage_items, &report.coverage_skipped);
    report.prf = answer_f1(summary_graph, graph, test_u, &report.answer_items);

    std::ostringstream tsv;
    write_summary_tsv(graph, summary, tsv);
    write_text(out_dir / ("summary_" + report.user_id + ".tsv"), tsv.str());
    json meta{{"user_id", report.user_id},
              {"method", method_name(cfg.method)},
              {"tag", summary.tag},
              {"draws", summary.draws},
              {"distinct_triples", summary.entries.size()},
              {"total_sensitivity", summary.total_sensitivity},
              {"stream_seed", seed_i}};
    write_json(out_dir / ("summary_" + report.user_id + ".meta.json"), meta);
    if (cfg.dump_sensitivity) {
      std::ostringstream sens;
      dump_sensitivity_tsv(table_u, sens);
      write_text(out_dir / ("sensitivity_" + report.user_id + ".tsv"), sens.str());
    }
    write_json(out_dir / ("report_" + report.user_id + ".json"), report_json(report, cfg));
  });

  if (cfg.dump_sensitivity && cfg.method == Method::CorekgGlobal) {
    std::ostringstream sens;
    dump_sensitivity_tsv(global_table, sens);
    write_text(out_dir / "sensitivity_global.tsv", sens.str());
  }

  std::ostringstream profiles;
  write_profiles(profiles, prep.profiles);
  write_text(out_dir / "profiles.tsv", profiles.str());

  RunResult result;
  result.users = std::move(reports);
  result.aggregate = aggregate_reports(result.users);
  write_aggregate_files(out_dir, cfg, result.users, result.aggregate);

  json manifest{
      {"tool", "corekg"},
      {"version", "0.1.0"},
      {"config", config_json(cfg)},
      {"dataset",
       json{{"triples", dstats.triples}, {"duplicates", dstats.duplicates},
            {"skipped", dstats.skipped}, {"terms", graph.term_count()}}},
      {"workload", json{{"records", prep.stats.records},
                        {"skipped", prep.stats.skipped},
                        {"duplicates", prep.stats.duplicates},
                        {"queries", prep.queries.size()},
                        {"train", prep.train.size()},
                        {"test", prep.test.size()}}},
      {"warnings", prep.warnings}};
  write_json(out_dir / "manifest.json", manifest);

  result.exit_code = result.aggregate.scored_users == 0 ? 3 : 0;
  return result;
}

RunResult run_evaluate(const RunConfig& overrides) {
  if (overrides.out_dir.empty()) throw ConfigError("--out is required");
  fs::path out_dir(overrides.out_dir);
  fs::path manifest_path = out_dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw ConfigError("no manifest.json under " + overrides.out_dir +
                      "; run summarize first");
  json manifest = json::parse(read_file(manifest_path.string()));
  RunConfig cfg = config_from_json(manifest.at("config"), overrides);
  validate_config(cfg);

  KnowledgeGraph graph = load_ntriples(cfg.dataset_path, nullptr, cfg.strict);
  if (graph.size() == 0) throw Error("dataset holds no triples");
  PreparedWorkload prep = prepare_workload(cfg);

  std::vector<UserRunReport> reports(cfg.users);
  parallel_for(cfg.users, cfg.threads, [&](std::size_t i) {
    UserRunReport& report = reports[i];
    report.user_id = prep.profiles[i].user_id;
    const std::vector<Query>& train_u = prep.train_by_user[i];
    const std::vector<Query>& test_u = prep.test_by_user[i];
    report.train_queries = train_u.size();
    report.test_queries = test_u.size();

    SensitivityTable table_u =
        compute_sensitivity(graph, train_u, cfg.relevance, report.user_id);
    report.answerable_train = table_u.answerable;

    fs::path summary_path = out_dir / ("summary_" + report.user_id + ".tsv");
    if (test_u.empty())
      report.exclusion_reason = "no personalized test queries";
    else if (table_u.answerable == 0)
      report.exclusion_reason = "no answerable personalized train queries";
    else if (!fs::exists(summary_path))
      report.exclusion_reason = "no summary on disk";
    report.excluded = !report.exclusion_reason.empty();
    if (report.excluded) {
      write_json(out_dir / ("report_" + report.user_id + ".json"), report_json(report, cfg));
      return;
    }

    std::ifstream in(summary_path);
    WeightedSummary summary = read_summary_tsv(graph, in);
    fs::path meta_path = out_dir / ("summary_" + report.user_id + ".meta.json");
    if (fs::exists(meta_path)) {
      json meta = json::parse(read_file(meta_path.string()));
      summary.tag = meta.at("tag").get<std::string>();
      summary.draws = meta.at("draws").get<std::uint64_t>();
      summary.total_sensitivity = meta.at("total_sensitivity").get<double>();
    }
    report.draws = summary.draws;
    report.distinct_triples = summary.entries.size();
    report.total_sensitivity = summary.total_sensitivity;
    try {
      report.cost_full = full_cost(table_u);
      report.cost_estimate = coreset_cost(summary, table_u);
      report.has_cost = true;
    } catch (const Error&) {
      report.has_cost = false;  // summary priced against a different workload
    }

    KnowledgeGraph summary_graph = materialize_summary_graph(summary, graph);
    report.coverage = coverage(summary_graph, test_u, cfg.coverage_weights,
                               &report.coverage_items, &report.coverage_skipped);
    report.prf = answer_f1(summary_graph, graph, test_u, &report.answer_items);
    write_json(out_dir / ("report_" + report.user_id + ".json"), report_json(report, cfg));
  });

  RunResult result;
  result.users = std::move(reports);
  result.aggregate = aggregate_reports(result.users);
  write_aggregate_files(out_dir, cfg, result.users, result.aggregate);
  result.exit_code = result.aggregate.scored_users == 0 ? 3 : 0;
  return result;
}

Aggregate run_report(const std::string& out_dir_text) {
  fs::path out_dir(out_dir_text);
  if (!fs::is_directory(out_dir)) throw ConfigError(out_dir_text + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    std::string name = entry.path().filename().string();
    if (starts_with(name, "report_") && name.ends_with(".json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no report_*.json under " + out_dir_text);

  std::vector<UserRunReport> reports;
  std::string method = "corekg";
  for (const fs::path& f : files) {
    json j = json::parse(read_file(f.string()));
    UserRunReport r;
    r.user_id = j.at("user_id").get<std::string>();
    r.excluded = j.at("excluded").get<bool>();
    r.exclusion_reason = j.at("exclusion_reason").get<std::string>();
    r.coverage = j.at("coverage").at("value").get<double>();
    r.prf.precision = j.at("answers").at("precision").get<double>();
    r.prf.recall = j.at("answers").at("recall").get<double>();
    r.prf.f1 = j.at("answers").at("f1").get<double>();
    r.distinct_triples = j.at("distinct_triples").get<std::size_t>();
    r.draws = j.at("draws").get<std::uint64_t>();
    method = j.at("method").get<std::string>();
    reports.push_back(std::move(r));
  }
  Aggregate agg = aggregate_reports(reports);
  RunConfig cfg;
  cfg.method = parse_method(method);
  write_aggregate_files(out_dir, cfg, reports, agg);
  return agg;
}

}  // namespace corekg
