#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "corekg/errors.hpp"
#include "corekg/kg.hpp"
#include "corekg/pipeline.hpp"
#include "corekg/synthetic.hpp"
#include "corekg/util.hpp"

namespace {

using corekg::RunConfig;

// Machine-readable failure record: one JSON line on stderr, mirrored into
// <out>/error.json when an output directory is known.
void emit_error(const std::string& type, const std::string& message,
                const std::string& out_dir) {
  nlohmann::json j{{"error", {{"type", type}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
  if (!out_dir.empty()) {
    try {
      std::filesystem::create_directories(out_dir);
      corekg::write_file((std::filesystem::path(out_dir) / "error.json").string(),
                         j.dump(2) + "\n");
    } catch (...) {
      // Losing the error file must not mask the original failure.
    }
  }
}

void add_run_flags(CLI::App* cmd, RunConfig& cfg, std::string& config_path,
                   std::string& method, std::string& relevance, bool with_inputs) {
  if (with_inputs) {
    cmd->add_option("--dataset", cfg.dataset_path, "N-Triples file (plain or gzip)");
    cmd->add_option("--workload", cfg.workload_path, "query log, records separated by ### lines");
    cmd->add_option("--prefixes", cfg.prefixes_path, "fixed prefix map, key=value lines");
    cmd->add_option("--config", config_path, "key=value config file; flags override it");
    cmd->add_option("--users", cfg.users, "number of simulated users");
    cmd->add_option("--seeds-per-user", cfg.seeds_per_user, "profile seed entities per user");
    cmd->add_option("--split", cfg.split_ratio, "train fraction of the workload");
    cmd->add_option("--method", method,
                    "corekg | corekg-global | corekg-uniform | corekg-unweighted | ppr");
    cmd->add_option("--samples", cfg.samples, "fixed number of draws");
    cmd->add_option("--epsilon", cfg.epsilon, "cost error bound (with --delta)");
    cmd->add_option("--delta", cfg.delta, "failure probability (with --epsilon)");
    cmd->add_option("--budget", cfg.budget, "distinct-triple budget");
    cmd->add_option("--relevance", relevance, "join | pattern");
    cmd->add_option("--rng-seed", cfg.rng_seed, "master seed; fixes every artifact byte");
    cmd->add_flag("--strict", cfg.strict, "fail on malformed input instead of skipping");
    cmd->add_flag("--dump-sensitivity", cfg.dump_sensitivity,
                  "write per-user sensitivity tables");
    cmd->add_option("--coverage-node-weight", cfg.coverage_weights.node, "coverage node weight");
    cmd->add_option("--coverage-edge-weight", cfg.coverage_weights.edge, "coverage edge weight");
    cmd->add_option("--ppr-damping", cfg.ppr.damping, "ppr damping factor");
    cmd->add_option("--ppr-max-iterations", cfg.ppr.max_iterations, "ppr iteration cap");
    cmd->add_option("--ppr-tolerance", cfg.ppr.l1_tolerance, "ppr L1 convergence tolerance");
  }
  cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", cfg.out_dir, "output directory");
}

int dispatch(CLI::App& app, RunConfig& cfg, const std::string& config_path,
             const std::string& method, const std::string& relevance,
             const corekg::SyntheticSpec& synth, const std::string& synth_dataset,
             const std::string& synth_workload, bool ingest_strict,
             const std::string& ingest_dataset) {
  using namespace corekg;

  if (app.got_subcommand("ingest")) {
    ParseStats stats;
    KnowledgeGraph g = load_ntriples(ingest_dataset, &stats, ingest_strict);
    nlohmann::json j{{"triples", stats.triples},
                     {"duplicates", stats.duplicates},
                     {"skipped", stats.skipped},
                     {"terms", g.term_count()}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("gen-synthetic")) {
    SyntheticStats stats = generate_synthetic_files(synth, synth_dataset, synth_workload);
    nlohmann::json j{{"triples", stats.triples},
                     {"queries", stats.queries},
                     {"unanswerable_queries", stats.unanswerable_queries},
                     {"dataset", synth_dataset},
                     {"workload", synth_workload}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  // The remaining verbs share the RunConfig; apply the config file first,
  // then copy back every flag the command line actually set, so explicit
  // flags keep the last word.
  if (!config_path.empty()) {
    RunConfig flags = cfg;
    cfg = apply_config_file(RunConfig{}, config_path);
    CLI::App* sub = app.get_subcommands().front();
    auto took = [&](const char* name) { return sub->count(name) > 0; };
    if (took("--dataset")) cfg.dataset_path = flags.dataset_path;
    if (took("--workload")) cfg.workload_path = flags.workload_path;
    if (took("--prefixes")) cfg.prefixes_path = flags.prefixes_path;
    if (took("--out")) cfg.out_dir = flags.out_dir;
    if (took("--users")) cfg.users = flags.users;
    if (took("--seeds-per-user")) cfg.seeds_per_user = flags.seeds_per_user;
    if (took("--split")) cfg.split_ratio = flags.split_ratio;
    if (took("--samples")) cfg.samples = flags.samples;
    if (took("--epsilon")) cfg.epsilon = flags.epsilon;
    if (took("--delta")) cfg.delta = flags.delta;
    if (took("--budget")) cfg.budget = flags.budget;
    if (took("--rng-seed")) cfg.rng_seed = flags.rng_seed;
    if (took("--threads")) cfg.threads = flags.threads;
    if (took("--strict")) cfg.strict = flags.strict;
    if (took("--dump-sensitivity")) cfg.dump_sensitivity = flags.dump_sensitivity;
    if (took("--coverage-node-weight")) cfg.coverage_weights.node = flags.coverage_weights.node;
    if (took("--coverage-edge-weight")) cfg.coverage_weights.edge = flags.coverage_weights.edge;
    if (took("--ppr-damping")) cfg.ppr.damping = flags.ppr.damping;
    if (took("--ppr-max-iterations")) cfg.ppr.max_iterations = flags.ppr.max_iterations;
    if (took("--ppr-tolerance")) cfg.ppr.l1_tolerance = flags.ppr.l1_tolerance;
  }
  if (!method.empty()) cfg.method = parse_method(method);
  if (!relevance.empty()) {
    if (relevance == "join")
      cfg.relevance = RelevanceMode::JoinConsistent;
    else if (relevance == "pattern")
      cfg.relevance = RelevanceMode::PerPattern;
    else
      throw ConfigError("unknown relevance mode '" + relevance + "'");
  }

  if (app.got_subcommand("prepare-workload")) {
    if (cfg.out_dir.empty()) throw ConfigError("--out is required");
    std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);
    PreparedWorkload prep = prepare_workload(cfg);
    std::ostringstream profiles;
    write_profiles(profiles, prep.profiles);
    write_file((out_dir / "profiles.tsv").string(), profiles.str());
    for (std::size_t i = 0; i < prep.profiles.size(); ++i) {
      auto dump = [&](const std::vector<Query>& qs, const std::string& stem) {
        std::string text;
        for (const Query& q : qs) {
          text += q.normalized_text;
          text += "\n###\n";
        }
        write_file((out_dir / (stem + "_" + prep.profiles[i].user_id + ".txt")).string(), text);
      };
      dump(prep.train_by_user[i], "train");
      dump(prep.test_by_user[i], "test");
    }
    nlohmann::json j{{"queries", prep.queries.size()},
                     {"records", prep.stats.records},
                     {"skipped", prep.stats.skipped},
                     {"duplicates", prep.stats.duplicates},
                     {"train", prep.train.size()},
                     {"test", prep.test.size()},
                     {"users", prep.profiles.size()},
                     {"warnings", prep.warnings}};
    write_file((out_dir / "prep.json").string(), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand("summarize")) {
    RunResult result = run_summarize(cfg);
    nlohmann::json j{{"users", result.aggregate.users},
                     {"scored_users", result.aggregate.scored_users},
                     {"mean_coverage", result.aggregate.mean_coverage},
                     {"mean_f1", result.aggregate.mean_f1},
                     {"out", cfg.out_dir}};
    std::cout << j.dump(2) << "\n";
    return result.exit_code;
  }

  if (app.got_subcommand("evaluate")) {
    RunResult result = run_evaluate(cfg);
    nlohmann::json j{{"users", result.aggregate.users},
                     {"scored_users", result.aggregate.scored_users},
                     {"mean_coverage", result.aggregate.mean_coverage},
                     {"mean_f1", result.aggregate.mean_f1},
                     {"out", cfg.out_dir}};
    std::cout << j.dump(2) << "\n";
    return result.exit_code;
  }

  if (app.got_subcommand("report")) {
    Aggregate agg = run_report(cfg.out_dir);
    nlohmann::json j{{"users", agg.users},
                     {"scored_users", agg.scored_users},
                     {"mean_coverage", agg.mean_coverage},
                     {"mean_precision", agg.mean_precision},
                     {"mean_recall", agg.mean_recall},
                     {"mean_f1", agg.mean_f1}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corekg: workload-aware weighted summaries of RDF graphs"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, method, relevance;

  std::string ingest_dataset;
  bool ingest_strict = false;
  CLI::App* ingest = app.add_subcommand("ingest", "parse a dataset and print its stats");
  ingest->add_option("--dataset", ingest_dataset, "N-Triples file (plain or gzip)")->required();
  ingest->add_flag("--strict", ingest_strict, "fail on the first malformed line");

  corekg::SyntheticSpec synth;
  std::string synth_dataset = "synthetic.nt", synth_workload = "synthetic_workload.txt";
  CLI::App* gen = app.add_subcommand("gen-synthetic", "generate a skewed benchmark");
  gen->add_option("--entities", synth.entities, "entity count");
  gen->add_option("--relations", synth.relations, "relation count");
  gen->add_option("--triples", synth.triples, "distinct triple count");
  gen->add_option("--queries", synth.queries, "workload size");
  gen->add_option("--skew", synth.skew, "Zipf exponent over entities");
  gen->add_option("--unanswerable-fraction", synth.unanswerable_fraction,
                  "share of deliberately empty queries");
  gen->add_option("--rng-seed", synth.seed, "generator seed");
  gen->add_option("--dataset", synth_dataset, "output N-Triples path");
  gen->add_option("--workload", synth_workload, "output workload path");

  CLI::App* prep = app.add_subcommand("prepare-workload",
                                      "normalize, split, and personalize a workload");
  add_run_flags(prep, cfg, config_path, method, relevance, true);

  CLI::App* summ = app.add_subcommand("summarize", "build and score per-user summaries");
  add_run_flags(summ, cfg, config_path, method, relevance, true);

  CLI::App* eval = app.add_subcommand("evaluate", "rescore summaries already on disk");
  add_run_flags(eval, cfg, config_path, method, relevance, true);

  CLI::App* rep = app.add_subcommand("report", "re-aggregate existing per-user reports");
  rep->add_option("--out", cfg.out_dir, "output directory of a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    return dispatch(app, cfg, config_path, method, relevance, synth, synth_dataset,
                    synth_workload, ingest_strict, ingest_dataset);
  } catch (const corekg::ConfigError& e) {
    emit_error("config", e.what(), cfg.out_dir);
    return 2;
  } catch (const corekg::NoSignalError& e) {
    emit_error("no_signal", e.what(), cfg.out_dir);
    return 3;
  } catch (const corekg::ParseError& e) {
    emit_error("parse", e.what(), cfg.out_dir);
    return 1;
  } catch (const corekg::Error& e) {
    emit_error("error", e.what(), cfg.out_dir);
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what(), cfg.out_dir);
    return 1;
  }
}
