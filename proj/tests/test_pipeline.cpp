#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "corekg/coreset.hpp"
#include "corekg/errors.hpp"
#include "corekg/pipeline.hpp"
#include "corekg/synthetic.hpp"
#include "corekg/util.hpp"

using namespace corekg;
namespace fs = std::filesystem;

namespace {

// Each fixture gets its own directory under the test working dir and
// removes it on destruction.
struct TempRun {
  fs::path root;

  explicit TempRun(const std::string& name) : root(fs::path("pipeline_test") / name) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TempRun() { fs::remove_all(root); }

  std::string path(const std::string& leaf) const { return (root / leaf).string(); }
};

RunConfig base_config(const TempRun& tmp, std::uint64_t synth_seed = 1) {
  SyntheticSpec spec;
  spec.entities = 40;
  spec.relations = 5;
  spec.triples = 400;
  spec.queries = 120;
  spec.skew = 1.0;
  spec.unanswerable_fraction = 0.05;
  spec.seed = synth_seed;
  generate_synthetic_files(spec, tmp.path("data.nt"), tmp.path("queries.sparql"));
  RunConfig cfg;
  cfg.dataset_path = tmp.path("data.nt");
  cfg.workload_path = tmp.path("queries.sparql");
  cfg.out_dir = tmp.path("out");
  cfg.users = 4;
  cfg.seeds_per_user = 4;
  cfg.budget = 40;
  cfg.rng_seed = 11;
  cfg.threads = 1;
  return cfg;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    files[entry.path().filename().string()] = read_file(entry.path().string());
  return files;
}

}  // namespace

TEST_CASE("parse_method and method_name are inverse") {
  for (const char* name :
       {"corekg", "corekg-global", "corekg-uniform", "corekg-unweighted", "ppr"})
    CHECK(method_name(parse_method(name)) == std::string(name));
  CHECK_THROWS_AS(parse_method("bogus"), ConfigError);
}

TEST_CASE("apply_config_file reads key=value lines and rejects unknown keys") {
  TempRun tmp("config");
  write_file(tmp.path("run.conf"),
             "# comment\n"
             "dataset = data.nt\n"
             "method = ppr\n"
             "budget = 55\n"
             "split = 0.7\n"
             "ppr-damping = 0.9\n"
             "strict = true\n");
  RunConfig cfg = apply_config_file(RunConfig{}, tmp.path("run.conf"));
  CHECK(cfg.dataset_path == "data.nt");
  CHECK(cfg.method == Method::Ppr);
  CHECK(cfg.budget == 55);
  CHECK(cfg.split_ratio == 0.7);
  CHECK(cfg.ppr.damping == 0.9);
  CHECK(cfg.strict);

  write_file(tmp.path("bad.conf"), "no_such_key = 1\n");
  CHECK_THROWS_AS(apply_config_file(RunConfig{}, tmp.path("bad.conf")), ConfigError);
  write_file(tmp.path("bad2.conf"), "just a line\n");
  CHECK_THROWS_WITH_AS(apply_config_file(RunConfig{}, tmp.path("bad2.conf")),
                       doctest::Contains("line 1"), ConfigError);
  write_file(tmp.path("bad3.conf"), "budget = not_a_number\n");
  CHECK_THROWS_AS(apply_config_file(RunConfig{}, tmp.path("bad3.conf")), ConfigError);
}

TEST_CASE("validate_config enforces exactly one sampling mode") {
  TempRun tmp("validate");
  RunConfig cfg = base_config(tmp);
  validate_config(cfg);

  RunConfig none = cfg;
  none.budget.reset();
  CHECK_THROWS_AS(validate_config(none), ConfigError);

  RunConfig two = cfg;
  two.samples = 100;
  CHECK_THROWS_AS(validate_config(two), ConfigError);

  RunConfig eps_only = cfg;
  eps_only.budget.reset();
  eps_only.epsilon = 0.2;
  CHECK_THROWS_AS(validate_config(eps_only), ConfigError);
  eps_only.delta = 0.1;
  validate_config(eps_only);

  RunConfig bad_ranges = cfg;
  bad_ranges.split_ratio = 1.0;
  CHECK_THROWS_AS(validate_config(bad_ranges), ConfigError);
  bad_ranges = cfg;
  bad_ranges.users = 0;
  CHECK_THROWS_AS(validate_config(bad_ranges), ConfigError);
  bad_ranges = cfg;
  bad_ranges.seeds_per_user = 0;
  CHECK_THROWS_AS(validate_config(bad_ranges), ConfigError);
  bad_ranges = cfg;
  bad_ranges.coverage_weights = {0.0, 0.0};
  CHECK_THROWS_AS(validate_config(bad_ranges), ConfigError);
  bad_ranges = cfg;
  bad_ranges.ppr.damping = 1.0;
  CHECK_THROWS_AS(validate_config(bad_ranges), ConfigError);

  RunConfig ppr_no_budget = cfg;
  ppr_no_budget.method = Method::Ppr;
  ppr_no_budget.budget.reset();
  ppr_no_budget.samples = 50;
  CHECK_THROWS_AS(validate_config(ppr_no_budget), ConfigError);
}

TEST_CASE("prepare_workload splits and personalizes deterministically") {
  TempRun tmp("prepare");
  RunConfig cfg = base_config(tmp);
  PreparedWorkload w = prepare_workload(cfg);
  CHECK(w.stats.records == 120);
  CHECK(w.queries.size() == w.train.size() + w.test.size());
  CHECK(w.train.size() >= w.test.size());  // 0.8 split
  REQUIRE(w.profiles.size() == 4);
  REQUIRE(w.train_by_user.size() == 4);
  for (std::size_t u = 0; u < 4; ++u) {
    CHECK(w.profiles[u].user_id == "user0" + std::to_string(u));
    CHECK(!w.profiles[u].seeds.empty());
  }
  PreparedWorkload again = prepare_workload(cfg);
  for (std::size_t u = 0; u < 4; ++u) CHECK(again.profiles[u].seeds == w.profiles[u].seeds);
}

TEST_CASE("run_summarize writes the full artifact set") {
  TempRun tmp("summarize");
  RunConfig cfg = base_config(tmp);
  RunResult result = run_summarize(cfg);
  CHECK(result.exit_code == 0);
  CHECK(result.users.size() == 4);
  CHECK(result.aggregate.users == 4);
  CHECK(result.aggregate.scored_users >= 1);

  for (const char* leaf : {"profiles.tsv", "aggregate.json", "aggregate.csv", "manifest.json"})
    CHECK(fs::exists(fs::path(cfg.out_dir) / leaf));
  for (const UserRunReport& user : result.users) {
    CHECK(fs::exists(fs::path(cfg.out_dir) / ("report_" + user.user_id + ".json")));
    if (!user.excluded) {
      CHECK(fs::exists(fs::path(cfg.out_dir) / ("summary_" + user.user_id + ".tsv")));
      CHECK(user.distinct_triples <= 40);
      CHECK(user.draws >= user.distinct_triples);
      CHECK(user.coverage >= 0.0);
      CHECK(user.coverage <= 1.0);
      CHECK(user.has_cost);
    }
  }
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  TempRun tmp("determinism");
  RunConfig cfg = base_config(tmp);
  run_summarize(cfg);
  std::map<std::string, std::string> first = snapshot(cfg.out_dir);
  fs::remove_all(cfg.out_dir);
  run_summarize(cfg);
  std::map<std::string, std::string> second = snapshot(cfg.out_dir);
  CHECK(first == second);
}

TEST_CASE("thread count does not change the output bytes") {
  TempRun tmp("threads");
  RunConfig cfg = base_config(tmp);
  run_summarize(cfg);
  std::map<std::string, std::string> serial = snapshot(cfg.out_dir);
  fs::remove_all(cfg.out_dir);
  cfg.threads = 4;
  run_summarize(cfg);
  CHECK(snapshot(cfg.out_dir) == serial);
}

TEST_CASE("every method runs end to end") {
  TempRun tmp("methods");
  RunConfig cfg = base_config(tmp);
  for (Method m : {Method::Corekg, Method::CorekgGlobal, Method::CorekgUniform,
                   Method::CorekgUnweighted, Method::Ppr}) {
    cfg.method = m;
    cfg.out_dir = tmp.path(std::string("out_") + method_name(m));
    RunResult result = run_summarize(cfg);
    CHECK(result.exit_code == 0);
    CHECK(result.aggregate.scored_users >= 1);
  }
}

TEST_CASE("run_evaluate rescoring reproduces the summarize reports") {
  TempRun tmp("evaluate");
  RunConfig cfg = base_config(tmp);
  run_summarize(cfg);
  std::map<std::string, std::string> before = snapshot(cfg.out_dir);
  RunConfig overrides;
  overrides.out_dir = cfg.out_dir;
  overrides.threads = 1;
  RunResult result = run_evaluate(overrides);
  CHECK(result.exit_code == 0);
  CHECK(snapshot(cfg.out_dir) == before);
}

TEST_CASE("run_evaluate without a manifest is a config error") {
  TempRun tmp("evaluate_missing");
  RunConfig overrides;
  overrides.out_dir = tmp.path("nowhere");
  fs::create_directories(overrides.out_dir);
  CHECK_THROWS_AS(run_evaluate(overrides), ConfigError);
}

TEST_CASE("run_report rebuilds the aggregates from the reports on disk") {
  TempRun tmp("report");
  RunConfig cfg = base_config(tmp);
  run_summarize(cfg);
  std::string agg_json = read_file((fs::path(cfg.out_dir) / "aggregate.json").string());
  std::string agg_csv = read_file((fs::path(cfg.out_dir) / "aggregate.csv").string());
  Aggregate agg = run_report(cfg.out_dir);
  CHECK(agg.users == 4);
  CHECK(read_file((fs::path(cfg.out_dir) / "aggregate.json").string()) == agg_json);
  CHECK(read_file((fs::path(cfg.out_dir) / "aggregate.csv").string()) == agg_csv);
  fs::create_directories(tmp.path("empty_dir"));
  CHECK_THROWS_AS(run_report(tmp.path("empty_dir")), Error);
}

TEST_CASE("a workload with one query leaves every user excluded") {
  TempRun tmp("excluded");
  write_file(tmp.path("data.nt"), "<http://s.test/a> <http://s.test/p> <http://s.test/b> .\n");
  write_file(tmp.path("queries.sparql"),
             "SELECT ?x WHERE { <http://s.test/a> <http://s.test/p> ?x }\n");
  RunConfig cfg;
  cfg.dataset_path = tmp.path("data.nt");
  cfg.workload_path = tmp.path("queries.sparql");
  cfg.out_dir = tmp.path("out");
  cfg.users = 2;
  cfg.seeds_per_user = 1;
  cfg.budget = 1;
  cfg.threads = 1;
  RunResult result = run_summarize(cfg);
  CHECK(result.exit_code == 3);
  CHECK(result.aggregate.scored_users == 0);
  for (const UserRunReport& user : result.users) {
    CHECK(user.excluded);
    CHECK(user.exclusion_reason == "no personalized test queries");
  }
}

TEST_CASE("an unanswerable workload leaves every user excluded") {
  TempRun tmp("nosignal");
  write_file(tmp.path("data.nt"), "<http://s.test/a> <http://s.test/p> <http://s.test/b> .\n");
  write_file(tmp.path("queries.sparql"),
             "SELECT ?x WHERE { <http://s.test/ghost1> <http://s.test/p> ?x }\n"
             "###\n"
             "SELECT ?x WHERE { <http://s.test/ghost2> <http://s.test/p> ?x }\n"
             "###\n"
             "SELECT ?x WHERE { <http://s.test/ghost3> <http://s.test/p> ?x }\n");
  RunConfig cfg;
  cfg.dataset_path = tmp.path("data.nt");
  cfg.workload_path = tmp.path("queries.sparql");
  cfg.out_dir = tmp.path("out");
  cfg.users = 2;
  cfg.seeds_per_user = 1;
  cfg.budget = 1;
  cfg.threads = 1;
  RunResult result = run_summarize(cfg);
  CHECK(result.exit_code == 3);
  for (const UserRunReport& user : result.users) CHECK(user.excluded);
}

TEST_CASE("empty inputs are reported as errors") {
  TempRun tmp("empty");
  write_file(tmp.path("empty.nt"), "");
  write_file(tmp.path("queries.sparql"),
             "SELECT ?x WHERE { <http://s.test/a> <http://s.test/p> ?x }\n");
  RunConfig cfg;
  cfg.dataset_path = tmp.path("empty.nt");
  cfg.workload_path = tmp.path("queries.sparql");
  cfg.out_dir = tmp.path("out");
  cfg.budget = 1;
  cfg.threads = 1;
  CHECK_THROWS_WITH_AS(run_summarize(cfg), doctest::Contains("no triples"), Error);

  write_file(tmp.path("data.nt"), "<http://s.test/a> <http://s.test/p> <http://s.test/b> .\n");
  write_file(tmp.path("junk.sparql"), "this is not sparql\n");
  cfg.dataset_path = tmp.path("data.nt");
  cfg.workload_path = tmp.path("junk.sparql");
  CHECK_THROWS_WITH_AS(run_summarize(cfg), doctest::Contains("no parseable"), Error);
}

TEST_CASE("dump-sensitivity adds per-user tables") {
  TempRun tmp("dump");
  RunConfig cfg = base_config(tmp);
  cfg.dump_sensitivity = true;
  RunResult result = run_summarize(cfg);
  for (const UserRunReport& user : result.users)
    if (!user.excluded)
      CHECK(fs::exists(fs::path(cfg.out_dir) / ("sensitivity_" + user.user_id + ".tsv")));
  CHECK(!fs::exists(fs::path(cfg.out_dir) / "sensitivity_global.tsv"));

  cfg.method = Method::CorekgGlobal;
  cfg.out_dir = tmp.path("out_global");
  run_summarize(cfg);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "sensitivity_global.tsv"));
}

TEST_CASE("epsilon-delta mode derives the sample count") {
  TempRun tmp("epsdelta");
  RunConfig cfg = base_config(tmp);
  cfg.budget.reset();
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  RunResult result = run_summarize(cfg);
  CHECK(result.exit_code == 0);
  // The draw count is the bound for each user's own answerable train count.
  for (const UserRunReport& user : result.users)
    if (!user.excluded)
      CHECK(user.draws == required_sample_size(0.5, 0.5, user.answerable_train));
}
