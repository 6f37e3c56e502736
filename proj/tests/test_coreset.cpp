#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "corekg/coreset.hpp"
#include "corekg/errors.hpp"
#include "corekg/eval.hpp"
#include "corekg/kg.hpp"
#include "corekg/rng.hpp"
#include "corekg/sensitivity.hpp"
#include "corekg/util.hpp"

using namespace corekg;

namespace {

Term e(int i) { return Term::iri("http://x.test/e" + std::to_string(i)); }
Term r(int i) { return Term::iri("http://x.test/r" + std::to_string(i)); }

Query pattern_query(PatternTerm s, PatternTerm p, PatternTerm o, std::uint64_t id) {
  Query q;
  q.bgp.push_back({std::move(s), std::move(p), std::move(o)});
  q.id = id;
  return q;
}

// Star around e0: every spoke is relevant to the hub query, and the first
// half of the spokes each carry their own query, so sensitivities are
// unequal.
struct Fixture {
  KnowledgeGraph g;
  SensitivityTable table;
  SamplingDistribution dist;
};

Fixture star_fixture(int spokes) {
  Fixture f;
  for (int i = 1; i <= spokes; ++i) f.g.add(e(0), r(1), e(i));
  f.g.freeze();
  std::vector<Query> workload;
  workload.push_back(pattern_query(e(0), r(1), Variable{"x"}, 1));
  for (int i = 1; i <= (spokes + 1) / 2; ++i)
    workload.push_back(pattern_query(e(0), r(1), e(i), 100 + i));
  f.table = compute_sensitivity(f.g, workload, RelevanceMode::JoinConsistent, "fixture");
  f.dist = sampling_distribution(f.table);
  return f;
}

}  // namespace

TEST_CASE("required_sample_size matches the frozen oracle values") {
  // Recomputed independently as ceil(8*q/eps^2 * ln(1/delta)).
  CHECK(required_sample_size(0.1, 0.05, 100) == 239659);
  CHECK(required_sample_size(0.2, 0.1, 48) == 22105);
  CHECK(required_sample_size(0.5, 0.1, 2) == 148);
  CHECK(required_sample_size(0.3, 0.01, 7) == 2866);
  CHECK(required_sample_size(0.9, 0.9, 1) == 2);
  CHECK(required_sample_size(1.0 - 1e-9, std::exp(-1.0), 1) == 9);
}

TEST_CASE("required_sample_size agrees with a long-double recomputation") {
  double epsilons[] = {0.05, 0.1, 0.25, 0.5, 0.75};
  double deltas[] = {0.01, 0.1, 0.5};
  std::size_t qs[] = {1, 7, 100, 5000};
  for (double eps : epsilons)
    for (double delta : deltas)
      for (std::size_t q : qs) {
        long double m = 8.0L * static_cast<long double>(q) /
                        (static_cast<long double>(eps) * eps) * std::log(1.0L / delta);
        std::uint64_t lo = static_cast<std::uint64_t>(std::floor(static_cast<double>(m)));
        std::uint64_t got = required_sample_size(eps, delta, q);
        CHECK(got >= lo);
        CHECK(got <= lo + 1);
      }
}

TEST_CASE("required_sample_size validates its domain") {
  CHECK_THROWS_AS(required_sample_size(0.0, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(required_sample_size(1.0, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(required_sample_size(0.1, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(required_sample_size(0.1, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(required_sample_size(0.1, 0.1, 0), ConfigError);
}

TEST_CASE("sample_coreset is deterministic and conserves draw count") {
  Fixture f = star_fixture(6);
  WeightedSummary a = sample_coreset(f.dist, f.table, 40, 7);
  WeightedSummary b = sample_coreset(f.dist, f.table, 40, 7);
  CHECK(a.entries.size() == b.entries.size());
  CHECK(a.draws == 40);
  std::uint64_t mult_sum = 0;
  for (const auto& [id, entry] : a.entries) {
    auto it = b.entries.find(id);
    REQUIRE(it != b.entries.end());
    CHECK(it->second.multiplicity == entry.multiplicity);
    CHECK(it->second.weight == entry.weight);
    mult_sum += entry.multiplicity;
  }
  CHECK(mult_sum == 40);
  WeightedSummary c = sample_coreset(f.dist, f.table, 40, 8);
  bool same = a.entries.size() == c.entries.size();
  if (same)
    for (const auto& [id, entry] : a.entries) {
      auto it = c.entries.find(id);
      if (it == c.entries.end() || it->second.multiplicity != entry.multiplicity) same = false;
    }
  CHECK(!same);
}

TEST_CASE("weights follow S/(m*s) and the estimator identity holds exactly") {
  Fixture f = star_fixture(5);
  WeightedSummary summary = sample_coreset(f.dist, f.table, 64, 3);
  CHECK(summary.tag == "fixture");
  CHECK(summary.total_sensitivity == f.table.total);
  double estimate = 0.0;
  for (const auto& [id, entry] : summary.entries) {
    CHECK(entry.weight == f.table.total / (64.0 * f.table.s[id]));
    estimate += static_cast<double>(entry.multiplicity) * entry.weight * f.table.s[id];
  }
  // Each draw contributes S/m regardless of which triple came up.
  CHECK(estimate == doctest::Approx(f.table.total).epsilon(1e-12));
}

TEST_CASE("sample_coreset rejects zero draws and empty support") {
  Fixture f = star_fixture(3);
  CHECK_THROWS_AS(sample_coreset(f.dist, f.table, 0, 1), ConfigError);
  SamplingDistribution empty;
  CHECK_THROWS_AS(sample_coreset(empty, f.table, 4, 1), NoSignalError);
}

TEST_CASE("budget sampling stops at the requested distinct count") {
  Fixture f = star_fixture(10);
  bool cap_hit = true;
  WeightedSummary summary = sample_coreset_budget(f.dist, f.table, 4, 9, &cap_hit);
  CHECK(summary.entries.size() == 4);
  CHECK(!cap_hit);
  std::uint64_t mult_sum = 0;
  for (const auto& [id, entry] : summary.entries) mult_sum += entry.multiplicity;
  CHECK(mult_sum == summary.draws);
  CHECK(summary.draws >= 4);
  for (const auto& [id, entry] : summary.entries)
    CHECK(entry.weight ==
          f.table.total / (static_cast<double>(summary.draws) * f.table.s[id]));
}

TEST_CASE("budget beyond the support takes the whole support") {
  Fixture f = star_fixture(5);
  WeightedSummary summary = sample_coreset_budget(f.dist, f.table, 100, 2);
  CHECK(summary.entries.size() == f.dist.support.size());
}

TEST_CASE("growing the budget extends the same draw stream") {
  Fixture f = star_fixture(12);
  WeightedSummary small = sample_coreset_budget(f.dist, f.table, 3, 5);
  WeightedSummary large = sample_coreset_budget(f.dist, f.table, 8, 5);
  CHECK(small.draws <= large.draws);
  for (const auto& [id, entry] : small.entries) {
    auto it = large.entries.find(id);
    REQUIRE(it != large.entries.end());
    CHECK(it->second.multiplicity >= entry.multiplicity);
  }
}

TEST_CASE("an unreachable support slice trips the draw cap") {
  // Second triple carries essentially no probability mass, so the sampler
  // exhausts 50*budget draws without completing the budget.
  KnowledgeGraph g;
  g.add(e(0), r(1), e(1));
  g.add(e(0), r(1), e(2));
  g.freeze();
  SensitivityTable t;
  t.tag = "skew";
  t.s = {1.0, 1e-300};
  t.c = {1, 1};
  t.total = 1.0 + 1e-300;
  t.answerable = 1;
  SamplingDistribution dist = sampling_distribution(t);
  bool cap_hit = false;
  WeightedSummary summary = sample_coreset_budget(dist, t, 2, 11, &cap_hit);
  CHECK(cap_hit);
  CHECK(summary.draws == 100);
  CHECK(summary.entries.size() == 1);
}

TEST_CASE("coreset_cost reproduces a hand-computed estimate") {
  Fixture f = star_fixture(2);
  // Hub query gives each triple 1/2, the first spoke's own query adds 1:
  // s = (1.5, 0.5), S = 2, c = (2, 1), full cost = 3.
  CHECK(f.table.s == std::vector<double>{1.5, 0.5});
  CHECK(full_cost(f.table) == 3.0);
  WeightedSummary manual;
  manual.entries[0] = {3, 2.0 / (4.0 * 1.5)};  // weight = S/(m*s)
  manual.entries[1] = {1, 2.0 / (4.0 * 0.5)};
  manual.draws = 4;
  manual.tag = "fixture";
  manual.total_sensitivity = 2.0;
  // cost = 3*(1/3)*2 + 1*1*1 = 3.
  CHECK(coreset_cost(manual, f.table) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("coreset_cost refuses mismatched workload tags") {
  Fixture f = star_fixture(2);
  WeightedSummary summary = sample_coreset(f.dist, f.table, 8, 1);
  summary.tag = "someone_else";
  CHECK_THROWS_AS(coreset_cost(summary, f.table), Error);
  summary.tag = "";  // untagged summaries price against any table
  CHECK(coreset_cost(summary, f.table) > 0.0);
}

TEST_CASE("the sample mean of the cost estimator approaches the full cost") {
  Fixture f = star_fixture(8);
  const int trials = 400;
  const std::uint64_t m = 32;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    double cost = coreset_cost(sample_coreset(f.dist, f.table, m, 1000 + i), f.table);
    sum += cost;
    sum_sq += cost * cost;
  }
  double mean = sum / trials;
  double var = (sum_sq - sum * sum / trials) / (trials - 1);
  double se = std::sqrt(var / trials);
  CHECK(std::abs(mean - full_cost(f.table)) <= 3.0 * se + 1e-12);
}

TEST_CASE("materialize_summary_graph copies exactly the sampled triples") {
  Fixture f = star_fixture(6);
  WeightedSummary summary = sample_coreset_budget(f.dist, f.table, 3, 4);
  KnowledgeGraph sub = materialize_summary_graph(summary, f.g);
  CHECK(sub.frozen());
  CHECK(sub.size() == summary.entries.size());
  for (const auto& [id, entry] : summary.entries) {
    const EncodedTriple& t = f.g.triple(id);
    auto s = sub.find_term(f.g.term(t.subject));
    auto p = sub.find_term(f.g.term(t.predicate));
    auto o = sub.find_term(f.g.term(t.object));
    REQUIRE((s && p && o));
    CHECK(sub.find(*s, *p, *o).has_value());
  }
  WeightedSummary bogus;
  bogus.entries[9999] = {1, 1.0};
  bogus.draws = 1;
  CHECK_THROWS_AS(materialize_summary_graph(bogus, f.g), Error);
}

TEST_CASE("summary TSV round-trips entries, weights, and draws") {
  Fixture f = star_fixture(7);
  WeightedSummary summary = sample_coreset(f.dist, f.table, 23, 6);
  std::ostringstream out;
  write_summary_tsv(f.g, summary, out);
  std::istringstream in(out.str());
  WeightedSummary back = read_summary_tsv(f.g, in);
  CHECK(back.draws == summary.draws);
  REQUIRE(back.entries.size() == summary.entries.size());
  for (const auto& [id, entry] : summary.entries) {
    auto it = back.entries.find(id);
    REQUIRE(it != back.entries.end());
    CHECK(it->second.multiplicity == entry.multiplicity);
    CHECK(it->second.weight == entry.weight);
  }
  CHECK(back.tag.empty());
}

TEST_CASE("summary TSV rows must name triples of the graph") {
  Fixture f = star_fixture(2);
  std::istringstream in(
      "<http://x.test/e0>\t<http://x.test/r1>\t<http://x.test/e99>\t1\t1\n");
  CHECK_THROWS_WITH_AS(read_summary_tsv(f.g, in), doctest::Contains("not present"), Error);
}
