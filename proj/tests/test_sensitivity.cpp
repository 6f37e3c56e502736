#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "corekg/errors.hpp"
#include "corekg/eval.hpp"
#include "corekg/kg.hpp"
#include "corekg/query.hpp"
#include "corekg/rng.hpp"
#include "corekg/sensitivity.hpp"
#include "corekg/synthetic.hpp"
#include "corekg/util.hpp"
#include "corekg/workload.hpp"

using namespace corekg;

namespace {

Term e(int i) { return Term::iri("http://x.test/e" + std::to_string(i)); }
Term r(int i) { return Term::iri("http://x.test/r" + std::to_string(i)); }

Query pattern_query(PatternTerm s, PatternTerm p, PatternTerm o) {
  Query q;
  q.bgp.push_back({std::move(s), std::move(p), std::move(o)});
  q.id = fnv1a64(render_query(q.projection, q.bgp));
  return q;
}

// Chain a->b->c over r1 plus one disjoint r2 edge.
KnowledgeGraph chain_graph() {
  KnowledgeGraph g;
  g.add(e(1), r(1), e(2));  // t0
  g.add(e(2), r(1), e(3));  // t1
  g.add(e(4), r(2), e(5));  // t2
  g.freeze();
  return g;
}

}  // namespace

TEST_CASE("each answerable query distributes exactly one unit of sensitivity") {
  KnowledgeGraph g = chain_graph();
  std::vector<Query> workload;
  workload.push_back(pattern_query(e(1), r(1), Variable{"x"}));  // T = {t0}
  workload.push_back(pattern_query(e(4), r(2), Variable{"x"}));  // T = {t2}
  SensitivityTable t = compute_sensitivity(g, workload, RelevanceMode::JoinConsistent);
  CHECK(t.s == std::vector<double>{1.0, 0.0, 1.0});
  CHECK(t.c == std::vector<std::uint32_t>{1, 0, 1});
  CHECK(t.total == 2.0);
  CHECK(t.answerable == 2);
  CHECK(t.workload_size == 2);
}

TEST_CASE("join queries split their unit across the instantiated triples") {
  KnowledgeGraph g = chain_graph();
  Query join;
  join.bgp.push_back({Variable{"x"}, r(1), Variable{"y"}});
  join.bgp.push_back({Variable{"y"}, r(1), Variable{"z"}});
  join.id = 11;
  Query single = pattern_query(e(1), r(1), Variable{"x"});
  single.id = 22;
  SensitivityTable t =
      compute_sensitivity(g, {join, single}, RelevanceMode::JoinConsistent);
  // join touches {t0, t1} with share 1/2 each; single adds 1 to t0.
  CHECK(t.s == std::vector<double>{1.5, 0.5, 0.0});
  CHECK(t.c == std::vector<std::uint32_t>{2, 1, 0});
  CHECK(t.total == 2.0);
  CHECK(full_cost(t) == 3.0);
  REQUIRE(t.tq_sizes.size() == 2);
  CHECK(t.tq_sizes[0] == std::pair<std::uint64_t, std::size_t>{11, 2});
  CHECK(t.tq_sizes[1] == std::pair<std::uint64_t, std::size_t>{22, 1});
}

TEST_CASE("unanswerable queries contribute nothing but are counted") {
  KnowledgeGraph g = chain_graph();
  std::vector<Query> workload;
  workload.push_back(pattern_query(e(1), r(1), Variable{"x"}));
  workload.push_back(pattern_query(e(9), r(1), Variable{"x"}));  // e9 absent
  SensitivityTable t = compute_sensitivity(g, workload, RelevanceMode::JoinConsistent);
  CHECK(t.total == 1.0);
  CHECK(t.answerable == 1);
  CHECK(t.workload_size == 2);
}

TEST_CASE("total sensitivity equals the answerable count on random instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticSpec spec;
    spec.entities = 40;
    spec.relations = 5;
    spec.triples = 300;
    spec.queries = 60;
    spec.unanswerable_fraction = 0.1;
    spec.seed = seed;
    std::ostringstream dataset, workload_text;
    generate_synthetic(spec, dataset, workload_text);
    std::istringstream din(dataset.str()), win(workload_text.str());
    KnowledgeGraph g = parse_ntriples(din);
    std::vector<Query> qs = load_workload(win, PrefixMap::builtin());
    SensitivityTable t = compute_sensitivity(g, qs, RelevanceMode::JoinConsistent);
    std::size_t answerable = 0;
    for (const Query& q : qs)
      if (!evaluate_bgp(g, q).empty()) ++answerable;
    CHECK(t.total == doctest::Approx(static_cast<double>(answerable)).epsilon(1e-12));
    CHECK(t.answerable == answerable);
  }
}

TEST_CASE("permuting the workload leaves the table bit-identical") {
  KnowledgeGraph g = chain_graph();
  std::vector<Query> workload;
  Query join;
  join.bgp.push_back({Variable{"x"}, r(1), Variable{"y"}});
  join.bgp.push_back({Variable{"y"}, r(1), Variable{"z"}});
  join.id = 1;
  workload.push_back(join);
  workload.push_back(pattern_query(e(1), r(1), Variable{"x"}));
  workload.push_back(pattern_query(e(2), r(1), Variable{"x"}));
  workload.push_back(pattern_query(e(4), r(2), Variable{"x"}));

  SensitivityTable base = compute_sensitivity(g, workload, RelevanceMode::JoinConsistent);
  std::vector<Query> shuffled = workload;
  Rng rng(8);
  for (int round = 0; round < 10; ++round) {
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    SensitivityTable t = compute_sensitivity(g, shuffled, RelevanceMode::JoinConsistent);
    CHECK(t.s == base.s);
    CHECK(t.total == base.total);
  }
}

TEST_CASE("relevance mode changes the shares") {
  // Dangling r1 edge matches the first pattern alone, so PerPattern
  // spreads the join query's unit over three triples instead of two.
  KnowledgeGraph g;
  g.add(e(1), r(1), e(2));
  g.add(e(2), r(1), e(3));
  g.add(e(4), r(1), e(5));
  g.freeze();
  Query join;
  join.bgp.push_back({Variable{"x"}, r(1), Variable{"y"}});
  join.bgp.push_back({Variable{"y"}, r(1), Variable{"z"}});
  join.id = 1;
  SensitivityTable jc = compute_sensitivity(g, {join}, RelevanceMode::JoinConsistent);
  SensitivityTable pp = compute_sensitivity(g, {join}, RelevanceMode::PerPattern);
  CHECK(jc.s == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(pp.s[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(pp.s[2] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(jc.total == 1.0);
  CHECK(pp.total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sampling_distribution normalizes over the positive support") {
  KnowledgeGraph g = chain_graph();
  Query join;
  join.bgp.push_back({Variable{"x"}, r(1), Variable{"y"}});
  join.bgp.push_back({Variable{"y"}, r(1), Variable{"z"}});
  join.id = 1;
  Query single = pattern_query(e(1), r(1), Variable{"x"});
  single.id = 2;
  SensitivityTable t = compute_sensitivity(g, {join, single}, RelevanceMode::JoinConsistent);
  SamplingDistribution dist = sampling_distribution(t);
  CHECK(dist.support == std::vector<TripleId>{0, 1});
  CHECK(dist.prob == std::vector<double>{0.75, 0.25});
  CHECK(dist.cumulative == std::vector<double>{0.75, 1.0});
  CHECK(dist.total == 2.0);
}

TEST_CASE("sampling_distribution probabilities sum to one on larger tables") {
  SyntheticSpec spec;
  spec.entities = 50;
  spec.relations = 6;
  spec.triples = 400;
  spec.queries = 80;
  spec.seed = 3;
  std::ostringstream dataset, workload_text;
  generate_synthetic(spec, dataset, workload_text);
  std::istringstream din(dataset.str()), win(workload_text.str());
  KnowledgeGraph g = parse_ntriples(din);
  std::vector<Query> qs = load_workload(win, PrefixMap::builtin());
  SamplingDistribution dist =
      sampling_distribution(compute_sensitivity(g, qs, RelevanceMode::JoinConsistent));
  double sum = 0.0;
  for (double p : dist.prob) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::is_sorted(dist.support.begin(), dist.support.end()));
  CHECK(dist.cumulative.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("an all-zero table cannot be sampled") {
  KnowledgeGraph g = chain_graph();
  std::vector<Query> dead{pattern_query(e(9), r(1), Variable{"x"})};
  SensitivityTable t = compute_sensitivity(g, dead, RelevanceMode::JoinConsistent);
  CHECK_THROWS_AS(sampling_distribution(t), NoSignalError);
}

TEST_CASE("sensitivity dump lists only the positive rows") {
  KnowledgeGraph g = chain_graph();
  Query join;
  join.bgp.push_back({Variable{"x"}, r(1), Variable{"y"}});
  join.bgp.push_back({Variable{"y"}, r(1), Variable{"z"}});
  join.id = 1;
  Query single = pattern_query(e(1), r(1), Variable{"x"});
  single.id = 2;
  SensitivityTable t = compute_sensitivity(g, {join, single}, RelevanceMode::JoinConsistent);
  std::ostringstream out;
  dump_sensitivity_tsv(t, out);
  CHECK(out.str() == "0\t1.5\t2\n1\t0.5\t1\n");
}

TEST_CASE("the tag travels with the table") {
  KnowledgeGraph g = chain_graph();
  std::vector<Query> workload{pattern_query(e(1), r(1), Variable{"x"})};
  SensitivityTable t =
      compute_sensitivity(g, workload, RelevanceMode::JoinConsistent, "user07");
  CHECK(t.tag == "user07");
}
