#include "corekg/metrics.hpp"

#include <algorithm>
#include <set>

#include "corekg/errors.hpp"

namespace corekg {

namespace {

bool node_present(const KnowledgeGraph& summary, const Term& t) {
  std::optional<TermId> id = summary.find_term(t);
  if (!id) return false;
  return summary.occurs_as_subject(*id) || summary.occurs_as_object(*id);
}

bool edge_present(const KnowledgeGraph& summary, const Term& p) {
  std::optional<TermId> id = summary.find_term(p);
  if (!id) return false;
  return summary.occurs_as_predicate(*id);
}

}  // namespace

double coverage(const KnowledgeGraph& summary, const std::vector<Query>& tests,
                CoverageWeights w, std::vector<CoverageItem>* breakdown,
                std::size_t* skipped) {
  if (w.node < 0.0 || w.edge < 0.0 || w.node + w.edge <= 0.0)
    throw ConfigError("coverage weights must be nonnegative and not both zero");
  double sum = 0.0;
  std::size_t scored = 0, skip = 0;
  for (const Query& q : tests) {
    CoverageItem item;
    item.query_id = q.id;

    std::vector<Term> nodes = extract_entities(q);
    std::set<Term> edges;
    for (const TriplePattern& p : q.bgp) {
      if (std::holds_alternative<Term>(p.predicate)) edges.insert(std::get<Term>(p.predicate));
    }

    item.nodes = nodes.size();
    for (const Term& t : nodes)
      if (node_present(summary, t)) ++item.nodes_hit;
    item.edges = edges.size();
    for (const Term& p : edges)
      if (edge_present(summary, p)) ++item.edges_hit;

    double denom = (item.nodes ? w.node : 0.0) + (item.edges ? w.edge : 0.0);
    if (denom <= 0.0) {
      // No constants at all (e.g. SELECT * { ?s ?p ?o }): nothing to cover.
      ++skip;
      if (breakdown) breakdown->push_back(item);
      continue;
    }
    double value = 0.0;
    if (item.nodes)
      value += w.node * (static_cast<double>(item.nodes_hit) / static_cast<double>(item.nodes));
    if (item.edges)
      value += w.edge * (static_cast<double>(item.edges_hit) / static_cast<double>(item.edges));
    item.value = value / denom;
    item.scored = true;
    sum += item.value;
    ++scored;
    if (breakdown) breakdown->push_back(item);
  }
  if (skipped) *skipped = skip;
  if (!scored) throw Error("coverage is undefined: no test query holds a constant");
  return sum / static_cast<double>(scored);
}

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf out;
  if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

Prf answer_f1(const KnowledgeGraph& summary, const KnowledgeGraph& full,
              const std::vector<Query>& tests, std::vector<AnswerCounts>* breakdown) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const Query& q : tests) {
    AnswerSet on_full = answer_query(full, q);
    AnswerSet on_summary = answer_query(summary, q);
    AnswerCounts counts;
    counts.query_id = q.id;
    counts.full_answers = on_full.rows.size();
    counts.summary_answers = on_summary.rows.size();
    for (const auto& row : on_summary.rows) {
      if (on_full.rows.count(row))
        ++counts.tp;
      else
        ++counts.fp;
    }
    counts.fn = counts.full_answers - counts.tp;
    tp += counts.tp;
    fp += counts.fp;
    fn += counts.fn;
    if (breakdown) breakdown->push_back(counts);
  }
  return prf_from_counts(tp, fp, fn);
}

Aggregate aggregate_users(const std::vector<UserScore>& scores) {
  if (scores.empty()) throw Error("nothing to aggregate");
  Aggregate agg;
  agg.users = scores.size();
  for (const UserScore& u : scores) {
    if (u.excluded) continue;
    ++agg.scored_users;
    agg.mean_coverage += u.coverage;
    agg.mean_precision += u.prf.precision;
    agg.mean_recall += u.prf.recall;
    agg.mean_f1 += u.prf.f1;
  }
  if (agg.scored_users) {
    double n = static_cast<double>(agg.scored_users);
    agg.mean_coverage /= n;
    agg.mean_precision /= n;
    agg.mean_recall /= n;
    agg.mean_f1 /= n;
  }
  return agg;
}

}  // namespace corekg
