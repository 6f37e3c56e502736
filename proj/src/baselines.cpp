#include "corekg/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "corekg/errors.hpp"

namespace corekg {

namespace {

// Constant table (s = 1, S = |T|): pushing it through the shared sampler
// makes every uniform weight exactly |T| / m.
SensitivityTable constant_table(const KnowledgeGraph& g) {
  if (g.size() == 0) throw Error("cannot sample from an empty graph");
  SensitivityTable t;
  t.s.assign(g.size(), 1.0);
  t.c.assign(g.size(), 0);
  t.total = static_cast<double>(g.size());
  return t;
}

}  // namespace

WeightedSummary uniform_coreset(const KnowledgeGraph& g, std::uint64_t m,
                                std::uint64_t seed) {
  SensitivityTable t = constant_table(g);
  return sample_coreset(sampling_distribution(t), t, m, seed);
}

WeightedSummary uniform_coreset_budget(const KnowledgeGraph& g, std::uint64_t budget,
                                       std::uint64_t seed, bool* cap_hit) {
  SensitivityTable t = constant_table(g);
  return sample_coreset_budget(sampling_distribution(t), t, budget, seed, cap_hit);
}

WeightedSummary strip_weights(WeightedSummary summary) {
  for (auto& [id, entry] : summary.entries) entry.weight = 1.0;
  summary.total_sensitivity = 0.0;  // weights no longer encode any S
  return summary;
}

std::unordered_map<Term, double, TermHash> ppr_scores(
    const KnowledgeGraph& g, const std::vector<Term>& seeds, const PprConfig& cfg,
    std::vector<std::string>* warnings) {
  if (!(cfg.damping > 0.0 && cfg.damping < 1.0)) throw ConfigError("damping must be in (0,1)");
  if (cfg.max_iterations == 0) throw ConfigError("max_iterations must be positive");
  if (!(cfg.l1_tolerance > 0.0)) throw ConfigError("tolerance must be positive");

  // Dense node indexing over terms that occur in subject or object position.
  std::vector<std::int32_t> node_of(g.term_count(), -1);
  std::vector<TermId> nodes;
  auto touch = [&](TermId id) {
    if (node_of[id] < 0) {
      node_of[id] = static_cast<std::int32_t>(nodes.size());
      nodes.push_back(id);
    }
  };
  for (TripleId t = 0; t < g.size(); ++t) {
    touch(g.triple(t).subject);
    touch(g.triple(t).object);
  }
  if (nodes.empty()) throw Error("graph has no nodes");

  std::vector<std::vector<std::int32_t>> nb(nodes.size());
  for (TripleId t = 0; t < g.size(); ++t) {
    std::int32_t a = node_of[g.triple(t).subject];
    std::int32_t b = node_of[g.triple(t).object];
    nb[a].push_back(b);
    if (a != b) nb[b].push_back(a);
  }
  for (auto& adj : nb) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }

  std::vector<std::int32_t> seed_idx;
  for (const Term& s : seeds) {
    std::optional<TermId> id = g.find_term(s);
    if (id && node_of[*id] >= 0) {
      seed_idx.push_back(node_of[*id]);
    } else if (warnings) {
      warnings->push_back("seed " + to_ntriples(s) + " is not a node of the graph; dropped");
    }
  }
  std::sort(seed_idx.begin(), seed_idx.end());
  seed_idx.erase(std::unique(seed_idx.begin(), seed_idx.end()), seed_idx.end());
  if (seed_idx.empty()) throw Error("no seed entity occurs in the graph");

  std::vector<double> restart(nodes.size(), 0.0);
  double mass = 1.0 / static_cast<double>(seed_idx.size());
  for (std::int32_t i : seed_idx) restart[i] = mass;

  // Power iteration. Every node has degree >= 1 (it occurs in a triple, and
  // self-loops count), so no rank mass ever dangles.
  std::vector<double> x = restart;
  std::vector<double> next(nodes.size());
  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    for (std::size_t v = 0; v < nodes.size(); ++v)
      next[v] = (1.0 - cfg.damping) * restart[v];
    for (std::size_t u = 0; u < nodes.size(); ++u) {
      double share = cfg.damping * x[u] / static_cast<double>(nb[u].size());
      for (std::int32_t v : nb[u]) next[v] += share;
    }
    double residual = 0.0;
    for (std::size_t v = 0; v < nodes.size(); ++v) residual += std::fabs(next[v] - x[v]);
    x.swap(next);
    if (residual < cfg.l1_tolerance) break;
  }

  double total = 0.0;
  for (double v : x) total += v;
  std::unordered_map<Term, double, TermHash> out;
  out.reserve(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) out.emplace(g.term(nodes[v]), x[v] / total);
  return out;
}

WeightedSummary ppr_summary(const KnowledgeGraph& g,
                            const std::unordered_map<Term, double, TermHash>& scores,
                            std::uint64_t budget, std::vector<std::string>* warnings) {
  if (budget == 0) throw ConfigError("budget must be positive");
  if (g.size() == 0) throw Error("cannot summarize an empty graph");

  auto score_of = [&](TermId id) {
    auto it = scores.find(g.term(id));
    return it == scores.end() ? 0.0 : it->second;
  };
  std::vector<std::pair<double, TripleId>> ranked;
  ranked.reserve(g.size());
  for (TripleId t = 0; t < g.size(); ++t)
    ranked.emplace_back(score_of(g.triple(t).subject) + score_of(g.triple(t).object), t);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::uint64_t take = std::min<std::uint64_t>(budget, ranked.size());
  if (take < budget && warnings)
    warnings->push_back("budget exceeds graph size; returning all " +
                        std::to_string(ranked.size()) + " triples");
  WeightedSummary summary;
  for (std::uint64_t i = 0; i < take; ++i)
    summary.entries[ranked[i].second] = SummaryEntry{1, 1.0};
  summary.draws = take;
  return summary;
}

}  // namespace corekg
