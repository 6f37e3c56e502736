#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "corekg/coreset.hpp"
#include "corekg/kg.hpp"
#include "corekg/term.hpp"

namespace corekg {

// Uniform i.i.d. draws over all triple ids; every drawn triple carries
// weight |T|/m. Routed through the shared inverse-CDF sampler with a
// constant table (s=1, S=|T|), which reproduces |T|/m bit-exactly.
WeightedSummary uniform_coreset(const KnowledgeGraph& g, std::uint64_t m,
                                std::uint64_t seed);

// Budget-mode counterpart: draws until `budget` distinct triples.
WeightedSummary uniform_coreset_budget(const KnowledgeGraph& g, std::uint64_t budget,
                                       std::uint64_t seed, bool* cap_hit = nullptr);

// Same support and multiplicities, every weight forced to 1. The returned
// summary no longer estimates workload cost.
WeightedSummary strip_weights(WeightedSummary summary);

struct PprConfig {
  double damping = 0.85;
  std::size_t max_iterations = 100;
  double l1_tolerance = 1e-8;
};

// Personalized PageRank over the undirected subject--object view of g
// (deduplicated neighbor sets, self-loops kept; predicates are not nodes).
// Restart mass is uniform over the seeds present in g; absent seeds are
// dropped with a warning, all-absent is an error. Scores are renormalized
// to sum exactly 1 and cover every node.
std::unordered_map<Term, double, TermHash> ppr_scores(
    const KnowledgeGraph& g, const std::vector<Term>& seeds,
    const PprConfig& cfg = PprConfig{}, std::vector<std::string>* warnings = nullptr);

// Top-`budget` triples ranked by score(subject) + score(object), descending,
// ties broken by ascending TripleId; weight 1 each. A budget beyond |T|
// returns the whole graph with a warning.
WeightedSummary ppr_summary(const KnowledgeGraph& g,
                            const std::unordered_map<Term, double, TermHash>& scores,
                            std::uint64_t budget,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace corekg
