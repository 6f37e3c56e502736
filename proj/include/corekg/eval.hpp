#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "corekg/kg.hpp"
#include "corekg/query.hpp"

namespace corekg {

// One solution mapping, keyed by variable name. Values are materialized
// terms, so bindings from different graphs compare meaningfully.
using Binding = std::map<std::string, Term>;

// Projected solutions as a set of rows; `columns` fixes the row layout.
struct AnswerSet {
  std::vector<std::string> columns;
  std::set<std::vector<Term>> rows;

  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;
};

// Which triples count as relevant to a query. JoinConsistent instantiates
// each pattern under every full solution; PerPattern unions raw index
// matches of each pattern in isolation.
enum class RelevanceMode { JoinConsistent, PerPattern };

// All solution mappings of the BGP over g (bag semantics never arises: each
// mapping is produced once). Join order is chosen greedily by ascending
// constant-bound candidate count, preferring patterns that share a variable
// with those already placed; ties break on pattern index.
std::vector<Binding> evaluate_bgp(const KnowledgeGraph& g, const Query& q);

// Same engine under a forced join order (a permutation of pattern indexes).
// Exists so tests can assert the solution set is order-invariant.
std::vector<Binding> evaluate_bgp_ordered(const KnowledgeGraph& g, const Query& q,
                                          std::span<const std::size_t> order);

// Distinct ids of triples relevant to q under `mode`, ascending.
std::vector<TripleId> relevant_triples(const KnowledgeGraph& g, const Query& q,
                                       RelevanceMode mode);

// Applies the projection (empty = all variables, lexicographic) and
// deduplicates rows. Throws Error if a projected name is missing from a
// binding.
AnswerSet project_answers(const std::vector<Binding>& bindings,
                          const std::vector<std::string>& projection);

// evaluate + project in one step.
AnswerSet answer_query(const KnowledgeGraph& g, const Query& q);

}  // namespace corekg
