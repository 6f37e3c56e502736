#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "corekg/eval.hpp"
#include "corekg/kg.hpp"
#include "corekg/query.hpp"

namespace corekg {

struct CoverageWeights {
  double node = 0.5;
  double edge = 0.5;
};

// Per-query structural coverage: the weighted fraction of the query's
// constant IRIs (subject/object positions) present as nodes of the summary
// and of its constant predicates present as predicates of some summary
// triple. A query with no constants on one side renormalizes onto the
// other; with neither it is skipped. `value` is meaningful only when
// `scored`.
struct CoverageItem {
  std::uint64_t query_id = 0;
  bool scored = false;
  double value = 0.0;
  std::size_t nodes = 0, nodes_hit = 0;
  std::size_t edges = 0, edges_hit = 0;
};

// Mean CoverageItem value over scored queries. Throws Error when no query
// scores (skip counts reported through `skipped`).
double coverage(const KnowledgeGraph& summary, const std::vector<Query>& tests,
                CoverageWeights w = CoverageWeights{},
                std::vector<CoverageItem>* breakdown = nullptr,
                std::size_t* skipped = nullptr);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged scores from pooled counts. Empty denominators score 0.
Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct AnswerCounts {
  std::uint64_t query_id = 0;
  std::size_t tp = 0, fp = 0, fn = 0;
  std::size_t full_answers = 0, summary_answers = 0;
};

// Answer-level fidelity: evaluates every test query on the summary and on
// the full graph, pools TP/FP/FN over rows, and micro-averages. A summary
// that is a subgraph of `full` can produce no FP rows.
Prf answer_f1(const KnowledgeGraph& summary, const KnowledgeGraph& full,
              const std::vector<Query>& tests,
              std::vector<AnswerCounts>* breakdown = nullptr);

struct UserScore {
  std::string user_id;
  bool excluded = false;
  std::string exclusion_reason;
  double coverage = 0.0;
  Prf prf;
};

struct Aggregate {
  std::size_t users = 0;         // all users seen
  std::size_t scored_users = 0;  // users that entered the means
  double mean_coverage = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
};

// Unweighted means over non-excluded users. Throws Error on an empty list;
// zero scored users yields zero means with scored_users = 0.
Aggregate aggregate_users(const std::vector<UserScore>& scores);

}  // namespace corekg
