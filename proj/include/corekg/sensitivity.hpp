#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "corekg/eval.hpp"
#include "corekg/kg.hpp"
#include "corekg/query.hpp"

namespace corekg {

// Workload-induced importance of every triple. For query q with relevant
// set T_q, each t in T_q receives 1/|T_q|; s[t] sums those shares and
// total = sum_t s[t] equals the number of answerable queries exactly (each
// answerable query distributes exactly 1). c[t] counts how many queries
// touch t, so sum_t c[t] = sum_q |T_q| is the workload cost of the full
// graph. Unanswerable queries (empty T_q) contribute nothing.
struct SensitivityTable {
  std::string tag;  // workload label; "" means untagged
  std::vector<double> s;          // indexed by TripleId, size = graph size
  std::vector<std::uint32_t> c;   // queries touching each triple
  double total = 0.0;
  std::size_t workload_size = 0;
  std::size_t answerable = 0;
  std::vector<std::pair<std::uint64_t, std::size_t>> tq_sizes;  // (query id, |T_q|)
};

// Accumulation is order-canonical: all (triple, share) contributions are
// collected, sorted by (id, share), then summed, so permuting the workload
// yields a bit-identical table.
SensitivityTable compute_sensitivity(const KnowledgeGraph& g,
                                     const std::vector<Query>& workload,
                                     RelevanceMode mode, std::string tag = std::string());

// sum_q |T_q|, the cost an exact summary must reproduce.
double full_cost(const SensitivityTable& t);

// Normalized sampling weights over triples with s > 0, support ascending by
// TripleId, cumulative sums inclusive. Throws NoSignalError when total <= 0.
struct SamplingDistribution {
  std::vector<TripleId> support;
  std::vector<double> prob;
  std::vector<double> cumulative;
  double total = 0.0;  // the S the probabilities were formed from
};

SamplingDistribution sampling_distribution(const SensitivityTable& t);

// triple_id<TAB>s<TAB>c for every triple with s > 0, ascending id.
void dump_sensitivity_tsv(const SensitivityTable& t, std::ostream& out);

}  // namespace corekg
