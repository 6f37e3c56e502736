#include "corekg/sensitivity.hpp"

#include <algorithm>
#include <ostream>

#include "corekg/errors.hpp"
#include "corekg/util.hpp"

namespace corekg {

SensitivityTable compute_sensitivity(const KnowledgeGraph& g,
                                     const std::vector<Query>& workload,
                                     RelevanceMode mode, std::string tag) {
  SensitivityTable table;
  table.tag = std::move(tag);
  table.s.assign(g.size(), 0.0);
  table.c.assign(g.size(), 0);
  table.workload_size = workload.size();

  std::vector<std::pair<TripleId, double>> contributions;
  for (const Query& q : workload) {
    std::vector<TripleId> tq = relevant_triples(g, q, mode);
    table.tq_sizes.emplace_back(q.id, tq.size());
    if (tq.empty()) continue;  // unanswerable: no share to distribute
    ++table.answerable;
    double share = 1.0 / static_cast<double>(tq.size());
    for (TripleId t : tq) contributions.emplace_back(t, share);
    for (TripleId t : tq) ++table.c[t];
  }

  // Summation order is canonicalized so any workload permutation produces
  // the bit-identical table.
  std::sort(contributions.begin(), contributions.end());
  for (const auto& [t, share] : contributions) table.s[t] += share;

  double total = 0.0;
  for (double v : table.s) total += v;
  table.total = total;
  return table;
}

double full_cost(const SensitivityTable& t) {
  double cost = 0.0;
  for (std::uint32_t c : t.c) cost += static_cast<double>(c);
  return cost;
}

SamplingDistribution sampling_distribution(const SensitivityTable& t) {
  if (t.total <= 0.0)
    throw NoSignalError("every sensitivity is zero; no query matched the graph");
  SamplingDistribution d;
  d.total = t.total;
  double running = 0.0;
  for (TripleId id = 0; id < t.s.size(); ++id) {
    if (t.s[id] <= 0.0) continue;
    d.support.push_back(id);
    double p = t.s[id] / t.total;
    d.prob.push_back(p);
    running += p;
    d.cumulative.push_back(running);
  }
  return d;
}

void dump_sensitivity_tsv(const SensitivityTable& t, std::ostream& out) {
  for (TripleId id = 0; id < t.s.size(); ++id) {
    if (t.s[id] <= 0.0) continue;
    out << id << '\t' << fmt_double(t.s[id]) << '\t' << t.c[id] << '\n';
  }
}

}  // namespace corekg
