#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "corekg/kg.hpp"
#include "corekg/sensitivity.hpp"

namespace corekg {

// Smallest m with m >= 8*q/eps^2 * ln(1/delta). Requires eps,delta in (0,1)
// and q >= 1.
std::uint64_t required_sample_size(double epsilon, double delta,
                                   std::size_t answerable_queries);

struct SummaryEntry {
  std::uint64_t multiplicity = 0;  // times drawn
  double weight = 0.0;             // S / (draws * s(t))
};

// A weighted sample of triples. `draws` is the number of i.i.d. draws m the
// weights were normalized by; entries.size() is the distinct support. The
// estimator sum_t multiplicity_t * weight_t * s(t) equals S for any sample,
// and sum over entries of multiplicity equals draws.
struct WeightedSummary {
  std::map<TripleId, SummaryEntry> entries;
  std::uint64_t draws = 0;
  std::string tag;                 // workload the weights refer to
  double total_sensitivity = 0.0;  // S used in the weights
};

// m independent draws from dist by inverse CDF. Deterministic in (dist,
// seed): same inputs, same summary.
WeightedSummary sample_coreset(const SamplingDistribution& dist,
                               const SensitivityTable& table, std::uint64_t m,
                               std::uint64_t seed);

// Draws until `budget` distinct triples are held (or the whole support is
// in hand, or 50*budget draws have been spent; whichever first). Weights
// use the realized draw count. Draws are a prefix of the stream
// sample_coreset would consume, so growing the budget only extends the
// sample.
WeightedSummary sample_coreset_budget(const SamplingDistribution& dist,
                                      const SensitivityTable& table,
                                      std::uint64_t budget, std::uint64_t seed,
                                      bool* cap_hit = nullptr);

// sum over drawn triples of multiplicity * weight * c_t: the summary's
// estimate of full_cost(table). Throws Error when summary and table carry
// different nonempty tags (weights from one workload priced on another).
double coreset_cost(const WeightedSummary& summary, const SensitivityTable& table);

// The summary as a graph: distinct triples with their terms copied over.
// Throws Error on a TripleId the source graph does not hold.
KnowledgeGraph materialize_summary_graph(const WeightedSummary& summary,
                                         const KnowledgeGraph& g);

// subject<TAB>predicate<TAB>object<TAB>weight<TAB>multiplicity, N-Triples
// term syntax, ascending TripleId. Weights print shortest-round-trip, so
// write/read is lossless.
void write_summary_tsv(const KnowledgeGraph& g, const WeightedSummary& summary,
                       std::ostream& out);

// Reads a summary TSV back against the graph it was written from. Rows
// whose triple is absent from g are an error.
WeightedSummary read_summary_tsv(const KnowledgeGraph& g, std::istream& in);

}  // namespace corekg
