#include "corekg/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "corekg/errors.hpp"
#include "corekg/rng.hpp"
#include "corekg/util.hpp"

namespace corekg {

std::uint64_t required_sample_size(double epsilon, double delta,
                                   std::size_t answerable_queries) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  if (answerable_queries == 0) throw ConfigError("sample size needs at least one answerable query");
  double m = 8.0 * static_cast<double>(answerable_queries) / (epsilon * epsilon) *
             std::log(1.0 / delta);
  return static_cast<std::uint64_t>(std::ceil(m));
}

namespace {

TripleId draw_one(const SamplingDistribution& dist, Rng& rng) {
  double u = rng.next_double();
  auto it = std::upper_bound(dist.cumulative.begin(), dist.cumulative.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - dist.cumulative.begin());
  // Rounding can leave cumulative.back() a hair under 1; the final bucket
  // absorbs the sliver.
  if (idx >= dist.support.size()) idx = dist.support.size() - 1;
  return dist.support[idx];
}

void finish_weights(WeightedSummary& summary, const SensitivityTable& table,
                    std::uint64_t draws) {
  summary.draws = draws;
  summary.tag = table.tag;
  summary.total_sensitivity = table.total;
  for (auto& [id, entry] : summary.entries)
    entry.weight = table.total / (static_cast<double>(draws) * table.s[id]);
}

}  // namespace

WeightedSummary sample_coreset(const SamplingDistribution& dist,
                               const SensitivityTable& table, std::uint64_t m,
                               std::uint64_t seed) {
  if (m == 0) throw ConfigError("sample size must be positive");
  if (dist.support.empty()) throw NoSignalError("empty sampling distribution");
  Rng rng(seed);
  WeightedSummary summary;
  for (std::uint64_t i = 0; i < m; ++i) ++summary.entries[draw_one(dist, rng)].multiplicity;
  finish_weights(summary, table, m);
  return summary;
}

WeightedSummary sample_coreset_budget(const SamplingDistribution& dist,
                                      const SensitivityTable& table,
                                      std::uint64_t budget, std::uint64_t seed,
                                      bool* cap_hit) {
  if (budget == 0) throw ConfigError("budget must be positive");
  if (dist.support.empty()) throw NoSignalError("empty sampling distribution");
  std::uint64_t target = std::min<std::uint64_t>(budget, dist.support.size());
  std::uint64_t cap = 50 * budget;
  Rng rng(seed);
  WeightedSummary summary;
  std::uint64_t draws = 0;
  bool capped = false;
  while (summary.entries.size() < target) {
    if (draws == cap) {
      capped = true;
      break;
    }
    ++summary.entries[draw_one(dist, rng)].multiplicity;
    ++draws;
  }
  if (cap_hit) *cap_hit = capped;
  finish_weights(summary, table, draws);
  return summary;
}

double coreset_cost(const WeightedSummary& summary, const SensitivityTable& table) {
  if (!summary.tag.empty() && !table.tag.empty() && summary.tag != table.tag)
    throw Error("summary sampled for workload '" + summary.tag +
                "' cannot be priced on workload '" + table.tag + "'");
  double cost = 0.0;
  for (const auto& [id, entry] : summary.entries) {
    if (id >= table.c.size()) throw Error("summary holds a triple the table does not know");
    cost += static_cast<double>(entry.multiplicity) * entry.weight *
            static_cast<double>(table.c[id]);
  }
  return cost;
}

KnowledgeGraph materialize_summary_graph(const WeightedSummary& summary,
                                         const KnowledgeGraph& g) {
  KnowledgeGraph out;
  for (const auto& [id, entry] : summary.entries) {
    const EncodedTriple& t = g.triple(id);  // throws on unknown id
    out.add(g.term(t.subject), g.term(t.predicate), g.term(t.object));
  }
  out.freeze();
  return out;
}

void write_summary_tsv(const KnowledgeGraph& g, const WeightedSummary& summary,
                       std::ostream& out) {
  for (const auto& [id, entry] : summary.entries) {
    const EncodedTriple& t = g.triple(id);
    out << to_ntriples(g.term(t.subject)) << '\t' << to_ntriples(g.term(t.predicate))
        << '\t' << to_ntriples(g.term(t.object)) << '\t' << fmt_double(entry.weight)
        << '\t' << entry.multiplicity << '\n';
  }
}

WeightedSummary read_summary_tsv(const KnowledgeGraph& g, std::istream& in) {
  WeightedSummary summary;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty()) continue;
    std::vector<std::string_view> fields = split(v, '\t');
    if (fields.size() != 5)
      throw ParseError("summary line " + std::to_string(line_no) + ": expected 5 fields");
    std::string as_statement;
    as_statement.reserve(v.size() + 2);
    as_statement += fields[0];
    as_statement += ' ';
    as_statement += fields[1];
    as_statement += ' ';
    as_statement += fields[2];
    as_statement += " .";
    ParsedTripleLine terms = parse_ntriples_line(as_statement);
    auto s = g.find_term(terms.subject);
    auto p = g.find_term(terms.predicate);
    auto o = g.find_term(terms.object);
    std::optional<TripleId> id;
    if (s && p && o) id = g.find(*s, *p, *o);
    if (!id)
      throw Error("summary line " + std::to_string(line_no) + ": triple not present in graph");
    SummaryEntry& entry = summary.entries[*id];
    entry.weight = parse_double(fields[3]);
    entry.multiplicity = parse_u64(fields[4]);
    summary.draws += entry.multiplicity;
  }
  return summary;
}

}  // namespace corekg
