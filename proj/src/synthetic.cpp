#include "corekg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <unordered_set>
#include <vector>

#include "corekg/errors.hpp"
#include "corekg/rng.hpp"

namespace corekg {

namespace {

constexpr const char* kEntityNs = "http://synth.example/e/";
constexpr const char* kRelationNs = "http://synth.example/r/";

struct Zipf {
  std::vector<double> cumulative;

  Zipf(std::uint64_t n, double skew) {
    cumulative.reserve(n);
    double running = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      running += std::pow(static_cast<double>(i + 1), -skew);
      cumulative.push_back(running);
    }
  }

  std::uint64_t draw(Rng& rng) const {
    double u = rng.next_double() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= cumulative.size()) idx = cumulative.size() - 1;
    return idx;
  }
};

struct Edge {
  std::uint64_t s, r, o;
};

std::string ent(std::uint64_t i) { return "e:e" + std::to_string(i); }
std::string rel(std::uint64_t j) { return "r:r" + std::to_string(j); }

}  // namespace

SyntheticStats generate_synthetic(const SyntheticSpec& spec, std::ostream& dataset,
                                  std::ostream& workload) {
  if (spec.entities == 0 || spec.relations == 0)
    throw ConfigError("need at least one entity and one relation");
  if (spec.skew < 0.0) throw ConfigError("skew must be nonnegative");
  if (!(spec.unanswerable_fraction >= 0.0 && spec.unanswerable_fraction <= 0.1))
    throw ConfigError("unanswerable fraction must be in [0, 0.1]");
  if (spec.queries > 0 && spec.triples == 0)
    throw ConfigError("cannot generate queries over zero triples");
  if (spec.entities > (1ull << 24) || spec.relations > (1ull << 16))
    throw ConfigError("generator supports up to 2^24 entities and 2^16 relations");
  if (spec.triples > spec.entities * spec.entities * spec.relations)
    throw ConfigError("more distinct triples requested than (s,r,o) combinations exist");

  Rng rng(substream_seed(spec.seed, kStreamSynthetic));
  Zipf entity_dist(spec.entities, spec.skew);

  auto pack = [&](std::uint64_t s, std::uint64_t r, std::uint64_t o) {
    return (s << 40) | (r << 24) | o;
  };

  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  edges.reserve(spec.triples);
  std::uint64_t attempts = 0;
  std::uint64_t attempt_cap = 100 * spec.triples + 10000;
  while (edges.size() < spec.triples && attempts < attempt_cap) {
    ++attempts;
    Edge e{entity_dist.draw(rng), rng.below(spec.relations), entity_dist.draw(rng)};
    if (seen.insert(pack(e.s, e.r, e.o)).second) edges.push_back(e);
  }
  // Dense corner (requested count close to the ceiling): finish by sweeping
  // the combination space in a fixed order.
  for (std::uint64_t s = 0; s < spec.entities && edges.size() < spec.triples; ++s)
    for (std::uint64_t r = 0; r < spec.relations && edges.size() < spec.triples; ++r)
      for (std::uint64_t o = 0; o < spec.entities && edges.size() < spec.triples; ++o)
        if (seen.insert(pack(s, r, o)).second) edges.push_back(Edge{s, r, o});

  for (const Edge& e : edges) {
    dataset << '<' << kEntityNs << 'e' << e.s << "> <" << kRelationNs << 'r' << e.r
            << "> <" << kEntityNs << 'e' << e.o << "> .\n";
  }

  std::vector<std::vector<std::size_t>> out_of(spec.entities), in_of(spec.entities);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out_of[edges[i].s].push_back(i);
    in_of[edges[i].o].push_back(i);
  }
  std::vector<std::unordered_set<std::uint64_t>> used_relations(spec.entities);
  for (const Edge& e : edges) used_relations[e.s].insert(e.r);
  std::uint64_t first_incident = spec.entities;
  for (std::uint64_t i = 0; i < spec.entities; ++i) {
    if (!out_of[i].empty() || !in_of[i].empty()) {
      first_incident = i;
      break;
    }
  }

  auto pick_anchor = [&]() {
    for (int tries = 0; tries < 1000; ++tries) {
      std::uint64_t e = entity_dist.draw(rng);
      if (!out_of[e].empty() || !in_of[e].empty()) return e;
    }
    return first_incident;
  };

  SyntheticStats stats;
  stats.triples = edges.size();

  // The unanswerable quota is exact, spread evenly over the query stream.
  std::uint64_t unanswerable_quota = static_cast<std::uint64_t>(
      spec.unanswerable_fraction * static_cast<double>(spec.queries));

  std::string record;
  for (std::uint64_t qi = 0; qi < spec.queries; ++qi) {
    std::vector<std::string> patterns;
    std::vector<std::string> vars;
    bool unanswerable = false;
    bool want_unanswerable =
        spec.queries > 0 && ((qi + 1) * unanswerable_quota) / spec.queries >
                                (qi * unanswerable_quota) / spec.queries;

    if (want_unanswerable) {
      // An entity that exists paired with a relation it never uses: the
      // pattern is well-formed yet can have no matches.
      for (int tries = 0; tries < 100 && !unanswerable; ++tries) {
        std::uint64_t e = pick_anchor();
        if (used_relations[e].size() >= spec.relations) continue;
        std::uint64_t r = rng.below(spec.relations);
        while (used_relations[e].count(r)) r = (r + 1) % spec.relations;
        patterns.push_back(ent(e) + " " + rel(r) + " ?x");
        vars = {"x"};
        unanswerable = true;
      }
    }

    if (!unanswerable) {
      std::uint64_t anchor = pick_anchor();
      double shape = rng.next_double();
      std::size_t want = shape < 0.45 ? 1 : (shape < 0.80 ? 2 : 3);

      auto add_single = [&](std::uint64_t e) {
        // One pattern anchored at e, built from an incident triple.
        std::vector<int> kinds;
        if (!out_of[e].empty()) kinds.push_back(0);   // e r ?x
        if (!in_of[e].empty()) kinds.push_back(1);    // ?s r e
        if (!out_of[e].empty()) kinds.push_back(2);   // e ?p ?o
        int kind = kinds[rng.below(kinds.size())];
        if (kind == 0) {
          const Edge& t = edges[out_of[e][rng.below(out_of[e].size())]];
          patterns.push_back(ent(e) + " " + rel(t.r) + " ?x");
          vars = {"x"};
        } else if (kind == 1) {
          const Edge& t = edges[in_of[e][rng.below(in_of[e].size())]];
          patterns.push_back("?s " + rel(t.r) + " " + ent(e));
          vars = {"s"};
        } else {
          patterns.push_back(ent(e) + " ?p ?o");
          vars = {"p", "o"};
        }
      };

      auto add_star2 = [&](std::uint64_t e) {
        std::size_t n = out_of[e].size();
        std::size_t a = rng.below(n);
        std::size_t b = rng.below(n - 1);
        if (b >= a) ++b;
        patterns.push_back(ent(e) + " " + rel(edges[out_of[e][a]].r) + " ?x");
        patterns.push_back(ent(e) + " " + rel(edges[out_of[e][b]].r) + " ?y");
        vars = {"x", "y"};
      };

      if (want == 3) {
        const Edge* t1 = out_of[anchor].empty()
                             ? nullptr
                             : &edges[out_of[anchor][rng.below(out_of[anchor].size())]];
        const Edge* t2 = (t1 && !out_of[t1->o].empty())
                             ? &edges[out_of[t1->o][rng.below(out_of[t1->o].size())]]
                             : nullptr;
        const Edge* t3 = (t2 && !out_of[t2->o].empty())
                             ? &edges[out_of[t2->o][rng.below(out_of[t2->o].size())]]
                             : nullptr;
        if (t3) {
          patterns.push_back(ent(anchor) + " " + rel(t1->r) + " ?x");
          patterns.push_back("?x " + rel(t2->r) + " ?y");
          patterns.push_back("?y " + rel(t3->r) + " ?z");
          vars = {"x", "y", "z"};
        } else if (out_of[anchor].size() >= 3) {
          add_star2(anchor);
          std::size_t c = rng.below(out_of[anchor].size());
          patterns.push_back(ent(anchor) + " " + rel(edges[out_of[anchor][c]].r) + " ?z");
          vars = {"x", "y", "z"};
        } else {
          want = 2;
        }
      }
      if (want == 2 && patterns.empty()) {
        const Edge* t1 = out_of[anchor].empty()
                             ? nullptr
                             : &edges[out_of[anchor][rng.below(out_of[anchor].size())]];
        if (t1 && !out_of[t1->o].empty()) {
          const Edge& t2 = edges[out_of[t1->o][rng.below(out_of[t1->o].size())]];
          patterns.push_back(ent(anchor) + " " + rel(t1->r) + " ?x");
          patterns.push_back("?x " + rel(t2.r) + " ?y");
          vars = {"x", "y"};
        } else if (out_of[anchor].size() >= 2) {
          add_star2(anchor);
        } else {
          want = 1;
        }
      }
      if (want == 1 && patterns.empty()) add_single(anchor);
    } else {
      ++stats.unanswerable_queries;
    }

    double proj = rng.next_double();
    std::string head;
    if (proj < 0.5) {
      head = "SELECT";
      for (const std::string& v : vars) head += " ?" + v;
    } else if (proj < 0.8) {
      head = "SELECT ?" + vars[rng.below(vars.size())];
    } else {
      head = "SELECT *";
    }

    record.clear();
    record += "PREFIX e: <";
    record += kEntityNs;
    record += ">\nPREFIX r: <";
    record += kRelationNs;
    record += ">\n";
    record += head;
    record += " WHERE {\n";
    for (const std::string& p : patterns) {
      record += "  ";
      record += p;
      record += " .\n";
    }
    record += "}\n";
    workload << record << "###\n";
    ++stats.queries;
  }

  return stats;
}

SyntheticStats generate_synthetic_files(const SyntheticSpec& spec,
                                        const std::string& dataset_path,
                                        const std::string& workload_path) {
  std::ofstream ds(dataset_path, std::ios::binary | std::ios::trunc);
  if (!ds) throw IoError("cannot open " + dataset_path + " for writing");
  std::ofstream wl(workload_path, std::ios::binary | std::ios::trunc);
  if (!wl) throw IoError("cannot open " + workload_path + " for writing");
  SyntheticStats stats = generate_synthetic(spec, ds, wl);
  if (!ds || !wl) throw IoError("write failed");
  return stats;
}

}  // namespace corekg
