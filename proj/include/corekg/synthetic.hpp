#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace corekg {

// Zipf-skewed synthetic benchmark. Entities e0..e{n-1} carry popularity
// proportional to (rank+1)^-skew; triples are distinct (subject, relation,
// object) draws; queries are 1-3 pattern BGPs anchored at popular entities
// and built from triples that actually exist, except for a small
// deliberately-unanswerable slice (existing entity, relation it never
// uses). Fixed seed, fixed files, byte for byte.
struct SyntheticSpec {
  std::uint64_t entities = 100;
  std::uint64_t relations = 10;
  std::uint64_t triples = 1000;
  std::uint64_t queries = 50;
  double skew = 1.0;
  double unanswerable_fraction = 0.05;
  std::uint64_t seed = 0;
};

struct SyntheticStats {
  std::uint64_t triples = 0;
  std::uint64_t queries = 0;
  std::uint64_t unanswerable_queries = 0;  // by construction
};

// Writes an N-Triples dataset and a `###`-separated workload. Errors when
// counts are infeasible: entities/relations < 1, skew < 0, queries >= 1
// with triples == 0, or triples exceeding the entities^2 * relations
// distinct-triple ceiling.
SyntheticStats generate_synthetic(const SyntheticSpec& spec, std::ostream& dataset,
                                  std::ostream& workload);
SyntheticStats generate_synthetic_files(const SyntheticSpec& spec,
                                        const std::string& dataset_path,
                                        const std::string& workload_path);

}  // namespace corekg
