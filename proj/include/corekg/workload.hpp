#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "corekg/query.hpp"

namespace corekg {

struct WorkloadStats {
  std::size_t records = 0;    // non-empty records seen
  std::size_t skipped = 0;    // records that failed normalize/parse
  std::size_t duplicates = 0; // records merged into an earlier query
};

// Reads a workload file: records separated by lines containing only `###`,
// each record one SPARQL query (possibly multi-line). Records are
// normalized against the fixed prefix map, parsed, and deduplicated by
// query id. Bad records are skipped and counted unless `strict`.
std::vector<Query> load_workload(std::istream& in, const PrefixMap& fixed,
                                 WorkloadStats* stats = nullptr, bool strict = false,
                                 std::vector<std::string>* warnings = nullptr);
std::vector<Query> load_workload_file(const std::string& path, const PrefixMap& fixed,
                                      WorkloadStats* stats = nullptr, bool strict = false,
                                      std::vector<std::string>* warnings = nullptr);

struct SplitResult {
  std::vector<Query> train;
  std::vector<Query> test;
};

// Deterministic shuffle-split. `ratio` in (0,1) is the train fraction;
// sizes are floor(n*ratio) : rest, and a nonempty workload always yields a
// nonempty train side (the first shuffled query goes to train when the
// floor is zero). Same seed, same queries => same split regardless of input
// order (queries are pre-sorted by id before shuffling).
SplitResult split_workload(std::vector<Query> queries, double ratio, std::uint64_t seed);

struct UserProfile {
  std::string user_id;
  std::vector<Term> seeds;  // distinct IRIs, sampled without replacement
};

// Samples k seed entities for a user from the pool of constant IRIs in the
// train queries (first-appearance order, subjects/objects only). When the
// pool holds fewer than k entities the whole pool is taken, one warning.
// An empty pool is an error.
UserProfile build_user_profile(const std::vector<Query>& train, std::size_t k,
                               std::uint64_t seed, std::string user_id,
                               std::vector<std::string>* warnings = nullptr);

// Queries mentioning at least one profile seed among their constant IRIs
// (subject/object positions), in input order.
std::vector<Query> personalize(const std::vector<Query>& queries,
                               const UserProfile& profile);

// profiles.tsv: `user_id<TAB>seed1,...,seedk` with N-Triples-rendered seeds,
// one line per user, user order preserved.
void write_profiles(std::ostream& out, const std::vector<UserProfile>& profiles);
std::vector<UserProfile> read_profiles(std::istream& in);

}  // namespace corekg
