#include "corekg/workload.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "corekg/errors.hpp"
#include "corekg/rng.hpp"
#include "corekg/util.hpp"

namespace corekg {

std::vector<Query> load_workload(std::istream& in, const PrefixMap& fixed,
                                 WorkloadStats* stats, bool strict,
                                 std::vector<std::string>* warnings) {
  std::vector<Query> out;
  std::unordered_set<std::uint64_t> seen;
  WorkloadStats local;

  std::string record;
  std::string line;
  std::size_t record_no = 0;
  auto flush = [&]() {
    std::string body(trim(record));
    record.clear();
    if (body.empty()) return;
    ++record_no;
    ++local.records;
    try {
      std::string normalized = normalize(body, fixed);
      Query q = parse_query(normalized, warnings);
      if (seen.insert(q.id).second)
        out.push_back(std::move(q));
      else
        ++local.duplicates;
    } catch (const ParseError& e) {
      if (strict)
        throw ParseError("workload record " + std::to_string(record_no) + ": " + e.what());
      ++local.skipped;
    }
  };

  while (std::getline(in, line)) {
    if (trim(line) == "###") {
      flush();
      continue;
    }
    record += line;
    record += '\n';
  }
  flush();

  if (stats) *stats = local;
  return out;
}

std::vector<Query> load_workload_file(const std::string& path, const PrefixMap& fixed,
                                      WorkloadStats* stats, bool strict,
                                      std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_workload(in, fixed, stats, strict, warnings);
}

SplitResult split_workload(std::vector<Query> queries, double ratio, std::uint64_t seed) {
  if (ratio <= 0.0 || ratio >= 1.0) throw ConfigError("split ratio must be in (0,1)");
  // Canonical pre-order makes the split a function of the query *set*, not
  // of file order.
  std::sort(queries.begin(), queries.end(),
            [](const Query& a, const Query& b) { return a.id < b.id; });
  Rng rng(seed);
  for (std::size_t i = queries.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(queries[i - 1], queries[j]);
  }
  std::size_t n_train = static_cast<std::size_t>(static_cast<double>(queries.size()) * ratio);
  if (!queries.empty() && n_train == 0) n_train = 1;
  SplitResult out;
  out.train.assign(queries.begin(), queries.begin() + n_train);
  out.test.assign(queries.begin() + n_train, queries.end());
  return out;
}

UserProfile build_user_profile(const std::vector<Query>& train, std::size_t k,
                               std::uint64_t seed, std::string user_id,
                               std::vector<std::string>* warnings) {
  if (k == 0) throw ConfigError("profile needs at least one seed entity");
  std::vector<Term> pool;
  for (const Query& q : train) {
    for (Term& t : extract_entities(q)) {
      if (std::find(pool.begin(), pool.end(), t) == pool.end()) pool.push_back(std::move(t));
    }
  }
  if (pool.empty())
    throw Error("train queries mention no constant entities; cannot build profiles");

  UserProfile profile;
  profile.user_id = std::move(user_id);
  if (pool.size() <= k) {
    if (pool.size() < k && warnings)
      warnings->push_back(profile.user_id + ": entity pool smaller than requested seeds, taking all " +
                          std::to_string(pool.size()));
    profile.seeds = std::move(pool);
    return profile;
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  profile.seeds.assign(pool.begin(), pool.begin() + k);
  return profile;
}

std::vector<Query> personalize(const std::vector<Query>& queries, const UserProfile& profile) {
  std::vector<Query> out;
  for (const Query& q : queries) {
    std::vector<Term> mentioned = extract_entities(q);
    bool hit = std::any_of(mentioned.begin(), mentioned.end(), [&](const Term& t) {
      return std::find(profile.seeds.begin(), profile.seeds.end(), t) != profile.seeds.end();
    });
    if (hit) out.push_back(q);
  }
  return out;
}

void write_profiles(std::ostream& out, const std::vector<UserProfile>& profiles) {
  for (const UserProfile& p : profiles) {
    out << p.user_id << '\t';
    for (std::size_t i = 0; i < p.seeds.size(); ++i) {
      if (i) out << ',';
      out << to_ntriples(p.seeds[i]);
    }
    out << '\n';
  }
}

std::vector<UserProfile> read_profiles(std::istream& in) {
  std::vector<UserProfile> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty()) continue;
    std::size_t tab = v.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError("profiles line " + std::to_string(line_no) + ": missing tab");
    UserProfile p;
    p.user_id = std::string(v.substr(0, tab));
    std::string_view rest = v.substr(tab + 1);
    // Seeds are IRIs, which cannot contain '>', so scanning <...> pairs is
    // unambiguous even if an IRI holds a comma.
    std::size_t pos = 0;
    while (pos < rest.size()) {
      if (rest[pos] == ',') {
        ++pos;
        continue;
      }
      if (rest[pos] != '<')
        throw ParseError("profiles line " + std::to_string(line_no) + ": expected IRI seed");
      std::size_t close = rest.find('>', pos);
      if (close == std::string_view::npos)
        throw ParseError("profiles line " + std::to_string(line_no) + ": unterminated IRI");
      p.seeds.push_back(Term::iri(std::string(rest.substr(pos + 1, close - pos - 1))));
      pos = close + 1;
    }
    if (p.seeds.empty())
      throw ParseError("profiles line " + std::to_string(line_no) + ": no seeds");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace corekg
