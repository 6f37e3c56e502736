#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corekg/term.hpp"

namespace corekg {

using TermId = std::uint32_t;
using TripleId = std::uint32_t;

struct EncodedTriple {
  TermId subject;
  TermId predicate;
  TermId object;

  friend bool operator==(const EncodedTriple&, const EncodedTriple&) = default;
};

struct EncodedTripleHash {
  std::size_t operator()(const EncodedTriple& t) const;
};

// Interned, deduplicated triple store. Terms and triples get dense ids in
// first-insertion order. freeze() builds three permutation indexes (SPO,
// POS, OSP); every combination of bound positions maps to a contiguous
// range of exactly one of them, so lookups never post-filter. Frozen graphs
// are immutable and safe to share across threads.
class KnowledgeGraph {
 public:
  TermId intern(const Term& t);
  std::optional<TermId> find_term(const Term& t) const;
  const Term& term(TermId id) const;
  std::size_t term_count() const { return terms_.size(); }

  // Deduplicating insert; re-adding returns the original id.
  TripleId add(const Term& s, const Term& p, const Term& o);
  TripleId add_ids(TermId s, TermId p, TermId o);
  const EncodedTriple& triple(TripleId id) const;
  std::size_t size() const { return triples_.size(); }

  void freeze();
  bool frozen() const { return frozen_; }

  // Triple ids whose bound positions (nullopt = wildcard) match, as a view
  // into one permutation index. Requires freeze(). Entries are unique but
  // come in index order, not id order.
  std::span<const TripleId> match_span(std::optional<TermId> s,
                                       std::optional<TermId> p,
                                       std::optional<TermId> o) const;

  // match_span, copied and sorted ascending by TripleId.
  std::vector<TripleId> match(std::optional<TermId> s, std::optional<TermId> p,
                              std::optional<TermId> o) const;
  std::size_t match_count(std::optional<TermId> s, std::optional<TermId> p,
                          std::optional<TermId> o) const;

  std::optional<TripleId> find(TermId s, TermId p, TermId o) const;

  bool occurs_as_subject(TermId id) const;
  bool occurs_as_predicate(TermId id) const;
  bool occurs_as_object(TermId id) const;

 private:
  std::vector<Term> terms_;
  std::unordered_map<Term, TermId, TermHash> term_ids_;
  std::vector<EncodedTriple> triples_;
  std::unordered_map<EncodedTriple, TripleId, EncodedTripleHash> triple_ids_;
  std::vector<TripleId> spo_;
  std::vector<TripleId> pos_;
  std::vector<TripleId> osp_;
  bool frozen_ = false;
};

struct ParseStats {
  std::size_t triples = 0;     // distinct triples stored
  std::size_t duplicates = 0;  // well-formed repeats collapsed
  std::size_t skipped = 0;     // malformed lines dropped
};

// Line-oriented N-Triples reader. Blank lines and #-comments are ignored.
// Malformed lines are skipped and counted unless `strict`, which throws
// ParseError naming the first bad line. The result is frozen.
KnowledgeGraph parse_ntriples(std::istream& in, ParseStats* stats = nullptr,
                              bool strict = false);

// File loader; transparently inflates gzip input (detected by the 1f 8b
// magic bytes, not the file name).
KnowledgeGraph load_ntriples(const std::string& path, ParseStats* stats = nullptr,
                             bool strict = false);

// Parses a single "<s> <p> <o> ." line into terms. Used by the N-Triples
// reader and by tests; throws ParseError.
struct ParsedTripleLine {
  Term subject;
  Term predicate;
  Term object;
};
ParsedTripleLine parse_ntriples_line(std::string_view line);

std::string to_ntriples_line(const KnowledgeGraph& g, TripleId id);

// Triples in id order, one canonical line each. parse(serialize(g)) == g.
void serialize_ntriples(const KnowledgeGraph& g, std::ostream& out);

}  // namespace corekg
