#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "corekg/term.hpp"

namespace corekg {

struct Variable {
  std::string name;  // without the ?/$ sigil

  friend bool operator==(const Variable&, const Variable&) = default;
  friend std::strong_ordering operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

// Prefix label -> namespace IRI text. Declaration order is kept; a later
// declaration of the same label wins, matching SPARQL redeclaration rules.
class PrefixMap {
 public:
  void set(std::string label, std::string ns);
  const std::string* find(std::string_view label) const;
  std::size_t size() const { return entries_.size(); }

  // rdf, rdfs, owl, xsd. The base fixed map when no prefixes file is given.
  static PrefixMap builtin();

  // key=value lines, #-comments and blanks ignored. Entries are applied on
  // top of the builtin map.
  static PrefixMap load_file(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct Query {
  std::uint64_t id = 0;                  // fnv1a64(normalized_text)
  std::vector<std::string> projection;   // empty means SELECT *
  std::vector<TriplePattern> bgp;
  std::string normalized_text;

  // Distinct variable names in first-appearance order over the BGP.
  std::vector<std::string> variables() const;
};

// Canonicalizes raw SPARQL text: strips comments and PREFIX/BASE-free
// declarations, expands prefixed names (query-local declarations first,
// then `fixed`), expands `a` to rdf:type inside the pattern block,
// uppercases keywords, prints every variable with `?`, and collapses
// whitespace to single spaces. Idempotent. Throws ParseError on unknown
// prefixes (naming the label), unsupported query forms, and lexical errors.
std::string normalize(const std::string& raw, const PrefixMap& fixed);

// Parses normalized text into a BGP query. FILTER constraints, OPTIONAL
// blocks, braced UNION groups, and trailing solution modifiers are dropped,
// one warning each; DISTINCT is dropped silently. Throws ParseError when
// nothing evaluable remains or a projected variable never occurs in the BGP.
Query parse_query(const std::string& normalized,
                  std::vector<std::string>* warnings = nullptr);

// The canonical rendering parse_query stores in normalized_text:
// SELECT ?a ?b WHERE { <s> <p> ?a . ... } with one space between tokens and
// a ` . ` terminator after every pattern. parse_query(render(q)) == q.
std::string render_query(const std::vector<std::string>& projection,
                         const std::vector<TriplePattern>& bgp);

// Distinct constant IRIs in first-appearance order across the BGP.
// Predicate-position IRIs are included only when `include_predicates`.
std::vector<Term> extract_entities(const Query& q, bool include_predicates = false);

}  // namespace corekg
