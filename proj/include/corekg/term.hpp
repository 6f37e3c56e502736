#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace corekg {

enum class TermKind : std::uint8_t { Iri, Literal, BlankNode };

// One RDF term. For literals, `lexical` is the lexical form (unescaped) and
// at most one of `datatype` / `language` is set. Equality is exact on every
// component; "1"^^xsd:integer and "01"^^xsd:integer stay distinct terms.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string lexical;
  std::string datatype;
  std::string language;

  // Throws Error when `text` is empty or contains characters an IRI cannot
  // hold (whitespace, control chars, <>"{}|^`\).
  static Term iri(std::string text);
  static Term literal(std::string lex, std::string datatype = std::string(),
                      std::string language = std::string());
  static Term blank(std::string label);

  bool is_iri() const { return kind == TermKind::Iri; }
  bool is_literal() const { return kind == TermKind::Literal; }
  bool is_blank() const { return kind == TermKind::BlankNode; }

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term&, const Term&) = default;
};

bool valid_iri_text(std::string_view text);

// N-Triples surface form: <iri>, "lit"@tag, "lit"^^<dt>, _:label. Also the
// canonical rendering inside normalized query text and summary files.
std::string to_ntriples(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const;
};

}  // namespace corekg
