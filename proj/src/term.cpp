#include "corekg/term.hpp"

#include <string_view>

#include "corekg/errors.hpp"
#include "corekg/util.hpp"

namespace corekg {

bool valid_iri_text(std::string_view text) {
  if (text.empty()) return false;
  for (unsigned char c : text) {
    if (c <= 0x20) return false;  // controls and space
    switch (c) {
      case '<': case '>': case '"': case '{': case '}':
      case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

Term Term::iri(std::string text) {
  if (!valid_iri_text(text)) throw Error("invalid IRI text '" + text + "'");
  Term t;
  t.kind = TermKind::Iri;
  t.lexical = std::move(text);
  return t;
}

Term Term::literal(std::string lex, std::string datatype, std::string language) {
  if (!datatype.empty() && !language.empty())
    throw Error("literal cannot carry both datatype and language tag");
  if (!datatype.empty() && !valid_iri_text(datatype))
    throw Error("invalid datatype IRI '" + datatype + "'");
  Term t;
  t.kind = TermKind::Literal;
  t.lexical = std::move(lex);
  t.datatype = std::move(datatype);
  t.language = std::move(language);
  return t;
}

Term Term::blank(std::string label) {
  if (label.empty()) throw Error("blank node label cannot be empty");
  Term t;
  t.kind = TermKind::BlankNode;
  t.lexical = std::move(label);
  return t;
}

namespace {

void escape_literal_into(std::string& out, std::string_view lex) {
  static const char* hex = "0123456789ABCDEF";
  for (unsigned char c : lex) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out += hex[(c >> 4) & 0xF];
          out += hex[c & 0xF];
        } else {
          out += static_cast<char>(c);
        }
    }
  }
}

}  // namespace

std::string to_ntriples(const Term& t) {
  std::string out;
  switch (t.kind) {
    case TermKind::Iri:
      out += '<';
      out += t.lexical;
      out += '>';
      break;
    case TermKind::BlankNode:
      out += "_:";
      out += t.lexical;
      break;
    case TermKind::Literal:
      out += '"';
      escape_literal_into(out, t.lexical);
      out += '"';
      if (!t.language.empty()) {
        out += '@';
        out += t.language;
      } else if (!t.datatype.empty()) {
        out += "^^<";
        out += t.datatype;
        out += '>';
      }
      break;
  }
  return out;
}

std::size_t TermHash::operator()(const Term& t) const {
  std::uint64_t h = fnv1a64(t.lexical);
  h = h * 1099511628211ull ^ fnv1a64(t.datatype);
  h = h * 1099511628211ull ^ fnv1a64(t.language);
  h = h * 1099511628211ull ^ static_cast<std::uint64_t>(t.kind);
  return static_cast<std::size_t>(h);
}

}  // namespace corekg
