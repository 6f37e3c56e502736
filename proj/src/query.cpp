#include "corekg/query.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "corekg/errors.hpp"
#include "corekg/util.hpp"

namespace corekg {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_keyword(const std::string& up) {
  static const char* kw[] = {"SELECT", "DISTINCT", "REDUCED", "WHERE",  "FILTER", "OPTIONAL",
                             "UNION",  "MINUS",    "GRAPH",   "BIND",   "VALUES", "LIMIT",
                             "OFFSET", "ORDER",    "BY",      "ASC",    "DESC",   "GROUP",
                             "HAVING", "PREFIX",   "BASE",    "ASK",    "CONSTRUCT",
                             "DESCRIBE", "EXISTS", "NOT",     "IN",     "AS"};
  for (const char* k : kw)
    if (up == k) return true;
  return false;
}

enum class Tok { Iri, Literal, Var, Word, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // Iri: inner text; Literal: lexical form; Var: name; else surface
  std::size_t offset = 0;
  // Literal annotations. The datatype may still be a prefixed name right
  // after tokenizing; expansion resolves it.
  std::string dt_iri;
  std::string dt_prefixed;
  std::string lang;
};

bool word_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool word_char(char c) {
  return word_start(c) || c == ':' || c == '.' || c == '-';
}

bool name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t pos = 0;
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (pos < s.size()) {
    char c = s[pos];
    if (ws(c)) {
      ++pos;
      continue;
    }
    if (c == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
      continue;
    }
    std::size_t start = pos;
    if (c == '<') {
      // An IRI only when a '>' arrives before any whitespace; otherwise this
      // is a comparison operator inside a FILTER body.
      std::size_t j = pos + 1;
      while (j < s.size() && !ws(s[j]) && s[j] != '>') ++j;
      if (j < s.size() && s[j] == '>') {
        std::string text(s.substr(pos + 1, j - pos - 1));
        if (!valid_iri_text(text)) throw ParseError("invalid IRI '" + text + "'", start);
        out.push_back({Tok::Iri, std::move(text), start, {}, {}, {}});
        pos = j + 1;
        continue;
      }
      std::string p = "<";
      if (pos + 1 < s.size() && s[pos + 1] == '=') {
        p = "<=";
        ++pos;
      }
      out.push_back({Tok::Punct, p, start, {}, {}, {}});
      ++pos;
      continue;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      if (pos + 2 < s.size() && s[pos + 1] == quote && s[pos + 2] == quote)
        throw ParseError("long (triple-quoted) literals are not supported", start);
      ++pos;
      std::string lex;
      while (true) {
        if (pos >= s.size()) throw ParseError("unterminated literal", start);
        char ch = s[pos];
        if (ch == quote) {
          ++pos;
          break;
        }
        if (ch == '\\') {
          ++pos;
          decode_escape(s, pos, lex);
          continue;
        }
        if (ch == '\n') throw ParseError("newline inside literal", pos);
        lex += ch;
        ++pos;
      }
      Token t{Tok::Literal, std::move(lex), start, {}, {}, {}};
      if (pos < s.size() && s[pos] == '@') {
        ++pos;
        std::string tag;
        while (pos < s.size() && ((s[pos] >= 'a' && s[pos] <= 'z') ||
                                  (s[pos] >= 'A' && s[pos] <= 'Z') ||
                                  (s[pos] >= '0' && s[pos] <= '9') || s[pos] == '-')) {
          tag += s[pos];
          ++pos;
        }
        if (tag.empty()) throw ParseError("bad language tag", pos);
        t.lang = std::move(tag);
      } else if (pos + 1 < s.size() && s[pos] == '^' && s[pos + 1] == '^') {
        pos += 2;
        if (pos < s.size() && s[pos] == '<') {
          std::size_t j = pos + 1;
          while (j < s.size() && !ws(s[j]) && s[j] != '>') ++j;
          if (j >= s.size() || s[j] != '>') throw ParseError("unterminated datatype IRI", pos);
          t.dt_iri = std::string(s.substr(pos + 1, j - pos - 1));
          if (!valid_iri_text(t.dt_iri)) throw ParseError("invalid datatype IRI", pos);
          pos = j + 1;
        } else if (pos < s.size() && word_start(s[pos])) {
          std::string w;
          while (pos < s.size() && word_char(s[pos])) {
            w += s[pos];
            ++pos;
          }
          while (!w.empty() && w.back() == '.') {
            w.pop_back();
            --pos;
          }
          if (w.find(':') == std::string::npos)
            throw ParseError("datatype must be an IRI or prefixed name", pos);
          t.dt_prefixed = std::move(w);
        } else {
          throw ParseError("datatype must be an IRI or prefixed name", pos);
        }
      }
      out.push_back(std::move(t));
      continue;
    }
    if (c == '?' || c == '$') {
      if (pos + 1 < s.size() && name_char(s[pos + 1])) {
        ++pos;
        std::string name;
        while (pos < s.size() && name_char(s[pos])) {
          name += s[pos];
          ++pos;
        }
        out.push_back({Tok::Var, std::move(name), start, {}, {}, {}});
        continue;
      }
      out.push_back({Tok::Punct, std::string(1, c), start, {}, {}, {}});
      ++pos;
      continue;
    }
    if (c == '_' && pos + 1 < s.size() && s[pos + 1] == ':')
      throw ParseError("blank nodes in query patterns are not supported", start);
    if (word_start(c)) {
      std::string w;
      while (pos < s.size() && word_char(s[pos])) {
        w += s[pos];
        ++pos;
      }
      // Trailing dots terminate the pattern, they are not part of the word.
      while (!w.empty() && w.back() == '.') {
        w.pop_back();
        --pos;
      }
      out.push_back({Tok::Word, std::move(w), start, {}, {}, {}});
      continue;
    }
    // Operator fusion keeps FILTER bodies reassemblable.
    static const char* two[] = {">=", "!=", "&&", "||", "^^"};
    bool fused = false;
    if (pos + 1 < s.size()) {
      char pair[3] = {c, s[pos + 1], 0};
      for (const char* t2 : two) {
        if (pair[0] == t2[0] && pair[1] == t2[1]) {
          out.push_back({Tok::Punct, t2, start, {}, {}, {}});
          pos += 2;
          fused = true;
          break;
        }
      }
    }
    if (fused) continue;
    out.push_back({Tok::Punct, std::string(1, c), start, {}, {}, {}});
    ++pos;
  }
  out.push_back({Tok::End, "", s.size(), {}, {}, {}});
  return out;
}

constexpr const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
constexpr const char* kXsd = "http://www.w3.org/2001/XMLSchema#";

std::string expand_prefixed(const std::string& word, const PrefixMap& local,
                            const PrefixMap& fixed, std::size_t offset) {
  std::size_t colon = word.find(':');
  std::string label = word.substr(0, colon);
  std::string localname = word.substr(colon + 1);
  const std::string* ns = local.find(label);
  if (!ns) ns = fixed.find(label);
  if (!ns) throw ParseError("unknown prefix '" + label + ":'", offset);
  std::string iri = *ns + localname;
  if (!valid_iri_text(iri)) throw ParseError("prefixed name expands to invalid IRI", offset);
  return iri;
}

std::string render_token(const Token& t) {
  switch (t.kind) {
    case Tok::Iri:
      return "<" + t.text + ">";
    case Tok::Literal: {
      Term lit = Term::literal(t.text, t.dt_iri, t.lang);
      return to_ntriples(lit);
    }
    case Tok::Var:
      return "?" + t.text;
    case Tok::Word:
    case Tok::Punct:
      return t.text;
    case Tok::End:
      return "";
  }
  return "";
}

}  // namespace

void PrefixMap::set(std::string label, std::string ns) {
  for (auto& [l, n] : entries_) {
    if (l == label) {
      n = std::move(ns);  // redeclaration: last one wins
      return;
    }
  }
  entries_.emplace_back(std::move(label), std::move(ns));
}

const std::string* PrefixMap::find(std::string_view label) const {
  for (const auto& [l, n] : entries_)
    if (l == label) return &n;
  return nullptr;
}

PrefixMap PrefixMap::builtin() {
  PrefixMap m;
  m.set("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#");
  m.set("rdfs", "http://www.w3.org/2000/01/rdf-schema#");
  m.set("owl", "http://www.w3.org/2002/07/owl#");
  m.set("xsd", kXsd);
  return m;
}

PrefixMap PrefixMap::load_file(const std::string& path) {
  PrefixMap m = builtin();
  std::string text = read_file(path);
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    std::size_t eq = v.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(path + " line " + std::to_string(line_no) + ": expected key=value");
    std::string key(trim(v.substr(0, eq)));
    std::string value(trim(v.substr(eq + 1)));
    if (key.empty() || !valid_iri_text(value))
      throw ParseError(path + " line " + std::to_string(line_no) + ": bad prefix entry");
    m.set(std::move(key), std::move(value));
  }
  return m;
}

std::string normalize(const std::string& raw, const PrefixMap& fixed) {
  std::vector<Token> toks = tokenize(raw);
  if (toks.size() == 1) throw ParseError("empty query");

  // Peel off leading declarations into the query-local prefix map.
  PrefixMap local;
  std::size_t i = 0;
  std::vector<Token> body;
  while (toks[i].kind != Tok::End) {
    if (toks[i].kind == Tok::Word) {
      std::string up = upper(toks[i].text);
      if (up == "PREFIX") {
        const Token& label_tok = toks[i + 1];
        std::string label;
        if (label_tok.kind == Tok::Punct && label_tok.text == ":")
          label = "";
        else if (label_tok.kind == Tok::Word && !label_tok.text.empty() &&
                 label_tok.text.back() == ':' &&
                 label_tok.text.find(':') == label_tok.text.size() - 1)
          label = label_tok.text.substr(0, label_tok.text.size() - 1);
        else
          throw ParseError("malformed PREFIX declaration", toks[i].offset);
        const Token& iri_tok = toks[i + 2];
        if (iri_tok.kind != Tok::Iri)
          throw ParseError("PREFIX declaration needs an IRI", label_tok.offset);
        local.set(std::move(label), iri_tok.text);
        i += 3;
        continue;
      }
      if (up == "BASE") throw ParseError("BASE declarations are not supported", toks[i].offset);
    }
    body.push_back(std::move(toks[i]));
    ++i;
  }
  if (body.empty()) throw ParseError("query has no body");

  // The first word decides the form; only SELECT is evaluable here.
  for (const Token& t : body) {
    if (t.kind == Tok::Word) {
      std::string up = upper(t.text);
      if (up == "SELECT") break;
      if (up == "ASK" || up == "CONSTRUCT" || up == "DESCRIBE")
        throw ParseError("unsupported query form " + up + "; only SELECT is handled", t.offset);
      throw ParseError("expected SELECT", t.offset);
    }
    throw ParseError("expected SELECT", t.offset);
  }

  int depth = 0;
  std::vector<std::string> parts;
  parts.reserve(body.size());
  for (Token& t : body) {
    if (t.kind == Tok::Punct && t.text == "{") ++depth;
    if (t.kind == Tok::Punct && t.text == "}") --depth;
    if (t.kind == Tok::Word) {
      if (t.text == "a" && depth > 0) {
        t.kind = Tok::Iri;
        t.text = kRdfType;
      } else if (t.text.find(':') != std::string::npos) {
        t.text = expand_prefixed(t.text, local, fixed, t.offset);
        t.kind = Tok::Iri;
      } else {
        std::string up = upper(t.text);
        if (is_keyword(up)) t.text = std::move(up);
      }
    } else if (t.kind == Tok::Literal && !t.dt_prefixed.empty()) {
      t.dt_iri = expand_prefixed(t.dt_prefixed, local, fixed, t.offset);
      t.dt_prefixed.clear();
    }
    parts.push_back(render_token(t));
  }

  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ' ';
    out += parts[k];
  }
  return out;
}

namespace {

struct TokenStream {
  std::vector<Token> toks;
  std::size_t i = 0;

  const Token& peek() const { return toks[i]; }
  const Token& next() { return toks[i++]; }
  bool at_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool at_word_ci(const char* w) const {
    return peek().kind == Tok::Word && upper(peek().text) == w;
  }
  void expect_punct(const char* p) {
    if (!at_punct(p))
      throw ParseError(std::string("expected '") + p + "'", peek().offset);
    ++i;
  }
};

void skip_balanced(TokenStream& ts, const char* open, const char* close) {
  ts.expect_punct(open);
  int depth = 1;
  while (depth > 0) {
    const Token& t = ts.next();
    if (t.kind == Tok::End) throw ParseError("unbalanced group", t.offset);
    if (t.kind == Tok::Punct && t.text == open) ++depth;
    if (t.kind == Tok::Punct && t.text == close) --depth;
  }
}

void warn(std::vector<std::string>* warnings, std::string msg) {
  if (warnings) warnings->push_back(std::move(msg));
}

bool is_integer_word(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w)
    if (c < '0' || c > '9') return false;
  return true;
}

bool is_decimal_word(const std::string& w) {
  std::size_t dot = w.find('.');
  if (dot == std::string::npos || dot + 1 >= w.size()) return false;
  return is_integer_word(w.substr(0, dot)) && is_integer_word(w.substr(dot + 1));
}

PatternTerm pattern_term(const Token& t) {
  switch (t.kind) {
    case Tok::Iri:
      return Term::iri(t.text);
    case Tok::Literal:
      return Term::literal(t.text, t.dt_iri, t.lang);
    case Tok::Var:
      return Variable{t.text};
    case Tok::Word:
      if (t.text == "a") return Term::iri(kRdfType);
      if (is_integer_word(t.text))
        return Term::literal(t.text, std::string(kXsd) + "integer");
      if (is_decimal_word(t.text))
        return Term::literal(t.text, std::string(kXsd) + "decimal");
      if (t.text == "true" || t.text == "false")
        return Term::literal(t.text, std::string(kXsd) + "boolean");
      throw ParseError("unexpected word '" + t.text + "' in pattern", t.offset);
    default:
      throw ParseError("expected term or variable", t.offset);
  }
}

std::string render_pattern_term(const PatternTerm& pt) {
  if (std::holds_alternative<Variable>(pt)) return "?" + std::get<Variable>(pt).name;
  return to_ntriples(std::get<Term>(pt));
}

void collect_vars(const TriplePattern& p, std::vector<std::string>& out) {
  for (const PatternTerm* pt : {&p.subject, &p.predicate, &p.object}) {
    if (std::holds_alternative<Variable>(*pt)) {
      const std::string& n = std::get<Variable>(*pt).name;
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
  }
}

}  // namespace

std::string render_query(const std::vector<std::string>& projection,
                         const std::vector<TriplePattern>& bgp) {
  std::string out = "SELECT";
  if (projection.empty()) {
    out += " *";
  } else {
    for (const std::string& v : projection) {
      out += " ?";
      out += v;
    }
  }
  out += " WHERE {";
  for (const TriplePattern& p : bgp) {
    out += ' ';
    out += render_pattern_term(p.subject);
    out += ' ';
    out += render_pattern_term(p.predicate);
    out += ' ';
    out += render_pattern_term(p.object);
    out += " .";
  }
  out += " }";
  return out;
}

Query parse_query(const std::string& normalized, std::vector<std::string>* warnings) {
  TokenStream ts{tokenize(normalized)};
  if (ts.peek().kind == Tok::End) throw ParseError("empty query");

  if (!ts.at_word_ci("SELECT")) throw ParseError("expected SELECT", ts.peek().offset);
  ts.next();
  if (ts.at_word_ci("DISTINCT") || ts.at_word_ci("REDUCED")) ts.next();  // sets anyway

  std::vector<std::string> projection;
  bool star = false;
  while (true) {
    if (ts.at_punct("*")) {
      ts.next();
      star = true;
      break;
    }
    if (ts.peek().kind == Tok::Var) {
      projection.push_back(ts.next().text);
      continue;
    }
    break;
  }
  if (!star && projection.empty())
    throw ParseError("SELECT needs at least one variable or *", ts.peek().offset);

  if (ts.at_word_ci("WHERE")) ts.next();
  ts.expect_punct("{");

  std::vector<TriplePattern> bgp;
  bool warned_filter = false, warned_optional = false, warned_group = false;
  while (!ts.at_punct("}")) {
    const Token& t = ts.peek();
    if (t.kind == Tok::End) throw ParseError("unterminated pattern block", t.offset);
    if (t.kind == Tok::Punct && t.text == ".") {
      ts.next();  // separator
      continue;
    }
    if (ts.at_word_ci("FILTER")) {
      ts.next();
      if (ts.at_word_ci("NOT")) ts.next();
      if (ts.at_word_ci("EXISTS")) {
        ts.next();
        skip_balanced(ts, "{", "}");
      } else if (ts.peek().kind == Tok::Word) {
        ts.next();  // function name, e.g. regex
        skip_balanced(ts, "(", ")");
      } else {
        skip_balanced(ts, "(", ")");
      }
      if (!warned_filter) warn(warnings, "FILTER constraint dropped");
      warned_filter = true;
      continue;
    }
    if (ts.at_word_ci("OPTIONAL")) {
      ts.next();
      skip_balanced(ts, "{", "}");
      if (!warned_optional) warn(warnings, "OPTIONAL block dropped");
      warned_optional = true;
      continue;
    }
    if (ts.at_punct("{")) {
      skip_balanced(ts, "{", "}");
      while (ts.at_word_ci("UNION")) {
        ts.next();
        skip_balanced(ts, "{", "}");
      }
      if (!warned_group) warn(warnings, "braced group (UNION) dropped");
      warned_group = true;
      continue;
    }
    TriplePattern p;
    p.subject = pattern_term(ts.next());
    p.predicate = pattern_term(ts.next());
    p.object = pattern_term(ts.next());
    if (std::holds_alternative<Term>(p.predicate) &&
        !std::get<Term>(p.predicate).is_iri())
      throw ParseError("predicate must be an IRI or variable", t.offset);
    if (std::holds_alternative<Term>(p.subject) && std::get<Term>(p.subject).is_literal())
      throw ParseError("literal subject in pattern", t.offset);
    bgp.push_back(std::move(p));
    if (ts.at_punct(".")) ts.next();
  }
  ts.expect_punct("}");

  if (ts.peek().kind != Tok::End) {
    if (ts.at_word_ci("LIMIT") || ts.at_word_ci("OFFSET") || ts.at_word_ci("ORDER") ||
        ts.at_word_ci("GROUP") || ts.at_word_ci("HAVING") || ts.at_word_ci("VALUES")) {
      warn(warnings, "solution modifiers dropped");
      while (ts.peek().kind != Tok::End) ts.next();
    } else {
      throw ParseError("unexpected tokens after pattern block", ts.peek().offset);
    }
  }

  if (bgp.empty())
    throw ParseError("no evaluable patterns remain after stripping unsupported clauses");

  Query q;
  q.bgp = std::move(bgp);
  std::vector<std::string> vars = q.variables();
  for (const std::string& v : projection) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw ParseError("projected variable ?" + v + " does not occur in the pattern block");
  }
  q.projection = std::move(projection);
  q.normalized_text = render_query(q.projection, q.bgp);
  q.id = fnv1a64(q.normalized_text);
  return q;
}

std::vector<std::string> Query::variables() const {
  std::vector<std::string> out;
  for (const TriplePattern& p : bgp) collect_vars(p, out);
  return out;
}

std::vector<Term> extract_entities(const Query& q, bool include_predicates) {
  std::vector<Term> out;
  auto take = [&](const PatternTerm& pt) {
    if (!std::holds_alternative<Term>(pt)) return;
    const Term& t = std::get<Term>(pt);
    if (!t.is_iri()) return;
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  for (const TriplePattern& p : q.bgp) {
    take(p.subject);
    if (include_predicates) take(p.predicate);
    take(p.object);
  }
  return out;
}

}  // namespace corekg
