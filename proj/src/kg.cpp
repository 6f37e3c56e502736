#include "corekg/kg.hpp"

#include <zlib.h>

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include "corekg/errors.hpp"
#include "corekg/rng.hpp"
#include "corekg/util.hpp"

namespace corekg {

std::size_t EncodedTripleHash::operator()(const EncodedTriple& t) const {
  std::uint64_t h = (std::uint64_t(t.subject) << 32) | t.predicate;
  h = mix64(h) ^ (std::uint64_t(t.object) * 0x9e3779b97f4a7c15ull);
  return static_cast<std::size_t>(h);
}

TermId KnowledgeGraph::intern(const Term& t) {
  if (frozen_) {
    auto it = term_ids_.find(t);
    if (it != term_ids_.end()) return it->second;
    throw Error("frozen graph is immutable");
  }
  auto [it, inserted] = term_ids_.try_emplace(t, static_cast<TermId>(terms_.size()));
  if (inserted) terms_.push_back(t);
  return it->second;
}

std::optional<TermId> KnowledgeGraph::find_term(const Term& t) const {
  auto it = term_ids_.find(t);
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

const Term& KnowledgeGraph::term(TermId id) const {
  if (id >= terms_.size()) throw Error("term id out of range");
  return terms_[id];
}

TripleId KnowledgeGraph::add(const Term& s, const Term& p, const Term& o) {
  if (!p.is_iri()) throw Error("predicate must be an IRI");
  if (s.is_literal()) throw Error("subject cannot be a literal");
  return add_ids(intern(s), intern(p), intern(o));
}

TripleId KnowledgeGraph::add_ids(TermId s, TermId p, TermId o) {
  if (frozen_) throw Error("frozen graph is immutable");
  if (s >= terms_.size() || p >= terms_.size() || o >= terms_.size())
    throw Error("term id out of range");
  EncodedTriple t{s, p, o};
  auto [it, inserted] = triple_ids_.try_emplace(t, static_cast<TripleId>(triples_.size()));
  if (inserted) triples_.push_back(t);
  return it->second;
}

const EncodedTriple& KnowledgeGraph::triple(TripleId id) const {
  if (id >= triples_.size()) throw Error("triple id out of range");
  return triples_[id];
}

namespace {

using Key3 = std::tuple<TermId, TermId, TermId>;

}  // namespace

void KnowledgeGraph::freeze() {
  if (frozen_) return;
  auto build = [&](std::vector<TripleId>& idx, auto proj) {
    idx.resize(triples_.size());
    for (TripleId i = 0; i < triples_.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](TripleId a, TripleId b) {
      return proj(triples_[a]) < proj(triples_[b]);
    });
  };
  build(spo_, [](const EncodedTriple& t) { return Key3{t.subject, t.predicate, t.object}; });
  build(pos_, [](const EncodedTriple& t) { return Key3{t.predicate, t.object, t.subject}; });
  build(osp_, [](const EncodedTriple& t) { return Key3{t.object, t.subject, t.predicate}; });
  frozen_ = true;
}

std::span<const TripleId> KnowledgeGraph::match_span(std::optional<TermId> s,
                                                     std::optional<TermId> p,
                                                     std::optional<TermId> o) const {
  if (!frozen_) throw Error("match on unfrozen graph");
  constexpr TermId kMax = std::numeric_limits<TermId>::max();

  auto range = [&](const std::vector<TripleId>& idx, auto proj, Key3 lo, Key3 hi) {
    auto first = std::lower_bound(idx.begin(), idx.end(), lo,
                                  [&](TripleId t, const Key3& k) { return proj(triples_[t]) < k; });
    auto last = std::upper_bound(first, idx.end(), hi,
                                 [&](const Key3& k, TripleId t) { return k < proj(triples_[t]); });
    return std::span<const TripleId>(idx.data() + (first - idx.begin()),
                                     static_cast<std::size_t>(last - first));
  };
  auto spo_key = [](const EncodedTriple& t) { return Key3{t.subject, t.predicate, t.object}; };
  auto pos_key = [](const EncodedTriple& t) { return Key3{t.predicate, t.object, t.subject}; };
  auto osp_key = [](const EncodedTriple& t) { return Key3{t.object, t.subject, t.predicate}; };

  // Every bound-position combination is a prefix of one permutation, so the
  // result is always a contiguous slice and never needs filtering.
  if (s) {
    if (p) return range(spo_, spo_key, {*s, *p, o.value_or(0)}, {*s, *p, o.value_or(kMax)});
    if (o) return range(osp_, osp_key, {*o, *s, 0}, {*o, *s, kMax});
    return range(spo_, spo_key, {*s, 0, 0}, {*s, kMax, kMax});
  }
  if (p) {
    if (o) return range(pos_, pos_key, {*p, *o, 0}, {*p, *o, kMax});
    return range(pos_, pos_key, {*p, 0, 0}, {*p, kMax, kMax});
  }
  if (o) return range(osp_, osp_key, {*o, 0, 0}, {*o, kMax, kMax});
  return std::span<const TripleId>(spo_.data(), spo_.size());
}

std::vector<TripleId> KnowledgeGraph::match(std::optional<TermId> s, std::optional<TermId> p,
                                            std::optional<TermId> o) const {
  auto span = match_span(s, p, o);
  std::vector<TripleId> out(span.begin(), span.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t KnowledgeGraph::match_count(std::optional<TermId> s, std::optional<TermId> p,
                                        std::optional<TermId> o) const {
  return match_span(s, p, o).size();
}

std::optional<TripleId> KnowledgeGraph::find(TermId s, TermId p, TermId o) const {
  auto it = triple_ids_.find(EncodedTriple{s, p, o});
  if (it == triple_ids_.end()) return std::nullopt;
  return it->second;
}

bool KnowledgeGraph::occurs_as_subject(TermId id) const {
  return !match_span(id, std::nullopt, std::nullopt).empty();
}

bool KnowledgeGraph::occurs_as_predicate(TermId id) const {
  return !match_span(std::nullopt, id, std::nullopt).empty();
}

bool KnowledgeGraph::occurs_as_object(TermId id) const {
  return !match_span(std::nullopt, std::nullopt, id).empty();
}

// ---------------------------------------------------------------------------
// N-Triples

namespace {

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  bool done() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
  }
};

Term parse_iri(Cursor& c) {
  std::size_t start = c.pos;
  ++c.pos;  // '<'
  std::string text;
  while (true) {
    if (c.done()) throw ParseError("unterminated IRI", start);
    char ch = c.s[c.pos];
    if (ch == '>') {
      ++c.pos;
      break;
    }
    if (ch == '\\') {
      ++c.pos;
      std::size_t before = text.size();
      decode_escape(c.s, c.pos, text);
      // Only numeric escapes are legal inside IRIs.
      if (text.size() - before == 1 && (text.back() == '\t' || text.back() == '\b' ||
                                        text.back() == '\n' || text.back() == '\r' ||
                                        text.back() == '\f' || text.back() == '\'' ||
                                        text.back() == '"' || text.back() == '\\'))
        throw ParseError("character escape inside IRI", c.pos);
      continue;
    }
    text += ch;
    ++c.pos;
  }
  if (!valid_iri_text(text)) throw ParseError("invalid IRI '" + text + "'", start);
  return Term::iri(std::move(text));
}

Term parse_blank(Cursor& c) {
  std::size_t start = c.pos;
  if (c.pos + 1 >= c.s.size() || c.s[c.pos] != '_' || c.s[c.pos + 1] != ':')
    throw ParseError("bad blank node", start);
  c.pos += 2;
  std::string label;
  while (!c.done()) {
    char ch = c.s[c.pos];
    bool label_char = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    if (!label_char) break;
    label += ch;
    ++c.pos;
  }
  // A trailing dot belongs to the statement, not the label.
  while (!label.empty() && label.back() == '.') {
    label.pop_back();
    --c.pos;
  }
  if (label.empty()) throw ParseError("empty blank node label", start);
  return Term::blank(std::move(label));
}

Term parse_literal(Cursor& c) {
  std::size_t start = c.pos;
  ++c.pos;  // '"'
  std::string lex;
  while (true) {
    if (c.done()) throw ParseError("unterminated literal", start);
    char ch = c.s[c.pos];
    if (ch == '"') {
      ++c.pos;
      break;
    }
    if (ch == '\\') {
      ++c.pos;
      decode_escape(c.s, c.pos, lex);
      continue;
    }
    lex += ch;
    ++c.pos;
  }
  if (!c.done() && c.peek() == '@') {
    ++c.pos;
    std::string tag;
    while (!c.done()) {
      char ch = c.peek();
      bool tag_char = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '-';
      if (!tag_char) break;
      tag += ch;
      ++c.pos;
    }
    if (tag.empty() || !((tag[0] >= 'a' && tag[0] <= 'z') || (tag[0] >= 'A' && tag[0] <= 'Z')))
      throw ParseError("bad language tag", c.pos);
    return Term::literal(std::move(lex), std::string(), std::move(tag));
  }
  if (c.pos + 1 < c.s.size() && c.s[c.pos] == '^' && c.s[c.pos + 1] == '^') {
    c.pos += 2;
    if (c.done() || c.peek() != '<') throw ParseError("datatype must be an IRI", c.pos);
    Term dt = parse_iri(c);
    return Term::literal(std::move(lex), std::move(dt.lexical));
  }
  return Term::literal(std::move(lex));
}

Term parse_term(Cursor& c) {
  c.skip_ws();
  if (c.done()) throw ParseError("expected term", c.pos);
  char ch = c.peek();
  if (ch == '<') return parse_iri(c);
  if (ch == '_') return parse_blank(c);
  if (ch == '"') return parse_literal(c);
  throw ParseError(std::string("unexpected character '") + ch + "'", c.pos);
}

std::string gunzip(std::string_view in) {
  z_stream strm{};
  if (inflateInit2(&strm, 16 + MAX_WBITS) != Z_OK) throw IoError("zlib init failed");
  std::string out;
  out.resize(std::max<std::size_t>(in.size() * 4, std::size_t(1) << 16));
  strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  strm.avail_in = static_cast<uInt>(in.size());
  std::size_t written = 0;
  while (true) {
    if (written == out.size()) out.resize(out.size() * 2);
    std::size_t room = out.size() - written;
    strm.next_out = reinterpret_cast<Bytef*>(out.data()) + written;
    strm.avail_out = static_cast<uInt>(room);
    int ret = inflate(&strm, Z_NO_FLUSH);
    written += room - strm.avail_out;
    if (ret == Z_STREAM_END) {
      // Concatenated gzip members: keep going while input remains.
      if (strm.avail_in == 0) break;
      if (inflateReset2(&strm, 16 + MAX_WBITS) != Z_OK) break;
      continue;
    }
    if (ret != Z_OK) {
      inflateEnd(&strm);
      throw IoError("gzip inflate failed");
    }
  }
  inflateEnd(&strm);
  out.resize(written);
  return out;
}

}  // namespace

ParsedTripleLine parse_ntriples_line(std::string_view line) {
  Cursor c{line};
  c.skip_ws();
  Term subject = parse_term(c);
  if (subject.is_literal()) throw ParseError("literal subject", 0);
  Term predicate = parse_term(c);
  if (!predicate.is_iri()) throw ParseError("predicate must be an IRI", c.pos);
  Term object = parse_term(c);
  c.skip_ws();
  if (c.done() || c.peek() != '.') throw ParseError("missing '.' terminator", c.pos);
  ++c.pos;
  c.skip_ws();
  if (!c.done() && c.peek() != '#') throw ParseError("trailing characters after '.'", c.pos);
  return ParsedTripleLine{std::move(subject), std::move(predicate), std::move(object)};
}

KnowledgeGraph parse_ntriples(std::istream& in, ParseStats* stats, bool strict) {
  KnowledgeGraph g;
  ParseStats local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    try {
      ParsedTripleLine t = parse_ntriples_line(v);
      std::size_t before = g.size();
      g.add(t.subject, t.predicate, t.object);
      if (g.size() == before)
        ++local.duplicates;
    } catch (const ParseError& e) {
      if (strict)
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      ++local.skipped;
    }
  }
  local.triples = g.size();
  if (stats) *stats = local;
  g.freeze();
  return g;
}

KnowledgeGraph load_ntriples(const std::string& path, ParseStats* stats, bool strict) {
  std::string raw = read_file(path);
  if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f &&
      static_cast<unsigned char>(raw[1]) == 0x8b)
    raw = gunzip(raw);
  std::istringstream in(std::move(raw));
  return parse_ntriples(in, stats, strict);
}

std::string to_ntriples_line(const KnowledgeGraph& g, TripleId id) {
  const EncodedTriple& t = g.triple(id);
  std::string out = to_ntriples(g.term(t.subject));
  out += ' ';
  out += to_ntriples(g.term(t.predicate));
  out += ' ';
  out += to_ntriples(g.term(t.object));
  out += " .";
  return out;
}

void serialize_ntriples(const KnowledgeGraph& g, std::ostream& out) {
  for (TripleId id = 0; id < g.size(); ++id) out << to_ntriples_line(g, id) << '\n';
}

}  // namespace corekg
