#include "corekg/eval.hpp"

#include <algorithm>
#include <limits>

#include "corekg/errors.hpp"

namespace corekg {

namespace {

constexpr TermId kUnset = std::numeric_limits<TermId>::max();

struct CompiledPattern {
  std::optional<TermId> s, p, o;  // constant positions, resolved
  int vs = -1, vp = -1, vo = -1;  // variable slots, -1 = constant
  bool dead = false;              // a constant the graph does not contain
  std::size_t static_count = 0;   // matches with variables as wildcards
};

struct Compiled {
  std::vector<CompiledPattern> pats;
  std::vector<std::string> var_names;  // slot -> name
  bool dead = false;
};

Compiled compile(const KnowledgeGraph& g, const Query& q) {
  Compiled c;
  auto slot_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < c.var_names.size(); ++i)
      if (c.var_names[i] == name) return static_cast<int>(i);
    c.var_names.push_back(name);
    return static_cast<int>(c.var_names.size() - 1);
  };
  for (const TriplePattern& p : q.bgp) {
    CompiledPattern cp;
    auto fill = [&](const PatternTerm& pt, std::optional<TermId>& constant, int& slot) {
      if (std::holds_alternative<Variable>(pt)) {
        slot = slot_of(std::get<Variable>(pt).name);
        return;
      }
      std::optional<TermId> id = g.find_term(std::get<Term>(pt));
      if (!id) {
        cp.dead = true;
        return;
      }
      constant = *id;
    };
    fill(p.subject, cp.s, cp.vs);
    fill(p.predicate, cp.p, cp.vp);
    fill(p.object, cp.o, cp.vo);
    cp.static_count = cp.dead ? 0 : g.match_count(cp.s, cp.p, cp.o);
    c.dead = c.dead || cp.dead;
    c.pats.push_back(cp);
  }
  return c;
}

// Smallest static candidate count first; patterns sharing a variable with
// the ones already placed take precedence so the join stays connected.
// Ties break on BGP position to keep the order reproducible.
std::vector<std::size_t> greedy_order(const Compiled& c) {
  std::size_t n = c.pats.size();
  std::vector<std::size_t> order;
  std::vector<bool> used(n, false);
  std::vector<bool> known(c.var_names.size(), false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    auto key = [&](std::size_t i) {
      const CompiledPattern& p = c.pats[i];
      bool connected = (p.vs >= 0 && known[p.vs]) || (p.vp >= 0 && known[p.vp]) ||
                       (p.vo >= 0 && known[p.vo]);
      return std::tuple<int, std::size_t, std::size_t>(connected ? 0 : 1, p.static_count, i);
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (best == n || key(i) < key(best)) best = i;
    }
    used[best] = true;
    order.push_back(best);
    const CompiledPattern& p = c.pats[best];
    if (p.vs >= 0) known[p.vs] = true;
    if (p.vp >= 0) known[p.vp] = true;
    if (p.vo >= 0) known[p.vo] = true;
  }
  return order;
}

using Row = std::vector<TermId>;

std::vector<Row> execute(const KnowledgeGraph& g, const Compiled& c,
                         std::span<const std::size_t> order) {
  std::vector<Row> rows{Row(c.var_names.size(), kUnset)};
  for (std::size_t pi : order) {
    const CompiledPattern& p = c.pats[pi];
    std::vector<Row> next;
    for (const Row& row : rows) {
      auto resolve = [&](const std::optional<TermId>& constant, int slot) -> std::optional<TermId> {
        if (constant) return constant;
        if (slot >= 0 && row[slot] != kUnset) return row[slot];
        return std::nullopt;
      };
      std::optional<TermId> rs = resolve(p.s, p.vs);
      std::optional<TermId> rp = resolve(p.p, p.vp);
      std::optional<TermId> ro = resolve(p.o, p.vo);
      for (TripleId t : g.match_span(rs, rp, ro)) {
        const EncodedTriple& tr = g.triple(t);
        Row extended = row;
        bool ok = true;
        auto bind = [&](int slot, TermId value) {
          if (slot < 0 || !ok) return;
          if (extended[slot] == kUnset)
            extended[slot] = value;
          else if (extended[slot] != value)
            ok = false;  // the same variable twice in one pattern
        };
        bind(p.vs, tr.subject);
        bind(p.vp, tr.predicate);
        bind(p.vo, tr.object);
        if (ok) next.push_back(std::move(extended));
      }
    }
    rows = std::move(next);
    if (rows.empty()) break;
  }
  return rows;
}

std::vector<Binding> to_bindings(const KnowledgeGraph& g, const Compiled& c,
                                 const std::vector<Row>& rows) {
  std::vector<Binding> out;
  out.reserve(rows.size());
  for (const Row& row : rows) {
    Binding b;
    for (std::size_t slot = 0; slot < c.var_names.size(); ++slot) {
      if (row[slot] == kUnset) throw Error("unbound variable after full join");
      b.emplace(c.var_names[slot], g.term(row[slot]));
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

std::vector<Binding> evaluate_bgp(const KnowledgeGraph& g, const Query& q) {
  if (q.bgp.empty()) throw Error("empty basic graph pattern");
  Compiled c = compile(g, q);
  if (c.dead) return {};
  std::vector<std::size_t> order = greedy_order(c);
  return to_bindings(g, c, execute(g, c, order));
}

std::vector<Binding> evaluate_bgp_ordered(const KnowledgeGraph& g, const Query& q,
                                          std::span<const std::size_t> order) {
  if (q.bgp.empty()) throw Error("empty basic graph pattern");
  std::vector<bool> seen(q.bgp.size(), false);
  if (order.size() != q.bgp.size()) throw Error("order is not a permutation of the BGP");
  for (std::size_t i : order) {
    if (i >= q.bgp.size() || seen[i]) throw Error("order is not a permutation of the BGP");
    seen[i] = true;
  }
  Compiled c = compile(g, q);
  if (c.dead) return {};
  return to_bindings(g, c, execute(g, c, order));
}

std::vector<TripleId> relevant_triples(const KnowledgeGraph& g, const Query& q,
                                       RelevanceMode mode) {
  if (q.bgp.empty()) throw Error("empty basic graph pattern");
  std::vector<bool> hit(g.size(), false);
  Compiled c = compile(g, q);
  if (mode == RelevanceMode::PerPattern) {
    for (const CompiledPattern& p : c.pats) {
      if (p.dead) continue;
      // Cross-pattern variable consistency is deliberately ignored in this
      // mode, but a variable repeated inside the pattern itself still
      // constrains the match.
      bool sp = p.vs >= 0 && p.vs == p.vp;
      bool so = p.vs >= 0 && p.vs == p.vo;
      bool po = p.vp >= 0 && p.vp == p.vo;
      for (TripleId t : g.match_span(p.s, p.p, p.o)) {
        const EncodedTriple& tr = g.triple(t);
        if (sp && tr.subject != tr.predicate) continue;
        if (so && tr.subject != tr.object) continue;
        if (po && tr.predicate != tr.object) continue;
        hit[t] = true;
      }
    }
  } else if (!c.dead) {
    std::vector<Row> rows = execute(g, c, greedy_order(c));
    for (const Row& row : rows) {
      for (const CompiledPattern& p : c.pats) {
        TermId s = p.s ? *p.s : row[p.vs];
        TermId pr = p.p ? *p.p : row[p.vp];
        TermId o = p.o ? *p.o : row[p.vo];
        std::optional<TripleId> t = g.find(s, pr, o);
        if (!t) throw Error("solution instantiates a missing triple");
        hit[*t] = true;
      }
    }
  }
  std::vector<TripleId> out;
  for (TripleId t = 0; t < hit.size(); ++t)
    if (hit[t]) out.push_back(t);
  return out;
}

AnswerSet project_answers(const std::vector<Binding>& bindings,
                          const std::vector<std::string>& projection) {
  AnswerSet out;
  if (!projection.empty()) {
    out.columns = projection;
  } else if (!bindings.empty()) {
    for (const auto& [name, term] : bindings.front()) out.columns.push_back(name);
    // Binding is an ordered map, so this is already lexicographic.
  }
  for (const Binding& b : bindings) {
    std::vector<Term> row;
    row.reserve(out.columns.size());
    for (const std::string& col : out.columns) {
      auto it = b.find(col);
      if (it == b.end()) throw Error("binding lacks projected variable ?" + col);
      row.push_back(it->second);
    }
    out.rows.insert(std::move(row));
  }
  return out;
}

AnswerSet answer_query(const KnowledgeGraph& g, const Query& q) {
  return project_answers(evaluate_bgp(g, q), q.projection);
}

}  // namespace corekg
