#pragma once

// Generators and independent oracles shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "semwb.hpp"

namespace semwb::tests {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Sentences of the test corpus, one per line; % starts a comment.
inline std::vector<std::string> corpus() {
  std::vector<std::string> out;
  std::istringstream is(read_file(SEMWB_TEST_DATA "/corpus.txt"));
  std::string line;
  while (std::getline(is, line)) {
    auto pct = line.find('%');
    if (pct != std::string::npos) line.erase(pct);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random well-typed terms

/// Grows terms of a requested type. Binder names come from a tiny pool so
/// shadowing and capture situations are common.
class TermGen {
 public:
  explicit TermGen(unsigned seed, bool intensional = true) : rng_(seed), intensional_(intensional) {}

  Term of(const Type& ty, int depth) {
    std::vector<Var> env;
    return gen(ty, depth, env);
  }

  Type some_type() {
    static const std::vector<Type> pool{Type::e(), Type::t(), et(), Type::fn(et(), Type::t()),
                                        Type::fn(Type::e(), et())};
    return pool[pick(pool.size())];
  }

 private:
  static Type et() { return Type::fn(Type::e(), Type::t()); }

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  Term leaf(const Type& ty, const std::vector<Var>& env) {
    std::vector<Var> ok;
    std::set<std::string> shadowed;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (!shadowed.insert(it->name).second) continue;
      if (it->type == ty) ok.push_back(*it);
    }
    if (!ok.empty() && coin(0.7)) return Term::var(ok[pick(ok.size())]);
    static const char* es[] = {"anna", "bill"};
    static const char* ts[] = {"rain", "snow"};
    if (ty == Type::e()) return Term::constant(es[pick(2)], ty);
    if (ty == Type::t()) return Term::constant(ts[pick(2)], ty);
    std::string name = "c" + std::to_string(std::hash<std::string>{}(ty.str()) % 997);
    return Term::constant(name, ty);
  }

  Term gen(const Type& ty, int depth, std::vector<Var>& env) {
    if (depth <= 1) return leaf(ty, env);
    int choice = static_cast<int>(pick(10));
    // A redex: (λv.body) arg, or down(up(...)).
    if (choice < 3) {
      Type a = coin() ? Type::e() : et();
      Var v{pool_name(), a};
      env.push_back(v);
      Term body = gen(ty, depth - 2, env);
      env.pop_back();
      return Term::app(Term::lam(v, body), gen(a, depth - 2, env));
    }
    if (choice == 3 && intensional_) return Term::down(Term::up(gen(ty, depth - 2, env)));
    if (ty.is_function()) {
      Var v{pool_name(), ty.domain()};
      env.push_back(v);
      Term body = gen(ty.codomain(), depth - 1, env);
      env.pop_back();
      return Term::lam(v, body);
    }
    if (ty == Type::t()) {
      switch (choice) {
        case 4: {
          Var v{pool_name(), Type::e()};
          env.push_back(v);
          Term body = gen(Type::t(), depth - 1, env);
          env.pop_back();
          return Term::quant(coin() ? QuantKind::Forall : QuantKind::Exists, v, body);
        }
        case 5: return Term::conn(ConnKind::And, {gen(Type::t(), depth - 1, env), gen(Type::t(), depth - 1, env)});
        case 6: return Term::conn(ConnKind::Not, {gen(Type::t(), depth - 1, env)});
        case 7: {
          Var v{pool_name(), Type::e()};
          env.push_back(v);
          Term c = Term::app(Term::constant("man", et()), Term::var(v));
          Term more = gen(Type::t(), depth - 2, env);
          env.pop_back();
          return Term::drs({v}, {c, more});
        }
        default: break;
      }
    }
    // Application of a function-typed term to an argument.
    Type a = coin() ? Type::e() : et();
    return Term::app(gen(Type::fn(a, ty), depth - 1, env), gen(a, depth - 1, env));
  }

  std::string pool_name() {
    static const char* names[] = {"x", "y", "z"};
    return names[pick(3)];
  }

  std::mt19937 rng_;
  bool intensional_;
};

// ---------------------------------------------------------------------------
// Random closed DRSs over p/1, q/1, r/2 and the constant anna

class DrsGen {
 public:
  explicit DrsGen(unsigned seed) : rng_(seed) {}

  Term drs(int depth, std::vector<Var> accessible = {}) {
    std::vector<Var> universe;
    int n = static_cast<int>(pick(3));
    for (int i = 0; i < n; ++i) universe.push_back(Var{names_[pick(4)], Type::e()});
    // duplicate names in one universe are not meaningful; keep the first
    std::vector<Var> u;
    for (const auto& v : universe)
      if (std::find(u.begin(), u.end(), v) == u.end()) u.push_back(v);
    for (const auto& v : u) accessible.push_back(v);
    std::vector<Term> conds;
    int k = 1 + static_cast<int>(pick(3));
    for (int i = 0; i < k; ++i) conds.push_back(condition(depth, accessible));
    return Term::drs(u, conds);
  }

  Term condition(int depth, const std::vector<Var>& acc) {
    size_t c = pick(depth > 0 ? 7 : 4);
    auto p1 = [](const char* p) { return Term::constant(p, Type::fn(Type::e(), Type::t())); };
    Term r = Term::constant("r", Type::fn(Type::e(), Type::fn(Type::e(), Type::t())));
    switch (c) {
      case 0: return Term::app(p1("p"), arg(acc));
      case 1: return Term::app(p1("q"), arg(acc));
      case 2: return Term::apply(r, {arg(acc), arg(acc)});
      case 3: return Term::conn(ConnKind::Eq, {arg(acc), arg(acc)});
      case 4: return Term::conn(ConnKind::Not, {drs(depth - 1, acc)});
      case 5: {
        Term ante = drs(depth - 1, acc);
        std::vector<Var> acc2 = acc;
        for (const auto& v : ante.universe()) acc2.push_back(v);
        return Term::conn(ConnKind::Implies, {ante, drs(depth - 1, acc2)});
      }
      default: return Term::conn(ConnKind::Or, {drs(depth - 1, acc), drs(depth - 1, acc)});
    }
  }

 private:
  Term arg(const std::vector<Var>& acc) {
    if (acc.empty() || pick(5) == 0) return Term::constant("anna", Type::e());
    return Term::var(acc[pick(acc.size())]);
  }
  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

  std::mt19937 rng_;
  const char* names_[4] = {"x", "y", "z", "u"};
};

/// Semantic equivalence of two closed DRSs over every model up to the given
/// domain size, with the reference (non-compiled) evaluator.
inline bool same_truth_conditions(const Term& a, const Term& b, int max_domain) {
  ModelSignature sig = signature_of(a);
  sig.merge(signature_of(b));
  for (int n = 1; n <= max_domain; ++n) {
    ModelSpace space(sig, n);
    bool same = true;
    space.for_each([&](const PackedModel& pm) {
      if (!same) return;
      FiniteModel m = space.unpack(pm);
      same = eval_drs(a, m) == eval_drs(b, m);
    });
    if (!same) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parsing oracles

/// Words grouped by their full set of lexical categories; one representative
/// per class is enough to decide membership for all words in the class.
inline std::vector<std::string> word_classes(const Grammar& g) {
  std::map<std::string, std::string> rep;
  for (const auto& w : g.vocabulary()) {
    std::string key;
    for (const auto* e : g.lookup(w)) key += category_string(e->category) + ";";
    rep.emplace(key, w);
  }
  std::vector<std::string> out;
  for (const auto& [k, w] : rep) out.push_back(w);
  return out;
}

/// Exhaustive bottom-up recognizer: every category derivable for every span,
/// trying every rule over every split. No agenda, no packing. Words are
/// pushed one at a time, each push filling the column of spans that end at
/// the new word, so sequences sharing a prefix share work. Rule applications
/// are memoised on the canonical daughter strings.
class ExhaustiveRecognizer {
 public:
  explicit ExhaustiveRecognizer(const Grammar& g) : g_(g), start_(g.start_category()) {}

  bool operator()(const std::vector<std::string>& words) {
    while (!cols_.empty()) pop();
    for (const auto& w : words) push(w);
    return accepts();
  }

  void push(const std::string& word) {
    size_t j = cols_.size() + 1;
    cols_.emplace_back(j);  // cols_[j-1][i] is the cell for span (i, j)
    for (const auto* e : g_.lookup(word)) add(cell(j - 1, j), e->category);
    for (size_t i = j; i-- > 0;) {
      bool changed = true;
      while (changed) {  // unary rules may feed each other
        changed = false;
        for (const auto& r : g_.rules) {
          std::vector<const Cat*> ds;
          std::vector<FeatureStructure> found;
          fill(i, j, r, ds, found);
          for (auto& m : found) changed = add(cell(i, j), std::move(m)) || changed;
        }
      }
    }
  }

  void pop() { cols_.pop_back(); }

  bool accepts() const {
    if (cols_.empty()) return false;
    for (const auto& c : cols_.back()[0])
      if (unify(c.fs, start_)) return true;
    return false;
  }

 private:
  struct Cat {
    FeatureStructure fs;
    std::string key;
  };
  using Cell = std::vector<Cat>;

  Cell& cell(size_t i, size_t j) { return cols_[j - 1][i]; }

  static bool add(Cell& v, FeatureStructure fs) {
    std::string key = fs.str();
    for (const auto& x : v)
      if (x.key == key) return false;
    v.push_back({std::move(fs), std::move(key)});
    return true;
  }

  void fill(size_t from, size_t to, const GrammarRule& r, std::vector<const Cat*>& ds,
            std::vector<FeatureStructure>& out) {
    size_t k = ds.size();
    if (k == r.arity()) {
      if (from == to)
        if (auto m = apply(r, ds)) out.push_back(*m);
      return;
    }
    for (size_t mid = from + 1; mid <= to; ++mid) {
      if (k + 1 == r.arity() && mid != to) continue;
      for (const auto& c : cell(from, mid)) {
        ds.push_back(&c);
        fill(mid, to, r, ds, out);
        ds.pop_back();
      }
    }
  }

  std::optional<FeatureStructure> apply(const GrammarRule& r, const std::vector<const Cat*>& ds) {
    std::string key = r.id;
    for (const auto* d : ds) key += "|" + d->key;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<FeatureStructure> fs;
    for (const auto* d : ds) fs.push_back(d->fs);
    return memo_[key] = apply_rule(r, fs);
  }

  const Grammar& g_;
  FeatureStructure start_;
  std::vector<std::vector<Cell>> cols_;
  std::unordered_map<std::string, std::optional<FeatureStructure>> memo_;
};

inline bool recognizes(const Grammar& g, const std::vector<std::string>& words) {
  return ExhaustiveRecognizer(g)(words);
}

/// Every sentential form of a context-free grammar up to max_len symbols.
/// Only valid for grammars whose categories carry no features.
inline std::set<std::vector<std::string>> sentential_forms(const Grammar& g, size_t max_len) {
  std::set<std::vector<std::string>> seen;
  std::vector<std::vector<std::string>> todo{{g.start}};
  while (!todo.empty()) {
    auto form = todo.back();
    todo.pop_back();
    if (!seen.insert(form).second) continue;
    for (size_t i = 0; i < form.size(); ++i)
      for (const auto& r : g.rules) {
        if (r.mother != form[i] || form.size() - 1 + r.daughters.size() > max_len) continue;
        std::vector<std::string> next(form.begin(), form.begin() + static_cast<long>(i));
        next.insert(next.end(), r.daughters.begin(), r.daughters.end());
        next.insert(next.end(), form.begin() + static_cast<long>(i) + 1, form.end());
        todo.push_back(std::move(next));
      }
  }
  return seen;
}

/// Calls f on every sequence over `alphabet` of length 1..max_len.
template <class F>
void for_each_sequence(const std::vector<std::string>& alphabet, size_t max_len, F&& f) {
  std::vector<size_t> idx;
  std::vector<std::string> seq;
  for (size_t len = 1; len <= max_len; ++len) {
    idx.assign(len, 0);
    while (true) {
      seq.clear();
      for (size_t i : idx) seq.push_back(alphabet[i]);
      f(seq);
      size_t k = 0;
      while (k < len && ++idx[k] == alphabet.size()) idx[k++] = 0;
      if (k == len) break;
    }
  }
}

/// Depth-first walk over every sequence of length 1..max_len, calling
/// push(word) on the way down, visit(seq) at each node and pop() on the way
/// back, so incremental recognizers share prefix work.
template <class Push, class Visit, class Pop>
void for_each_prefix(const std::vector<std::string>& alphabet, size_t max_len, Push&& push, Visit&& visit,
                     Pop&& pop) {
  std::vector<std::string> seq;
  std::function<void()> go = [&] {
    if (seq.size() == max_len) return;
    for (const auto& w : alphabet) {
      seq.push_back(w);
      push(w);
      visit(seq);
      go();
      pop();
      seq.pop_back();
    }
  };
  go();
}

// ---------------------------------------------------------------------------
// Grapher oracles

/// Random well-formed description trees over the built-in tags.
class DescGen {
 public:
  explicit DescGen(unsigned seed) : rng_(seed) {}

  DescNode node(int depth) {
    int pick = depth <= 0 ? 0 : roll(8);
    switch (pick) {
      case 0:
      case 1: return DescNode::text(word());
      case 2: {
        std::vector<DescNode> kids{node(depth - 1)};
        for (int i = roll(4); i > 0; --i) kids.push_back(node(depth - 1));
        return DescNode::make("tree", std::move(kids));
      }
      case 3: {
        std::vector<DescNode> kids{DescNode::text(word())};
        for (int i = roll(3); i > 0; --i) kids.push_back(node(depth - 1));
        return DescNode::make("drs", std::move(kids));
      }
      case 4: {
        DescNode d{"avm", {}};
        for (int i = roll(3); i > 0; --i) {
          d.args.emplace_back(word());
          d.args.emplace_back(node(depth - 1));
        }
        return d;
      }
      case 5:
      case 6: {
        std::vector<DescNode> kids;
        for (int i = roll(3) + 1; i > 0; --i) kids.push_back(node(depth - 1));
        return DescNode::make(pick == 5 ? "hbox" : "vbox", std::move(kids));
      }
      default:
        return roll(2) ? DescNode::make("frame", {node(depth - 1)}) : DescNode::active("act/" + word(), node(depth - 1));
    }
  }

 private:
  int roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string word() {
    static const char* pool[] = {"S", "NP", "every man", "x", "a \"q\"", "<&>", "back\\slash", "lam(x,p(x))", "ü"};
    return pool[roll(9)];
  }
  std::mt19937 rng_;
};

inline bool has_prefix(const std::vector<int>& v, const std::vector<int>& p) {
  return v.size() >= p.size() && std::equal(p.begin(), p.end(), v.begin());
}

struct Extent {
  double x0 = 1e18, y0 = 1e18, x1 = -1e18, y1 = -1e18;
  bool empty() const { return x0 > x1; }
  void add(const LayoutBox& b) {
    x0 = std::min({x0, b.x, b.x2()});
    x1 = std::max({x1, b.x, b.x2()});
    y0 = std::min({y0, b.y, b.y2()});
    y1 = std::max({y1, b.y, b.y2()});
  }
};

/// Extent of every box that came from the element at `path` or below it.
inline Extent extent_of(const std::vector<LayoutBox>& boxes, const std::vector<int>& path) {
  Extent e;
  for (const auto& b : boxes)
    if (has_prefix(b.source, path)) e.add(b);
  return e;
}

inline bool interiors_overlap(const Extent& a, const Extent& b, double eps = 1e-9) {
  if (a.empty() || b.empty()) return false;
  return std::min(a.x1, b.x1) - std::max(a.x0, b.x0) > eps && std::min(a.y1, b.y1) - std::max(a.y0, b.y0) > eps;
}

struct LayoutCheck {
  double max_centering_error = 0;
  int sibling_overlaps = 0;
  int text_overlaps = 0;
  int escaped_boxes = 0;  // boxes outside the rect drawn for an ancestor
  int negative = 0;       // boxes with negative coordinates or size
};

/// Geometric invariants of a layout: tree mothers centred over their
/// daughters, siblings disjoint, rects containing their content.
inline LayoutCheck check_layout(const DescNode& root, const std::vector<LayoutBox>& boxes) {
  LayoutCheck out;
  std::function<void(const DescNode&, std::vector<int>)> walk = [&](const DescNode& d, std::vector<int> path) {
    std::vector<Extent> sibs;
    for (size_t i = 0; i < d.args.size(); ++i) {
      if (d.args[i].is_string()) continue;
      auto sub = path;
      sub.push_back(static_cast<int>(i));
      sibs.push_back(extent_of(boxes, sub));
      walk(d.args[i].node(), sub);
    }
    if (d.tag == "tree" && sibs.size() > 1) {
      Extent joint;
      for (size_t i = 1; i < sibs.size(); ++i) {
        if (sibs[i].empty()) continue;
        joint.x0 = std::min(joint.x0, sibs[i].x0);
        joint.x1 = std::max(joint.x1, sibs[i].x1);
      }
      double m = (sibs[0].x0 + sibs[0].x1) / 2, j = (joint.x0 + joint.x1) / 2;
      out.max_centering_error = std::max(out.max_centering_error, std::abs(m - j));
    }
    if (d.tag == "tree" || d.tag == "hbox" || d.tag == "vbox" || d.tag == "drs" || d.tag == "avm")
      for (size_t i = 0; i < sibs.size(); ++i)
        for (size_t k = i + 1; k < sibs.size(); ++k) out.sibling_overlaps += interiors_overlap(sibs[i], sibs[k]);
  };
  walk(root, {});
  for (size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    if (b.x < 0 || b.y < 0 || b.x2() < 0 || b.y2() < 0) ++out.negative;
    if (b.kind != LayoutBox::Kind::Line && (b.width < 0 || b.height < 0)) ++out.negative;
    if (b.kind == LayoutBox::Kind::Rect) {
      for (const auto& o : boxes)
        if (&o != &b && o.source.size() > b.source.size() && has_prefix(o.source, b.source)) {
          Extent e;
          e.add(o);
          if (e.x0 < b.x - 1e-9 || e.x1 > b.x2() + 1e-9 || e.y0 < b.y - 1e-9 || e.y1 > b.y2() + 1e-9)
            ++out.escaped_boxes;
        }
    }
    if (b.kind != LayoutBox::Kind::Text) continue;
    for (size_t k = i + 1; k < boxes.size(); ++k) {
      if (boxes[k].kind != LayoutBox::Kind::Text) continue;
      Extent a, c;
      a.add(b);
      c.add(boxes[k]);
      out.text_overlaps += interiors_overlap(a, c);
    }
  }
  return out;
}

/// Minimal XML check: balanced tags, quoted attributes, no raw '<' or '&'
/// in text.
inline bool xml_well_formed(const std::string& s) {
  std::vector<std::string> open;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      size_t semi = s.find(';', i);
      if (semi == std::string::npos) return false;
      std::string ent = s.substr(i, semi - i + 1);
      if (ent != "&amp;" && ent != "&lt;" && ent != "&gt;" && ent != "&quot;" && ent != "&apos;") return false;
      i = semi + 1;
      continue;
    }
    if (s[i] != '<') {
      ++i;
      continue;
    }
    size_t j = i + 1;
    bool closing = j < s.size() && s[j] == '/';
    if (closing) ++j;
    size_t name_end = j;
    while (name_end < s.size() && (std::isalnum(static_cast<unsigned char>(s[name_end])) || s[name_end] == '-')) ++name_end;
    if (name_end == j) return false;
    std::string name = s.substr(j, name_end - j);
    size_t k = name_end;
    bool in_quote = false;
    while (k < s.size() && (in_quote || s[k] != '>')) {
      if (s[k] == '"') in_quote = !in_quote;
      else if (in_quote && s[k] == '<')
        return false;
      else if (in_quote && s[k] == '&' && s.compare(k, 5, "&amp;") != 0 && s.compare(k, 4, "&lt;") != 0 &&
               s.compare(k, 4, "&gt;") != 0 && s.compare(k, 6, "&quot;") != 0)
        return false;
      ++k;
    }
    if (k == s.size()) return false;
    bool self = s[k - 1] == '/';
    if (closing) {
      if (open.empty() || open.back() != name) return false;
      open.pop_back();
    } else if (!self) {
      open.push_back(name);
    }
    i = k + 1;
  }
  return open.empty();
}

}  // namespace semwb::tests
