#pragma once

// Parsers producing syntax trees: a bottom-up chart parser (CKY over rules
// of any arity, unary rules closed per cell) and an incremental
// shift-reduce parser for categorial grammars.

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "grammar.hpp"

namespace semwb {

enum class ParserKind { Chart, Incremental };

inline const char* to_string(ParserKind p) { return p == ParserKind::Chart ? "chart" : "incremental"; }

struct SynTree {
  int id = 0;              // preorder position in the whole tree
  std::string category;    // category label without features
  FeatureStructure fs;     // category structure at rule application
  int start = 0, end = 0;  // token span [start, end)
  std::string rule;        // rule id for inner nodes
  std::string word;        // lexeme for leaves
  std::vector<SynTree> children;

  bool is_leaf() const { return children.empty(); }
  size_t size() const {
    size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
  }
  const SynTree* find(int node) const {
    if (id == node) return this;
    for (const auto& c : children)
      if (const SynTree* f = c.find(node)) return f;
    return nullptr;
  }
};

/// Bracketed form: s(np(anna),vp(laughs)).
inline std::string to_string(const SynTree& t) {
  std::ostringstream os;
  os << t.category << "(";
  if (t.is_leaf()) {
    os << t.word;
  } else {
    for (size_t i = 0; i < t.children.size(); ++i) os << (i ? "," : "") << to_string(t.children[i]);
  }
  os << ")";
  return os.str();
}

/// Applies a rule to daughter categories; the mother category on success.
inline std::optional<FeatureStructure> apply_rule(const GrammarRule& r, const std::vector<FeatureStructure>& ds) {
  if (ds.size() != r.arity()) return std::nullopt;
  FeatureStructure::Builder b;
  int root = b.import(r.fs);
  for (size_t k = 0; k < ds.size(); ++k) {
    int d = b.import(ds[k]);
    int slot = b.child(root, std::to_string(k + 1));
    if (!b.unify(slot, d)) return std::nullopt;
  }
  return b.build(b.child(root, "0"));
}

/// apply_rule through the grammar's memo table. `keys` are the daughters'
/// canonical strings when the caller already has them.
inline std::optional<FeatureStructure> apply_rule(const Grammar& g, size_t r, const std::vector<FeatureStructure>& ds,
                                                  const std::vector<const std::string*>& keys = {}) {
  std::string key = std::to_string(r);
  for (size_t i = 0; i < ds.size(); ++i) key += "|" + (i < keys.size() ? *keys[i] : ds[i].str());
  auto& memo = g.rule_memo();
  {
    std::lock_guard lk(memo.mu);
    auto it = memo.results.find(key);
    if (it != memo.results.end()) return it->second;
  }
  auto m = apply_rule(g.rules[r], ds);
  std::lock_guard lk(memo.mu);
  if (memo.results.size() > 100000) memo.results.clear();
  memo.results.emplace(std::move(key), m);
  return m;
}

namespace parse_detail {

struct Edge {
  FeatureStructure fs;
  std::string cat;  // cat atom for fast filtering
  int start, end;
  int rule = -1;  // index into grammar rules; -1 for lexical edges
  std::string word;
  std::vector<int> kids;
  std::set<int> unary_used;  // unary rules already applied on this span chain
};

inline std::vector<SynTree> number(std::vector<SynTree> trees) {
  for (auto& t : trees) {
    int next = 0;
    std::function<void(SynTree&)> go = [&](SynTree& n) {
      n.id = next++;
      for (auto& c : n.children) go(c);
    };
    go(t);
  }
  return trees;
}

inline SynTree build(const std::vector<Edge>& edges, const Grammar& g, int id) {
  const Edge& e = edges[static_cast<size_t>(id)];
  SynTree t;
  t.category = category_label(e.fs);
  t.fs = e.fs;
  t.start = e.start;
  t.end = e.end;
  if (e.rule >= 0) t.rule = g.rules[static_cast<size_t>(e.rule)].id;
  t.word = e.word;
  for (int k : e.kids) t.children.push_back(build(edges, g, k));
  return t;
}

inline bool daughter_fits(const GrammarRule& r, size_t k, const Edge& e) {
  const std::string& want = r.daughters[k];
  return want.empty() || !std::islower(static_cast<unsigned char>(want[0])) || want == e.cat;
}

}  // namespace parse_detail

/// Left-to-right CKY chart. Words are added one at a time; each push fills
/// exactly the cells ending at the new word, so a prefix's chart is reused
/// by every continuation.
class ChartParser {
 public:
  explicit ChartParser(const Grammar& g) : g_(g) {}

  size_t length() const { return columns_.size(); }

  void push(const std::string& word) {
    auto entries = g_.lookup(word);
    if (entries.empty()) throw Error(ErrorCode::UnknownWord, word);
    int j = static_cast<int>(columns_.size()) + 1;
    marks_.push_back(edges_.size());
    columns_.emplace_back(static_cast<size_t>(j));  // cells (i, j) for i < j
    for (const auto* e : entries) {
      parse_detail::Edge edge{e->category, category_name(e->category), j - 1, j, -1, word, {}, {}};
      add(std::move(edge));
    }
    close_unary(j - 1, j);
    for (int i = j - 2; i >= 0; --i) {
      for (size_t r = 0; r < g_.rules.size(); ++r) {
        const GrammarRule& rule = g_.rules[r];
        if (rule.arity() < 2) continue;
        std::vector<int> picked;
        combine(static_cast<int>(r), i, j, i, picked);
      }
      close_unary(i, j);
    }
  }

  void pop() {
    edges_.resize(marks_.back());
    marks_.pop_back();
    columns_.pop_back();
  }

  /// Edges for the whole input whose category unifies with the start symbol.
  std::vector<int> complete() const {
    std::vector<int> out;
    if (columns_.empty()) return out;
    FeatureStructure start = g_.start_category();
    for (int id : cell(0, static_cast<int>(columns_.size())))
      if (unify(edges_[static_cast<size_t>(id)].fs, start)) out.push_back(id);
    return out;
  }

  bool accepts() const { return !complete().empty(); }

  std::vector<SynTree> trees() const {
    std::vector<SynTree> out;
    for (int id : complete()) out.push_back(parse_detail::build(edges_, g_, id));
    return parse_detail::number(std::move(out));
  }

  size_t edge_count() const { return edges_.size(); }

 private:
  const std::vector<int>& cell(int i, int j) const {
    return columns_[static_cast<size_t>(j - 1)][static_cast<size_t>(i)];
  }

  void add(parse_detail::Edge e) {
    int id = static_cast<int>(edges_.size());
    int i = e.start, j = e.end;
    edges_.push_back(std::move(e));
    columns_[static_cast<size_t>(j - 1)][static_cast<size_t>(i)].push_back(id);
  }

  // Chooses daughters for rule r left to right; `pos` is where the next
  // daughter starts.
  void combine(int r, int i, int j, int pos, std::vector<int>& picked) {
    const GrammarRule& rule = g_.rules[static_cast<size_t>(r)];
    size_t k = picked.size();
    if (k == rule.arity()) {
      if (pos != j) return;
      std::vector<FeatureStructure> ds;
      for (int id : picked) ds.push_back(edges_[static_cast<size_t>(id)].fs);
      if (auto m = apply_rule(g_, static_cast<size_t>(r), ds)) {
        parse_detail::Edge e{*m, category_name(*m), i, j, r, "", picked, {}};
        add(std::move(e));
      }
      return;
    }
    size_t left = rule.arity() - k - 1;  // daughters still needed after this one
    for (int end = pos + 1; end + static_cast<int>(left) <= j; ++end) {
      if (k + 1 == rule.arity() && end != j) continue;
      // Copy: adding edges may reallocate the cell.
      std::vector<int> here = cell(pos, end);
      for (int id : here) {
        if (!parse_detail::daughter_fits(rule, k, edges_[static_cast<size_t>(id)])) continue;
        picked.push_back(id);
        combine(r, i, j, end, picked);
        picked.pop_back();
      }
    }
  }

  void close_unary(int i, int j) {
    for (size_t n = 0; n < cell(i, j).size(); ++n) {
      int id = cell(i, j)[n];
      for (size_t r = 0; r < g_.rules.size(); ++r) {
        const GrammarRule& rule = g_.rules[r];
        if (rule.arity() != 1) continue;
        const auto& e = edges_[static_cast<size_t>(id)];
        if (e.unary_used.count(static_cast<int>(r)) || !parse_detail::daughter_fits(rule, 0, e)) continue;
        if (auto m = apply_rule(g_, r, {e.fs})) {
          parse_detail::Edge up{*m, category_name(*m), i, j, static_cast<int>(r), "", {id}, e.unary_used};
          up.unary_used.insert(static_cast<int>(r));
          add(std::move(up));
        }
      }
    }
  }

  const Grammar& g_;
  std::vector<parse_detail::Edge> edges_;
  std::vector<size_t> marks_;
  // columns_[j-1][i] holds the edges spanning (i, j).
  std::vector<std::vector<std::vector<int>>> columns_;
};

/// Shift-reduce over a categorial grammar: tokens are consumed left to right,
/// and after each shift the top two stack items may be combined by forward
/// or backward application or forward composition. Depth-first with shift
/// tried before reduce; every derivation is returned.
class IncrementalParser {
 public:
  explicit IncrementalParser(const Grammar& g) : g_(g) {}

  std::vector<SynTree> parse(const std::vector<std::string>& tokens, size_t limit = 10000) {
    edges_.clear();
    lexical_.clear();
    for (size_t p = 0; p < tokens.size(); ++p) {
      auto entries = g_.lookup(tokens[p]);
      if (entries.empty()) throw Error(ErrorCode::UnknownWord, tokens[p]);
      std::vector<int> ids;
      for (const auto* e : entries) {
        ids.push_back(static_cast<int>(edges_.size()));
        int s = static_cast<int>(p);
        edges_.push_back(parse_detail::Edge{e->category, category_name(e->category), s, s + 1, -1, tokens[p], {}, {}});
      }
      lexical_.push_back(std::move(ids));
    }
    found_.clear();
    seen_.clear();
    dead_.clear();
    keys_.clear();
    limit_ = limit;
    std::vector<int> stack;
    search(stack, 0);
    std::vector<SynTree> out;
    for (int id : found_) out.push_back(parse_detail::build(edges_, g_, id));
    return parse_detail::number(std::move(out));
  }

  bool accepts(const std::vector<std::string>& tokens) { return !parse(tokens, 1).empty(); }

 private:
  // Whether a configuration can still reach a parse depends only on the
  // input position and the categories on the stack, so configurations that
  // produced nothing are remembered and skipped.
  void search(std::vector<int>& stack, size_t pos) {
    if (found_.size() >= limit_) return;
    std::string key = std::to_string(pos);
    for (int id : stack) key += "|" + category_key(id);
    if (dead_.count(key)) return;
    size_t before = found_.size();
    explore(stack, pos);
    if (found_.size() == before) dead_.insert(std::move(key));
  }

  const std::string& category_key(int id) {
    if (keys_.size() < edges_.size()) keys_.resize(edges_.size());
    std::string& k = keys_[static_cast<size_t>(id)];
    if (k.empty()) k = edges_[static_cast<size_t>(id)].fs.str();
    return k;
  }

  void explore(std::vector<int>& stack, size_t pos) {
    if (pos == lexical_.size() && stack.size() == 1) {
      const auto& e = edges_[static_cast<size_t>(stack[0])];
      if (unify(e.fs, g_.start_category())) {
        std::string key = signature(stack[0]);
        if (seen_.insert(key).second) found_.push_back(stack[0]);
      }
    }
    if (pos < lexical_.size()) {
      for (int id : lexical_[pos]) {
        stack.push_back(id);
        search(stack, pos + 1);
        stack.pop_back();
      }
    }
    if (stack.size() >= 2) {
      int b = stack.back();
      int a = stack[stack.size() - 2];
      for (size_t r = 0; r < g_.rules.size(); ++r) {
        std::string ka = category_key(a);
        std::string kb = category_key(b);
        auto m = apply_rule(g_, r, {edges_[static_cast<size_t>(a)].fs, edges_[static_cast<size_t>(b)].fs}, {&ka, &kb});
        if (!m) continue;
        int id = static_cast<int>(edges_.size());
        edges_.push_back(parse_detail::Edge{*m, category_name(*m), edges_[static_cast<size_t>(a)].start,
                                            edges_[static_cast<size_t>(b)].end, static_cast<int>(r), "", {a, b}, {}});
        stack.pop_back();
        stack.pop_back();
        stack.push_back(id);
        search(stack, pos);
        stack.pop_back();
        stack.push_back(a);
        stack.push_back(b);
      }
    }
  }

  std::string signature(int id) const {
    const auto& e = edges_[static_cast<size_t>(id)];
    std::string s = e.rule >= 0 ? g_.rules[static_cast<size_t>(e.rule)].id : e.word + "@" + std::to_string(e.start);
    s += "(";
    for (int k : e.kids) s += signature(k) + ",";
    return s + ")";
  }

  const Grammar& g_;
  std::vector<parse_detail::Edge> edges_;
  std::vector<std::vector<int>> lexical_;
  std::vector<int> found_;
  std::set<std::string> seen_;
  std::set<std::string> dead_;
  std::vector<std::string> keys_;
  size_t limit_ = 0;
};

/// Called on every node of every returned tree, bottom-up; the hook through
/// which a caller attaches its own annotation.
using NodeHook = std::function<void(SynTree&)>;

namespace parse_detail {
inline void visit_post(SynTree& t, const NodeHook& hook) {
  for (auto& c : t.children) visit_post(c, hook);
  hook(t);
}
}  // namespace parse_detail

/// All complete parses in derivation order. Throws UnknownWord before
/// parsing, IncompatibleParser for an incremental parse of a phrase
/// structure grammar; an unparseable sentence yields an empty list.
inline std::vector<SynTree> parse_all(const std::vector<std::string>& tokens, const Grammar& g, ParserKind parser,
                                      const NodeHook& hook = {}) {
  for (const auto& w : tokens)
    if (!g.knows(w)) throw Error(ErrorCode::UnknownWord, w);
  std::vector<SynTree> trees;
  if (parser == ParserKind::Incremental) {
    if (g.kind != GrammarKind::Cg)
      throw Error(ErrorCode::IncompatibleParser, "the incremental parser needs a categorial grammar");
    trees = IncrementalParser(g).parse(tokens);
  } else {
    ChartParser chart(g);
    for (const auto& w : tokens) chart.push(w);
    trees = chart.trees();
  }
  if (hook)
    for (auto& t : trees) parse_detail::visit_post(t, hook);
  return trees;
}

/// As parse_all, but no parse is an error (NoParse).
inline std::vector<SynTree> parse(const std::vector<std::string>& tokens, const Grammar& g, ParserKind parser,
                                  const NodeHook& hook = {}) {
  auto trees = parse_all(tokens, g, parser, hook);
  if (trees.empty()) {
    std::string s;
    for (const auto& w : tokens) s += (s.empty() ? "" : " ") + w;
    throw Error(ErrorCode::NoParse, "no parse for '" + s + "'");
  }
  return trees;
}

inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  std::istringstream is{std::string(sentence)};
  std::string w;
  while (is >> w) {
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    while (!w.empty() && (w.back() == '.' || w.back() == ',' || w.back() == '?' || w.back() == '!')) w.pop_back();
    if (!w.empty()) out.push_back(w);
  }
  return out;
}

}  // namespace semwb
