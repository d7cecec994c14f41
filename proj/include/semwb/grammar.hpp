#pragma once

// Grammars: phrase structure rules with feature annotations, lexicons, and
// categorial categories. Every category is encoded as a feature structure:
//
//   np[num=sg]      [cat=np, num=sg]
//   X/Y             [cat=fwd, res=X, arg=Y]
//   X\Y             [cat=bwd, res=X, arg=Y]
//
// so a grammar rule is one structure [0=mother, 1=d1, ..., k=dk] and rule
// application is a single unification.
//
// File format (one statement per '.', '%' starts a comment):
//
//   kind psg.                          (or: kind cg.)
//   start s.
//   rule s --> np[num=N] vp[num=N].    (id defaults to s_np_vp)
//   rule relcl: n --> n rc.
//   word anna : np[num=sg].
//   word loves : (s\np)/(s/(s\np)).    (cg lexicons)

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "term_io.hpp"

namespace semwb {

enum class GrammarKind { Psg, Cg };

struct GrammarRule {
  std::string id;
  std::string mother;                  // category name ("" for cg rules)
  std::vector<std::string> daughters;  // category names, or cg patterns
  FeatureStructure fs;                 // [0=mother, 1=d1, ...]

  size_t arity() const { return daughters.size(); }
};

struct LexEntry {
  std::string word;
  FeatureStructure category;
};

namespace cat_detail {

inline void set_cat(FeatureStructure::Builder& b, int n, const std::string& name) {
  int c = b.node();
  b.set_atom(c, name);
  b.set(n, "cat", c);
}

/// Basic category `name[feats]` into a fresh node.
inline int parse_basic(io::Cursor& cur, FeatureStructure::Builder& b, fs_io::Tags& tags) {
  std::string name = cur.ident();
  int n = b.node();
  if (cur.peek() == '[') fs_io::parse_body(cur, b, tags, n);
  if (b.child(n, "cat") >= 0) cur.fail("features other than 'cat'");
  set_cat(b, n, name);
  return n;
}

inline int parse_cg(io::Cursor& cur, FeatureStructure::Builder& b, fs_io::Tags& tags);

inline int parse_cg_atom(io::Cursor& cur, FeatureStructure::Builder& b, fs_io::Tags& tags) {
  if (cur.accept('(')) {
    int n = parse_cg(cur, b, tags);
    cur.expect(')');
    return n;
  }
  return parse_basic(cur, b, tags);
}

/// Slashes associate to the left: s\np/np is (s\np)/np.
inline int parse_cg(io::Cursor& cur, FeatureStructure::Builder& b, fs_io::Tags& tags) {
  int left = parse_cg_atom(cur, b, tags);
  while (cur.peek() == '/' || cur.peek() == '\\') {
    bool fwd = cur.peek() == '/';
    cur.accept(fwd ? '/' : '\\');
    int right = parse_cg_atom(cur, b, tags);
    int n = b.node();
    set_cat(b, n, fwd ? "fwd" : "bwd");
    b.set(n, "res", left);
    b.set(n, "arg", right);
    left = n;
  }
  return left;
}

inline bool is_slash(const FeatureStructure::Node& n, const FeatureStructure::Graph& g) {
  auto it = n.features.find("cat");
  if (it == n.features.end()) return false;
  const auto& a = g[static_cast<size_t>(it->second)].atom;
  return a == "fwd" || a == "bwd";
}

/// Category text for node id of g. With `features`, basic categories show
/// their features (tags shared through the printer).
inline std::string print_cat(const FeatureStructure::Graph& g, int id, fs_io::SharedPrinter* p, bool nested = false) {
  const auto& n = g[static_cast<size_t>(id)];
  auto cat = n.features.find("cat");
  if (cat == n.features.end()) return p ? p->value(id) : "?";
  const std::string& name = g[static_cast<size_t>(cat->second)].atom;
  if (name == "fwd" || name == "bwd") {
    std::string s = print_cat(g, n.features.at("res"), p, true) + (name == "fwd" ? "/" : "\\") +
                    print_cat(g, n.features.at("arg"), p, true);
    return nested ? "(" + s + ")" : s;
  }
  return p ? name + p->body_without(id, "cat") : name;
}

}  // namespace cat_detail

/// Category name of a feature structure (the `cat` atom), "" if unset.
inline std::string category_name(const FeatureStructure& fs) { return fs.atom_at("cat"); }

/// Parses a phrase-structure category `np[num=sg]`.
inline FeatureStructure parse_category(std::string_view text) {
  io::Cursor cur(text);
  FeatureStructure::Builder b;
  fs_io::Tags tags;
  int n = cat_detail::parse_basic(cur, b, tags);
  if (!cur.at_end()) cur.fail("end of category");
  return b.build(n);
}

/// Parses a categorial category `(s\np[num=sg])/(s/(s\np))`.
inline FeatureStructure parse_cg_category(std::string_view text) {
  io::Cursor cur(text);
  FeatureStructure::Builder b;
  fs_io::Tags tags;
  int n = cat_detail::parse_cg(cur, b, tags);
  if (!cur.at_end()) cur.fail("end of category");
  return b.build(n);
}

/// Category text with features, e.g. `np[num=sg]`, `s/(s\np[num=#1])`.
inline std::string category_string(const FeatureStructure& fs) {
  fs_io::SharedPrinter p(fs.graph(), {fs.root()});
  return cat_detail::print_cat(fs.graph(), fs.root(), &p);
}

/// Category text without features, e.g. `np`, `s/(s\np)`.
inline std::string category_label(const FeatureStructure& fs) {
  return cat_detail::print_cat(fs.graph(), fs.root(), nullptr);
}

inline bool is_slash_category(const FeatureStructure& fs) {
  std::string c = category_name(fs);
  return c == "fwd" || c == "bwd";
}

class Grammar {
 public:
  std::string name;
  GrammarKind kind = GrammarKind::Psg;
  std::string start = "s";
  std::vector<GrammarRule> rules;
  std::vector<LexEntry> lexicon;

  std::vector<const LexEntry*> lookup(const std::string& word) const {
    std::vector<const LexEntry*> out;
    auto range = index_.equal_range(word);
    for (auto it = range.first; it != range.second; ++it) out.push_back(&lexicon[it->second]);
    return out;
  }
  bool knows(const std::string& word) const { return index_.count(word) > 0; }

  const GrammarRule* rule(const std::string& id) const {
    for (const auto& r : rules)
      if (r.id == id) return &r;
    return nullptr;
  }

  FeatureStructure start_category() const {
    FeatureStructure::Builder b;
    int n = b.node();
    cat_detail::set_cat(b, n, start);
    return b.build(n);
  }

  void add_rule(GrammarRule r) {
    if (rule(r.id)) throw Error(ErrorCode::SyntaxError, "duplicate rule id " + r.id);
    if (r.daughters.empty()) throw Error(ErrorCode::SyntaxError, "rule " + r.id + " has no daughters");
    rules.push_back(std::move(r));
    memo_ = std::make_shared<RuleMemo>();
  }

  /// Results of rule applications keyed by rule index and canonical
  /// daughter strings. Copies of a grammar share it; guarded for concurrent
  /// parsers.
  struct RuleMemo {
    std::mutex mu;
    std::unordered_map<std::string, std::optional<FeatureStructure>> results;
  };
  RuleMemo& rule_memo() const { return *memo_; }

  void add_word(LexEntry e) {
    index_.emplace(e.word, lexicon.size());
    lexicon.push_back(std::move(e));
  }

  /// Distinct words in first-entry order.
  std::vector<std::string> vocabulary() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& e : lexicon)
      if (seen.insert(e.word).second) out.push_back(e.word);
    return out;
  }

 private:
  std::multimap<std::string, size_t> index_;
  std::shared_ptr<RuleMemo> memo_ = std::make_shared<RuleMemo>();
};

/// Forward application, backward application and forward composition.
inline std::vector<GrammarRule> categorial_rules() {
  auto make = [](const std::string& id, const std::vector<std::string>& pattern, auto&& shape) {
    FeatureStructure::Builder b;
    int root = b.node();
    shape(b, root);
    return GrammarRule{id, pattern[0], {pattern.begin() + 1, pattern.end()}, b.build(root)};
  };
  auto slash = [](FeatureStructure::Builder& b, const char* dir, int res, int arg) {
    int n = b.node();
    cat_detail::set_cat(b, n, dir);
    b.set(n, "res", res);
    b.set(n, "arg", arg);
    return n;
  };
  std::vector<GrammarRule> out;
  out.push_back(make("fa", {"X", "X/Y", "Y"}, [&](FeatureStructure::Builder& b, int root) {
    int x = b.node(), y = b.node();
    b.set(root, "0", x);
    b.set(root, "1", slash(b, "fwd", x, y));
    b.set(root, "2", y);
  }));
  out.push_back(make("ba", {"X", "Y", "X\\Y"}, [&](FeatureStructure::Builder& b, int root) {
    int x = b.node(), y = b.node();
    b.set(root, "0", x);
    b.set(root, "1", y);
    b.set(root, "2", slash(b, "bwd", x, y));
  }));
  out.push_back(make("fc", {"X/Z", "X/Y", "Y/Z"}, [&](FeatureStructure::Builder& b, int root) {
    int x = b.node(), y = b.node(), z = b.node();
    b.set(root, "0", slash(b, "fwd", x, z));
    b.set(root, "1", slash(b, "fwd", x, y));
    b.set(root, "2", slash(b, "fwd", y, z));
  }));
  return out;
}

inline Grammar parse_grammar(std::string_view text, std::string name = "") {
  io::Cursor cur(text);
  cur.set_comments(true);
  Grammar g;
  g.name = std::move(name);
  while (!cur.at_end()) {
    std::string kw = cur.ident();
    if (kw == "kind") {
      std::string k = cur.ident();
      if (k == "cg") {
        g.kind = GrammarKind::Cg;
      } else if (k == "psg") {
        g.kind = GrammarKind::Psg;
      } else {
        cur.fail("psg or cg");
      }
    } else if (kw == "start") {
      g.start = cur.ident();
    } else if (kw == "rule") {
      if (g.kind == GrammarKind::Cg) cur.fail("no explicit rules in a cg grammar");
      FeatureStructure::Builder b;
      fs_io::Tags tags;
      int root = b.node();
      GrammarRule r;
      size_t save = cur.pos();
      std::string first = cur.ident();
      if (cur.accept(':')) {
        r.id = first;
      } else {
        cur.seek(save);
      }
      int m = cat_detail::parse_basic(cur, b, tags);
      b.set(root, "0", m);
      cur.expect_str("-->");
      int k = 0;
      while (cur.peek_ident()) {
        int d = cat_detail::parse_basic(cur, b, tags);
        b.set(root, std::to_string(++k), d);
      }
      r.fs = b.build(root);
      r.mother = category_name(*r.fs.get("0"));
      for (int i = 1; i <= k; ++i) r.daughters.push_back(category_name(*r.fs.get(std::to_string(i))));
      if (r.id.empty()) {
        r.id = r.mother;
        for (const auto& d : r.daughters) r.id += "_" + d;
      }
      g.add_rule(std::move(r));
    } else if (kw == "word") {
      LexEntry e;
      e.word = cur.word();
      cur.expect(':');
      FeatureStructure::Builder b;
      fs_io::Tags tags;
      int n = g.kind == GrammarKind::Cg ? cat_detail::parse_cg(cur, b, tags) : cat_detail::parse_basic(cur, b, tags);
      e.category = b.build(n);
      g.add_word(std::move(e));
    } else {
      throw Error(ErrorCode::SyntaxError, "line " + cur.where() + ": unknown statement '" + kw + "'");
    }
    cur.expect('.');
  }
  if (g.kind == GrammarKind::Cg) {
    for (auto& r : categorial_rules()) g.add_rule(std::move(r));
  }
  return g;
}

inline std::string to_string(const Grammar& g) {
  std::ostringstream os;
  os << "kind " << (g.kind == GrammarKind::Cg ? "cg" : "psg") << ".\n";
  os << "start " << g.start << ".\n";
  if (g.kind == GrammarKind::Psg) {
    for (const auto& r : g.rules) {
      const auto& gr = r.fs.graph();
      auto kid = [&](int k) { return gr[static_cast<size_t>(r.fs.root())].features.at(std::to_string(k)); };
      std::vector<int> roots;
      for (size_t k = 0; k <= r.arity(); ++k) roots.push_back(kid(static_cast<int>(k)));
      fs_io::SharedPrinter p(gr, roots);
      os << "rule " << r.id << ": " << cat_detail::print_cat(gr, kid(0), &p) << " -->";
      for (size_t k = 1; k <= r.arity(); ++k) os << " " << cat_detail::print_cat(gr, kid(static_cast<int>(k)), &p);
      os << ".\n";
    }
  }
  for (const auto& e : g.lexicon) os << "word " << e.word << " : " << category_string(e.category) << ".\n";
  return os.str();
}

}  // namespace semwb
