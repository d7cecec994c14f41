#pragma once

// Feature structures as immutable DAGs with reentrancy, unified by
// union-find over a scratch arena.
//
// Text form:  [num=sg, agr=#1[per=3], subj=[agr=#1]]
//   atom      lowercase word or number
//   #k / Var  reentrancy tag; capitalised names are tags shared across one
//             grammar statement
//   []        unconstrained value

#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "term_io.hpp"

namespace semwb {

class FeatureStructure {
 public:
  struct Node {
    std::string atom;                      // empty unless atomic
    std::map<std::string, int> features;   // child node ids
  };
  using Graph = std::vector<Node>;

  /// Unconstrained structure.
  FeatureStructure() : graph_(std::make_shared<Graph>(Graph{Node{}})), root_(0) {}

  static FeatureStructure atom(std::string value) {
    Builder b;
    int n = b.node();
    b.set_atom(n, std::move(value));
    return b.build(n);
  }

  /// Flat structure from (feature, atom) pairs.
  static FeatureStructure of(std::initializer_list<std::pair<std::string, std::string>> feats) {
    Builder b;
    int root = b.node();
    for (const auto& [f, v] : feats) {
      int c = b.node();
      b.set_atom(c, v);
      b.set(root, f, c);
    }
    return b.build(root);
  }

  bool is_atomic() const { return !node().atom.empty(); }
  bool is_empty() const { return node().atom.empty() && node().features.empty(); }
  const std::string& atom_value() const { return node().atom; }
  std::vector<std::string> feature_names() const {
    std::vector<std::string> out;
    for (const auto& [f, _] : node().features) out.push_back(f);
    return out;
  }
  bool has(const std::string& f) const { return node().features.count(f) > 0; }

  /// Substructure under feature f (shares the graph); nullopt if absent.
  std::optional<FeatureStructure> get(const std::string& f) const {
    auto it = node().features.find(f);
    if (it == node().features.end()) return std::nullopt;
    return FeatureStructure(graph_, it->second);
  }

  /// Follows a path of features.
  std::optional<FeatureStructure> at(const std::vector<std::string>& path) const {
    FeatureStructure cur = *this;
    for (const auto& f : path) {
      auto next = cur.get(f);
      if (!next) return std::nullopt;
      cur = *next;
    }
    return cur;
  }

  /// Atom at the given feature, or "" when missing or complex.
  std::string atom_at(const std::string& f) const {
    auto g = get(f);
    return g && g->is_atomic() ? g->atom_value() : std::string();
  }

  /// Returns a copy with feature f set to v (v's own reentrancies kept).
  FeatureStructure with(const std::string& f, const FeatureStructure& v) const {
    Builder b;
    int root = b.import(*this);
    int child = b.import(v);
    b.set(root, f, child);
    return b.build(root);
  }

  /// Canonical text form: features sorted, tags numbered in order of first
  /// visit, atoms never tagged. Two structures are equal up to tag renaming
  /// iff their canonical forms are equal.
  std::string str() const;

  friend bool operator==(const FeatureStructure& a, const FeatureStructure& b) { return a.str() == b.str(); }

  /// Most general unifier, or nullopt on a clash. Inputs are unchanged.
  friend std::optional<FeatureStructure> unify(const FeatureStructure& a, const FeatureStructure& b) {
    Builder bld;
    int ra = bld.import(a);
    int rb = bld.import(b);
    if (!bld.unify(ra, rb)) return std::nullopt;
    return bld.build(ra);
  }

  /// Incremental construction with union-find unification; `build` compacts
  /// the reachable part into an immutable structure.
  class Builder {
   public:
    int node() {
      nodes_.push_back(Node{});
      parent_.push_back(static_cast<int>(parent_.size()));
      return static_cast<int>(nodes_.size()) - 1;
    }
    int find(int x) {
      while (parent_[static_cast<size_t>(x)] != x) {
        parent_[static_cast<size_t>(x)] = parent_[static_cast<size_t>(parent_[static_cast<size_t>(x)])];
        x = parent_[static_cast<size_t>(x)];
      }
      return x;
    }
    /// Current id of n's value for feature f, or -1.
    int child(int n, const std::string& f) {
      const auto& feats = nodes_[static_cast<size_t>(find(n))].features;
      auto it = feats.find(f);
      return it == feats.end() ? -1 : find(it->second);
    }
    void set_atom(int n, std::string v) { nodes_[static_cast<size_t>(find(n))].atom = std::move(v); }
    /// Adds feature f -> c at n, unifying with an existing value.
    bool set(int n, const std::string& f, int c) {
      n = find(n);
      auto& feats = nodes_[static_cast<size_t>(n)].features;
      auto it = feats.find(f);
      if (it == feats.end()) {
        if (!nodes_[static_cast<size_t>(n)].atom.empty()) return false;
        feats.emplace(f, c);
        return true;
      }
      return unify(it->second, c);
    }
    int import(const FeatureStructure& fs) {
      std::map<int, int> copy;
      return import_node(*fs.graph_, fs.root_, copy);
    }
    bool unify(int a, int b) {
      a = find(a);
      b = find(b);
      if (a == b) return true;
      Node& na = nodes_[static_cast<size_t>(a)];
      Node& nb = nodes_[static_cast<size_t>(b)];
      if (!na.atom.empty() || !nb.atom.empty()) {
        if (!na.atom.empty() && !nb.atom.empty()) return na.atom == nb.atom;
        const Node& atomic = na.atom.empty() ? nb : na;
        const Node& other = na.atom.empty() ? na : nb;
        if (!other.features.empty()) return false;
        std::string v = atomic.atom;
        parent_[static_cast<size_t>(b)] = a;
        nodes_[static_cast<size_t>(a)].atom = v;
        return true;
      }
      // Merge b into a.
      std::map<std::string, int> moved = std::move(nb.features);
      nb.features.clear();
      parent_[static_cast<size_t>(b)] = a;
      for (const auto& [f, c] : moved)
        if (!set(a, f, c)) return false;
      return true;
    }
    FeatureStructure build(int root) {
      auto g = std::make_shared<Graph>();
      std::map<int, int> ids;
      int r = emit(root, *g, ids);
      return FeatureStructure(std::move(g), r);
    }

   private:
    int import_node(const Graph& g, int id, std::map<int, int>& copy) {
      auto it = copy.find(id);
      if (it != copy.end()) return it->second;
      int n = node();
      copy[id] = n;
      nodes_[static_cast<size_t>(n)].atom = g[static_cast<size_t>(id)].atom;
      for (const auto& [f, c] : g[static_cast<size_t>(id)].features) {
        int cc = import_node(g, c, copy);
        nodes_[static_cast<size_t>(n)].features.emplace(f, cc);
      }
      return n;
    }
    int emit(int id, Graph& g, std::map<int, int>& ids) {
      id = find(id);
      auto it = ids.find(id);
      if (it != ids.end()) return it->second;
      int out = static_cast<int>(g.size());
      ids[id] = out;
      g.push_back(Node{nodes_[static_cast<size_t>(id)].atom, {}});
      std::vector<std::pair<std::string, int>> kids(nodes_[static_cast<size_t>(id)].features.begin(),
                                                    nodes_[static_cast<size_t>(id)].features.end());
      for (const auto& [f, c] : kids) {
        int cc = emit(c, g, ids);
        g[static_cast<size_t>(out)].features.emplace(f, cc);
      }
      return out;
    }

    std::vector<Node> nodes_;
    std::vector<int> parent_;
  };

  // Raw access for encoders.
  const Graph& graph() const { return *graph_; }
  int root() const { return root_; }

 private:
  FeatureStructure(std::shared_ptr<const Graph> g, int root) : graph_(std::move(g)), root_(root) {}

  const Node& node() const { return (*graph_)[static_cast<size_t>(root_)]; }

  std::shared_ptr<const Graph> graph_;
  int root_;
};

inline std::ostream& operator<<(std::ostream& os, const FeatureStructure& fs) { return os << fs.str(); }

namespace fs_io {

/// Prints several parts of one graph with a common tag numbering, so that
/// reentrancy between parts (rule daughters, category arguments) shows.
class SharedPrinter {
 public:
  SharedPrinter(const FeatureStructure::Graph& g, const std::vector<int>& roots) : g_(g) {
    for (int r : roots) count(r);
  }

  std::string value(int id) {
    std::ostringstream os;
    print(id, os);
    return os.str();
  }

  /// "[f=v,...]" over the features of id except `skip`; "" when none remain.
  std::string body_without(int id, const std::string& skip) {
    const auto& n = g_[static_cast<size_t>(id)];
    std::ostringstream os;
    bool first = true;
    for (const auto& [f, c] : n.features) {
      if (f == skip) continue;
      os << (first ? "[" : ",") << f << "=";
      first = false;
      print(c, os);
    }
    if (!first) os << "]";
    return os.str();
  }

 private:
  void count(int id) {
    if (visits_[id]++ > 0) return;
    for (const auto& [f, c] : g_[static_cast<size_t>(id)].features) count(c);
  }

  void print(int id, std::ostream& os) {
    const auto& n = g_[static_cast<size_t>(id)];
    if (!n.atom.empty()) {
      os << n.atom;
      return;
    }
    if (visits_[id] > 1) {
      auto it = tags_.find(id);
      if (it != tags_.end()) {
        os << "#" << it->second;
        return;
      }
      int tag = static_cast<int>(tags_.size()) + 1;
      tags_[id] = tag;
      os << "#" << tag;
      if (n.features.empty()) return;
    }
    os << "[";
    bool first = true;
    for (const auto& [f, c] : n.features) {
      if (!first) os << ",";
      first = false;
      os << f << "=";
      print(c, os);
    }
    os << "]";
  }

  const FeatureStructure::Graph& g_;
  std::map<int, int> visits_;
  std::map<int, int> tags_;
};

/// Shared tag table for one statement (grammar rule, lexical entry).
using Tags = std::map<std::string, int>;

inline bool is_tag_start(char c) { return c == '#' || std::isupper(static_cast<unsigned char>(c)); }

inline std::string tag_name(io::Cursor& cur) {
  if (cur.accept('#')) return "#" + std::to_string(cur.number());
  return cur.ident();
}

inline int parse_value(io::Cursor& cur, FeatureStructure::Builder& b, Tags& tags);

/// `[f=v, ...]` into node n.
inline void parse_body(io::Cursor& cur, FeatureStructure::Builder& b, Tags& tags, int n) {
  cur.expect('[');
  if (cur.accept(']')) return;
  do {
    std::string f = cur.word();
    cur.expect('=');
    int v = parse_value(cur, b, tags);
    if (!b.set(n, f, v)) cur.fail("a value compatible with earlier uses of " + f);
  } while (cur.accept(','));
  cur.expect(']');
}

inline int parse_value(io::Cursor& cur, FeatureStructure::Builder& b, Tags& tags) {
  char c = cur.peek();
  if (is_tag_start(c)) {
    std::string name = tag_name(cur);
    auto it = tags.find(name);
    int n = it != tags.end() ? it->second : (tags[name] = b.node());
    if (cur.peek() == '[') {
      int body = b.node();
      parse_body(cur, b, tags, body);
      if (!b.unify(n, body)) cur.fail("a value compatible with tag " + name);
    }
    return n;
  }
  int n = b.node();
  if (c == '[') {
    parse_body(cur, b, tags, n);
  } else {
    b.set_atom(n, cur.word());
  }
  return n;
}

}  // namespace fs_io

inline std::string FeatureStructure::str() const {
  fs_io::SharedPrinter p(*graph_, {root_});
  return p.value(root_);
}

inline FeatureStructure parse_fs(std::string_view text) {
  io::Cursor cur(text);
  FeatureStructure::Builder b;
  fs_io::Tags tags;
  int root = fs_io::parse_value(cur, b, tags);
  if (!cur.at_end()) cur.fail("end of feature structure");
  return b.build(root);
}

}  // namespace semwb
