#pragma once

// Object-language terms shared by every formalism: a simply typed lambda
// calculus with intensional operators, quantifiers, DRS literals, the DRS
// merge and storage placeholders.

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace semwb {

// ---------------------------------------------------------------------------
// Semantic types

class Type {
 public:
  enum class Kind { Entity, Truth, World, Function, Variable };

  Type() : Type(Kind::Entity) {}

  static Type e() { return Type(Kind::Entity); }
  static Type t() { return Type(Kind::Truth); }
  static Type s() { return Type(Kind::World); }
  static Type fn(Type domain, Type codomain) {
    Type r(Kind::Function);
    auto n = std::make_shared<Node>(*r.node_);
    n->domain = std::make_shared<Type>(std::move(domain));
    n->codomain = std::make_shared<Type>(std::move(codomain));
    r.node_ = std::move(n);
    return r;
  }
  // Inference-only placeholder; never survives into a finished term.
  static Type var(int id) {
    Type r(Kind::Variable);
    auto n = std::make_shared<Node>(*r.node_);
    n->var_id = id;
    r.node_ = std::move(n);
    return r;
  }

  Kind kind() const { return node_->kind; }
  bool is_function() const { return kind() == Kind::Function; }
  bool is_variable() const { return kind() == Kind::Variable; }
  const Type& domain() const { return *node_->domain; }
  const Type& codomain() const { return *node_->codomain; }
  int var_id() const { return node_->var_id; }

  bool contains_variable() const {
    if (is_variable()) return true;
    if (is_function()) return domain().contains_variable() || codomain().contains_variable();
    return false;
  }

  /// `s` may only occur as the domain of a function type.
  bool well_formed() const {
    if (kind() == Kind::World) return false;
    if (!is_function()) return true;
    bool dom_ok = domain().kind() == Kind::World || domain().well_formed();
    return dom_ok && codomain().well_formed();
  }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Kind::Function: return a.domain() == b.domain() && a.codomain() == b.codomain();
      case Kind::Variable: return a.var_id() == b.var_id();
      default: return true;
    }
  }

  /// Montague notation: e, t, s, <a,b>.
  std::string str() const {
    switch (kind()) {
      case Kind::Entity: return "e";
      case Kind::Truth: return "t";
      case Kind::World: return "s";
      case Kind::Variable: return "?" + std::to_string(var_id());
      case Kind::Function: return "<" + domain().str() + "," + codomain().str() + ">";
    }
    return "?";
  }

 private:
  struct Node {
    Kind kind;
    std::shared_ptr<const Type> domain;
    std::shared_ptr<const Type> codomain;
    int var_id = 0;
  };
  explicit Type(Kind k) : node_(basic(k)) {}

  static std::shared_ptr<const Node> basic(Kind k) {
    static const auto entity = std::make_shared<const Node>(Node{Kind::Entity, nullptr, nullptr, 0});
    static const auto truth = std::make_shared<const Node>(Node{Kind::Truth, nullptr, nullptr, 0});
    static const auto world = std::make_shared<const Node>(Node{Kind::World, nullptr, nullptr, 0});
    switch (k) {
      case Kind::Entity: return entity;
      case Kind::Truth: return truth;
      case Kind::World: return world;
      default: return std::make_shared<const Node>(Node{k, nullptr, nullptr, 0});
    }
  }

  std::shared_ptr<const Node> node_;
};

/// Generalised quantifier type (A -> t) -> t, where A is e->t or s->(e->t).
inline bool is_quantifier_type(const Type& ty) {
  if (!ty.is_function() || !(ty.codomain() == Type::t())) return false;
  const Type et = Type::fn(Type::e(), Type::t());
  return ty.domain() == et || ty.domain() == Type::fn(Type::s(), et);
}

// ---------------------------------------------------------------------------
// Terms

struct Var {
  std::string name;
  Type type;

  friend bool operator==(const Var& a, const Var& b) { return a.name == b.name && a.type == b.type; }
  friend bool operator<(const Var& a, const Var& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.type.str() < b.type.str();
  }
};

enum class TermKind { Var, Const, Lam, App, Up, Down, Quant, Conn, Drs, Merge, Index };
enum class QuantKind { Forall, Exists };
enum class ConnKind { And, Or, Not, Implies, Eq, Verum };

inline const char* to_string(QuantKind q) { return q == QuantKind::Forall ? "forall" : "exists"; }
inline const char* to_string(ConnKind c) {
  switch (c) {
    case ConnKind::And: return "and";
    case ConnKind::Or: return "or";
    case ConnKind::Not: return "not";
    case ConnKind::Implies: return "implies";
    case ConnKind::Eq: return "eq";
    case ConnKind::Verum: return "true";
  }
  return "?";
}

class Term;
using Path = std::vector<int>;

inline std::string path_str(const Path& p) {
  if (p.empty()) return "root";
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p[i]);
  }
  return s;
}

/// Immutable, cheaply copyable term handle.
///
/// Layout by kind (`kids` are the positional children used by paths):
///   Var/Const  name, type
///   Lam        name/type = parameter; kids = {body}
///   App        kids = {function, argument}
///   Up/Down    kids = {body}
///   Quant      name/type = bound variable; kids = {restrictor, scope} or {scope}
///   Conn       kids = arguments (Verum has none)
///   Drs        universe = referents; kids = conditions
///   Merge      kids = {left, right}
///   Index      index, type
class Term {
 public:
  struct Node {
    TermKind kind{};
    std::string name{};
    Type type{};
    int index = 0;
    QuantKind quant = QuantKind::Forall;
    ConnKind conn = ConnKind::And;
    std::vector<Var> universe{};
    std::vector<Term> kids{};
  };

  Term() = default;

  static Term var(std::string name, Type ty) { return make({TermKind::Var, std::move(name), std::move(ty)}); }
  static Term var(const Var& v) { return var(v.name, v.type); }
  static Term constant(std::string name, Type ty) {
    return make({TermKind::Const, std::move(name), std::move(ty)});
  }
  static Term lam(const Var& param, Term body) {
    Node n{TermKind::Lam, param.name, param.type};
    n.kids = {std::move(body)};
    return make(std::move(n));
  }
  static Term app(Term fun, Term arg) {
    Node n{TermKind::App};
    n.kids = {std::move(fun), std::move(arg)};
    return make(std::move(n));
  }
  /// Curried application f(a1)(a2)...
  static Term apply(Term fun, const std::vector<Term>& args) {
    for (const auto& a : args) fun = app(std::move(fun), a);
    return fun;
  }
  static Term up(Term body) {
    Node n{TermKind::Up};
    n.kids = {std::move(body)};
    return make(std::move(n));
  }
  static Term down(Term body) {
    Node n{TermKind::Down};
    n.kids = {std::move(body)};
    return make(std::move(n));
  }
  static Term quant(QuantKind q, const Var& v, Term restrictor, Term scope) {
    Node n{TermKind::Quant, v.name, v.type};
    n.quant = q;
    n.kids = {std::move(restrictor), std::move(scope)};
    return make(std::move(n));
  }
  static Term quant(QuantKind q, const Var& v, Term scope) {
    Node n{TermKind::Quant, v.name, v.type};
    n.quant = q;
    n.kids = {std::move(scope)};
    return make(std::move(n));
  }
  static Term conn(ConnKind c, std::vector<Term> args) {
    Node n{TermKind::Conn};
    n.conn = c;
    n.kids = std::move(args);
    return make(std::move(n));
  }
  static Term verum() { return conn(ConnKind::Verum, {}); }
  static Term drs(std::vector<Var> universe, std::vector<Term> conditions) {
    Node n{TermKind::Drs};
    n.universe = std::move(universe);
    n.kids = std::move(conditions);
    return make(std::move(n));
  }
  static Term merge(Term left, Term right) {
    Node n{TermKind::Merge};
    n.kids = {std::move(left), std::move(right)};
    return make(std::move(n));
  }
  static Term index(int i, Type ty) {
    Node n{TermKind::Index, "", std::move(ty)};
    n.index = i;
    return make(std::move(n));
  }

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const { return node_->kind; }
  bool is(TermKind k) const { return node_ && node_->kind == k; }
  bool is_conn(ConnKind c) const { return is(TermKind::Conn) && node_->conn == c; }

  const std::string& name() const { return node_->name; }
  const Type& type() const { return node_->type; }
  Var bound() const { return Var{node_->name, node_->type}; }
  int index() const { return node_->index; }
  QuantKind quant_kind() const { return node_->quant; }
  ConnKind conn_kind() const { return node_->conn; }
  const std::vector<Var>& universe() const { return node_->universe; }
  const std::vector<Term>& kids() const { return node_->kids; }
  const Term& kid(size_t i) const { return node_->kids.at(i); }
  const Node& node() const { return *node_; }
  bool has_restrictor() const { return is(TermKind::Quant) && node_->kids.size() == 2; }
  const Term& scope() const { return node_->kids.back(); }

  /// Same node, new children (positional).
  Term with_kids(std::vector<Term> kids) const {
    Node n = *node_;
    n.kids = std::move(kids);
    return make(std::move(n));
  }
  /// Same node with binder renamed (Lam/Quant name, or universe for Drs).
  Term with_binder(std::string name) const {
    Node n = *node_;
    n.name = std::move(name);
    return make(std::move(n));
  }
  Term with_universe(std::vector<Var> u) const {
    Node n = *node_;
    n.universe = std::move(u);
    return make(std::move(n));
  }
  Term with_type(Type ty) const {
    Node n = *node_;
    n.type = std::move(ty);
    return make(std::move(n));
  }

  bool same_node(const Term& o) const { return node_ == o.node_; }

  /// Structural (not alpha) equality, including types.
  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.kind != y.kind || x.name != y.name || !(x.type == y.type) || x.index != y.index) return false;
    if (x.kind == TermKind::Quant && x.quant != y.quant) return false;
    if (x.kind == TermKind::Conn && x.conn != y.conn) return false;
    if (x.universe != y.universe) return false;
    if (x.kids.size() != y.kids.size()) return false;
    for (size_t i = 0; i < x.kids.size(); ++i)
      if (!(x.kids[i] == y.kids[i])) return false;
    return true;
  }

  /// Subterm at a child-index path.
  const Term& at(const Path& p) const {
    const Term* cur = this;
    for (int i : p) {
      if (i < 0 || static_cast<size_t>(i) >= cur->kids().size())
        throw Error(ErrorCode::InvalidPath, "no subterm at " + path_str(p));
      cur = &cur->kid(static_cast<size_t>(i));
    }
    return *cur;
  }
  /// Copy with the subterm at `p` replaced.
  Term replace_at(const Path& p, const Term& replacement, size_t depth = 0) const {
    if (depth == p.size()) return replacement;
    int i = p[depth];
    if (i < 0 || static_cast<size_t>(i) >= kids().size())
      throw Error(ErrorCode::InvalidPath, "no subterm at " + path_str(p));
    std::vector<Term> k = kids();
    k[static_cast<size_t>(i)] = k[static_cast<size_t>(i)].replace_at(p, replacement, depth + 1);
    return with_kids(std::move(k));
  }

  size_t size() const {
    size_t n = 1;
    for (const auto& k : kids()) n += k.size();
    return n;
  }

 private:
  static Term make(Node n) {
    Term t;
    t.node_ = std::make_shared<const Node>(std::move(n));
    return t;
  }
  std::shared_ptr<const Node> node_;
};

/// Referents a term makes available to material on its right: the universe
/// of a DRS literal, and the exported referents of a merge chain (left
/// operand first; right-operand names that repeat a left name stay local).
inline std::vector<std::string> declared_referents(const Term& t) {
  if (t.is(TermKind::Drs)) {
    std::vector<std::string> out;
    for (const auto& v : t.universe()) out.push_back(v.name);
    return out;
  }
  if (t.is(TermKind::Merge)) {
    auto out = declared_referents(t.kid(0));
    for (auto& n : declared_referents(t.kid(1))) {
      bool dup = false;
      for (const auto& m : out) dup = dup || m == n;
      if (!dup) out.push_back(n);
    }
    return out;
  }
  return {};
}

/// True for nodes whose left operand's referents scope over the right one.
inline bool is_dynamic_binder(const Term& t) {
  return t.is(TermKind::Merge) || t.is_conn(ConnKind::Implies);
}

}  // namespace semwb
