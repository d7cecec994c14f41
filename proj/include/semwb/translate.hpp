#pragma once

// DRS to first-order logic, finite models, and two independent evaluators
// (Tarskian for formulas, embedding verification for DRSs). The compiled
// evaluators at the bottom run the same semantics over bit-packed models so
// that every model of a small signature can be checked.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "drt.hpp"
#include "term.hpp"
#include "term_io.hpp"
#include "term_ops.hpp"

namespace semwb {

namespace translate_detail {

inline std::optional<Path> find_free(const Term& t, const std::string& name, Path& path) {
  if (t.is(TermKind::Var) && t.name() == name) return path;
  if (t.is(TermKind::Lam) || t.is(TermKind::Quant))
    if (t.name() == name) return std::nullopt;
  if (t.is(TermKind::Drs))
    for (const auto& v : t.universe())
      if (v.name == name) return std::nullopt;
  for (size_t i = 0; i < t.kids().size(); ++i) {
    if (i == 1 && is_dynamic_binder(t)) {
      auto d = declared_referents(t.kid(0));
      if (std::find(d.begin(), d.end(), name) != d.end()) continue;
    }
    path.push_back(static_cast<int>(i));
    if (auto p = find_free(t.kid(i), name, path)) return p;
    path.pop_back();
  }
  return std::nullopt;
}

inline Term conjoin(std::vector<Term> cs) {
  if (cs.empty()) return Term::verum();
  if (cs.size() == 1) return cs.front();
  return Term::conn(ConnKind::And, std::move(cs));
}

inline Term wrap_quants(QuantKind q, const std::vector<Var>& vars, Term body) {
  for (size_t i = vars.size(); i-- > 0;) body = Term::quant(q, vars[i], body);
  return body;
}

inline bool drt_free(const Term& t) {
  switch (t.kind()) {
    case TermKind::Drs:
    case TermKind::Merge:
    case TermKind::Up:
    case TermKind::Down:
    case TermKind::Index:
    case TermKind::Lam:
      return false;
    default:
      break;
  }
  for (const auto& k : t.kids())
    if (!drt_free(k)) return false;
  return true;
}

inline Term formula(const Term& t, const Path& at);

inline std::vector<Term> conditions(const Term& d, const Path& at) {
  std::vector<Term> out;
  for (size_t i = 0; i < d.kids().size(); ++i) {
    Path p = at;
    p.push_back(static_cast<int>(i));
    out.push_back(formula(d.kid(i), p));
  }
  return out;
}

inline Term existential(const Term& d, const Path& at) {
  return wrap_quants(QuantKind::Exists, d.universe(), conjoin(conditions(d, at)));
}

inline Term formula(const Term& t, const Path& at) {
  auto sub = [&](size_t i) {
    Path p = at;
    p.push_back(static_cast<int>(i));
    return p;
  };
  if (t.is(TermKind::Drs)) return existential(t, at);
  if (t.is_conn(ConnKind::Implies) && t.kid(0).is(TermKind::Drs)) {
    const Term& k1 = t.kid(0);
    Term body = Term::conn(ConnKind::Implies, {conjoin(conditions(k1, sub(0))), formula(t.kid(1), sub(1))});
    return wrap_quants(QuantKind::Forall, k1.universe(), body);
  }
  if (t.is(TermKind::Conn) || t.is(TermKind::Quant)) {
    std::vector<Term> kids;
    for (size_t i = 0; i < t.kids().size(); ++i) kids.push_back(formula(t.kid(i), sub(i)));
    return t.kids().empty() ? t : t.with_kids(std::move(kids));
  }
  if (drt_free(t)) return t;
  throw Error(ErrorCode::NotApplicable, "no first-order counterpart for the subterm at " + path_str(at) + ": " +
                                            to_string(t));
}

}  // namespace translate_detail

/// Standard embedding: drs([x1..xn],[c1..cm]) becomes exists x1..xn
/// (c1' & .. & cm'); implies quantifies the antecedent universe universally;
/// an empty condition list becomes `true`.
inline Term drs_to_fol(const Term& d) {
  for (const auto& v : free_vars(d)) {
    Path p;
    auto where = translate_detail::find_free(d, v.name, p);
    throw Error(ErrorCode::FreeReferent, "free referent " + v.name + " at " + path_str(where.value_or(Path{})));
  }
  return translate_detail::formula(d, {});
}

/// True when f contains no DRS, merge, intensional operator, store index or
/// abstraction.
inline bool is_first_order(const Term& f) { return translate_detail::drt_free(f); }

// ---------------------------------------------------------------------------
// Finite models

struct FiniteModel {
  std::vector<std::string> domain;
  std::map<std::string, std::set<std::vector<int>>> predicates;
  std::map<std::string, int> constants;

  int entity(const std::string& name) const {
    for (size_t i = 0; i < domain.size(); ++i)
      if (domain[i] == name) return static_cast<int>(i);
    throw Error(ErrorCode::UnknownSymbol, "no entity " + name + " in the domain");
  }
};

/// `domain a b. pred laugh = {a}. pred owns = {(a,b)}. const anna = a.`
inline FiniteModel parse_model(std::string_view text) {
  io::Cursor cur(text);
  cur.set_comments(true);
  FiniteModel m;
  while (!cur.at_end()) {
    std::string kw = cur.ident();
    if (kw == "domain") {
      while (cur.peek_ident()) m.domain.push_back(cur.ident());
    } else if (kw == "pred") {
      std::string name = cur.ident();
      cur.expect('=');
      cur.expect('{');
      auto& ext = m.predicates[name];
      if (!cur.accept('}')) {
        do {
          std::vector<int> tuple;
          if (cur.accept('(')) {
            if (!cur.accept(')')) {
              do tuple.push_back(m.entity(cur.ident()));
              while (cur.accept(','));
              cur.expect(')');
            }
          } else {
            tuple.push_back(m.entity(cur.ident()));
          }
          ext.insert(tuple);
        } while (cur.accept(','));
        cur.expect('}');
      }
    } else if (kw == "const") {
      std::string name = cur.ident();
      cur.expect('=');
      m.constants[name] = m.entity(cur.ident());
    } else {
      throw Error(ErrorCode::SyntaxError, "line " + cur.where() + ": unknown model statement " + kw);
    }
    cur.expect('.');
  }
  if (m.domain.empty()) throw Error(ErrorCode::SyntaxError, "model has an empty domain");
  return m;
}

inline std::string to_string(const FiniteModel& m) {
  std::ostringstream os;
  os << "domain";
  for (const auto& d : m.domain) os << " " << d;
  os << ".\n";
  for (const auto& [name, ext] : m.predicates) {
    os << "pred " << name << " = {";
    bool first = true;
    for (const auto& tup : ext) {
      if (!first) os << ", ";
      first = false;
      if (tup.size() == 1) {
        os << m.domain[static_cast<size_t>(tup[0])];
        continue;
      }
      os << "(";
      for (size_t i = 0; i < tup.size(); ++i) os << (i ? "," : "") << m.domain[static_cast<size_t>(tup[i])];
      os << ")";
    }
    os << "}.\n";
  }
  for (const auto& [name, e] : m.constants) os << "const " << name << " = " << m.domain[static_cast<size_t>(e)] << ".\n";
  return os.str();
}

using Assignment = std::map<std::string, int>;

namespace eval_detail {

inline int denote(const Term& t, const FiniteModel& m, const Assignment& g) {
  if (t.is(TermKind::Var)) {
    auto it = g.find(t.name());
    if (it == g.end()) throw Error(ErrorCode::FreeReferent, "unassigned variable " + t.name());
    return it->second;
  }
  if (t.is(TermKind::Const)) {
    auto it = m.constants.find(t.name());
    if (it == m.constants.end()) throw Error(ErrorCode::UnknownSymbol, "uninterpreted constant " + t.name());
    return it->second;
  }
  throw Error(ErrorCode::UnknownSymbol, "not an entity term: " + to_string(t));
}

inline bool atom(const std::string& pred, const std::vector<Term>& args, const FiniteModel& m, const Assignment& g) {
  auto it = m.predicates.find(pred);
  if (it == m.predicates.end()) throw Error(ErrorCode::UnknownSymbol, "uninterpreted predicate " + pred);
  std::vector<int> tuple;
  for (const auto& a : args) tuple.push_back(denote(a, m, g));
  return it->second.count(tuple) > 0;
}

/// Predicate name and arguments of an atomic formula, or of a bare
/// propositional constant.
inline std::optional<std::pair<std::string, std::vector<Term>>> as_atom(const Term& t) {
  std::vector<Term> args;
  const Term* head = &t;
  while (head->is(TermKind::App)) {
    args.insert(args.begin(), head->kid(1));
    head = &head->kid(0);
  }
  if (!head->is(TermKind::Const)) return std::nullopt;
  return std::make_pair(head->name(), std::move(args));
}

inline bool fol(const Term& f, const FiniteModel& m, Assignment& g) {
  switch (f.kind()) {
    case TermKind::Conn:
      switch (f.conn_kind()) {
        case ConnKind::Verum: return true;
        case ConnKind::Not: return !fol(f.kid(0), m, g);
        case ConnKind::And:
          for (const auto& k : f.kids())
            if (!fol(k, m, g)) return false;
          return true;
        case ConnKind::Or:
          for (const auto& k : f.kids())
            if (fol(k, m, g)) return true;
          return false;
        case ConnKind::Implies: return !fol(f.kid(0), m, g) || fol(f.kid(1), m, g);
        case ConnKind::Eq: return denote(f.kid(0), m, g) == denote(f.kid(1), m, g);
      }
      break;
    case TermKind::Quant: {
      bool universal = f.quant_kind() == QuantKind::Forall;
      auto found = g.find(f.name());
      bool had = found != g.end();
      int saved = had ? found->second : 0;
      bool result = universal;
      for (int e = 0; e < static_cast<int>(m.domain.size()); ++e) {
        g[f.name()] = e;
        bool scope;
        if (f.has_restrictor()) {
          bool r = fol(f.kid(0), m, g);
          scope = universal ? (!r || fol(f.kid(1), m, g)) : (r && fol(f.kid(1), m, g));
        } else {
          scope = fol(f.kid(0), m, g);
        }
        if (scope != universal) {
          result = scope;
          break;
        }
      }
      if (had) {
        g[f.name()] = saved;
      } else {
        g.erase(f.name());
      }
      return result;
    }
    default:
      if (auto a = as_atom(f)) return atom(a->first, a->second, m, g);
      break;
  }
  throw Error(ErrorCode::NotApplicable, "not a first-order formula: " + to_string(f));
}

inline bool verify(const Term& d, const FiniteModel& m, const Assignment& g);

inline bool holds(const Term& c, const FiniteModel& m, const Assignment& g) {
  auto cls = drt::classify(c);
  if (!cls) throw Error(ErrorCode::NotApplicable, "unresolved DRS condition: " + to_string(c));
  if (auto* a = std::get_if<drt::AtomCond>(&*cls)) return atom(a->predicate, a->args, m, g);
  if (auto* e = std::get_if<drt::EqCond>(&*cls)) return denote(e->left, m, g) == denote(e->right, m, g);
  if (auto* n = std::get_if<drt::NotCond>(&*cls)) return !verify(n->drs, m, g);
  if (auto* o = std::get_if<drt::OrCond>(&*cls)) return verify(o->left, m, g) || verify(o->right, m, g);
  auto& im = std::get<drt::ImpliesCond>(*cls);
  // Every extension verifying the antecedent extends to the consequent.
  bool ok = true;
  std::function<void(size_t, Assignment&)> extend = [&](size_t i, Assignment& h) {
    if (!ok) return;
    const auto& u = im.antecedent.universe();
    if (i == u.size()) {
      for (const auto& k : im.antecedent.kids())
        if (!holds(k, m, h)) return;
      if (!verify(im.consequent, m, h)) ok = false;
      return;
    }
    for (int e = 0; e < static_cast<int>(m.domain.size()); ++e) {
      Assignment next = h;
      next[u[i].name] = e;
      extend(i + 1, next);
    }
  };
  Assignment h = g;
  extend(0, h);
  return ok;
}

/// Is there an extension of g to d's universe satisfying all conditions?
inline bool verify(const Term& d, const FiniteModel& m, const Assignment& g) {
  const auto& u = d.universe();
  std::function<bool(size_t, const Assignment&)> go = [&](size_t i, const Assignment& h) {
    if (i == u.size()) {
      for (const auto& c : d.kids())
        if (!holds(c, m, h)) return false;
      return true;
    }
    for (int e = 0; e < static_cast<int>(m.domain.size()); ++e) {
      Assignment next = h;
      next[u[i].name] = e;
      if (go(i + 1, next)) return true;
    }
    return false;
  };
  return go(0, g);
}

}  // namespace eval_detail

/// Tarskian evaluation by exhaustive expansion of quantifiers.
inline bool eval_fol(const Term& f, const FiniteModel& m) {
  Assignment g;
  return eval_detail::fol(f, m, g);
}

/// Embedding semantics: some assignment to the universe verifies all
/// conditions.
inline bool eval_drs(const Term& d, const FiniteModel& m) {
  if (!d.is(TermKind::Drs)) throw Error(ErrorCode::TypeMismatch, "not a DRS: " + to_string(d));
  return eval_detail::verify(d, m, {});
}

// ---------------------------------------------------------------------------
// Signatures and exhaustive model enumeration

struct ModelSignature {
  std::map<std::string, int> predicates;  // name -> arity
  std::set<std::string> constants;

  void merge(const ModelSignature& o) {
    for (const auto& [p, a] : o.predicates) add_predicate(p, a);
    constants.insert(o.constants.begin(), o.constants.end());
  }
  void add_predicate(const std::string& p, int arity) {
    auto [it, fresh] = predicates.emplace(p, arity);
    if (!fresh && it->second != arity)
      throw Error(ErrorCode::IllTyped, "predicate " + p + " used with arities " + std::to_string(it->second) +
                                           " and " + std::to_string(arity));
  }
};

namespace eval_detail {
inline void signature(const Term& t, ModelSignature& sig) {
  if (t.is(TermKind::Const) && t.type() == Type::e()) {
    sig.constants.insert(t.name());
    return;
  }
  if (t.is(TermKind::Const) && t.type() == Type::t()) {
    sig.add_predicate(t.name(), 0);
    return;
  }
  if (t.is(TermKind::App)) {
    if (auto a = as_atom(t)) {
      sig.add_predicate(a->first, static_cast<int>(a->second.size()));
      for (const auto& arg : a->second) signature(arg, sig);
      return;
    }
  }
  for (const auto& k : t.kids()) signature(k, sig);
}
}  // namespace eval_detail

/// Predicates (with arity) and entity constants a formula or DRS mentions.
inline ModelSignature signature_of(const Term& t) {
  ModelSignature sig;
  eval_detail::signature(t, sig);
  return sig;
}

/// Bit-packed model: one bit per possible tuple of each predicate plus an
/// entity per constant. Predicates and constants are numbered in signature
/// order.
struct PackedModel {
  int size = 1;
  std::uint64_t bits = 0;
  std::vector<int> constants;
};

class ModelSpace {
 public:
  ModelSpace(ModelSignature sig, int domain_size) : sig_(std::move(sig)), n_(domain_size) {
    int offset = 0;
    for (const auto& [p, arity] : sig_.predicates) {
      int cells = 1;
      for (int i = 0; i < arity; ++i) cells *= n_;
      pred_ids_[p] = static_cast<int>(offsets_.size());
      offsets_.push_back(offset);
      arities_.push_back(arity);
      offset += cells;
    }
    if (offset > 63) throw Error(ErrorCode::InvalidParams, "signature too large for exhaustive enumeration");
    width_ = offset;
    int c = 0;
    for (const auto& name : sig_.constants) const_ids_[name] = c++;
  }

  int domain_size() const { return n_; }
  int width() const { return width_; }
  const ModelSignature& signature() const { return sig_; }

  std::uint64_t model_count() const {
    std::uint64_t k = std::uint64_t{1} << width_;
    for (size_t i = 0; i < sig_.constants.size(); ++i) k *= static_cast<std::uint64_t>(n_);
    return k;
  }

  int predicate_id(const std::string& p) const {
    auto it = pred_ids_.find(p);
    if (it == pred_ids_.end()) throw Error(ErrorCode::UnknownSymbol, "uninterpreted predicate " + p);
    return it->second;
  }
  int constant_id(const std::string& c) const {
    auto it = const_ids_.find(c);
    if (it == const_ids_.end()) throw Error(ErrorCode::UnknownSymbol, "uninterpreted constant " + c);
    return it->second;
  }
  int offset(int pred) const { return offsets_[static_cast<size_t>(pred)]; }
  int arity(int pred) const { return arities_[static_cast<size_t>(pred)]; }

  /// Calls f on every model (bits fastest, then constant assignments).
  template <class F>
  void for_each(F&& f) const {
    PackedModel m;
    m.size = n_;
    m.constants.assign(sig_.constants.size(), 0);
    const std::uint64_t patterns = std::uint64_t{1} << width_;
    while (true) {
      for (std::uint64_t b = 0; b < patterns; ++b) {
        m.bits = b;
        f(m);
      }
      size_t i = 0;
      while (i < m.constants.size() && ++m.constants[i] == n_) m.constants[i++] = 0;
      if (i == m.constants.size()) return;
    }
  }

  /// Expands a packed model into the readable form.
  FiniteModel unpack(const PackedModel& pm) const {
    FiniteModel m;
    static const char* names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
    for (int i = 0; i < n_; ++i) m.domain.push_back(i < 8 ? names[i] : "e" + std::to_string(i));
    for (const auto& [p, id] : pred_ids_) {
      int k = arities_[static_cast<size_t>(id)];
      int cells = 1;
      for (int i = 0; i < k; ++i) cells *= n_;
      auto& ext = m.predicates[p];
      for (int cell = 0; cell < cells; ++cell) {
        if (!((pm.bits >> (offsets_[static_cast<size_t>(id)] + cell)) & 1u)) continue;
        std::vector<int> tup(static_cast<size_t>(k));
        int rest = cell;
        for (int i = k; i-- > 0;) {
          tup[static_cast<size_t>(i)] = rest % n_;
          rest /= n_;
        }
        ext.insert(tup);
      }
    }
    for (const auto& [c, id] : const_ids_) m.constants[c] = pm.constants[static_cast<size_t>(id)];
    return m;
  }

 private:
  ModelSignature sig_;
  int n_;
  int width_ = 0;
  std::map<std::string, int> pred_ids_, const_ids_;
  std::vector<int> offsets_, arities_;
};

namespace eval_detail {

struct Node {
  enum Op { True, Atom, Eq, Not, And, Or, Implies, Forall, Exists, Box, Cond };
  Op op = True;
  int pred = 0;
  std::vector<int> args;     // Atom/Eq refs: slot if >= 0, else constant -1 - id
  std::vector<int> slots;    // quantified / universe slots
  std::vector<int> kids;     // child node ids
};

class Compiler {
 public:
  explicit Compiler(const ModelSpace& space) : space_(space) {}

  int arg(const Term& t) {
    if (t.is(TermKind::Var)) return slot(t.name());
    if (t.is(TermKind::Const)) return -1 - space_.constant_id(t.name());
    throw Error(ErrorCode::UnknownSymbol, "not an entity term: " + to_string(t));
  }

  int atom(const std::string& p, const std::vector<Term>& args) {
    Node n;
    n.op = Node::Atom;
    n.pred = space_.predicate_id(p);
    if (space_.arity(n.pred) != static_cast<int>(args.size()))
      throw Error(ErrorCode::UnknownSymbol, "predicate " + p + " has another arity");
    for (const auto& a : args) n.args.push_back(arg(a));
    return add(std::move(n));
  }

  int eq(const Term& a, const Term& b) {
    Node n;
    n.op = Node::Eq;
    n.args = {arg(a), arg(b)};
    return add(std::move(n));
  }

  int fol(const Term& f) {
    if (f.is_conn(ConnKind::Verum)) return add(Node{});
    if (f.is_conn(ConnKind::Eq)) return eq(f.kid(0), f.kid(1));
    if (f.is(TermKind::Conn)) {
      Node n;
      switch (f.conn_kind()) {
        case ConnKind::Not: n.op = Node::Not; break;
        case ConnKind::And: n.op = Node::And; break;
        case ConnKind::Or: n.op = Node::Or; break;
        default: n.op = Node::Implies; break;
      }
      for (const auto& k : f.kids()) n.kids.push_back(fol(k));
      return add(std::move(n));
    }
    if (f.is(TermKind::Quant)) {
      Node n;
      n.op = f.quant_kind() == QuantKind::Forall ? Node::Forall : Node::Exists;
      int saved = bind(f.name());
      n.slots = {slot(f.name())};
      for (const auto& k : f.kids()) n.kids.push_back(fol(k));
      unbind(f.name(), saved);
      return add(std::move(n));
    }
    if (auto a = as_atom(f)) return atom(a->first, a->second);
    throw Error(ErrorCode::NotApplicable, "not a first-order formula: " + to_string(f));
  }

  /// Box: exists an assignment to `slots` under which all kids hold.
  /// Cond (implies): all antecedent assignments satisfying kids[0..] verify
  /// the last kid.
  int drs(const Term& d) {
    Node n;
    n.op = Node::Box;
    std::vector<std::pair<std::string, int>> saved;
    for (const auto& v : d.universe()) {
      saved.emplace_back(v.name, bind(v.name));
      n.slots.push_back(slot(v.name));
    }
    for (const auto& c : d.kids()) n.kids.push_back(condition(c));
    for (auto it = saved.rbegin(); it != saved.rend(); ++it) unbind(it->first, it->second);
    return add(std::move(n));
  }

  int condition(const Term& c) {
    auto cls = drt::classify(c);
    if (!cls) throw Error(ErrorCode::NotApplicable, "unresolved DRS condition: " + to_string(c));
    if (auto* a = std::get_if<drt::AtomCond>(&*cls)) return atom(a->predicate, a->args);
    if (auto* e = std::get_if<drt::EqCond>(&*cls)) return eq(e->left, e->right);
    if (auto* ng = std::get_if<drt::NotCond>(&*cls)) {
      Node n;
      n.op = Node::Not;
      n.kids = {drs(ng->drs)};
      return add(std::move(n));
    }
    if (auto* o = std::get_if<drt::OrCond>(&*cls)) {
      Node n;
      n.op = Node::Or;
      n.kids = {drs(o->left), drs(o->right)};
      return add(std::move(n));
    }
    auto& im = std::get<drt::ImpliesCond>(*cls);
    Node n;
    n.op = Node::Cond;
    std::vector<std::pair<std::string, int>> saved;
    for (const auto& v : im.antecedent.universe()) {
      saved.emplace_back(v.name, bind(v.name));
      n.slots.push_back(slot(v.name));
    }
    for (const auto& k : im.antecedent.kids()) n.kids.push_back(condition(k));
    n.kids.push_back(drs(im.consequent));
    for (auto it = saved.rbegin(); it != saved.rend(); ++it) unbind(it->first, it->second);
    return add(std::move(n));
  }

  std::vector<Node> take() { return std::move(nodes_); }
  int slot_count() const { return next_slot_; }

 private:
  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int slot(const std::string& v) {
    auto it = scope_.find(v);
    if (it == scope_.end()) throw Error(ErrorCode::FreeReferent, "unbound variable " + v);
    return it->second;
  }
  int bind(const std::string& v) {
    auto it = scope_.find(v);
    int old = it == scope_.end() ? -1 : it->second;
    scope_[v] = next_slot_++;
    return old;
  }
  void unbind(const std::string& v, int old) {
    if (old < 0) scope_.erase(v); else scope_[v] = old;
  }

  const ModelSpace& space_;
  std::vector<Node> nodes_;
  std::map<std::string, int> scope_;
  int next_slot_ = 0;
};

}  // namespace eval_detail

/// A formula or DRS compiled against a ModelSpace for fast repeated
/// evaluation over packed models.
class CompiledEvaluator {
 public:
  static CompiledEvaluator fol(const Term& f, const ModelSpace& space) {
    eval_detail::Compiler c(space);
    int root = c.fol(f);
    return CompiledEvaluator(space, c.take(), root, c.slot_count());
  }
  static CompiledEvaluator drs(const Term& d, const ModelSpace& space) {
    if (!d.is(TermKind::Drs)) throw Error(ErrorCode::TypeMismatch, "not a DRS: " + to_string(d));
    eval_detail::Compiler c(space);
    int root = c.drs(d);
    return CompiledEvaluator(space, c.take(), root, c.slot_count());
  }

  bool operator()(const PackedModel& m) const {
    model_ = &m;
    return eval(root_);
  }

 private:
  using Node = eval_detail::Node;

  CompiledEvaluator(const ModelSpace& space, std::vector<Node> nodes, int root, int slots)
      : space_(&space), nodes_(std::move(nodes)), root_(root), env_(static_cast<size_t>(slots), 0) {
    for (int p = 0; p < static_cast<int>(space.signature().predicates.size()); ++p) {
      offsets_.push_back(space.offset(p));
    }
  }

  int value(int ref) const {
    return ref >= 0 ? env_[static_cast<size_t>(ref)] : model_->constants[static_cast<size_t>(-1 - ref)];
  }

  bool all(const Node& n, size_t from, size_t to) const {
    for (size_t i = from; i < to; ++i)
      if (!eval(n.kids[i])) return false;
    return true;
  }

  // Iterates assignments to n.slots[i..]; returns true as soon as pred does.
  template <class Pred>
  bool some(const Node& n, size_t i, Pred&& pred) const {
    if (i == n.slots.size()) return pred();
    int& cell = env_[static_cast<size_t>(n.slots[i])];
    for (int e = 0; e < model_->size; ++e) {
      cell = e;
      if (some(n, i + 1, pred)) return true;
    }
    return false;
  }

  bool eval(int id) const {
    const Node& n = nodes_[static_cast<size_t>(id)];
    switch (n.op) {
      case Node::True: return true;
      case Node::Atom: {
        int cell = 0;
        for (int a : n.args) cell = cell * model_->size + value(a);
        return (model_->bits >> (offsets_[static_cast<size_t>(n.pred)] + cell)) & 1u;
      }
      case Node::Eq: return value(n.args[0]) == value(n.args[1]);
      case Node::Not: return !eval(n.kids[0]);
      case Node::And: return all(n, 0, n.kids.size());
      case Node::Or:
        for (int k : n.kids)
          if (eval(k)) return true;
        return false;
      case Node::Implies: return !eval(n.kids[0]) || eval(n.kids[1]);
      case Node::Exists:
        return some(n, 0, [&] {
          return n.kids.size() == 2 ? eval(n.kids[0]) && eval(n.kids[1]) : eval(n.kids[0]);
        });
      case Node::Forall:
        return !some(n, 0, [&] {
          return n.kids.size() == 2 ? eval(n.kids[0]) && !eval(n.kids[1]) : !eval(n.kids[0]);
        });
      case Node::Box: return some(n, 0, [&] { return all(n, 0, n.kids.size()); });
      case Node::Cond:
        return !some(n, 0, [&] { return all(n, 0, n.kids.size() - 1) && !eval(n.kids.back()); });
    }
    return false;
  }

  const ModelSpace* space_;
  std::vector<Node> nodes_;
  int root_;
  mutable std::vector<int> env_;
  mutable const PackedModel* model_ = nullptr;
  std::vector<int> offsets_;
};

}  // namespace semwb
