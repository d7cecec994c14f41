#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "term.hpp"

namespace semwb {

using NameSet = std::set<std::string>;
using NameMap = std::map<std::string, std::string>;

// ---------------------------------------------------------------------------
// Free variables

namespace detail {

inline void collect_free(const Term& t, NameSet& bound, std::set<Var>& out) {
  switch (t.kind()) {
    case TermKind::Var:
      if (!bound.count(t.name())) out.insert(t.bound());
      return;
    case TermKind::Const:
    case TermKind::Index:
      return;
    case TermKind::Lam:
    case TermKind::Quant: {
      bool fresh = bound.insert(t.name()).second;
      for (const auto& k : t.kids()) collect_free(k, bound, out);
      if (fresh) bound.erase(t.name());
      return;
    }
    case TermKind::Drs: {
      std::vector<std::string> added;
      for (const auto& v : t.universe())
        if (bound.insert(v.name).second) added.push_back(v.name);
      for (const auto& k : t.kids()) collect_free(k, bound, out);
      for (const auto& n : added) bound.erase(n);
      return;
    }
    default:
      break;
  }
  if (is_dynamic_binder(t)) {
    collect_free(t.kid(0), bound, out);
    std::vector<std::string> added;
    for (const auto& n : declared_referents(t.kid(0)))
      if (bound.insert(n).second) added.push_back(n);
    collect_free(t.kid(1), bound, out);
    for (const auto& n : added) bound.erase(n);
    return;
  }
  for (const auto& k : t.kids()) collect_free(k, bound, out);
}

inline void collect_names(const Term& t, NameSet& out) {
  if (t.is(TermKind::Var) || t.is(TermKind::Lam) || t.is(TermKind::Quant)) out.insert(t.name());
  if (t.is(TermKind::Drs))
    for (const auto& v : t.universe()) out.insert(v.name);
  for (const auto& k : t.kids()) collect_names(k, out);
}

}  // namespace detail

/// Variables with a free occurrence. DRS referents bind within their own
/// conditions and, through merge and implication, within the right operand.
inline std::set<Var> free_vars(const Term& t) {
  NameSet bound;
  std::set<Var> out;
  detail::collect_free(t, bound, out);
  return out;
}

inline NameSet free_var_names(const Term& t) {
  NameSet out;
  for (const auto& v : free_vars(t)) out.insert(v.name);
  return out;
}

/// Every variable name occurring in the term, bound or free.
inline NameSet var_names(const Term& t) {
  NameSet out;
  detail::collect_names(t, out);
  return out;
}

inline bool occurs_free(const std::string& name, const Term& t) { return free_var_names(t).count(name) > 0; }

// ---------------------------------------------------------------------------
// Fresh names

/// `base` if unused, else `base` followed by the smallest positive integer
/// that gives an unused name.
inline std::string fresh_name(const std::string& base, const NameSet& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

inline Var fresh_var(const Var& base, const std::set<Var>& avoid) {
  NameSet names;
  for (const auto& v : avoid) names.insert(v.name);
  return Var{fresh_name(base.name, names), base.type};
}

/// Name stem used when renaming: trailing digits are dropped, so renaming
/// `x1` yields `x2` rather than `x11`.
inline std::string name_stem(const std::string& name) {
  size_t end = name.size();
  while (end > 1 && std::isdigit(static_cast<unsigned char>(name[end - 1]))) --end;
  return name.substr(0, end);
}

// ---------------------------------------------------------------------------
// Binder renaming (shared by alpha-normalisation and the metavariable reducer)

/// Chooses the new name for a binder given the renaming environment in
/// force at the binding site.
using BinderNamer = std::function<std::string(const std::string& old_name, const NameMap& env)>;

namespace detail {

struct Renamed {
  Term term;
  std::vector<std::pair<std::string, std::string>> exported;
};

inline Renamed rename_binders_impl(const Term& t, const NameMap& env, const BinderNamer& namer) {
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) return {t, {}};
      return {Term::var(it->second, t.type()), {}};
    }
    case TermKind::Const:
    case TermKind::Index:
      return {t, {}};
    case TermKind::Lam:
    case TermKind::Quant: {
      std::string fresh = namer(t.name(), env);
      NameMap inner = env;
      inner[t.name()] = fresh;
      std::vector<Term> kids;
      for (const auto& k : t.kids()) kids.push_back(rename_binders_impl(k, inner, namer).term);
      return {t.with_binder(fresh).with_kids(std::move(kids)), {}};
    }
    case TermKind::Drs: {
      NameMap inner = env;
      std::vector<Var> universe;
      std::vector<std::pair<std::string, std::string>> exported;
      for (const auto& v : t.universe()) {
        std::string fresh = namer(v.name, inner);
        inner[v.name] = fresh;
        universe.push_back(Var{fresh, v.type});
        exported.emplace_back(v.name, fresh);
      }
      std::vector<Term> kids;
      for (const auto& k : t.kids()) kids.push_back(rename_binders_impl(k, inner, namer).term);
      return {t.with_universe(std::move(universe)).with_kids(std::move(kids)), std::move(exported)};
    }
    default:
      break;
  }
  if (is_dynamic_binder(t)) {
    Renamed left = rename_binders_impl(t.kid(0), env, namer);
    NameMap inner = env;
    for (const auto& [o, n] : left.exported) inner[o] = n;
    Renamed right = rename_binders_impl(t.kid(1), inner, namer);
    std::vector<std::pair<std::string, std::string>> exported;
    if (t.is(TermKind::Merge)) {
      exported = left.exported;
      for (const auto& e : right.exported) {
        bool dup = false;
        for (const auto& l : left.exported) dup = dup || l.first == e.first;
        if (!dup) exported.push_back(e);
      }
    }
    return {t.with_kids({left.term, right.term}), std::move(exported)};
  }
  std::vector<Term> kids;
  for (const auto& k : t.kids()) kids.push_back(rename_binders_impl(k, env, namer).term);
  return {t.with_kids(std::move(kids)), {}};
}

}  // namespace detail

/// Rebuilds `t` with every binder (lambda, quantifier, DRS referent)
/// renamed by `namer`, updating bound occurrences consistently.
inline Term rename_binders(const Term& t, const BinderNamer& namer, const NameMap& env = {}) {
  return detail::rename_binders_impl(t, env, namer).term;
}

/// Canonical representative of the alpha class: binders renamed `%0`, `%1`,
/// ... in traversal order.
inline Term alpha_normalize(const Term& t) {
  int counter = 0;
  return rename_binders(t, [&](const std::string&, const NameMap&) { return "%" + std::to_string(counter++); });
}

inline bool alpha_eq(const Term& a, const Term& b) {
  if (a.same_node(b)) return true;
  return alpha_normalize(a) == alpha_normalize(b);
}

// ---------------------------------------------------------------------------
// Typing

namespace detail {

inline Type type_at(const Term& t, std::map<std::string, std::vector<Type>>& env, Path& path) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::IllTyped, why + " at " + path_str(path));
  };
  auto child = [&](size_t i) {
    path.push_back(static_cast<int>(i));
    Type ty = type_at(t.kid(i), env, path);
    path.pop_back();
    return ty;
  };
  auto expect_truth = [&](size_t i, const char* what) {
    Type ty = child(i);
    if (!(ty == Type::t())) {
      path.push_back(static_cast<int>(i));
      Error e = fail(std::string(what) + " must have type t, found " + ty.str());
      path.pop_back();
      throw e;
    }
  };
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = env.find(t.name());
      if (it != env.end() && !it->second.empty() && !(it->second.back() == t.type()))
        throw fail("variable " + t.name() + " used at " + t.type().str() + " but bound at " +
                   it->second.back().str());
      if (!t.type().well_formed()) throw fail("malformed type " + t.type().str());
      return t.type();
    }
    case TermKind::Const:
    case TermKind::Index:
      if (!t.type().well_formed()) throw fail("malformed type " + t.type().str());
      return t.type();
    case TermKind::Lam: {
      if (!t.type().well_formed()) throw fail("malformed parameter type " + t.type().str());
      env[t.name()].push_back(t.type());
      Type body = child(0);
      env[t.name()].pop_back();
      return Type::fn(t.type(), body);
    }
    case TermKind::App: {
      Type f = child(0);
      Type a = child(1);
      if (!f.is_function()) throw fail("applying non-function of type " + f.str());
      if (!(f.domain() == a)) throw fail("argument type " + a.str() + " does not match domain " + f.domain().str());
      return f.codomain();
    }
    case TermKind::Up:
      return Type::fn(Type::s(), child(0));
    case TermKind::Down: {
      Type b = child(0);
      if (!b.is_function() || b.domain().kind() != Type::Kind::World)
        throw fail("extension of non-intensional type " + b.str());
      return b.codomain();
    }
    case TermKind::Quant: {
      env[t.name()].push_back(t.type());
      for (size_t i = 0; i < t.kids().size(); ++i) expect_truth(i, "quantifier body");
      env[t.name()].pop_back();
      return Type::t();
    }
    case TermKind::Conn: {
      size_t n = t.kids().size();
      switch (t.conn_kind()) {
        case ConnKind::Verum:
          if (n != 0) throw fail("true takes no arguments");
          return Type::t();
        case ConnKind::Not:
          if (n != 1) throw fail("not takes one argument");
          expect_truth(0, "negated formula");
          return Type::t();
        case ConnKind::And:
        case ConnKind::Or:
          if (n < 2) throw fail(std::string(to_string(t.conn_kind())) + " takes at least two arguments");
          for (size_t i = 0; i < n; ++i) expect_truth(i, "connective argument");
          return Type::t();
        case ConnKind::Implies: {
          if (n != 2) throw fail("implies takes two arguments");
          expect_truth(0, "antecedent");
          auto declared = declared_referents(t.kid(0));
          for (const auto& d : declared) env[d].push_back(Type::e());
          expect_truth(1, "consequent");
          for (const auto& d : declared) env[d].pop_back();
          return Type::t();
        }
        case ConnKind::Eq: {
          if (n != 2) throw fail("eq takes two arguments");
          Type l = child(0);
          Type r = child(1);
          if (!(l == r)) throw fail("eq operands differ: " + l.str() + " vs " + r.str());
          return Type::t();
        }
      }
      return Type::t();
    }
    case TermKind::Drs: {
      for (const auto& v : t.universe()) {
        if (!(v.type == Type::e())) throw fail("referent " + v.name + " is not entity-typed");
        env[v.name].push_back(v.type);
      }
      for (size_t i = 0; i < t.kids().size(); ++i) expect_truth(i, "condition");
      for (const auto& v : t.universe()) env[v.name].pop_back();
      return Type::t();
    }
    case TermKind::Merge: {
      expect_truth(0, "merge operand");
      auto declared = declared_referents(t.kid(0));
      for (const auto& d : declared) env[d].push_back(Type::e());
      expect_truth(1, "merge operand");
      for (const auto& d : declared) env[d].pop_back();
      return Type::t();
    }
  }
  throw fail("unknown term");
}

}  // namespace detail

/// Principal type; throws IllTyped naming the path of the offending subterm.
inline Type type_of(const Term& t) {
  std::map<std::string, std::vector<Type>> env;
  Path path;
  return detail::type_at(t, env, path);
}

inline bool well_typed(const Term& t) {
  try {
    type_of(t);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Capture-avoiding substitution

/// Ordered map from variables to replacement terms.
using Substitution = std::vector<std::pair<Var, Term>>;

namespace detail {

using NameSubst = std::map<std::string, Term>;

inline Term subst(const Term& t, const NameSubst& s);

inline NameSubst restrict_to(const NameSubst& s, const NameSet& names) {
  NameSubst out;
  for (const auto& [k, v] : s)
    if (names.count(k)) out.emplace(k, v);
  return out;
}

inline NameSet range_names(const NameSubst& s) {
  NameSet out;
  for (const auto& [k, v] : s) {
    auto fv = free_var_names(v);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

inline NameSet avoid_set(const Term& t, const NameSubst& s) {
  NameSet avoid = var_names(t);
  for (const auto& [k, v] : s) {
    avoid.insert(k);
    auto names = var_names(v);
    avoid.insert(names.begin(), names.end());
  }
  return avoid;
}

/// Type of the referent `name` as declared by `t` (merge chain or DRS).
inline const Var* declared_var(const Term& t, const std::string& name) {
  if (t.is(TermKind::Drs)) {
    for (const auto& v : t.universe())
      if (v.name == name) return &v;
    return nullptr;
  }
  if (t.is(TermKind::Merge)) {
    if (auto* v = declared_var(t.kid(0), name)) return v;
    return declared_var(t.kid(1), name);
  }
  return nullptr;
}

/// Renames the declaration of referent `from` inside a merge chain or DRS,
/// together with every occurrence it binds inside that chain.
inline Term rename_declaration(const Term& t, const std::string& from, const std::string& to) {
  if (t.is(TermKind::Drs)) {
    std::vector<Var> u = t.universe();
    Type ty = Type::e();
    for (auto& v : u)
      if (v.name == from) {
        v.name = to;
        ty = v.type;
      }
    NameSubst s{{from, Term::var(to, ty)}};
    std::vector<Term> kids;
    for (const auto& k : t.kids()) kids.push_back(subst(k, s));
    return t.with_universe(std::move(u)).with_kids(std::move(kids));
  }
  if (t.is(TermKind::Merge)) {
    const Term& a = t.kid(0);
    const Term& b = t.kid(1);
    if (const Var* v = declared_var(a, from)) {
      NameSubst s{{from, Term::var(to, v->type)}};
      return t.with_kids({rename_declaration(a, from, to), subst(b, s)});
    }
    return t.with_kids({a, rename_declaration(b, from, to)});
  }
  return t;
}

inline Term subst(const Term& t, const NameSubst& s_in) {
  if (s_in.empty()) return t;
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = s_in.find(t.name());
      return it == s_in.end() ? t : it->second;
    }
    case TermKind::Const:
    case TermKind::Index:
      return t;
    default:
      break;
  }
  NameSubst s = restrict_to(s_in, free_var_names(t));
  if (s.empty()) return t;

  if (t.is(TermKind::Lam) || t.is(TermKind::Quant)) {
    Term cur = t;
    s.erase(cur.name());
    if (s.empty()) return t;
    if (range_names(s).count(cur.name())) {
      std::string fresh = fresh_name(name_stem(cur.name()), avoid_set(cur, s));
      NameSubst rn{{cur.name(), Term::var(fresh, cur.type())}};
      std::vector<Term> kids;
      for (const auto& k : cur.kids()) kids.push_back(subst(k, rn));
      cur = cur.with_binder(fresh).with_kids(std::move(kids));
    }
    std::vector<Term> kids;
    for (const auto& k : cur.kids()) kids.push_back(subst(k, s));
    return cur.with_kids(std::move(kids));
  }

  if (t.is(TermKind::Drs)) {
    Term cur = t;
    for (const auto& v : cur.universe()) s.erase(v.name);
    if (s.empty()) return t;
    NameSet captured = range_names(s);
    for (const auto& v : t.universe()) {
      if (!captured.count(v.name)) continue;
      std::string fresh = fresh_name(name_stem(v.name), avoid_set(cur, s));
      cur = rename_declaration(cur, v.name, fresh);
    }
    std::vector<Term> kids;
    for (const auto& k : cur.kids()) kids.push_back(subst(k, s));
    return cur.with_kids(std::move(kids));
  }

  if (is_dynamic_binder(t)) {
    Term cur = t;
    NameSet captured = range_names(s);
    for (const auto& d : declared_referents(t.kid(0))) {
      if (!captured.count(d)) continue;
      std::string fresh = fresh_name(name_stem(d), avoid_set(cur, s));
      const Var* v = declared_var(cur.kid(0), d);
      NameSubst rn{{d, Term::var(fresh, v ? v->type : Type::e())}};
      cur = cur.with_kids({rename_declaration(cur.kid(0), d, fresh), subst(cur.kid(1), rn)});
    }
    Term left = subst(cur.kid(0), s);
    NameSubst right_s = s;
    for (const auto& d : declared_referents(cur.kid(0))) right_s.erase(d);
    Term right = subst(cur.kid(1), right_s);
    return cur.with_kids({left, right});
  }

  std::vector<Term> kids;
  for (const auto& k : t.kids()) kids.push_back(subst(k, s));
  return t.with_kids(std::move(kids));
}

}  // namespace detail

/// Simultaneous capture-avoiding substitution. Bound variables that would
/// capture a free variable of a replacement are renamed via fresh_name.
inline Term substitute(const Term& t, const Substitution& s) {
  detail::NameSubst m;
  for (const auto& [v, rep] : s) {
    if (m.count(v.name)) throw Error(ErrorCode::TypeMismatch, "variable " + v.name + " substituted twice");
    Type rt = type_of(rep);
    if (!(rt == v.type))
      throw Error(ErrorCode::TypeMismatch,
                  "cannot replace " + v.name + ":" + v.type.str() + " by a term of type " + rt.str());
    m.emplace(v.name, rep);
  }
  return detail::subst(t, m);
}

/// Renames the declaration of referent `from` in a DRS literal or merge
/// chain together with every occurrence it binds.
inline Term rename_referent(const Term& t, const std::string& from, const std::string& to) {
  return detail::rename_declaration(t, from, to);
}

/// Untyped variant used internally where types are known to agree.
inline Term substitute_unchecked(const Term& t, const std::string& name, const Term& rep) {
  return detail::subst(t, {{name, rep}});
}

// ---------------------------------------------------------------------------
// Misc structural queries

inline bool contains_kind(const Term& t, TermKind k) {
  if (t.is(k)) return true;
  for (const auto& c : t.kids())
    if (contains_kind(c, k)) return true;
  return false;
}

inline void collect_indices(const Term& t, std::set<int>& out) {
  if (t.is(TermKind::Index)) out.insert(t.index());
  for (const auto& c : t.kids()) collect_indices(c, out);
}

/// Replaces the storage placeholder idx(i) by `rep` (placeholders are
/// atomic, so no capture can arise unless `rep` is bound below; callers
/// pass fresh variables).
inline Term replace_index(const Term& t, int i, const Term& rep) {
  if (t.is(TermKind::Index)) return t.index() == i ? rep : t;
  if (t.kids().empty()) return t;
  std::vector<Term> kids;
  bool changed = false;
  for (const auto& c : t.kids()) {
    kids.push_back(replace_index(c, i, rep));
    changed = changed || !kids.back().same_node(c);
  }
  return changed ? t.with_kids(std::move(kids)) : t;
}

}  // namespace semwb
