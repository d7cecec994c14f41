#pragma once

// Discourse Representation Structures: the condition view over DRS terms,
// the symmetric merge, the merge reduction step and accessibility.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "term.hpp"
#include "term_io.hpp"
#include "term_ops.hpp"

namespace semwb::drt {

/// Value view of a DRS literal.
struct Drs {
  std::vector<Var> universe;
  std::vector<Term> conditions;

  Term term() const { return Term::drs(universe, conditions); }

  static Drs from(const Term& t) {
    if (!t.is(TermKind::Drs)) throw Error(ErrorCode::TypeMismatch, "not a DRS literal: " + to_string(t));
    return Drs{t.universe(), t.kids()};
  }
  static Drs empty() { return {}; }
};

// Condition inventory: atom, equation, negation, implication, disjunction.
struct AtomCond {
  std::string predicate;
  std::vector<Term> args;
};
struct EqCond {
  Term left, right;
};
struct NotCond {
  Term drs;
};
struct ImpliesCond {
  Term antecedent, consequent;
};
struct OrCond {
  Term left, right;
};
using Condition = std::variant<AtomCond, EqCond, NotCond, ImpliesCond, OrCond>;

/// Classifies a resolved condition; nullopt when the term is not (yet) one
/// of the five condition shapes, e.g. an unreduced application of a
/// variable or a pending merge.
inline std::optional<Condition> classify(const Term& c) {
  if (c.is_conn(ConnKind::Eq)) return EqCond{c.kid(0), c.kid(1)};
  if (c.is_conn(ConnKind::Not) && c.kid(0).is(TermKind::Drs)) return NotCond{c.kid(0)};
  if (c.is_conn(ConnKind::Implies) && c.kid(0).is(TermKind::Drs) && c.kid(1).is(TermKind::Drs))
    return ImpliesCond{c.kid(0), c.kid(1)};
  if (c.is_conn(ConnKind::Or) && c.kids().size() == 2 && c.kid(0).is(TermKind::Drs) && c.kid(1).is(TermKind::Drs))
    return OrCond{c.kid(0), c.kid(1)};
  std::vector<Term> args;
  const Term* head = &c;
  while (head->is(TermKind::App)) {
    args.push_back(head->kid(1));
    head = &head->kid(0);
  }
  if (head->is(TermKind::Const) && !args.empty()) {
    std::reverse(args.begin(), args.end());
    return AtomCond{head->name(), std::move(args)};
  }
  return std::nullopt;
}

struct MergeResult {
  Drs drs;
  /// Right-operand referents renamed to avoid collisions (old, new).
  std::vector<std::pair<std::string, std::string>> renaming;
};

/// Unions universes and conditions. Right-operand referents that collide
/// with a left referent (or a free variable of the left operand) are
/// renamed with fresh_name; material in the right operand that refers to
/// left referents stays bound to them.
inline MergeResult merge_with_renaming(const Drs& a, const Drs& b) {
  Term left = a.term();
  Term right = b.term();
  NameSet clash;
  for (const auto& v : a.universe) clash.insert(v.name);
  for (const auto& n : free_var_names(left)) clash.insert(n);
  NameSet avoid = var_names(left);
  for (const auto& n : var_names(right)) avoid.insert(n);

  MergeResult out;
  for (const auto& v : b.universe) {
    if (!clash.count(v.name)) {
      clash.insert(v.name);
      continue;
    }
    std::string fresh = fresh_name(name_stem(v.name), avoid);
    avoid.insert(fresh);
    clash.insert(fresh);
    right = rename_referent(right, v.name, fresh);
    out.renaming.emplace_back(v.name, fresh);
  }
  out.drs.universe = a.universe;
  for (const auto& v : right.universe()) out.drs.universe.push_back(v);
  out.drs.conditions = a.conditions;
  for (const auto& c : right.kids()) out.drs.conditions.push_back(c);
  return out;
}

inline Drs merge(const Drs& a, const Drs& b) { return merge_with_renaming(a, b).drs; }

inline Term merge(const Term& a, const Term& b) { return merge(Drs::from(a), Drs::from(b)).term(); }

struct MergeStep {
  Term term;
  Path path;
  std::vector<std::pair<std::string, std::string>> renaming;
};

namespace detail {
inline bool find_merge_redex(const Term& t, Path& path) {
  if (t.is(TermKind::Merge) && t.kid(0).is(TermKind::Drs) && t.kid(1).is(TermKind::Drs)) return true;
  for (size_t i = 0; i < t.kids().size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (find_merge_redex(t.kid(i), path)) return true;
    path.pop_back();
  }
  return false;
}
}  // namespace detail

/// Position of the leftmost-outermost merge redex.
inline std::optional<Path> find_merge_redex(const Term& t) {
  Path p;
  if (detail::find_merge_redex(t, p)) return p;
  return std::nullopt;
}

/// Contracts merge(K1, K2) at the redex position (both operands literals).
inline MergeStep contract_merge_at(const Term& t, const Path& path) {
  const Term& redex = t.at(path);
  if (!(redex.is(TermKind::Merge) && redex.kid(0).is(TermKind::Drs) && redex.kid(1).is(TermKind::Drs)))
    throw Error(ErrorCode::InvalidPath, "no merge redex at " + path_str(path));
  MergeResult r = merge_with_renaming(Drs::from(redex.kid(0)), Drs::from(redex.kid(1)));
  return MergeStep{t.replace_at(path, r.drs.term()), path, std::move(r.renaming)};
}

/// Rewrites the leftmost-outermost merge of two DRS literals; nullopt when
/// no such redex exists.
inline std::optional<MergeStep> merge_step(const Term& t) {
  auto p = find_merge_redex(t);
  if (!p) return std::nullopt;
  return contract_merge_at(t, *p);
}

/// Referents accessible from the DRS at `path` (a child-index path through
/// conditions and sub-DRS positions): the universes of every enclosing
/// DRS, antecedent universes when inside a consequent, and its own.
inline std::vector<Var> accessible_referents(const Term& d, const Path& path) {
  if (!d.is(TermKind::Drs)) throw Error(ErrorCode::InvalidPath, "root is not a DRS");
  std::vector<Var> out;
  const Term* cur = &d;
  size_t i = 0;
  auto bad = [&]() { return Error(ErrorCode::InvalidPath, "path " + path_str(path) + " does not lead to a DRS"); };
  while (true) {
    if (!cur->is(TermKind::Drs)) throw bad();
    for (const auto& v : cur->universe()) out.push_back(v);
    if (i == path.size()) return out;
    int ci = path[i++];
    if (ci < 0 || static_cast<size_t>(ci) >= cur->kids().size()) throw bad();
    const Term& cond = cur->kid(static_cast<size_t>(ci));
    if (i == path.size()) throw bad();
    int si = path[i++];
    if (cond.is_conn(ConnKind::Not) && si == 0) {
      cur = &cond.kid(0);
    } else if (cond.is_conn(ConnKind::Implies) && (si == 0 || si == 1)) {
      if (si == 1 && cond.kid(0).is(TermKind::Drs))
        for (const auto& v : cond.kid(0).universe()) out.push_back(v);
      cur = &cond.kid(static_cast<size_t>(si));
    } else if (cond.is_conn(ConnKind::Or) && (si == 0 || si == 1)) {
      cur = &cond.kid(static_cast<size_t>(si));
    } else {
      throw bad();
    }
  }
}

namespace detail {
inline bool shapes_resolved(const Term& d) {
  for (const auto& c : d.kids()) {
    auto cls = classify(c);
    if (!cls) return false;
    if (auto* n = std::get_if<NotCond>(&*cls); n && !shapes_resolved(n->drs)) return false;
    if (auto* im = std::get_if<ImpliesCond>(&*cls);
        im && !(shapes_resolved(im->antecedent) && shapes_resolved(im->consequent)))
      return false;
    if (auto* o = std::get_if<OrCond>(&*cls); o && !(shapes_resolved(o->left) && shapes_resolved(o->right)))
      return false;
  }
  return true;
}
}  // namespace detail

/// A DRS is resolved when it has no free referents and every condition
/// (recursively) has one of the five condition shapes.
inline bool is_resolved(const Term& d) {
  return d.is(TermKind::Drs) && free_vars(d).empty() && detail::shapes_resolved(d);
}

/// Merge equivalence: equal universe size and, for some bijection between
/// the universes, equal multisets of (alpha-normalised) conditions. This is
/// alpha-equivalence up to condition and referent order.
inline bool equivalent(const Term& a, const Term& b) {
  if (!a.is(TermKind::Drs) || !b.is(TermKind::Drs)) return alpha_eq(a, b);
  const size_t n = a.universe().size();
  if (n != b.universe().size() || a.kids().size() != b.kids().size()) return false;

  auto canonical_conditions = [](Term d, const std::vector<std::string>& order) {
    for (size_t i = 0; i < order.size(); ++i)
      d = rename_referent(d, order[i], "&" + std::to_string(i));
    std::vector<std::string> out;
    for (const auto& c : d.kids()) out.push_back(to_string(alpha_normalize(c), {true}));
    std::sort(out.begin(), out.end());
    return out;
  };
  // Referents are first moved to names no condition can mention.
  auto park = [](Term d) {
    std::vector<std::string> order;
    for (size_t i = 0; i < d.universe().size(); ++i) {
      std::string old = d.universe()[i].name;
      std::string tmp = "&p" + std::to_string(i);
      d = rename_referent(d, old, tmp);
      order.push_back(tmp);
    }
    return std::make_pair(d, order);
  };
  auto [pa, oa] = park(a);
  auto [pb, ob] = park(b);
  auto target = canonical_conditions(pa, oa);
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  do {
    std::vector<std::string> order;
    for (size_t i = 0; i < n; ++i) order.push_back(ob[perm[i]]);
    if (canonical_conditions(pb, order) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace semwb::drt
