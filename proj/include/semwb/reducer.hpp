#pragma once

// Normalisation by beta-reduction interleaved with intensional-operator
// cancellation and DRS merging. Two interchangeable beta strategies:
//
//   substitution   capture-avoiding substitution with alpha-conversion
//   metavariable   the abstraction is copied with every binder replaced by a
//                  fresh metavariable, the parameter's metavariable is bound
//                  to the argument in an environment, and the environment is
//                  resolved when the result is read out
//
// Redexes are always chosen leftmost-outermost. normalize() tries
// cancellation first, then beta, then merge.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drt.hpp"
#include "term.hpp"
#include "term_ops.hpp"

namespace semwb {

enum class ReducerKind { Substitution, Metavariable };

inline const char* to_string(ReducerKind k) { return k == ReducerKind::Substitution ? "substitution" : "metavariable"; }

enum class Rule { Beta, Cancel, Merge };

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::Beta: return "beta";
    case Rule::Cancel: return "cancel";
    case Rule::Merge: return "merge";
  }
  return "?";
}

struct TraceStep {
  Rule rule;
  Path path;
  Term after;
  std::vector<std::pair<std::string, std::string>> renaming;  // merge only
};

struct ReductionTrace {
  Term initial;
  std::vector<TraceStep> steps;

  const Term& last() const { return steps.empty() ? initial : steps.back().after; }
};

struct StepResult {
  Term term;
  Path path;
  std::vector<std::pair<std::string, std::string>> renaming;
};

class FuelExhausted : public Error {
 public:
  FuelExhausted(ReductionTrace partial, int fuel)
      : Error(ErrorCode::FuelExhausted, "no normal form within " + std::to_string(fuel) + " steps"),
        trace_(std::move(partial)) {}
  const ReductionTrace& trace() const { return trace_; }

 private:
  ReductionTrace trace_;
};

namespace reduce_detail {

template <class Pred>
bool find_leftmost_outermost(const Term& t, Path& path, Pred&& is_redex) {
  if (is_redex(t)) return true;
  for (size_t i = 0; i < t.kids().size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (find_leftmost_outermost(t.kid(i), path, is_redex)) return true;
    path.pop_back();
  }
  return false;
}

inline bool is_beta_redex(const Term& t) { return t.is(TermKind::App) && t.kid(0).is(TermKind::Lam); }
inline bool is_cancel_redex(const Term& t) { return t.is(TermKind::Down) && t.kid(0).is(TermKind::Up); }

inline bool is_meta(const std::string& n) { return !n.empty() && n[0] == '?'; }

/// Original name recorded inside a metavariable `?name#k`.
inline std::string meta_origin(const std::string& n) { return n.substr(1, n.rfind('#') - 1); }

inline Term resolve_metas(const Term& t, const std::map<std::string, Term>& env) {
  if (t.is(TermKind::Var)) {
    auto it = env.find(t.name());
    return it == env.end() ? t : it->second;
  }
  if (t.kids().empty()) return t;
  std::vector<Term> kids;
  for (const auto& k : t.kids()) kids.push_back(resolve_metas(k, env));
  return t.with_kids(std::move(kids));
}

/// Gives metavariable binders readable names again: the original name when
/// it is not in use, otherwise a fresh variant of its stem.
inline Term restore_names(const Term& t) {
  NameSet avoid;
  for (const auto& n : var_names(t))
    if (!is_meta(n)) avoid.insert(n);
  return rename_binders(t, [&](const std::string& old, const NameMap& env) {
    if (!is_meta(old)) return old;
    NameSet local = avoid;
    for (const auto& [k, v] : env) local.insert(v);
    std::string origin = meta_origin(old);
    if (!local.count(origin)) return origin;
    return fresh_name(name_stem(origin), local);
  });
}

inline Term contract_substitution(const Term& redex) {
  const Term& lam = redex.kid(0);
  return substitute_unchecked(lam.kid(0), lam.name(), redex.kid(1));
}

inline Term contract_metavariable(const Term& redex) {
  const Term& lam = redex.kid(0);
  int counter = 0;
  auto meta = [&](const std::string& base) { return "?" + base + "#" + std::to_string(counter++); };
  std::string param = meta(lam.name());
  Term copy = rename_binders(
      lam.kid(0), [&](const std::string& old, const NameMap&) { return meta(old); }, NameMap{{lam.name(), param}});
  std::map<std::string, Term> env{{param, redex.kid(1)}};
  return restore_names(resolve_metas(copy, env));
}

}  // namespace reduce_detail

inline std::optional<Path> find_beta_redex(const Term& t) {
  Path p;
  if (reduce_detail::find_leftmost_outermost(t, p, reduce_detail::is_beta_redex)) return p;
  return std::nullopt;
}

inline std::optional<Path> find_cancel_redex(const Term& t) {
  Path p;
  if (reduce_detail::find_leftmost_outermost(t, p, reduce_detail::is_cancel_redex)) return p;
  return std::nullopt;
}

/// Applies `rule` at `path`; throws InvalidPath when there is no redex of
/// that rule there.
inline StepResult apply_rule_at(const Term& t, Rule rule, const Path& path, ReducerKind kind) {
  const Term& redex = t.at(path);
  switch (rule) {
    case Rule::Beta: {
      if (!reduce_detail::is_beta_redex(redex)) throw Error(ErrorCode::InvalidPath, "no beta redex at " + path_str(path));
      Term c = kind == ReducerKind::Substitution ? reduce_detail::contract_substitution(redex)
                                                 : reduce_detail::contract_metavariable(redex);
      return {t.replace_at(path, c), path, {}};
    }
    case Rule::Cancel:
      if (!reduce_detail::is_cancel_redex(redex))
        throw Error(ErrorCode::InvalidPath, "no cancellation redex at " + path_str(path));
      return {t.replace_at(path, redex.kid(0).kid(0)), path, {}};
    case Rule::Merge: {
      auto m = drt::contract_merge_at(t, path);
      return {m.term, m.path, m.renaming};
    }
  }
  throw Error(ErrorCode::InvalidPath, "unknown rule");
}

/// Contracts the leftmost-outermost beta redex; nullopt in beta-normal form.
inline std::optional<StepResult> beta_step(const Term& t, ReducerKind kind) {
  auto p = find_beta_redex(t);
  if (!p) return std::nullopt;
  return apply_rule_at(t, Rule::Beta, *p, kind);
}

/// Rewrites the leftmost-outermost v(^E) to E.
inline std::optional<StepResult> cancel_step(const Term& t) {
  auto p = find_cancel_redex(t);
  if (!p) return std::nullopt;
  return apply_rule_at(t, Rule::Cancel, *p, ReducerKind::Substitution);
}

/// One normalisation step in priority order cancel, beta, merge.
inline std::optional<TraceStep> reduction_step(const Term& t, ReducerKind kind) {
  if (auto r = cancel_step(t)) return TraceStep{Rule::Cancel, r->path, r->term, {}};
  if (auto r = beta_step(t, kind)) return TraceStep{Rule::Beta, r->path, r->term, {}};
  if (auto m = drt::merge_step(t)) return TraceStep{Rule::Merge, m->path, m->term, m->renaming};
  return std::nullopt;
}

inline bool is_normal(const Term& t) {
  return !find_cancel_redex(t) && !find_beta_redex(t) && !drt::find_merge_redex(t);
}

constexpr int kDefaultFuel = 10000;

struct Normalized {
  Term term;
  ReductionTrace trace;
};

inline Normalized normalize(const Term& t, ReducerKind kind, int fuel = kDefaultFuel) {
  ReductionTrace trace{t, {}};
  Term cur = t;
  for (int used = 0;; ++used) {
    auto step = reduction_step(cur, kind);
    if (!step) return {cur, std::move(trace)};
    if (used == fuel) throw FuelExhausted(std::move(trace), fuel);
    cur = step->after;
    trace.steps.push_back(std::move(*step));
  }
}

/// Re-applies every recorded step from the initial term and checks that
/// each reproduces the recorded result exactly.
inline bool replay(const ReductionTrace& trace, ReducerKind kind) {
  Term cur = trace.initial;
  for (const auto& s : trace.steps) {
    try {
      StepResult r = apply_rule_at(cur, s.rule, s.path, kind);
      if (!(r.term == s.after)) return false;
      cur = r.term;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

}  // namespace semwb
