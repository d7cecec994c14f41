#pragma once

// Derivation sessions. A session is the parsed tree plus per-node state and
// the log of steps applied; its state is always the replay of that log from
// open_session, which is also how undo works.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "drt.hpp"
#include "error.hpp"
#include "params.hpp"
#include "parser.hpp"
#include "reducer.hpp"
#include "semmap.hpp"
#include "storage.hpp"
#include "translate.hpp"

namespace semwb {

enum class Phase { Bare, Annotated, Combined, Final };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Bare: return "bare";
    case Phase::Annotated: return "annotated";
    case Phase::Combined: return "combined";
    case Phase::Final: return "final";
  }
  return "?";
}

struct StepAction {
  enum class Kind { Annotate, Combine, Beta, Cancel, Merge, Store, Retrieve, ProcessFully, TranslateToFol };
  Kind kind = Kind::ProcessFully;
  int index = 0;  // store / retrieve only

  friend bool operator==(const StepAction& a, const StepAction& b) { return a.kind == b.kind && a.index == b.index; }
};

inline std::string to_string(const StepAction& a) {
  using K = StepAction::Kind;
  switch (a.kind) {
    case K::Annotate: return "annotate";
    case K::Combine: return "combine";
    case K::Beta: return "beta";
    case K::Cancel: return "cancel";
    case K::Merge: return "merge";
    case K::Store: return "store(" + std::to_string(a.index) + ")";
    case K::Retrieve: return "retrieve(" + std::to_string(a.index) + ")";
    case K::ProcessFully: return "process-fully";
    case K::TranslateToFol: return "translate-to-fol";
  }
  return "?";
}

inline StepAction parse_action(std::string_view text) {
  using K = StepAction::Kind;
  static const std::map<std::string, K, std::less<>> plain{
      {"annotate", K::Annotate}, {"combine", K::Combine},           {"beta", K::Beta},
      {"cancel", K::Cancel},     {"merge", K::Merge},               {"process-fully", K::ProcessFully},
      {"translate-to-fol", K::TranslateToFol}};
  auto it = plain.find(text);
  if (it != plain.end()) return {it->second, 0};
  for (auto [name, kind] : {std::pair{"store", K::Store}, std::pair{"retrieve", K::Retrieve}}) {
    std::string_view n(name);
    if (text.size() > n.size() + 2 && text.substr(0, n.size()) == n && text[n.size()] == '(' && text.back() == ')') {
      std::string num(text.substr(n.size() + 1, text.size() - n.size() - 2));
      if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos) return {kind, std::stoi(num)};
    }
  }
  throw Error(ErrorCode::BadRequest, "unknown action '" + std::string(text) + "'");
}

struct NodeState {
  Phase phase = Phase::Bare;
  std::optional<StoredTerm> current;
  ReductionTrace trace;
  std::vector<StepAction> applicable;
  std::optional<Term> fol;
};

struct Event {
  int node;
  StepAction action;

  friend bool operator==(const Event& a, const Event& b) { return a.node == b.node && a.action == b.action; }
};

struct StepReport {
  int node;
  StepAction action;
  std::optional<StoredTerm> before;
  std::optional<StoredTerm> after;
  size_t trace_added = 0;
};

struct DerivationSession {
  std::string id;
  std::vector<std::string> tokens;
  ParamSet params;
  SynTree tree;
  std::map<int, NodeState> nodes;
  std::map<int, int> parent;  // root absent
  std::vector<Event> log;

  const NodeState& node(int n) const {
    auto it = nodes.find(n);
    if (it == nodes.end()) throw Error(ErrorCode::UnknownNode, "no node " + std::to_string(n) + " in session " + id);
    return it->second;
  }
  const SynTree& syn(int n) const {
    const SynTree* t = tree.find(n);
    if (!t) throw Error(ErrorCode::UnknownNode, "no node " + std::to_string(n) + " in session " + id);
    return *t;
  }
  int root() const { return tree.id; }
};

struct CompareEntry {
  ParamSet params;
  std::optional<DerivationSession> session;
  std::optional<Error> error;
};

/// Deterministic text form of the whole session state (replay checks,
/// export). One line per item.
inline std::string serialize(const DerivationSession& s) {
  std::ostringstream os;
  os << "session " << s.id << "\n";
  os << "tokens";
  for (const auto& t : s.tokens) os << " " << t;
  os << "\nparams " << to_string(s.params) << "\n";
  os << "tree " << to_string(s.tree) << "\n";
  for (const auto& e : s.log) os << "event " << e.node << " " << to_string(e.action) << "\n";
  for (const auto& [id, n] : s.nodes) {
    os << "node " << id << " " << to_string(n.phase);
    if (n.current) os << " " << to_string(*n.current);
    os << " steps=" << n.trace.steps.size();
    if (n.fol) os << " fol=" << to_string(*n.fol);
    os << " [";
    for (size_t i = 0; i < n.applicable.size(); ++i) os << (i ? "," : "") << to_string(n.applicable[i]);
    os << "]\n";
  }
  return os.str();
}

class Engine {
 public:
  explicit Engine(Registry r) : reg_(std::move(r)) {}

  const Registry& registry() const { return reg_; }

  DerivationSession open_session(const std::vector<std::string>& tokens, const ParamSet& params,
                                 std::string id = "") const {
    if (tokens.empty()) throw Error(ErrorCode::EmptySentence, "the sentence is empty");
    Collaborators c = reg_.resolve(params);
    std::vector<SynTree> trees = parse(tokens, *c.grammar, c.parser);
    DerivationSession s;
    s.id = id.empty() ? "session" : std::move(id);
    s.tokens = tokens;
    s.params = params;
    s.tree = std::move(trees.front());
    index_tree(s, s.tree, -1);
    refresh(s);
    return s;
  }

  StepReport apply_step(DerivationSession& s, int node, const StepAction& action) const {
    const NodeState& st = s.node(node);
    if (std::find(st.applicable.begin(), st.applicable.end(), action) == st.applicable.end())
      throw Error(ErrorCode::NotApplicable, to_string(action) + " is not applicable at node " + std::to_string(node));
    StepReport rep{node, action, st.current, std::nullopt, 0};
    size_t before = st.trace.steps.size();
    perform(s, node, action);
    s.log.push_back({node, action});
    refresh(s);
    const NodeState& after = s.node(node);
    rep.after = after.current;
    rep.trace_added = after.trace.steps.size() >= before ? after.trace.steps.size() - before : 0;
    return rep;
  }

  /// Drops the last event and rebuilds the state from the shortened log.
  void undo(DerivationSession& s) const {
    if (s.log.empty()) throw Error(ErrorCode::NotApplicable, "nothing to undo");
    std::vector<Event> log(s.log.begin(), s.log.end() - 1);
    s = replay(s.tokens, s.params, log, s.id);
  }

  DerivationSession replay(const std::vector<std::string>& tokens, const ParamSet& params, const std::vector<Event>& log,
                           std::string id = "") const {
    DerivationSession s = open_session(tokens, params, std::move(id));
    for (const auto& e : log) apply_step(s, e.node, e.action);
    return s;
  }

  /// One independent session per parameter set; a failing set is reported
  /// in its own entry.
  std::vector<CompareEntry> compare_sessions(const std::vector<std::string>& tokens,
                                             const std::vector<ParamSet>& params) const {
    if (tokens.empty()) throw Error(ErrorCode::EmptySentence, "the sentence is empty");
    std::vector<CompareEntry> out;
    for (size_t i = 0; i < params.size(); ++i) {
      CompareEntry e{params[i], std::nullopt, std::nullopt};
      try {
        e.session = open_session(tokens, params[i], "compare-" + std::to_string(i + 1));
      } catch (const Error& err) {
        e.error = err;
      }
      out.push_back(std::move(e));
    }
    return out;
  }

  /// Runs process-fully at the root and returns the final term.
  Term derive(DerivationSession& s) const {
    if (s.node(s.root()).phase != Phase::Final) apply_step(s, s.root(), {StepAction::Kind::ProcessFully, 0});
    return s.node(s.root()).current->body;
  }

  /// All scope readings at the root: children processed fully, root combined
  /// and reduced, then every retrieval order of the root store.
  ReadingSet readings(const DerivationSession& s0) const {
    DerivationSession s = s0;
    int root = s.root();
    const SynTree& r = s.syn(root);
    if (s.node(root).phase == Phase::Bare) {
      for (const auto& c : r.children)
        if (has_action(s, c.id, StepAction::Kind::ProcessFully)) apply_step(s, c.id, {StepAction::Kind::ProcessFully, 0});
      Collaborators col = reg_.resolve(s.params);
      StepAction first{r.is_leaf() ? StepAction::Kind::Annotate : StepAction::Kind::Combine, 0};
      perform(s, root, first);
      NodeState& n = s.nodes[root];
      n.current->body = normalize(n.current->body, col.reducer).term;
      return enumerate_readings(*n.current, col.formalism, col.reducer);
    }
    Collaborators col = reg_.resolve(s.params);
    return enumerate_readings(*s.node(root).current, col.formalism, col.reducer);
  }

 private:
  static void index_tree(DerivationSession& s, const SynTree& t, int parent) {
    s.nodes[t.id] = NodeState{};
    if (parent >= 0) s.parent[t.id] = parent;
    for (const auto& c : t.children) index_tree(s, c, t.id);
  }

  static bool has_action(const DerivationSession& s, int node, StepAction::Kind k) {
    for (const auto& a : s.node(node).applicable)
      if (a.kind == k) return true;
    return false;
  }

  static bool is_t(const Term& t) { return type_of(t) == Type::t(); }

  static bool frozen(const DerivationSession& s, int node) {
    auto p = s.parent.find(node);
    return p != s.parent.end() && s.node(p->second).phase != Phase::Bare;
  }

  /// A node is done when nothing reduces and no store entry waits for a
  /// retrieval at a sentence-level node.
  static bool done(const StoredTerm& st) {
    return is_normal(st.body) && !(is_t(st.body) && !st.store.empty());
  }

  /// Body is the placeholder left by store: lam(P, P(idx)) or lam(P, vP(idx)).
  static bool stored(const StoredTerm& st) {
    const Term& b = st.body;
    if (!b.is(TermKind::Lam) || !b.kid(0).is(TermKind::App)) return false;
    const Term& fn = b.kid(0).kid(0);
    const Term& arg = b.kid(0).kid(1);
    const Term& p = fn.is(TermKind::Down) ? fn.kid(0) : fn;
    return p.is(TermKind::Var) && p.name() == b.name() && arg.is(TermKind::Index);
  }

  bool wants_store(const DerivationSession& s, int node, const StoredTerm& st) const {
    return s.params.storage != StorageMode::None && node != s.root() && is_quantifier_type(type_of(st.body)) &&
           !stored(st);
  }

  static int next_index(const DerivationSession& s) {
    std::vector<const StoredTerm*> all;
    for (const auto& [id, n] : s.nodes)
      if (n.current) all.push_back(&*n.current);
    return next_store_index(all);
  }

  std::vector<StepAction> compute_applicable(const DerivationSession& s, int node) const {
    using K = StepAction::Kind;
    std::vector<StepAction> out;
    if (frozen(s, node)) return out;
    const NodeState& n = s.node(node);
    const SynTree& syn = s.syn(node);
    if (!n.current) {
      if (syn.is_leaf()) {
        out.push_back({K::Annotate, 0});
      } else {
        bool ready = true;
        for (const auto& c : syn.children) ready = ready && s.node(c.id).current.has_value();
        if (ready) out.push_back({K::Combine, 0});
      }
      out.push_back({K::ProcessFully, 0});
      return out;
    }
    const StoredTerm& st = *n.current;
    if (find_beta_redex(st.body)) out.push_back({K::Beta, 0});
    if (find_cancel_redex(st.body)) out.push_back({K::Cancel, 0});
    if (drt::find_merge_redex(st.body)) out.push_back({K::Merge, 0});
    if (s.params.storage != StorageMode::None) {
      if (wants_store(s, node, st)) out.push_back({K::Store, next_index(s)});
      if (is_t(st.body))
        for (int i : top_level_indices(st)) out.push_back({K::Retrieve, i});
    }
    if (n.phase != Phase::Final || wants_store(s, node, st)) out.push_back({K::ProcessFully, 0});
    if (n.phase == Phase::Final && !n.fol && st.store.empty() && st.body.is(TermKind::Drs)) {
      try {
        drs_to_fol(st.body);
        out.push_back({K::TranslateToFol, 0});
      } catch (const Error&) {
      }
    }
    return out;
  }

  void refresh(DerivationSession& s) const {
    for (auto& [id, n] : s.nodes) n.applicable = compute_applicable(s, id);
  }

  void set_term(NodeState& n, StoredTerm st, Phase phase) const {
    n.trace = ReductionTrace{st.body, {}};
    n.current = std::move(st);
    n.phase = phase;
  }

  void reduce_with(NodeState& n, const TraceStep& step) const {
    n.trace.steps.push_back(step);
    n.current->body = step.after;
  }

  void settle(NodeState& n) const {
    if (n.current && done(*n.current)) n.phase = Phase::Final;
  }

  void perform(DerivationSession& s, int node, const StepAction& a) const {
    using K = StepAction::Kind;
    Collaborators col = reg_.resolve(s.params);
    NodeState& n = s.nodes[node];
    const SynTree& syn = s.syn(node);
    switch (a.kind) {
      case K::Annotate: {
        // Referents are renamed apart against the whole sentence, so the
        // leaf meaning is taken from a full annotation pass.
        auto leaves = annotate_leaves(s.tree, col.formalism, *col.macros);
        set_term(n, StoredTerm{leaves.at(node)}, Phase::Annotated);
        return;
      }
      case K::Combine: {
        std::vector<Term> kids;
        std::vector<const StoredTerm*> parts;
        for (const auto& c : syn.children) {
          kids.push_back(s.node(c.id).current->body);
          parts.push_back(&*s.node(c.id).current);
        }
        Term body = combine(syn, kids, *col.mapping, col.mapping_kind, col.formalism);
        set_term(n, StoredTerm{body, concat_stores(parts)}, Phase::Combined);
        return;
      }
      case K::Beta:
      case K::Cancel:
      case K::Merge: {
        Rule rule = a.kind == K::Beta ? Rule::Beta : a.kind == K::Cancel ? Rule::Cancel : Rule::Merge;
        std::optional<Path> p = rule == Rule::Beta     ? find_beta_redex(n.current->body)
                                : rule == Rule::Cancel ? find_cancel_redex(n.current->body)
                                                       : drt::find_merge_redex(n.current->body);
        StepResult r = apply_rule_at(n.current->body, rule, *p, col.reducer);
        reduce_with(n, TraceStep{rule, r.path, r.term, r.renaming});
        settle(n);
        return;
      }
      case K::Store: {
        Phase keep = n.phase;
        set_term(n, store(*n.current, a.index, col.storage), keep);
        settle(n);
        return;
      }
      case K::Retrieve: {
        Phase keep = n.phase == Phase::Final ? Phase::Combined : n.phase;
        set_term(n, retrieve(*n.current, a.index, col.formalism), keep);
        settle(n);
        return;
      }
      case K::ProcessFully:
        process_fully(s, node, col);
        return;
      case K::TranslateToFol:
        n.fol = drs_to_fol(n.current->body);
        return;
    }
  }

  void normalize_node(NodeState& n, const Collaborators& col) const {
    int fuel = kDefaultFuel;
    while (auto step = reduction_step(n.current->body, col.reducer)) {
      if (fuel-- == 0) throw FuelExhausted(n.trace, kDefaultFuel);
      reduce_with(n, *step);
    }
  }

  void process_fully(DerivationSession& s, int node, const Collaborators& col) const {
    const SynTree& syn = s.syn(node);
    if (!s.node(node).current) {
      for (const auto& c : syn.children) {
        refresh_one(s, c.id);
        if (has_action(s, c.id, StepAction::Kind::ProcessFully)) process_fully(s, c.id, col);
      }
      perform(s, node, {syn.is_leaf() ? StepAction::Kind::Annotate : StepAction::Kind::Combine, 0});
    }
    NodeState& n = s.nodes[node];
    normalize_node(n, col);
    if (wants_store(s, node, *n.current)) {
      set_term(n, store(*n.current, next_index(s), col.storage), n.phase);
    }
    if (is_t(n.current->body)) {
      while (!n.current->store.empty()) {
        std::set<int> top = top_level_indices(*n.current);
        set_term(n, retrieve(*n.current, *top.rbegin(), col.formalism), n.phase);
        normalize_node(n, col);
      }
    }
    n.phase = Phase::Final;
  }

  void refresh_one(DerivationSession& s, int node) const { s.nodes[node].applicable = compute_applicable(s, node); }

  Registry reg_;
};

}  // namespace semwb
