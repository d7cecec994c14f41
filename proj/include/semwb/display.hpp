#pragma once

// Description strings for the workbench's structures.

#include <set>
#include <sstream>
#include <string>

#include "drt.hpp"
#include "engine.hpp"
#include "grapher.hpp"
#include "parser.hpp"
#include "reducer.hpp"
#include "storage.hpp"
#include "term_io.hpp"

namespace semwb {

struct DisplayOptions {
  bool stack_reductions = false;
  std::set<int> box_nodes;
  bool show_terms = true;

  /// Reads `stack-reductions=true` and `box-nodes=0,3` style entries.
  static DisplayOptions from(const std::map<std::string, std::string>& display) {
    DisplayOptions o;
    auto it = display.find("stack-reductions");
    if (it != display.end()) o.stack_reductions = it->second == "true" || it->second == "1";
    it = display.find("box-nodes");
    if (it != display.end()) {
      std::istringstream is(it->second);
      std::string item;
      while (std::getline(is, item, ','))
        if (!item.empty()) o.box_nodes.insert(std::stoi(item));
    }
    it = display.find("show-terms");
    if (it != display.end()) o.show_terms = !(it->second == "false" || it->second == "0");
    return o;
  }
};

inline DescNode term_to_desc(const Term& t);

namespace display_detail {

/// Conditions built from DRSs draw their boxes; anything else is text.
inline DescNode condition(const Term& c) {
  auto kind = drt::classify(c);
  if (kind) {
    if (auto* n = std::get_if<drt::NotCond>(&*kind))
      return DescNode::make("hbox", {DescNode::text("not"), term_to_desc(n->drs)});
    if (auto* i = std::get_if<drt::ImpliesCond>(&*kind))
      return DescNode::make("hbox", {term_to_desc(i->antecedent), DescNode::text("=>"), term_to_desc(i->consequent)});
    if (auto* o = std::get_if<drt::OrCond>(&*kind))
      return DescNode::make("hbox", {term_to_desc(o->left), DescNode::text("or"), term_to_desc(o->right)});
  }
  return DescNode::text(pretty(c));
}

inline DescNode drs_box(const Term& d) {
  std::string u;
  for (const auto& v : d.universe()) u += (u.empty() ? "" : " ") + v.name;
  std::vector<DescNode> parts{DescNode::text(u)};
  for (const auto& c : d.kids()) parts.push_back(condition(c));
  return DescNode::make("drs", std::move(parts));
}

}  // namespace display_detail

/// DRSs become drs boxes (conditions drawn recursively), merges of boxes an
/// hbox with the merge sign, everything else one line of text.
inline DescNode term_to_desc(const Term& t) {
  if (t.is(TermKind::Drs)) return display_detail::drs_box(t);
  if (t.is(TermKind::Merge) && !contains_kind(t, TermKind::Lam) && !contains_kind(t, TermKind::App))
    return DescNode::make("hbox", {term_to_desc(t.kid(0)), DescNode::text("⊗"), term_to_desc(t.kid(1))});
  return DescNode::text(pretty(t));
}

/// Body with the store stacked underneath in a frame.
inline DescNode term_to_desc(const StoredTerm& st) {
  if (st.store.empty()) return term_to_desc(st.body);
  std::vector<DescNode> rows{DescNode::text("store")};
  for (const auto& e : st.store)
    rows.push_back(DescNode::make("hbox", {DescNode::text(std::to_string(e.index) + ":"), term_to_desc(e.quantifier)}));
  return DescNode::make("vbox", {term_to_desc(st.body), DescNode::make("frame", {DescNode::make("vbox", std::move(rows))})});
}

/// Successive terms of a trace stacked top to bottom (n steps, n+1 rows).
inline DescNode term_to_desc(const ReductionTrace& tr) {
  std::vector<DescNode> rows{term_to_desc(tr.initial)};
  for (const auto& s : tr.steps) rows.push_back(term_to_desc(s.after));
  return DescNode::make("vbox", std::move(rows));
}

inline std::string node_label(const SynTree& n) {
  std::string label;
  for (char c : n.category) label += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (n.is_leaf()) label += ": " + n.word;
  return label;
}

/// Tree of labels; leaves show their word.
inline DescNode term_to_desc(const SynTree& t, const DisplayOptions& opt = {}) {
  DescNode label = DescNode::text(node_label(t));
  if (opt.box_nodes.count(t.id)) label = DescNode::make("frame", {label});
  if (t.is_leaf() && t.id != 0) return label;
  std::vector<DescNode> parts{label};
  for (const auto& c : t.children) parts.push_back(term_to_desc(c, opt));
  return DescNode::make("tree", std::move(parts));
}

inline std::string node_action(int id) { return "node/" + std::to_string(id); }

/// The session's tree with each node's current semantics under its label.
/// Every node is an active region named node/<id>.
inline DescNode session_to_desc(const DerivationSession& s, const DisplayOptions& opt) {
  std::function<DescNode(const SynTree&)> go = [&](const SynTree& t) {
    const NodeState& st = s.node(t.id);
    DescNode content = DescNode::text(node_label(t));
    if (opt.show_terms && st.current) {
      DescNode sem = opt.stack_reductions && !st.trace.steps.empty() ? term_to_desc(st.trace) : term_to_desc(*st.current);
      if (opt.stack_reductions && !st.trace.steps.empty() && !st.current->store.empty())
        sem = DescNode::make("vbox", {sem, term_to_desc(StoredTerm{Term::verum(), st.current->store}).args[1].node()});
      content = DescNode::make("vbox", {content, sem});
      if (st.fol) content.args.emplace_back(DescNode::text("FOL: " + pretty(*st.fol)));
    }
    if (opt.box_nodes.count(t.id)) content = DescNode::make("frame", {content});
    DescNode mother = DescNode::active(node_action(t.id), content);
    if (t.is_leaf()) return t.id == s.root() ? DescNode::make("tree", {mother}) : mother;
    std::vector<DescNode> parts{mother};
    for (const auto& c : t.children) parts.push_back(go(c));
    return DescNode::make("tree", std::move(parts));
  };
  return go(s.tree);
}

inline DescNode session_to_desc(const DerivationSession& s) {
  return session_to_desc(s, DisplayOptions::from(s.params.display));
}

}  // namespace semwb
