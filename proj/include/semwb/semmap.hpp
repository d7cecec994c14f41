#pragma once

// Lexical macros and syntax-semantics mappings.
//
// Macro file:
//   const laugh : <e,t>.                       optional signature entry
//   type propername for il : <<s,<e,t>>,t>.    expected type of a macro
//   macro propername(A) for il : lam(P, app(down(P), A)).
//   entry anna : propername(anna).
//
// Mapping file:
//   recipe s_np_vp : apply(1,2).               rule-to-rule, keyed by rule id
//   template s -> np vp : apply(1,2).          keyed by category sequence
//   template X -> X/Y Y : apply(1,2).          capitals are category variables
//
// Recipes: id(i), apply(f,a), compose(f,g), merge(l,r). Under IL the
// argument of apply is wrapped in ^ (and composition inserts one ^).

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "formalism.hpp"
#include "grammar.hpp"
#include "parser.hpp"
#include "term.hpp"
#include "term_io.hpp"
#include "term_ops.hpp"

namespace semwb {

struct LexicalMacro {
  std::string name;
  std::vector<std::string> slots;
  Formalism formalism;
  Term body;  // slots occur as constants
  std::optional<Type> declared;
};

struct MacroCall {
  std::string macro;
  std::vector<std::string> args;
};

class MacroSet {
 public:
  std::map<std::pair<std::string, Formalism>, LexicalMacro> macros;
  std::map<std::string, MacroCall> entries;
  std::map<std::pair<std::string, Formalism>, Type> types;
  Signature constants;

  bool supports(Formalism f) const {
    for (const auto& [w, call] : entries)
      if (!macros.count({call.macro, f})) return false;
    return !entries.empty();
  }

  const LexicalMacro& macro_for(const std::string& word, Formalism f) const {
    auto e = entries.find(word);
    if (e == entries.end())
      throw Error(ErrorCode::MissingMacro, "no lexical entry for '" + word + "' (" + to_string(f) + ")");
    auto m = macros.find({e->second.macro, f});
    if (m == macros.end())
      throw Error(ErrorCode::MissingMacro,
                  "macro " + e->second.macro + " for '" + word + "' has no " + to_string(f) + " version");
    return m->second;
  }

  /// Expanded and type-checked meaning of a word.
  Term expand(const std::string& word, Formalism f) const {
    const LexicalMacro& m = macro_for(word, f);
    const MacroCall& call = entries.at(word);
    if (call.args.size() != m.slots.size())
      throw Error(ErrorCode::IllTypedMacro, word + ": macro " + m.name + " takes " + std::to_string(m.slots.size()) +
                                                " arguments, entry gives " + std::to_string(call.args.size()));
    std::map<std::string, std::string> fill;
    for (size_t i = 0; i < m.slots.size(); ++i) fill[m.slots[i]] = call.args[i];
    Term out = fill_slots(m.body, fill, word);
    try {
      Type ty = type_of(out);
      if (m.declared && !(ty == *m.declared))
        throw Error(ErrorCode::IllTypedMacro, word + ": expansion has type " + ty.str() + ", macro " + m.name +
                                                  " declares " + m.declared->str());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IllTypedMacro) throw;
      throw Error(ErrorCode::IllTypedMacro, word + ": " + e.what());
    }
    if (!free_vars(out).empty()) throw Error(ErrorCode::IllTypedMacro, word + ": expansion is not closed");
    return out;
  }

 private:
  Term fill_slots(const Term& t, const std::map<std::string, std::string>& fill, const std::string& word) const {
    if (t.is(TermKind::Const)) {
      auto it = fill.find(t.name());
      if (it == fill.end()) return t;
      auto sig = constants.find(it->second);
      if (sig != constants.end() && !(sig->second == t.type()))
        throw Error(ErrorCode::IllTypedMacro, word + ": constant " + it->second + " declared " + sig->second.str() +
                                                  " but used as " + t.type().str());
      return Term::constant(it->second, t.type());
    }
    if (t.kids().empty()) return t;
    std::vector<Term> kids;
    for (const auto& k : t.kids()) kids.push_back(fill_slots(k, fill, word));
    return t.with_kids(std::move(kids));
  }
};

inline MacroSet parse_macros(std::string_view text) {
  io::Cursor cur(text);
  cur.set_comments(true);
  MacroSet ms;
  auto formalism = [&]() {
    std::string f = cur.ident();
    auto id = parse_formalism(f);
    if (!id) cur.fail("a formalism (il, lgq, ldrt)");
    return *id;
  };
  while (!cur.at_end()) {
    std::string kw = cur.ident();
    if (kw == "const") {
      std::string name = cur.ident();
      cur.expect(':');
      ms.constants[name] = parse_type(cur);
    } else if (kw == "type") {
      std::string name = cur.ident();
      cur.expect_str("for");
      Formalism f = formalism();
      cur.expect(':');
      ms.types[{name, f}] = parse_type(cur);
    } else if (kw == "macro") {
      LexicalMacro m;
      m.name = cur.ident();
      if (cur.accept('(') && !cur.accept(')')) {
        do m.slots.push_back(cur.ident());
        while (cur.accept(','));
        cur.expect(')');
      }
      cur.expect_str("for");
      m.formalism = formalism();
      cur.expect(':');
      auto declared = ms.types.find({m.name, m.formalism});
      if (declared != ms.types.end()) m.declared = declared->second;
      m.body = parse_term(cur, nullptr, m.declared);
      if (ms.macros.count({m.name, m.formalism}))
        throw Error(ErrorCode::SyntaxError, "duplicate macro " + m.name + " for " + to_string(m.formalism));
      ms.macros[{m.name, m.formalism}] = std::move(m);
    } else if (kw == "entry") {
      std::string word = cur.word();
      cur.expect(':');
      MacroCall call;
      call.macro = cur.ident();
      if (cur.accept('(') && !cur.accept(')')) {
        do call.args.push_back(cur.ident());
        while (cur.accept(','));
        cur.expect(')');
      }
      ms.entries[word] = std::move(call);
    } else {
      throw Error(ErrorCode::SyntaxError, "line " + cur.where() + ": unknown statement '" + kw + "'");
    }
    cur.expect('.');
  }
  return ms;
}

inline std::string to_string(const MacroSet& ms) {
  std::ostringstream os;
  for (const auto& [name, ty] : ms.constants) os << "const " << name << " : " << ty.str() << ".\n";
  for (const auto& [key, ty] : ms.types) os << "type " << key.first << " for " << to_string(key.second) << " : " << ty.str() << ".\n";
  for (const auto& [key, m] : ms.macros) {
    os << "macro " << m.name;
    if (!m.slots.empty()) {
      os << "(";
      for (size_t i = 0; i < m.slots.size(); ++i) os << (i ? "," : "") << m.slots[i];
      os << ")";
    }
    os << " for " << to_string(m.formalism) << " : " << to_string(m.body) << ".\n";
  }
  for (const auto& [w, call] : ms.entries) {
    os << "entry " << w << " : " << call.macro;
    if (!call.args.empty()) {
      os << "(";
      for (size_t i = 0; i < call.args.size(); ++i) os << (i ? "," : "") << call.args[i];
      os << ")";
    }
    os << ".\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Leaf annotation

/// Meanings for every leaf of the tree, keyed by node id. DRS referents are
/// renamed apart across leaves so that later merges rarely need renaming.
inline std::map<int, Term> annotate_leaves(const SynTree& tree, Formalism f, const MacroSet& ms) {
  std::map<int, Term> out;
  NameSet used;
  std::function<void(const SynTree&)> go = [&](const SynTree& n) {
    if (!n.is_leaf()) {
      for (const auto& c : n.children) go(c);
      return;
    }
    Term t = ms.expand(n.word, f);
    NameSet referents;
    std::function<void(const Term&)> collect = [&](const Term& u) {
      if (u.is(TermKind::Drs))
        for (const auto& v : u.universe()) referents.insert(v.name);
      for (const auto& k : u.kids()) collect(k);
    };
    collect(t);
    NameSet local = var_names(t);
    out[n.id] = rename_binders(t, [&](const std::string& old, const NameMap&) {
      if (!referents.count(old)) return old;
      if (used.insert(old).second) return old;
      NameSet avoid = used;
      avoid.insert(local.begin(), local.end());
      std::string nn = fresh_name(name_stem(old), avoid);
      used.insert(nn);
      return nn;
    });
  };
  go(tree);
  return out;
}

// ---------------------------------------------------------------------------
// Recipes and mappings

struct Recipe {
  enum class Op { Id, Apply, Compose, Merge };
  Op op = Op::Id;
  int a = 1, b = 0;  // 1-based daughter positions
};

inline std::string to_string(const Recipe& r) {
  switch (r.op) {
    case Recipe::Op::Id: return "id(" + std::to_string(r.a) + ")";
    case Recipe::Op::Apply: return "apply(" + std::to_string(r.a) + "," + std::to_string(r.b) + ")";
    case Recipe::Op::Compose: return "compose(" + std::to_string(r.a) + "," + std::to_string(r.b) + ")";
    case Recipe::Op::Merge: return "merge(" + std::to_string(r.a) + "," + std::to_string(r.b) + ")";
  }
  return "?";
}

enum class MappingKind { RuleToRule, Template };

inline const char* to_string(MappingKind m) { return m == MappingKind::RuleToRule ? "rule-to-rule" : "template"; }

/// Category pattern: basic names (capitalised = variable) and slashes.
struct CatPattern {
  std::string name;  // basic name, or "/" "\\" for slashes
  std::vector<CatPattern> kids;

  bool is_variable() const { return kids.empty() && !name.empty() && std::isupper(static_cast<unsigned char>(name[0])); }
};

namespace semmap_detail {

inline CatPattern parse_pattern(io::Cursor& cur);

inline CatPattern parse_pattern_atom(io::Cursor& cur) {
  if (cur.accept('(')) {
    CatPattern p = parse_pattern(cur);
    cur.expect(')');
    return p;
  }
  return CatPattern{cur.ident(), {}};
}

inline CatPattern parse_pattern(io::Cursor& cur) {
  CatPattern left = parse_pattern_atom(cur);
  while (cur.peek() == '/' || cur.peek() == '\\') {
    char c = cur.peek();
    cur.accept(c);
    CatPattern right = parse_pattern_atom(cur);
    left = CatPattern{std::string(1, c), {left, right}};
  }
  return left;
}

inline std::string print_pattern(const CatPattern& p, bool nested = false) {
  if (p.kids.empty()) return p.name;
  std::string s = print_pattern(p.kids[0], true) + p.name + print_pattern(p.kids[1], true);
  return nested ? "(" + s + ")" : s;
}

/// Pattern view of a category structure (features dropped).
inline CatPattern of_category(const FeatureStructure& fs) {
  std::string c = category_name(fs);
  if (c == "fwd" || c == "bwd")
    return CatPattern{c == "fwd" ? "/" : "\\", {of_category(*fs.get("res")), of_category(*fs.get("arg"))}};
  return CatPattern{c, {}};
}

inline bool same(const CatPattern& a, const CatPattern& b) {
  if (a.name != b.name || a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!same(a.kids[i], b.kids[i])) return false;
  return true;
}

inline bool match(const CatPattern& p, const CatPattern& c, std::map<std::string, CatPattern>& env) {
  if (p.is_variable()) {
    auto it = env.find(p.name);
    if (it == env.end()) {
      env.emplace(p.name, c);
      return true;
    }
    return same(it->second, c);
  }
  if (p.name != c.name || p.kids.size() != c.kids.size()) return false;
  for (size_t i = 0; i < p.kids.size(); ++i)
    if (!match(p.kids[i], c.kids[i], env)) return false;
  return true;
}

inline Recipe parse_recipe(io::Cursor& cur) {
  std::string op = cur.ident();
  Recipe r;
  cur.expect('(');
  r.a = cur.number();
  if (op == "id") {
    r.op = Recipe::Op::Id;
  } else {
    if (op == "apply") r.op = Recipe::Op::Apply;
    else if (op == "compose") r.op = Recipe::Op::Compose;
    else if (op == "merge") r.op = Recipe::Op::Merge;
    else cur.fail("id, apply, compose or merge");
    cur.expect(',');
    r.b = cur.number();
  }
  cur.expect(')');
  return r;
}

}  // namespace semmap_detail

struct Template {
  CatPattern mother;
  std::vector<CatPattern> daughters;
  Recipe recipe;

  std::string str() const {
    std::string s = semmap_detail::print_pattern(mother) + " ->";
    for (const auto& d : daughters) s += " " + semmap_detail::print_pattern(d);
    return s;
  }
};

class Mapping {
 public:
  std::map<std::string, Recipe> rules;
  std::vector<Template> templates;

  const Recipe& rule_recipe(const std::string& rule_id) const {
    auto it = rules.find(rule_id);
    if (it == rules.end()) throw Error(ErrorCode::NoRecipe, "no recipe for rule " + rule_id);
    return it->second;
  }

  const Recipe& template_recipe(const SynTree& node) const {
    CatPattern mother = semmap_detail::of_category(node.fs);
    std::vector<CatPattern> ds;
    for (const auto& c : node.children) ds.push_back(semmap_detail::of_category(c.fs));
    const Template* hit = nullptr;
    for (const auto& t : templates) {
      if (t.daughters.size() != ds.size()) continue;
      std::map<std::string, CatPattern> env;
      bool ok = semmap_detail::match(t.mother, mother, env);
      for (size_t i = 0; ok && i < ds.size(); ++i) ok = semmap_detail::match(t.daughters[i], ds[i], env);
      if (!ok) continue;
      if (hit) throw Error(ErrorCode::AmbiguousRecipe, "templates '" + hit->str() + "' and '" + t.str() + "' both match");
      hit = &t;
    }
    if (!hit) throw Error(ErrorCode::NoRecipe, "no template matches the node " + shape(mother, ds));
    return hit->recipe;
  }

  const Recipe& recipe_for(const SynTree& node, MappingKind kind) const {
    return kind == MappingKind::RuleToRule ? rule_recipe(node.rule) : template_recipe(node);
  }

 private:
  static std::string shape(const CatPattern& m, const std::vector<CatPattern>& ds) {
    std::string s = semmap_detail::print_pattern(m) + " ->";
    for (const auto& d : ds) s += " " + semmap_detail::print_pattern(d);
    return s;
  }
};

inline Mapping parse_mapping(std::string_view text) {
  io::Cursor cur(text);
  cur.set_comments(true);
  Mapping m;
  while (!cur.at_end()) {
    std::string kw = cur.ident();
    if (kw == "recipe") {
      std::string id = cur.ident();
      cur.expect(':');
      m.rules[id] = semmap_detail::parse_recipe(cur);
    } else if (kw == "template") {
      Template t;
      t.mother = semmap_detail::parse_pattern(cur);
      cur.expect_str("->");
      while (cur.peek() != ':') t.daughters.push_back(semmap_detail::parse_pattern(cur));
      cur.expect(':');
      t.recipe = semmap_detail::parse_recipe(cur);
      m.templates.push_back(std::move(t));
    } else {
      throw Error(ErrorCode::SyntaxError, "line " + cur.where() + ": unknown statement '" + kw + "'");
    }
    cur.expect('.');
  }
  return m;
}

inline std::string to_string(const Mapping& m) {
  std::ostringstream os;
  for (const auto& [id, r] : m.rules) os << "recipe " << id << " : " << to_string(r) << ".\n";
  for (const auto& t : m.templates) os << "template " << t.str() << " : " << to_string(t.recipe) << ".\n";
  return os.str();
}

/// Builds the unreduced combination of the daughters' meanings.
inline Term apply_recipe(const Recipe& r, const std::vector<Term>& kids, Formalism f) {
  auto pick = [&](int i) -> const Term& {
    if (i < 1 || static_cast<size_t>(i) > kids.size())
      throw Error(ErrorCode::NoRecipe, "recipe " + to_string(r) + " refers to a missing daughter");
    return kids[static_cast<size_t>(i - 1)];
  };
  auto wrap = [&](const Term& t) { return is_intensional(f) ? Term::up(t) : t; };
  switch (r.op) {
    case Recipe::Op::Id: return pick(r.a);
    case Recipe::Op::Apply: return Term::app(pick(r.a), wrap(pick(r.b)));
    case Recipe::Op::Merge: return Term::merge(pick(r.a), pick(r.b));
    case Recipe::Op::Compose: {
      const Term& fn = pick(r.a);
      const Term& g = pick(r.b);
      Type gt = type_of(g);
      if (!gt.is_function()) throw Error(ErrorCode::TypeMismatch, "composition with a non-function " + to_string(g));
      NameSet avoid = var_names(fn);
      for (const auto& n : var_names(g)) avoid.insert(n);
      Var z{fresh_name("z", avoid), gt.domain()};
      return Term::lam(z, Term::app(fn, wrap(Term::app(g, Term::var(z)))));
    }
  }
  throw Error(ErrorCode::NoRecipe, "unknown recipe");
}

/// combine() for a node whose children already carry meanings.
inline Term combine(const SynTree& node, const std::vector<Term>& kids, const Mapping& m, MappingKind kind,
                    Formalism f) {
  if (kids.size() != node.children.size())
    throw Error(ErrorCode::NotApplicable, "children of node " + std::to_string(node.id) + " are not all annotated");
  return apply_recipe(m.recipe_for(node, kind), kids, f);
}

}  // namespace semwb
