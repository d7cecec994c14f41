#pragma once

// Parameter sets and the registry that maps parameter values to concrete
// modules. Only the engine looks at a ParamSet; everything below it gets the
// collaborators resolved here.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "formalism.hpp"
#include "grammar.hpp"
#include "parser.hpp"
#include "reducer.hpp"
#include "semmap.hpp"
#include "storage.hpp"

namespace semwb {

struct ParamSet {
  Formalism formalism = Formalism::IL;
  ReducerKind reducer = ReducerKind::Substitution;
  StorageMode storage = StorageMode::None;
  std::string grammar = "simple-psg";
  ParserKind parser = ParserKind::Chart;
  MappingKind mapping = MappingKind::RuleToRule;
  std::map<std::string, std::string> display;

  /// Core dimensions as name -> value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> core() const {
    return {{"formalism", to_string(formalism)}, {"reducer", to_string(reducer)}, {"storage", to_string(storage)},
            {"grammar", grammar},                {"parser", to_string(parser)},   {"mapping", to_string(mapping)}};
  }

  friend bool operator==(const ParamSet& a, const ParamSet& b) {
    return a.core() == b.core() && a.display == b.display;
  }
};

inline const std::vector<std::string>& param_dimensions() {
  static const std::vector<std::string> dims{"formalism", "reducer", "storage", "grammar", "parser", "mapping"};
  return dims;
}

/// "formalism=il reducer=substitution ..." (display options appended).
inline std::string to_string(const ParamSet& p) {
  std::string s;
  for (const auto& [k, v] : p.core()) s += (s.empty() ? "" : " ") + k + "=" + v;
  for (const auto& [k, v] : p.display) s += " " + k + "=" + v;
  return s;
}

/// Sets one dimension from its textual value; unknown names go to display.
inline void set_param(ParamSet& p, const std::string& key, const std::string& value) {
  auto bad = [&]() { throw Error(ErrorCode::InvalidParams, "unknown value '" + value + "' for " + key); };
  if (key == "formalism") {
    auto f = parse_formalism(value);
    if (!f) bad();
    p.formalism = *f;
  } else if (key == "reducer") {
    if (value == "substitution") p.reducer = ReducerKind::Substitution;
    else if (value == "metavariable") p.reducer = ReducerKind::Metavariable;
    else bad();
  } else if (key == "storage") {
    if (value == "none") p.storage = StorageMode::None;
    else if (value == "cooper") p.storage = StorageMode::Cooper;
    else if (value == "nested-cooper" || value == "nested") p.storage = StorageMode::Nested;
    else bad();
  } else if (key == "grammar") {
    p.grammar = value;
  } else if (key == "parser") {
    if (value == "chart") p.parser = ParserKind::Chart;
    else if (value == "incremental") p.parser = ParserKind::Incremental;
    else bad();
  } else if (key == "mapping") {
    if (value == "rule-to-rule") p.mapping = MappingKind::RuleToRule;
    else if (value == "template") p.mapping = MappingKind::Template;
    else bad();
  } else {
    p.display[key] = value;
  }
}

inline ParamSet parse_params(std::string_view text) {
  ParamSet p;
  std::istringstream is{std::string(text)};
  std::string item;
  while (is >> item) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidParams, "expected key=value, got '" + item + "'");
    set_param(p, item.substr(0, eq), item.substr(eq + 1));
  }
  return p;
}

/// Lines of the form `allow parser=incremental grammar=cg`.
struct CompatTable {
  std::vector<std::map<std::string, std::string>> allows;

  bool allowed(const ParamSet& p) const {
    auto core = p.core();
    std::map<std::string, std::string> values(core.begin(), core.end());
    for (const auto& line : allows) {
      bool ok = true;
      for (const auto& [k, v] : line) ok = ok && values[k] == v;
      if (ok) return true;
    }
    return false;
  }
};

inline CompatTable parse_compat(std::string_view text) {
  CompatTable t;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto pct = line.find('%');
    if (pct != std::string::npos) line.erase(pct);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw != "allow") throw Error(ErrorCode::SyntaxError, "line " + std::to_string(lineno) + ": expected 'allow'");
    std::map<std::string, std::string> entry;
    std::string item;
    while (ls >> item) {
      auto eq = item.find('=');
      std::string key = item.substr(0, eq);
      bool known = false;
      for (const auto& d : param_dimensions()) known = known || d == key;
      if (eq == std::string::npos || !known)
        throw Error(ErrorCode::SyntaxError, "line " + std::to_string(lineno) + ": bad constraint '" + item + "'");
      entry[key] = item.substr(eq + 1);
    }
    t.allows.push_back(std::move(entry));
  }
  return t;
}

inline std::string to_string(const CompatTable& t) {
  std::string s;
  for (const auto& line : t.allows) {
    s += "allow";
    for (const auto& [k, v] : line) s += " " + k + "=" + v;
    s += "\n";
  }
  return s;
}

/// What a session runs with once its parameters are resolved.
struct Collaborators {
  const Grammar* grammar;
  ParserKind parser;
  Formalism formalism;
  const MacroSet* macros;
  const Mapping* mapping;
  MappingKind mapping_kind;
  ReducerKind reducer;
  StorageMode storage;
};

class Registry {
 public:
  std::vector<Formalism> formalisms{Formalism::IL, Formalism::LGQ, Formalism::LDRT};
  std::vector<ReducerKind> reducers{ReducerKind::Substitution, ReducerKind::Metavariable};
  std::vector<StorageMode> storages{StorageMode::None, StorageMode::Cooper, StorageMode::Nested};
  std::vector<ParserKind> parsers{ParserKind::Chart, ParserKind::Incremental};
  std::vector<MappingKind> mappings{MappingKind::RuleToRule, MappingKind::Template};
  std::vector<Grammar> grammars;
  MacroSet macros;
  Mapping mapping;
  CompatTable compat;

  const Grammar* find_grammar(const std::string& id) const {
    for (const auto& g : grammars)
      if (g.name == id) return &g;
    return nullptr;
  }

  /// Throws InvalidParams with the reason when p cannot run.
  void validate(const ParamSet& p) const {
    auto has = [](const auto& list, const auto& v) { return std::find(list.begin(), list.end(), v) != list.end(); };
    if (!has(formalisms, p.formalism)) throw Error(ErrorCode::InvalidParams, std::string("formalism ") + to_string(p.formalism) + " is not registered");
    if (!macros.supports(p.formalism))
      throw Error(ErrorCode::InvalidParams, std::string("the lexicon has no macros for ") + to_string(p.formalism));
    if (!has(reducers, p.reducer)) throw Error(ErrorCode::InvalidParams, std::string("reducer ") + to_string(p.reducer) + " is not registered");
    if (!has(storages, p.storage)) throw Error(ErrorCode::InvalidParams, std::string("storage ") + to_string(p.storage) + " is not registered");
    if (!has(parsers, p.parser)) throw Error(ErrorCode::InvalidParams, std::string("parser ") + to_string(p.parser) + " is not registered");
    if (!has(mappings, p.mapping)) throw Error(ErrorCode::InvalidParams, std::string("mapping ") + to_string(p.mapping) + " is not registered");
    if (!find_grammar(p.grammar)) throw Error(ErrorCode::InvalidParams, "unknown grammar " + p.grammar);
    if (!compat.allowed(p))
      throw Error(ErrorCode::InvalidParams, std::string("parser ") + to_string(p.parser) + " cannot be combined with grammar " +
                                                p.grammar + " (see the compatibility table)");
  }

  bool valid(const ParamSet& p) const {
    try {
      validate(p);
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  Collaborators resolve(const ParamSet& p) const {
    validate(p);
    return {find_grammar(p.grammar), p.parser, p.formalism, &macros, &mapping, p.mapping, p.reducer, p.storage};
  }

  /// Product of all registered values filtered by validity. Order: formalism,
  /// reducer, storage, grammar, parser, mapping (last varies fastest).
  std::vector<ParamSet> enumerate_valid() const {
    std::vector<ParamSet> out;
    for (auto f : formalisms)
      for (auto r : reducers)
        for (auto s : storages)
          for (const auto& g : grammars)
            for (auto pa : parsers)
              for (auto m : mappings) {
                ParamSet p;
                p.formalism = f;
                p.reducer = r;
                p.storage = s;
                p.grammar = g.name;
                p.parser = pa;
                p.mapping = m;
                if (valid(p)) out.push_back(p);
              }
    return out;
  }
};

}  // namespace semwb
