#pragma once

// The bundled fragment: three grammars, macros for every formalism, the
// syntax-semantics mapping and the compatibility table.

#include "semwb/bundled_data.hpp"
#include "engine.hpp"
#include "params.hpp"

namespace semwb {

inline Registry bundled_registry() {
  namespace d = bundled_data;
  Registry r;
  r.grammars.push_back(parse_grammar(d::simple_psg, "simple-psg"));
  r.grammars.push_back(parse_grammar(d::feature_psg, "feature-psg"));
  r.grammars.push_back(parse_grammar(d::cg, "cg"));
  r.macros = parse_macros(d::macros);
  r.mapping = parse_mapping(d::mapping);
  r.compat = parse_compat(d::compat);
  return r;
}

/// Shared engine over the bundled registry (built once).
inline const Engine& bundled_engine() {
  static const Engine e(bundled_registry());
  return e;
}

}  // namespace semwb
