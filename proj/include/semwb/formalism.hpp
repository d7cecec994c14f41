#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace semwb {

/// Semantic formalisms with bundled macro sets.
enum class Formalism { IL, LGQ, LDRT };

inline const char* to_string(Formalism f) {
  switch (f) {
    case Formalism::IL: return "il";
    case Formalism::LGQ: return "lgq";
    case Formalism::LDRT: return "ldrt";
  }
  return "?";
}

inline std::optional<Formalism> parse_formalism(std::string_view s) {
  if (s == "il" || s == "IL") return Formalism::IL;
  if (s == "lgq" || s == "LGQ") return Formalism::LGQ;
  if (s == "ldrt" || s == "LDRT") return Formalism::LDRT;
  return std::nullopt;
}

inline bool is_intensional(Formalism f) { return f == Formalism::IL; }

}  // namespace semwb
