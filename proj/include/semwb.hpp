#pragma once

// Umbrella header. The JSON API layer (semwb/api.hpp) is left out because it
// pulls in the vendored nlohmann json.

#include "semwb/term.hpp"
#include "semwb/term_io.hpp"
#include "semwb/term_ops.hpp"
#include "semwb/reducer.hpp"
#include "semwb/drt.hpp"
#include "semwb/storage.hpp"
#include "semwb/translate.hpp"
#include "semwb/features.hpp"
#include "semwb/grammar.hpp"
#include "semwb/parser.hpp"
#include "semwb/semmap.hpp"
#include "semwb/params.hpp"
#include "semwb/engine.hpp"
#include "semwb/grapher.hpp"
#include "semwb/display.hpp"
#include "semwb/bundled.hpp"
