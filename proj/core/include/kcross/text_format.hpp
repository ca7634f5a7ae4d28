#pragma once

#include <string>

namespace kcross {

// Shortest round-trip decimal representation; identical output for identical
// bits, so result tables diff cleanly across runs.
std::string format_double(double v);

}  // namespace kcross
