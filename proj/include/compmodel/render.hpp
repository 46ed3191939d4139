#pragma once

#include <string>

#include "compmodel/interpretation.hpp"

namespace compmodel {

// Graphviz digraph read from bottom to top. Without an interpretation boxes
// show generator names; with one they show the human term, or "?" when the
// box has none. Output is a pure function of its arguments.
std::string render_dot(const Diagram& d, const Interpretation* interp = nullptr);

}  // namespace compmodel
