#include "compmodel/render.hpp"

#include <sstream>

namespace compmodel {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string box_label(const Diagram& d, std::size_t b, const Interpretation* interp) {
  const Box& box = d.boxes()[b];
  if (!interp) return box.gen;
  if (auto t = box_term(*interp, d, b)) return *t;
  if (auto a = interp->abs_gen.find(box.gen); a != interp->abs_gen.end()) return a->second;
  return "?";
}

std::string wire_label(const std::string& var, const Interpretation* interp) {
  if (interp)
    if (auto a = interp->abs_var.find(var); a != interp->abs_var.end()) return a->second;
  return var;
}

}  // namespace

std::string render_dot(const Diagram& d, const Interpretation* interp) {
  std::ostringstream out;
  out << "digraph diagram {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n"
      << "  edge [fontname=\"Helvetica\", fontsize=10];\n";
  auto node = [&](const Endpoint& e, bool source) {
    if (e.boundary()) return std::string(source ? "in" : "out") + std::to_string(e.port);
    return "b" + std::to_string(e.box);
  };
  for (std::size_t i = 0; i < d.inputs().size(); ++i)
    out << "  in" << i << " [shape=plaintext, label=" << quote(wire_label(d.inputs()[i], interp)) << "];\n";
  for (std::size_t i = 0; i < d.outputs().size(); ++i)
    out << "  out" << i << " [shape=plaintext, label=" << quote(wire_label(d.outputs()[i], interp)) << "];\n";
  for (std::size_t b = 0; b < d.boxes().size(); ++b) {
    const Box& box = d.boxes()[b];
    out << "  b" << b << " [";
    switch (box.kind) {
      case BoxKind::Gen: out << "shape=box, label=" << quote(box_label(d, b, interp)); break;
      case BoxKind::Copy: out << "shape=point, width=0.08, label=\"\""; break;
      case BoxKind::Discard: out << "shape=plaintext, label=\"⏚\""; break;
      case BoxKind::Swap: out << "shape=plaintext, label=\"×\""; break;
    }
    out << ", tooltip=" << quote(box.id) << "];\n";
  }
  if (!d.inputs().empty()) {
    out << "  { rank=source;";
    for (std::size_t i = 0; i < d.inputs().size(); ++i) out << " in" << i << ";";
    out << " }\n";
  }
  if (!d.outputs().empty()) {
    out << "  { rank=sink;";
    for (std::size_t i = 0; i < d.outputs().size(); ++i) out << " out" << i << ";";
    out << " }\n";
  }
  for (const auto& w : d.wires())
    out << "  " << node(w.from, true) << " -> " << node(w.to, false) << " [label="
        << quote(wire_label(w.var, interp)) << "];\n";
  out << "}\n";
  return out.str();
}

}  // namespace compmodel
