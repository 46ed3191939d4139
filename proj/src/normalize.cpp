#include "compmodel/diagram.hpp"
#include "compmodel/graph_edit.hpp"

namespace compmodel {

namespace {

constexpr std::size_t npos = GraphEdit::npos;

// A Swap box is a labelled crossing; in a port graph the crossing is free.
bool eliminate_swap(GraphEdit& g, std::size_t s) {
  std::size_t in0 = g.wire_into(Endpoint{s, 0});
  std::size_t in1 = g.wire_into(Endpoint{s, 1});
  std::size_t out0 = g.wire_from(Endpoint{s, 0});
  std::size_t out1 = g.wire_from(Endpoint{s, 1});
  Wire a = g.wires[in0], b = g.wires[in1], c = g.wires[out0], d = g.wires[out1];
  for (auto w : {in0, in1, out0, out1}) g.kill_wire(w);
  g.kill_box(s);
  g.add_wire(b.from, c.to, b.var);
  g.add_wire(a.from, d.to, a.var);
  return true;
}

// Copy fed by another copy: merge into one wider copy.
bool fuse_copy(GraphEdit& g, std::size_t c) {
  std::size_t win = g.wire_into(Endpoint{c, 0});
  const Endpoint src = g.wires[win].from;
  if (src.boundary() || !g.box_alive[src.box] || g.boxes[src.box].kind != BoxKind::Copy)
    return false;
  const std::size_t p = src.box;
  const std::size_t base = g.boxes[p].fanout;
  const std::size_t n = g.boxes[c].fanout;
  g.kill_wire(win);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t w = g.wire_from(Endpoint{c, j});
    Endpoint to = g.wires[w].to;
    g.kill_wire(w);
    g.add_wire(j == 0 ? src : Endpoint{p, base + j - 1}, to, g.boxes[c].var);
  }
  g.boxes[p].fanout = base + n - 1;
  g.kill_box(c);
  return true;
}

// Remove copy branches that are immediately discarded.
bool prune_copy(GraphEdit& g, std::size_t c) {
  Box& box = g.boxes[c];
  for (std::size_t j = 0; j < box.fanout; ++j) {
    std::size_t w = g.wire_from(Endpoint{c, j});
    const Endpoint to = g.wires[w].to;
    if (to.boundary() || g.boxes[to.box].kind != BoxKind::Discard) continue;
    g.kill_wire(w);
    g.kill_box(to.box);
    for (std::size_t k = j + 1; k < box.fanout; ++k) {
      std::size_t wk = g.wire_from(Endpoint{c, k});
      g.wires[wk].from.port = k - 1;
    }
    box.fanout -= 1;
    if (box.fanout == 1) {
      std::size_t win = g.wire_into(Endpoint{c, 0});
      std::size_t wout = g.wire_from(Endpoint{c, 0});
      Wire in = g.wires[win], out = g.wires[wout];
      g.kill_wire(win);
      g.kill_wire(wout);
      g.kill_box(c);
      g.add_wire(in.from, out.to, in.var);
    }
    return true;
  }
  return false;
}

// Copy of a sharp state equals independent copies of the state.
bool split_sharp_copy(GraphEdit& g, std::size_t c) {
  std::size_t win = g.wire_into(Endpoint{c, 0});
  const Endpoint src = g.wires[win].from;
  if (src.boundary()) return false;
  const Box& s = g.boxes[src.box];
  if (s.kind != BoxKind::Gen) return false;
  const Generator& gen = g.sig().generator(s.gen);
  if (!gen.sharp || !gen.dom.empty() || gen.cod.size() != 1) return false;
  const Box state = s;
  g.kill_wire(win);
  g.kill_box(src.box);
  for (std::size_t j = 0; j < g.boxes[c].fanout; ++j) {
    std::size_t w = g.wire_from(Endpoint{c, j});
    Endpoint to = g.wires[w].to;
    g.kill_wire(w);
    Box clone = state;
    clone.id = j == 0 ? state.id : g.fresh_id(state.id);
    std::size_t b = g.add_box(clone);
    g.add_wire(Endpoint{b, 0}, to, gen.cod[0]);
  }
  g.kill_box(c);
  return true;
}

// Discarding every output of a channel equals discarding its inputs.
bool discard_channel(GraphEdit& g, std::size_t b) {
  const Box& box = g.boxes[b];
  const Generator& gen = g.sig().generator(box.gen);
  if (!gen.channel) return false;
  std::vector<std::size_t> out_wires;
  for (std::size_t j = 0; j < gen.cod.size(); ++j) {
    std::size_t w = g.wire_from(Endpoint{b, j});
    const Endpoint to = g.wires[w].to;
    if (to.boundary() || g.boxes[to.box].kind != BoxKind::Discard) return false;
    out_wires.push_back(w);
  }
  // A channel scalar is the unit.
  if (gen.cod.empty() && gen.dom.empty()) {
    g.kill_box(b);
    return true;
  }
  for (auto w : out_wires) {
    g.kill_box(g.wires[w].to.box);
    g.kill_wire(w);
  }
  for (std::size_t i = 0; i < gen.dom.size(); ++i) {
    std::size_t w = g.wire_into(Endpoint{b, i});
    Endpoint from = g.wires[w].from;
    g.kill_wire(w);
    g.discard_at(from, gen.dom[i]);
  }
  g.kill_box(b);
  return true;
}

bool step(GraphEdit& g) {
  for (std::size_t b = 0; b < g.boxes.size(); ++b) {
    if (!g.box_alive[b]) continue;
    switch (g.boxes[b].kind) {
      case BoxKind::Swap:
        return eliminate_swap(g, b);
      case BoxKind::Copy:
        if (fuse_copy(g, b) || prune_copy(g, b) || split_sharp_copy(g, b)) return true;
        break;
      case BoxKind::Gen:
        if (discard_channel(g, b)) return true;
        break;
      case BoxKind::Discard:
        break;
    }
  }
  return false;
}

}  // namespace

Diagram normalize(const Diagram& d) {
  require_valid(d);
  GraphEdit g(d);
  while (step(g)) {
  }
  return g.finish();
}

}  // namespace compmodel
