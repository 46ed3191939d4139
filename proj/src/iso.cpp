#include <algorithm>
#include <deque>
#include <functional>

#include "compmodel/diagram.hpp"

namespace compmodel {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

bool same_label(const Box& a, const Box& b) {
  return a.kind == b.kind && a.gen == b.gen && a.var == b.var && a.var2 == b.var2 &&
         a.fanout == b.fanout;
}

struct IsoContext {
  const Diagram& d1;
  const Diagram& d2;
  Wiring w1;
  Wiring w2;

  Endpoint source1(std::size_t b, std::size_t p) const { return d1.wires()[w1.in[b][p]].from; }
  Endpoint source2(std::size_t b, std::size_t p) const { return d2.wires()[w2.in[b][p]].from; }
  Endpoint target1(std::size_t b, std::size_t p) const { return d1.wires()[w1.out[b][p]].to; }
  Endpoint target2(std::size_t b, std::size_t p) const { return d2.wires()[w2.out[b][p]].to; }
  bool is_copy1(std::size_t b) const { return d1.boxes()[b].kind == BoxKind::Copy; }
};

struct IsoState {
  std::vector<std::size_t> fwd, bwd;
  // Copy output ports are unordered; track the port bijection per copy pair.
  std::vector<std::vector<std::size_t>> port;
  std::vector<std::vector<bool>> port_used;
  std::deque<std::pair<std::size_t, std::size_t>> queue;
};

bool pair_boxes(const IsoContext& cx, IsoState& st, std::size_t b1, std::size_t b2) {
  if (st.fwd[b1] == b2) return true;
  if (st.fwd[b1] != npos || st.bwd[b2] != npos) return false;
  if (!same_label(cx.d1.boxes()[b1], cx.d2.boxes()[b2])) return false;
  st.fwd[b1] = b2;
  st.bwd[b2] = b1;
  st.queue.emplace_back(b1, b2);
  return true;
}

bool map_port(IsoState& st, std::size_t b1, std::size_t p1, std::size_t p2) {
  std::size_t b2 = st.fwd[b1];
  if (st.port[b1][p1] == p2) return true;
  if (st.port[b1][p1] != npos || st.port_used[b2][p2]) return false;
  st.port[b1][p1] = p2;
  st.port_used[b2][p2] = true;
  return true;
}

bool match_source(const IsoContext& cx, IsoState& st, Endpoint e1, Endpoint e2) {
  if (e1.boundary() != e2.boundary()) return false;
  if (e1.boundary()) return e1.port == e2.port;
  if (!pair_boxes(cx, st, e1.box, e2.box)) return false;
  if (cx.is_copy1(e1.box)) return map_port(st, e1.box, e1.port, e2.port);
  return e1.port == e2.port;
}

bool match_target(const IsoContext& cx, IsoState& st, Endpoint e1, Endpoint e2) {
  if (e1.boundary() != e2.boundary()) return false;
  if (e1.boundary()) return e1.port == e2.port;
  return e1.port == e2.port && pair_boxes(cx, st, e1.box, e2.box);
}

bool propagate(const IsoContext& cx, IsoState& st) {
  while (!st.queue.empty()) {
    auto [b1, b2] = st.queue.front();
    st.queue.pop_front();
    for (std::size_t p = 0; p < cx.w1.in[b1].size(); ++p)
      if (!match_source(cx, st, cx.source1(b1, p), cx.source2(b2, p))) return false;
    for (std::size_t p = 0; p < cx.w1.out[b1].size(); ++p) {
      std::size_t q = cx.is_copy1(b1) ? st.port[b1][p] : p;
      if (q == npos) continue;
      if (!match_target(cx, st, cx.target1(b1, p), cx.target2(b2, q))) return false;
    }
  }
  return true;
}

bool verify(const IsoContext& cx, const IsoState& st) {
  for (const Wire& w : cx.d1.wires()) {
    Endpoint from = w.from, to = w.to;
    if (!from.boundary()) {
      if (cx.is_copy1(from.box)) from.port = st.port[from.box][from.port];
      from.box = st.fwd[from.box];
    }
    std::size_t w2;
    if (to.boundary()) {
      w2 = cx.w2.output[to.port];
    } else {
      w2 = cx.w2.in[st.fwd[to.box]][to.port];
    }
    if (cx.d2.wires()[w2].from != from || cx.d2.wires()[w2].var != w.var) return false;
  }
  return true;
}

bool search(const IsoContext& cx, IsoState st) {
  if (!propagate(cx, st)) return false;
  const std::size_t n = cx.d1.boxes().size();
  for (std::size_t b1 = 0; b1 < n; ++b1) {
    if (st.fwd[b1] == npos || !cx.is_copy1(b1)) continue;
    auto& ports = st.port[b1];
    auto it = std::find(ports.begin(), ports.end(), npos);
    if (it == ports.end()) continue;
    const std::size_t p1 = static_cast<std::size_t>(it - ports.begin());
    const std::size_t b2 = st.fwd[b1];
    for (std::size_t p2 = 0; p2 < ports.size(); ++p2) {
      if (st.port_used[b2][p2]) continue;
      IsoState next = st;
      if (map_port(next, b1, p1, p2) &&
          match_target(cx, next, cx.target1(b1, p1), cx.target2(b2, p2)) &&
          search(cx, std::move(next)))
        return true;
    }
    return false;
  }
  for (std::size_t b1 = 0; b1 < n; ++b1) {
    if (st.fwd[b1] != npos) continue;
    for (std::size_t b2 = 0; b2 < n; ++b2) {
      if (st.bwd[b2] != npos) continue;
      IsoState next = st;
      if (pair_boxes(cx, next, b1, b2) && search(cx, std::move(next))) return true;
    }
    return false;
  }
  return verify(cx, st);
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t label_hash(const Box& b) {
  std::hash<std::string> hs;
  std::size_t h = static_cast<std::size_t>(b.kind);
  h = mix(h, hs(b.gen));
  h = mix(h, hs(b.var));
  h = mix(h, hs(b.var2));
  return mix(h, b.fanout);
}

}  // namespace

bool isomorphic(const Diagram& d1, const Diagram& d2) {
  if (!d1.signature() || !d2.signature() || !same_vocabulary(*d1.signature(), *d2.signature()))
    return false;
  if (d1.inputs() != d2.inputs() || d1.outputs() != d2.outputs()) return false;
  if (d1.boxes().size() != d2.boxes().size() || d1.wires().size() != d2.wires().size())
    return false;
  if (structural_hash(d1) != structural_hash(d2)) return false;

  IsoContext cx{d1, d2, make_wiring(d1), make_wiring(d2)};
  const std::size_t n = d1.boxes().size();
  IsoState st;
  st.fwd.assign(n, npos);
  st.bwd.assign(n, npos);
  st.port.resize(n);
  st.port_used.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    if (d1.boxes()[b].kind == BoxKind::Copy) st.port[b].assign(d1.boxes()[b].fanout, npos);
    if (d2.boxes()[b].kind == BoxKind::Copy) st.port_used[b].assign(d2.boxes()[b].fanout, false);
  }
  for (std::size_t k = 0; k < d1.inputs().size(); ++k)
    if (!match_target(cx, st, d1.wires()[cx.w1.input[k]].to, d2.wires()[cx.w2.input[k]].to))
      return false;
  for (std::size_t k = 0; k < d1.outputs().size(); ++k)
    if (!match_source(cx, st, d1.wires()[cx.w1.output[k]].from,
                      d2.wires()[cx.w2.output[k]].from))
      return false;
  return search(cx, std::move(st));
}

bool iso_equal(const Diagram& d1, const Diagram& d2) {
  return isomorphic(normalize(d1), normalize(d2));
}

std::size_t structural_hash(const Diagram& d) {
  Wiring w = make_wiring(d);
  const std::size_t n = d.boxes().size();
  std::vector<std::size_t> color(n);
  for (std::size_t b = 0; b < n; ++b) color[b] = label_hash(d.boxes()[b]);
  auto source_color = [&](const std::vector<std::size_t>& c, Endpoint e) {
    if (e.boundary()) return mix(0x51ed, e.port);
    bool copy = d.boxes()[e.box].kind == BoxKind::Copy;
    return mix(c[e.box], copy ? 0 : e.port + 1);
  };
  auto target_color = [&](const std::vector<std::size_t>& c, Endpoint e) {
    if (e.boundary()) return mix(0x0e7, e.port);
    return mix(c[e.box], e.port + 1);
  };
  for (int round = 0; round < 3; ++round) {
    std::vector<std::size_t> next(n);
    for (std::size_t b = 0; b < n; ++b) {
      std::size_t h = color[b];
      for (auto wi : w.in[b]) h = mix(h, source_color(color, d.wires()[wi].from));
      std::vector<std::size_t> outs;
      for (auto wi : w.out[b]) outs.push_back(target_color(color, d.wires()[wi].to));
      if (d.boxes()[b].kind == BoxKind::Copy) std::sort(outs.begin(), outs.end());
      for (auto o : outs) h = mix(h, mix(0xabc, o));
      next[b] = h;
    }
    color.swap(next);
  }
  std::vector<std::size_t> sorted = color;
  std::sort(sorted.begin(), sorted.end());
  std::hash<std::string> hs;
  std::size_t h = 0;
  for (auto c : sorted) h = mix(h, c);
  for (const auto& v : d.inputs()) h = mix(h, hs(v));
  for (const auto& v : d.outputs()) h = mix(h, hs(v) + 1);
  for (auto wi : w.output) h = mix(h, source_color(color, d.wires()[wi].from));
  return h;
}

}  // namespace compmodel
