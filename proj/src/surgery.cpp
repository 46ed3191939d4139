#include "compmodel/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "compmodel/error.hpp"
#include "compmodel/graph_edit.hpp"

namespace compmodel {

std::string_view to_string(SurgeryKind k) {
  switch (k) {
    case SurgeryKind::ReplaceBox: return "replace_box";
    case SurgeryKind::Probe: return "probe";
    case SurgeryKind::ObserveProbe: return "observe_probe";
    case SurgeryKind::ReplaceInput: return "replace_input";
  }
  return "?";
}

std::string wire_name(const Diagram& d, const Wire& w) {
  if (w.from.boundary()) return "in:" + std::to_string(w.from.port);
  return d.boxes()[w.from.box].id + ":" + std::to_string(w.from.port);
}

namespace {

// Index of the wire with the given name.
std::size_t find_wire(const Diagram& d, std::string_view name) {
  for (std::size_t i = 0; i < d.wires().size(); ++i)
    if (wire_name(d, d.wires()[i]) == name) return i;
  fail(ErrorKind::WireNotFound, "no wire named '" + std::string(name) + "'");
}

SurgeryRecord record(const Diagram& d, Diagram result, SurgeryKind kind, std::string site, std::string note) {
  require_valid(result);
  return SurgeryRecord{d, std::move(result), kind, std::move(site), std::move(note)};
}

}  // namespace

SurgeryRecord replace_box(const Diagram& d, std::string_view box_id, const Diagram& replacement) {
  auto idx = d.find_box(box_id);
  if (!idx) fail(ErrorKind::BoxNotFound, "no box '" + std::string(box_id) + "'");
  require_valid(replacement);
  Diagram host = replacement.signature() == d.signature() ? d : retarget(d, replacement.signature());
  const Box& box = host.boxes()[*idx];
  const Signature& sig = *host.signature();
  if (box_inputs(sig, box) != replacement.inputs() || box_outputs(sig, box) != replacement.outputs())
    fail(ErrorKind::InterfaceMismatch, "replacement boundary differs from box '" + box.id + "'");
  GraphEdit g(host);
  auto [sources, targets] = g.cut_box(*idx);
  g.insert(replacement, sources, targets);
  return record(d, g.finish(), SurgeryKind::ReplaceBox, box.id, "replaced box '" + box.id + "'");
}

SurgeryRecord insert_probe(const Diagram& d, std::string_view wire, const std::string& probe) {
  std::size_t w = find_wire(d, wire);
  const std::string var = d.wires()[w].var;
  const Generator& p = d.signature()->generator(probe);
  if (p.dom != std::vector<std::string>{var} || p.cod.size() != 2 || p.cod[0] != var)
    fail(ErrorKind::TypeMismatch, "probe '" + probe + "' must have type " + var + " -> " + var + " C");
  if (!p.channel) fail(ErrorKind::TypeMismatch, "probe '" + probe + "' is not a channel");
  GraphEdit g(d);
  Wire cut = g.wires[w];
  g.kill_wire(w);
  Box box;
  box.id = g.fresh_id(probe);
  box.gen = probe;
  std::size_t pb = g.add_box(box);
  g.add_wire(cut.from, Endpoint{pb, 0}, var);
  g.add_wire(Endpoint{pb, 0}, cut.to, var);
  g.add_wire(Endpoint{pb, 1}, g.add_output(p.cod[1]), p.cod[1]);
  return record(d, g.finish(), SurgeryKind::Probe, std::string(wire), "probe '" + probe + "'");
}

SurgeryRecord observe_probe(const Diagram& d, std::string_view wire,
                            const std::optional<std::string>& classifier) {
  if (d.signature()->language() != Language::CD)
    fail(ErrorKind::NoCopyInLanguage, "observation needs copying, unavailable in this language");
  std::size_t w = find_wire(d, wire);
  const std::string var = d.wires()[w].var;
  const Generator* c = nullptr;
  if (classifier) {
    c = &d.signature()->generator(*classifier);
    if (c->dom != std::vector<std::string>{var} || c->cod.size() != 1)
      fail(ErrorKind::TypeMismatch, "classifier '" + *classifier + "' must have type " + var + " -> C");
    if (!c->channel) fail(ErrorKind::TypeMismatch, "classifier '" + *classifier + "' is not a channel");
  }
  GraphEdit g(d);
  Wire cut = g.wires[w];
  g.kill_wire(w);
  Box copy;
  copy.kind = BoxKind::Copy;
  copy.id = g.fresh_id("copy");
  copy.var = var;
  copy.fanout = 2;
  std::size_t cb = g.add_box(copy);
  g.add_wire(cut.from, Endpoint{cb, 0}, var);
  g.add_wire(Endpoint{cb, 0}, cut.to, var);
  if (c) {
    Box box;
    box.id = g.fresh_id(*classifier);
    box.gen = *classifier;
    std::size_t kb = g.add_box(box);
    g.add_wire(Endpoint{cb, 1}, Endpoint{kb, 0}, var);
    g.add_wire(Endpoint{kb, 0}, g.add_output(c->cod[0]), c->cod[0]);
  } else {
    g.discard_at(Endpoint{cb, 1}, var);
  }
  return record(d, g.finish(), SurgeryKind::ObserveProbe, std::string(wire),
                classifier ? "observed through '" + *classifier + "'" : "observed and discarded");
}

SurgeryRecord replace_input(const Diagram& d, std::size_t in_idx, const std::string& state) {
  if (in_idx >= d.inputs().size()) fail(ErrorKind::IndexOutOfRange, "no input " + std::to_string(in_idx));
  const Generator& s = d.signature()->generator(state);
  if (!s.dom.empty() || s.cod != std::vector<std::string>{d.inputs()[in_idx]})
    fail(ErrorKind::TypeMismatch, "'" + state + "' is not a state of " + d.inputs()[in_idx]);
  GraphEdit g(d);
  std::size_t w = g.wire_from(Endpoint{Endpoint::kBoundary, in_idx});
  Wire cut = g.wires[w];
  g.kill_wire(w);
  Box box;
  box.id = g.fresh_id(state);
  box.gen = state;
  std::size_t sb = g.add_box(box);
  g.add_wire(Endpoint{sb, 0}, cut.to, cut.var);
  g.remove_input(in_idx);
  return record(d, g.finish(), SurgeryKind::ReplaceInput, "in:" + std::to_string(in_idx),
                "input closed with '" + state + "'");
}

double cfe_distance(const CfeDistance& dist, const std::vector<std::size_t>& a,
                    const std::vector<std::size_t>& b) {
  if (!dist.weights.empty() && dist.weights.size() != a.size())
    fail(ErrorKind::DimensionMismatch, "one weight per input factor expected");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double w = dist.weights.empty() ? 1.0 : dist.weights[i];
    if (dist.kind == CfeDistance::Kind::Ordinal)
      total += w * std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    else if (a[i] != b[i])
      total += dist.kind == CfeDistance::Kind::Hamming ? 1.0 : w;
  }
  return total;
}

CfeResult cfe_search(const ModelBinding& b, const Diagram& d, const std::vector<std::size_t>& x,
                     const std::vector<std::size_t>& target, const CfeDistance& dist) {
  if (b.backend != Backend::FinFn && b.backend != Backend::Stoch)
    fail(ErrorKind::InfiniteCarrier, "counterfactual search needs finite classical carriers");
  const Dims in_dims = b.dims_of(d.inputs()), out_dims = b.dims_of(d.outputs());
  if (x.size() != in_dims.size() || target.size() != out_dims.size())
    fail(ErrorKind::DimensionMismatch, "input or target tuple has the wrong length");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= in_dims[i]) fail(ErrorKind::IndexOutOfRange, "input value out of range");
  for (std::size_t i = 0; i < target.size(); ++i)
    if (target[i] >= out_dims[i]) fail(ErrorKind::IndexOutOfRange, "target value out of range");
  MorphSem m = eval_diagram(b, d);
  if (!is_deterministic(m)) fail(ErrorKind::NotDeterministic, "the model is not deterministic");
  StochMatrix table = m.index() == 0 ? to_matrix(std::get<FnTable>(m)) : std::get<StochMatrix>(m);
  const long want = static_cast<long>(flatten(target, out_dims));
  CfeResult r;
  r.distance = std::numeric_limits<double>::infinity();
  for (std::size_t col = 0; col < product(in_dims); ++col) {
    if (table.m(want, static_cast<long>(col)) < 0.5) continue;
    auto cand = unflatten(col, in_dims);
    double dd = cfe_distance(dist, x, cand);
    if (dd < r.distance) {
      r.distance = dd;
      r.inputs.clear();
    }
    if (dd == r.distance) r.inputs.push_back(std::move(cand));
  }
  if (r.inputs.empty()) fail(ErrorKind::TargetUnreachable, "no input produces the target output");
  return r;
}

}  // namespace compmodel
