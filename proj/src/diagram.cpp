#include "compmodel/diagram.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "compmodel/error.hpp"
#include "compmodel/graph_edit.hpp"

namespace compmodel {

namespace {

std::string unique_id(const std::set<std::string>& used, const std::string& base) {
  if (!used.count(base)) return base;
  std::string stem = base;
  if (auto pos = stem.rfind('#'); pos != std::string::npos && pos + 1 < stem.size() &&
                                  std::all_of(stem.begin() + static_cast<long>(pos) + 1,
                                              stem.end(), ::isdigit))
    stem.resize(pos);
  for (std::size_t k = 2;; ++k) {
    std::string id = stem + "#" + std::to_string(k);
    if (!used.count(id)) return id;
  }
}

std::string port_name(const Diagram& d, Endpoint e, bool source) {
  if (e.boundary()) return std::string(source ? "input " : "output ") + std::to_string(e.port);
  std::string id = e.box < d.boxes().size() ? d.boxes()[e.box].id : "?";
  return "box '" + id + "' " + (source ? "output " : "input ") + std::to_string(e.port);
}

}  // namespace

std::string_view to_string(BoxKind kind) {
  switch (kind) {
    case BoxKind::Gen: return "gen";
    case BoxKind::Copy: return "copy";
    case BoxKind::Discard: return "discard";
    case BoxKind::Swap: return "swap";
  }
  return "gen";
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DanglingPort: return "DanglingPort";
    case ViolationKind::MultiplyConnected: return "MultiplyConnected";
    case ViolationKind::Cycle: return "Cycle";
    case ViolationKind::TypeMismatch: return "TypeMismatch";
    case ViolationKind::LanguageViolation: return "LanguageViolation";
    case ViolationKind::UnknownGenerator: return "UnknownGenerator";
    case ViolationKind::UnknownVariable: return "UnknownVariable";
    case ViolationKind::BadEndpoint: return "BadEndpoint";
    case ViolationKind::BadArity: return "BadArity";
    case ViolationKind::DuplicateBoxId: return "DuplicateBoxId";
  }
  return "Unknown";
}

Diagram::Diagram(SignaturePtr sig, std::vector<Box> boxes, std::vector<Wire> wires,
                 std::vector<std::string> inputs, std::vector<std::string> outputs)
    : sig_(std::move(sig)),
      boxes_(std::move(boxes)),
      wires_(std::move(wires)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)) {}

std::optional<std::size_t> Diagram::find_box(std::string_view id) const {
  for (std::size_t i = 0; i < boxes_.size(); ++i)
    if (boxes_[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::string> box_inputs(const Signature& sig, const Box& box) {
  switch (box.kind) {
    case BoxKind::Gen: return sig.generator(box.gen).dom;
    case BoxKind::Copy:
    case BoxKind::Discard: return {box.var};
    case BoxKind::Swap: return {box.var, box.var2};
  }
  return {};
}

std::vector<std::string> box_outputs(const Signature& sig, const Box& box) {
  switch (box.kind) {
    case BoxKind::Gen: return sig.generator(box.gen).cod;
    case BoxKind::Copy: return std::vector<std::string>(box.fanout, box.var);
    case BoxKind::Discard: return {};
    case BoxKind::Swap: return {box.var2, box.var};
  }
  return {};
}

Wiring make_wiring(const Diagram& d) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  const Signature& sig = *d.signature();
  Wiring w;
  w.in.resize(d.boxes().size());
  w.out.resize(d.boxes().size());
  for (std::size_t b = 0; b < d.boxes().size(); ++b) {
    w.in[b].assign(box_inputs(sig, d.boxes()[b]).size(), npos);
    w.out[b].assign(box_outputs(sig, d.boxes()[b]).size(), npos);
  }
  w.input.assign(d.inputs().size(), npos);
  w.output.assign(d.outputs().size(), npos);
  auto claim = [&](std::size_t& slot, std::size_t wi) {
    if (slot != npos) fail(ErrorKind::InvalidDiagram, "port connected more than once");
    slot = wi;
  };
  for (std::size_t i = 0; i < d.wires().size(); ++i) {
    const Wire& wire = d.wires()[i];
    auto& src = wire.from.boundary() ? w.input : w.out.at(wire.from.box);
    auto& dst = wire.to.boundary() ? w.output : w.in.at(wire.to.box);
    if (wire.from.port >= src.size() || wire.to.port >= dst.size())
      fail(ErrorKind::InvalidDiagram, "wire endpoint out of range");
    claim(src[wire.from.port], i);
    claim(dst[wire.to.port], i);
  }
  auto check = [&](const std::vector<std::size_t>& v) {
    for (auto x : v)
      if (x == npos) fail(ErrorKind::InvalidDiagram, "dangling port");
  };
  check(w.input);
  check(w.output);
  for (auto& v : w.in) check(v);
  for (auto& v : w.out) check(v);
  return w;
}

std::vector<std::size_t> topological_order(const Diagram& d, const Wiring& w) {
  const std::size_t n = d.boxes().size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t b = 0; b < n; ++b)
    for (auto wi : w.in[b])
      if (!d.wires()[wi].from.boundary()) ++indegree[b];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t b = 0; b < n; ++b)
    if (indegree[b] == 0) ready.push(b);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t b = ready.top();
    ready.pop();
    order.push_back(b);
    for (auto wi : w.out[b]) {
      const Endpoint& to = d.wires()[wi].to;
      if (!to.boundary() && --indegree[to.box] == 0) ready.push(to.box);
    }
  }
  if (order.size() != n) fail(ErrorKind::InvalidDiagram, "diagram contains a cycle");
  return order;
}

std::vector<Violation> validate(const Diagram& d) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::string s) { out.push_back({k, std::move(s)}); };
  if (!d.signature()) {
    add(ViolationKind::UnknownGenerator, "diagram has no signature");
    return out;
  }
  const Signature& sig = *d.signature();

  for (const auto& v : d.inputs())
    if (!sig.has_variable(v)) add(ViolationKind::UnknownVariable, "input variable '" + v + "'");
  for (const auto& v : d.outputs())
    if (!sig.has_variable(v)) add(ViolationKind::UnknownVariable, "output variable '" + v + "'");

  std::set<std::string> ids;
  std::vector<std::vector<std::string>> ins(d.boxes().size()), outs(d.boxes().size());
  bool shape_ok = true;
  for (std::size_t b = 0; b < d.boxes().size(); ++b) {
    const Box& box = d.boxes()[b];
    if (!ids.insert(box.id).second) add(ViolationKind::DuplicateBoxId, "box id '" + box.id + "'");
    switch (box.kind) {
      case BoxKind::Gen:
        if (!sig.find_generator(box.gen)) {
          add(ViolationKind::UnknownGenerator, "generator '" + box.gen + "'");
          shape_ok = false;
          continue;
        }
        break;
      case BoxKind::Copy:
        if (sig.language() != Language::CD)
          add(ViolationKind::LanguageViolation, "copy box '" + box.id + "' outside cd language");
        if (box.fanout < 2) add(ViolationKind::BadArity, "copy box '" + box.id + "' fanout < 2");
        break;
      case BoxKind::Discard:
        if (sig.language() == Language::Monoidal)
          add(ViolationKind::LanguageViolation,
              "discard box '" + box.id + "' in monoidal language");
        break;
      case BoxKind::Swap:
        if (!sig.has_variable(box.var2))
          add(ViolationKind::UnknownVariable, "swap variable '" + box.var2 + "'");
        break;
    }
    if (box.kind != BoxKind::Gen && !sig.has_variable(box.var))
      add(ViolationKind::UnknownVariable, "box '" + box.id + "' variable '" + box.var + "'");
    ins[b] = box_inputs(sig, box);
    outs[b] = box_outputs(sig, box);
  }
  if (!shape_ok) return out;

  std::vector<std::vector<int>> in_count(d.boxes().size()), out_count(d.boxes().size());
  for (std::size_t b = 0; b < d.boxes().size(); ++b) {
    in_count[b].assign(ins[b].size(), 0);
    out_count[b].assign(outs[b].size(), 0);
  }
  std::vector<int> input_count(d.inputs().size(), 0), output_count(d.outputs().size(), 0);
  bool endpoints_ok = true;
  for (const Wire& w : d.wires()) {
    const std::string* from_var = nullptr;
    const std::string* to_var = nullptr;
    if (w.from.boundary()) {
      if (w.from.port < d.inputs().size()) {
        from_var = &d.inputs()[w.from.port];
        ++input_count[w.from.port];
      }
    } else if (w.from.box < d.boxes().size() && w.from.port < outs[w.from.box].size()) {
      from_var = &outs[w.from.box][w.from.port];
      ++out_count[w.from.box][w.from.port];
    }
    if (w.to.boundary()) {
      if (w.to.port < d.outputs().size()) {
        to_var = &d.outputs()[w.to.port];
        ++output_count[w.to.port];
      }
    } else if (w.to.box < d.boxes().size() && w.to.port < ins[w.to.box].size()) {
      to_var = &ins[w.to.box][w.to.port];
      ++in_count[w.to.box][w.to.port];
    }
    if (!from_var || !to_var) {
      add(ViolationKind::BadEndpoint, "wire endpoint does not exist");
      endpoints_ok = false;
      continue;
    }
    if (*from_var != w.var || *to_var != w.var)
      add(ViolationKind::TypeMismatch, "wire labelled '" + w.var + "' joins " +
                                           port_name(d, w.from, true) + " (" + *from_var +
                                           ") to " + port_name(d, w.to, false) + " (" + *to_var +
                                           ")");
  }
  auto check = [&](int c, const std::string& where) {
    if (c == 0) add(ViolationKind::DanglingPort, where);
    if (c > 1) add(ViolationKind::MultiplyConnected, where);
  };
  for (std::size_t k = 0; k < input_count.size(); ++k)
    check(input_count[k], "input " + std::to_string(k));
  for (std::size_t k = 0; k < output_count.size(); ++k)
    check(output_count[k], "output " + std::to_string(k));
  for (std::size_t b = 0; b < d.boxes().size(); ++b) {
    for (std::size_t p = 0; p < in_count[b].size(); ++p)
      check(in_count[b][p], "box '" + d.boxes()[b].id + "' input " + std::to_string(p));
    for (std::size_t p = 0; p < out_count[b].size(); ++p)
      check(out_count[b][p], "box '" + d.boxes()[b].id + "' output " + std::to_string(p));
  }

  if (endpoints_ok) {
    // Kahn over box-to-box wires; leftover boxes lie on a cycle.
    const std::size_t n = d.boxes().size();
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<std::size_t> indeg(n, 0);
    for (const Wire& w : d.wires())
      if (!w.from.boundary() && !w.to.boundary()) {
        succ[w.from.box].push_back(w.to.box);
        ++indeg[w.to.box];
      }
    std::vector<std::size_t> stack;
    for (std::size_t b = 0; b < n; ++b)
      if (indeg[b] == 0) stack.push_back(b);
    std::size_t seen = 0;
    while (!stack.empty()) {
      auto b = stack.back();
      stack.pop_back();
      ++seen;
      for (auto s : succ[b])
        if (--indeg[s] == 0) stack.push_back(s);
    }
    if (seen != n) add(ViolationKind::Cycle, "box graph contains a cycle");
  }
  return out;
}

void require_valid(const Diagram& d) {
  auto v = validate(d);
  if (!v.empty())
    fail(ErrorKind::InvalidDiagram,
         std::string(to_string(v.front().kind)) + ": " + v.front().detail);
}

Diagram from_generator(const SignaturePtr& sig, std::string_view gen) {
  const Generator& g = sig->generator(gen);
  std::vector<Wire> wires;
  for (std::size_t i = 0; i < g.dom.size(); ++i)
    wires.push_back({Endpoint{Endpoint::kBoundary, i}, Endpoint{0, i}, g.dom[i]});
  for (std::size_t j = 0; j < g.cod.size(); ++j)
    wires.push_back({Endpoint{0, j}, Endpoint{Endpoint::kBoundary, j}, g.cod[j]});
  Box box;
  box.id = g.name;
  box.gen = g.name;
  return Diagram(sig, {box}, std::move(wires), g.dom, g.cod);
}

Diagram identity(const SignaturePtr& sig, std::vector<std::string> vars) {
  std::vector<Wire> wires;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!sig->has_variable(vars[i])) fail(ErrorKind::UnresolvedReference, vars[i]);
    wires.push_back({Endpoint{Endpoint::kBoundary, i}, Endpoint{Endpoint::kBoundary, i}, vars[i]});
  }
  return Diagram(sig, {}, std::move(wires), vars, vars);
}

namespace {

void require_same_signature(const Diagram& d1, const Diagram& d2) {
  if (!d1.signature() || !d2.signature() ||
      !same_vocabulary(*d1.signature(), *d2.signature()))
    fail(ErrorKind::SignatureMismatch, "diagrams are over different signatures");
}

// Appends d2's boxes to `boxes`, renaming colliding ids.
void append_boxes(std::vector<Box>& boxes, const Diagram& d2) {
  std::set<std::string> used;
  for (const auto& b : boxes) used.insert(b.id);
  for (Box b : d2.boxes()) {
    b.id = unique_id(used, b.id);
    used.insert(b.id);
    boxes.push_back(std::move(b));
  }
}

}  // namespace

Diagram compose_seq(const Diagram& d1, const Diagram& d2) {
  require_same_signature(d1, d2);
  const auto& outs = d1.outputs();
  const auto& ins = d2.inputs();
  for (std::size_t k = 0; k < std::max(outs.size(), ins.size()); ++k) {
    std::string expected = k < ins.size() ? ins[k] : "<none>";
    std::string found = k < outs.size() ? outs[k] : "<none>";
    if (expected != found)
      fail(ErrorKind::InterfaceMismatch, "position " + std::to_string(k) + ": expected '" +
                                             expected + "', found '" + found + "'");
  }
  Wiring w1 = make_wiring(d1);
  Wiring w2 = make_wiring(d2);
  const std::size_t off = d1.boxes().size();
  std::vector<Box> boxes = d1.boxes();
  append_boxes(boxes, d2);
  std::vector<Wire> wires;
  for (const Wire& w : d1.wires())
    if (!w.to.boundary()) wires.push_back(w);
  for (Wire w : d2.wires()) {
    if (w.from.boundary()) continue;
    w.from.box += off;
    if (!w.to.boundary()) w.to.box += off;
    wires.push_back(w);
  }
  for (std::size_t k = 0; k < outs.size(); ++k) {
    Endpoint src = d1.wires()[w1.output[k]].from;
    Endpoint dst = d2.wires()[w2.input[k]].to;
    if (!dst.boundary()) dst.box += off;
    wires.push_back({src, dst, outs[k]});
  }
  return Diagram(d1.signature(), std::move(boxes), std::move(wires), d1.inputs(), d2.outputs());
}

Diagram compose_par(const Diagram& d1, const Diagram& d2) {
  require_same_signature(d1, d2);
  const std::size_t off = d1.boxes().size();
  const std::size_t in_off = d1.inputs().size();
  const std::size_t out_off = d1.outputs().size();
  std::vector<Box> boxes = d1.boxes();
  append_boxes(boxes, d2);
  std::vector<Wire> wires = d1.wires();
  for (Wire w : d2.wires()) {
    if (w.from.boundary()) w.from.port += in_off;
    else w.from.box += off;
    if (w.to.boundary()) w.to.port += out_off;
    else w.to.box += off;
    wires.push_back(w);
  }
  std::vector<std::string> ins = d1.inputs(), outs = d1.outputs();
  ins.insert(ins.end(), d2.inputs().begin(), d2.inputs().end());
  outs.insert(outs.end(), d2.outputs().begin(), d2.outputs().end());
  return Diagram(d1.signature(), std::move(boxes), std::move(wires), std::move(ins),
                 std::move(outs));
}

Diagram retarget(const Diagram& d, const SignaturePtr& sig) {
  if (d.signature() == sig) return d;
  if (!d.signature() || !vocabulary_includes(*sig, *d.signature())) {
    // Tolerate diagrams whose own signature is wider, as long as every box resolves.
    for (const auto& b : d.boxes())
      if (b.kind == BoxKind::Gen) {
        const Generator* g = sig->find_generator(b.gen);
        if (!g || (d.signature() && d.signature()->find_generator(b.gen) &&
                   !(*g == *d.signature()->find_generator(b.gen))))
          fail(ErrorKind::SignatureMismatch, "generator '" + b.gen + "' not in target signature");
      }
  }
  return Diagram(sig, d.boxes(), d.wires(), d.inputs(), d.outputs());
}

bool reaches(const Diagram& d, std::size_t in, std::size_t out) {
  Wiring w = make_wiring(d);
  if (in >= d.inputs().size() || out >= d.outputs().size())
    fail(ErrorKind::IndexOutOfRange, "boundary index");
  std::vector<bool> seen(d.boxes().size(), false);
  std::vector<Endpoint> stack{d.wires()[w.input[in]].to};
  while (!stack.empty()) {
    Endpoint e = stack.back();
    stack.pop_back();
    if (e.boundary()) {
      if (e.port == out) return true;
      continue;
    }
    if (seen[e.box]) continue;
    seen[e.box] = true;
    for (auto wi : w.out[e.box]) stack.push_back(d.wires()[wi].to);
  }
  return false;
}

// ---------------------------------------------------------------------------
// DiagramBuilder

DiagramBuilder::DiagramBuilder(SignaturePtr sig) : sig_(std::move(sig)) {}

DiagramBuilder::Handle DiagramBuilder::produce(Endpoint source, const std::string& var) {
  handle_var_.push_back(var);
  handle_source_.push_back(source);
  used_.push_back(false);
  return Handle{source, handle_var_.size() - 1};
}

void DiagramBuilder::consume(Handle h, Endpoint target) {
  if (h.serial >= used_.size()) fail(ErrorKind::InvalidArgument, "unknown handle");
  if (used_[h.serial]) fail(ErrorKind::InvalidDiagram, "handle used twice");
  used_[h.serial] = true;
  wires_.push_back({h.source, target, handle_var_[h.serial]});
}

const std::string& DiagramBuilder::var_of(Handle h) const { return handle_var_.at(h.serial); }

std::string DiagramBuilder::take_id(std::string id, const std::string& base) {
  std::set<std::string> used;
  for (const auto& b : boxes_) used.insert(b.id);
  if (!id.empty()) {
    if (used.count(id)) fail(ErrorKind::DuplicateName, "box id '" + id + "'");
    return id;
  }
  return unique_id(used, base);
}

DiagramBuilder::Handle DiagramBuilder::input(const std::string& var) {
  if (!sig_->has_variable(var)) fail(ErrorKind::UnresolvedReference, var);
  inputs_.push_back(var);
  return produce(Endpoint{Endpoint::kBoundary, inputs_.size() - 1}, var);
}

std::vector<DiagramBuilder::Handle> DiagramBuilder::add(std::string_view gen,
                                                        const std::vector<Handle>& args,
                                                        std::string id) {
  const Generator& g = sig_->generator(gen);
  if (args.size() != g.dom.size())
    fail(ErrorKind::ArityMismatch, "generator '" + g.name + "' takes " +
                                       std::to_string(g.dom.size()) + " inputs");
  for (std::size_t i = 0; i < args.size(); ++i)
    if (var_of(args[i]) != g.dom[i])
      fail(ErrorKind::TypeMismatch, "generator '" + g.name + "' input " + std::to_string(i) +
                                        " expects '" + g.dom[i] + "', got '" + var_of(args[i]) +
                                        "'");
  Box box;
  box.id = take_id(std::move(id), g.name);
  box.gen = g.name;
  boxes_.push_back(box);
  const std::size_t b = boxes_.size() - 1;
  for (std::size_t i = 0; i < args.size(); ++i) consume(args[i], Endpoint{b, i});
  std::vector<Handle> outs;
  for (std::size_t j = 0; j < g.cod.size(); ++j) outs.push_back(produce(Endpoint{b, j}, g.cod[j]));
  return outs;
}

DiagramBuilder::Handle DiagramBuilder::add1(std::string_view gen, const std::vector<Handle>& args,
                                            std::string id) {
  auto outs = add(gen, args, std::move(id));
  if (outs.size() != 1)
    fail(ErrorKind::ArityMismatch, "generator '" + std::string(gen) + "' is not single-output");
  return outs.front();
}

std::vector<DiagramBuilder::Handle> DiagramBuilder::copy(Handle h, std::size_t n, std::string id) {
  if (n == 0) {
    discard(h, std::move(id));
    return {};
  }
  if (n == 1) return {h};
  Box box;
  box.kind = BoxKind::Copy;
  box.id = take_id(std::move(id), "copy");
  box.var = var_of(h);
  box.fanout = n;
  boxes_.push_back(box);
  const std::size_t b = boxes_.size() - 1;
  consume(h, Endpoint{b, 0});
  std::vector<Handle> outs;
  for (std::size_t j = 0; j < n; ++j) outs.push_back(produce(Endpoint{b, j}, box.var));
  return outs;
}

void DiagramBuilder::discard(Handle h, std::string id) {
  Box box;
  box.kind = BoxKind::Discard;
  box.id = take_id(std::move(id), "discard");
  box.var = var_of(h);
  boxes_.push_back(box);
  consume(h, Endpoint{boxes_.size() - 1, 0});
}

std::pair<DiagramBuilder::Handle, DiagramBuilder::Handle> DiagramBuilder::swap(Handle a, Handle b,
                                                                               std::string id) {
  Box box;
  box.kind = BoxKind::Swap;
  box.id = take_id(std::move(id), "swap");
  box.var = var_of(a);
  box.var2 = var_of(b);
  boxes_.push_back(box);
  const std::size_t s = boxes_.size() - 1;
  consume(a, Endpoint{s, 0});
  consume(b, Endpoint{s, 1});
  Handle first = produce(Endpoint{s, 0}, box.var2);
  Handle second = produce(Endpoint{s, 1}, box.var);
  return {first, second};
}

void DiagramBuilder::output(Handle h) {
  outputs_.push_back(var_of(h));
  consume(h, Endpoint{Endpoint::kBoundary, outputs_.size() - 1});
}

Diagram DiagramBuilder::build() const {
  for (std::size_t i = 0; i < used_.size(); ++i)
    if (!used_[i]) fail(ErrorKind::InvalidDiagram, "unused value of type '" + handle_var_[i] + "'");
  Diagram d(sig_, boxes_, wires_, inputs_, outputs_);
  require_valid(d);
  return d;
}

// ---------------------------------------------------------------------------
// GraphEdit

GraphEdit::GraphEdit(const Diagram& d)
    : boxes(d.boxes()),
      box_alive(d.boxes().size(), true),
      wires(d.wires()),
      wire_alive(d.wires().size(), true),
      inputs(d.inputs()),
      outputs(d.outputs()),
      sig_(d.signature()) {
  for (const auto& b : boxes) ids_.insert(b.id);
}

std::size_t GraphEdit::add_box(Box b) {
  ids_.insert(b.id);
  boxes.push_back(std::move(b));
  box_alive.push_back(true);
  return boxes.size() - 1;
}

std::size_t GraphEdit::add_wire(Endpoint from, Endpoint to, const std::string& var) {
  wires.push_back({from, to, var});
  wire_alive.push_back(true);
  return wires.size() - 1;
}

void GraphEdit::kill_box(std::size_t b) { box_alive[b] = false; }
void GraphEdit::kill_wire(std::size_t w) { wire_alive[w] = false; }

std::size_t GraphEdit::wire_into(Endpoint to) const {
  for (std::size_t i = 0; i < wires.size(); ++i)
    if (wire_alive[i] && wires[i].to == to) return i;
  return npos;
}

std::size_t GraphEdit::wire_from(Endpoint from) const {
  for (std::size_t i = 0; i < wires.size(); ++i)
    if (wire_alive[i] && wires[i].from == from) return i;
  return npos;
}

std::vector<std::string> GraphEdit::inputs_of(std::size_t b) const {
  return box_inputs(*sig_, boxes[b]);
}
std::vector<std::string> GraphEdit::outputs_of(std::size_t b) const {
  return box_outputs(*sig_, boxes[b]);
}

std::string GraphEdit::fresh_id(const std::string& base) {
  std::string id = unique_id(ids_, base);
  ids_.insert(id);
  return id;
}

void GraphEdit::discard_at(Endpoint source, const std::string& var) {
  Box d;
  d.kind = BoxKind::Discard;
  d.id = fresh_id("discard");
  d.var = var;
  std::size_t b = add_box(d);
  add_wire(source, Endpoint{b, 0}, var);
}

std::pair<std::vector<Endpoint>, std::vector<Endpoint>> GraphEdit::cut_box(std::size_t b) {
  std::vector<Endpoint> sources, targets;
  for (std::size_t p = 0; p < inputs_of(b).size(); ++p) {
    std::size_t w = wire_into(Endpoint{b, p});
    sources.push_back(wires[w].from);
    kill_wire(w);
  }
  for (std::size_t p = 0; p < outputs_of(b).size(); ++p) {
    std::size_t w = wire_from(Endpoint{b, p});
    targets.push_back(wires[w].to);
    kill_wire(w);
  }
  kill_box(b);
  return {sources, targets};
}

std::vector<std::size_t> GraphEdit::insert(const Diagram& piece, const std::vector<Endpoint>& sources,
                                           const std::vector<Endpoint>& targets) {
  std::vector<std::size_t> index;
  for (const Box& b : piece.boxes()) {
    Box copy = b;
    copy.id = fresh_id(b.id.substr(0, b.id.find('#')));
    index.push_back(add_box(std::move(copy)));
  }
  for (const Wire& w : piece.wires()) {
    Endpoint from = w.from.boundary() ? sources.at(w.from.port) : Endpoint{index[w.from.box], w.from.port};
    Endpoint to = w.to.boundary() ? targets.at(w.to.port) : Endpoint{index[w.to.box], w.to.port};
    add_wire(from, to, w.var);
  }
  return index;
}

Endpoint GraphEdit::add_input(const std::string& var) {
  inputs.push_back(var);
  return Endpoint{Endpoint::kBoundary, inputs.size() - 1};
}

Endpoint GraphEdit::add_output(const std::string& var) {
  outputs.push_back(var);
  return Endpoint{Endpoint::kBoundary, outputs.size() - 1};
}

void GraphEdit::remove_input(std::size_t k) {
  inputs.erase(inputs.begin() + static_cast<long>(k));
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (!wire_alive[i] || !wires[i].from.boundary()) continue;
    if (wires[i].from.port == k) kill_wire(i);
    else if (wires[i].from.port > k) --wires[i].from.port;
  }
}

void GraphEdit::remove_output(std::size_t k) {
  outputs.erase(outputs.begin() + static_cast<long>(k));
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (!wire_alive[i] || !wires[i].to.boundary()) continue;
    if (wires[i].to.port == k) kill_wire(i);
    else if (wires[i].to.port > k) --wires[i].to.port;
  }
}

Diagram GraphEdit::finish() const {
  std::vector<std::size_t> remap(boxes.size(), npos);
  std::vector<Box> out_boxes;
  for (std::size_t b = 0; b < boxes.size(); ++b)
    if (box_alive[b]) {
      remap[b] = out_boxes.size();
      out_boxes.push_back(boxes[b]);
    }
  std::vector<Wire> out_wires;
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (!wire_alive[i]) continue;
    Wire w = wires[i];
    for (Endpoint* e : {&w.from, &w.to}) {
      if (e->boundary()) continue;
      e->box = remap[e->box];
      if (e->box == npos) fail(ErrorKind::InvalidDiagram, "live wire attached to a removed box");
    }
    out_wires.push_back(w);
  }
  return Diagram(sig_, std::move(out_boxes), std::move(out_wires), inputs, outputs);
}

}  // namespace compmodel
