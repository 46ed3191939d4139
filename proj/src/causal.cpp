#include "compmodel/causal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "compmodel/error.hpp"
#include "compmodel/graph_edit.hpp"

namespace compmodel {

namespace {

// Where a variable's value originates: a diagram input or a live generator box output.
Endpoint origin_of(const GraphEdit& g, const std::string& var) {
  for (std::size_t k = 0; k < g.inputs.size(); ++k)
    if (g.inputs[k] == var) return Endpoint{Endpoint::kBoundary, k};
  for (std::size_t b = 0; b < g.boxes.size(); ++b) {
    if (!g.box_alive[b] || g.boxes[b].kind != BoxKind::Gen) continue;
    auto outs = g.outputs_of(b);
    if (outs.size() == 1 && outs[0] == var) return Endpoint{b, 0};
  }
  fail(ErrorKind::NotAVariable, "'" + var + "' does not occur in the network");
}

std::size_t mechanism_box(const OpenCausalModel& m, const std::string& var) {
  if (!m.binding.sig->has_variable(var)) fail(ErrorKind::NotAVariable, "'" + var + "' is not a variable");
  auto it = m.network.mechanism_of.find(var);
  if (it == m.network.mechanism_of.end())
    fail(ErrorKind::NotAVariable, "'" + var + "' has no mechanism (it is an input)");
  return *m.network.diagram.find_box(it->second);
}

std::string fresh_gen_name(const Signature& sig, const std::vector<Generator>& pending, std::string base) {
  auto taken = [&](const std::string& n) {
    if (sig.find_generator(n)) return true;
    return std::any_of(pending.begin(), pending.end(), [&](const Generator& g) { return g.name == n; });
  };
  std::string name = base;
  for (int k = 2; taken(name); ++k) name = base + "#" + std::to_string(k);
  return name;
}

// Resolves a do-assignment value to a sharp-state generator, creating one if needed.
std::string sharp_state_for(const ModelBinding& b, const std::string& var, const std::string& value,
                            std::vector<Generator>& new_gens, std::map<std::string, MorphSem>& new_sems) {
  if (const Generator* g = b.sig->find_generator(value)) {
    if (!g->sharp || g->cod != std::vector<std::string>{var} || !is_deterministic(b.morphism(value)))
      fail(ErrorKind::NotSharp, "'" + value + "' is not a sharp state of " + var);
    return value;
  }
  auto idx = b.object(var).index_of(value);
  if (!idx) fail(ErrorKind::NotSharp, "'" + value + "' is neither a state nor an element of " + var);
  if (const Generator* g = find_sharp_state(b, var, value)) return g->name;
  for (const auto& g : new_gens)
    if (g.cod == std::vector<std::string>{var} &&
        norm_dist(new_sems.at(g.name), point_state(b.backend, b.object(var).size(), *idx)) == 0.0)
      return g.name;
  std::string name = fresh_gen_name(*b.sig, new_gens, var + "=" + value);
  new_gens.push_back(Generator{name, {}, {var}, true, true, true});
  new_sems[name] = point_state(b.backend, b.object(var).size(), *idx);
  return name;
}

OpenCausalModel rebuild(const ModelBinding& b, GraphEdit& g) {
  g.set_signature(b.sig);
  return OpenCausalModel{b, validate_network(g.finish())};
}

std::size_t column_count(const StochMatrix& s) { return static_cast<std::size_t>(s.m.rows()); }

void require_state(const StochMatrix& s) {
  if (!s.dom.empty() || s.m.cols() != 1) fail(ErrorKind::DimensionMismatch, "expected a state");
}

}  // namespace

NetworkDiagram validate_network(const Diagram& d) {
  require_valid(d);
  const Signature& sig = *d.signature();
  NetworkDiagram n{d, {}, {}, d.inputs(), d.outputs()};
  std::set<std::string> origins(d.inputs().begin(), d.inputs().end());
  if (origins.size() != d.inputs().size())
    fail(ErrorKind::DuplicateLabel, "an input variable appears twice");
  for (const Box& box : d.boxes()) {
    if (box.kind != BoxKind::Gen) continue;
    const Generator& g = sig.generator(box.gen);
    if (g.cod.size() != 1)
      fail(ErrorKind::MultiOutputBox,
           "box '" + box.id + "' has " + std::to_string(g.cod.size()) + " outputs");
    if (!origins.insert(g.cod[0]).second)
      fail(ErrorKind::DuplicateLabel, "variable '" + g.cod[0] + "' is produced twice");
    if (!g.channel) fail(ErrorKind::NonChannelMechanism, "box '" + box.id + "' is not a channel");
    n.mechanism_of[g.cod[0]] = box.id;
    n.parents_of[g.cod[0]] = g.dom;
  }
  return n;
}

OpenCausalModel make_causal_model(const ModelBinding& b, const Diagram& d) {
  if (b.backend != Backend::FinFn && b.backend != Backend::Stoch)
    fail(ErrorKind::UnsupportedBackend, "causal models need a finite classical backend");
  return OpenCausalModel{b, validate_network(retarget(d, b.sig))};
}

std::vector<std::string> descendants(const NetworkDiagram& n, const std::string& var) {
  std::vector<std::string> out;
  std::deque<std::string> todo{var};
  std::set<std::string> seen{var};
  while (!todo.empty()) {
    std::string v = todo.front();
    todo.pop_front();
    for (const auto& [child, parents] : n.parents_of)
      if (std::find(parents.begin(), parents.end(), v) != parents.end() && seen.insert(child).second) {
        out.push_back(child);
        todo.push_back(child);
      }
  }
  return out;
}

OpenCausalModel do_intervention(const OpenCausalModel& m,
                                const std::map<std::string, std::string>& assignments) {
  std::vector<Generator> new_gens;
  std::map<std::string, MorphSem> new_sems;
  std::map<std::string, std::string> state_of;
  for (const auto& [var, value] : assignments) {
    mechanism_box(m, var);
    state_of[var] = sharp_state_for(m.binding, var, value, new_gens, new_sems);
  }
  ModelBinding b = new_gens.empty() ? m.binding
                                    : extend_binding(m.binding, {}, {}, new_gens, new_sems);
  GraphEdit g(m.network.diagram);
  g.set_signature(b.sig);
  for (const auto& [var, gen] : state_of) {
    std::size_t box = mechanism_box(m, var);
    auto in_vars = g.inputs_of(box);
    auto [sources, targets] = g.cut_box(box);
    for (std::size_t p = 0; p < sources.size(); ++p) g.discard_at(sources[p], in_vars[p]);
    Box st;
    st.id = g.fresh_id("do:" + var);
    st.gen = gen;
    std::size_t nb = g.add_box(st);
    g.add_wire(Endpoint{nb, 0}, targets[0], var);
  }
  return rebuild(b, g);
}

OpenCausalModel intervene_general(const OpenCausalModel& m, const std::string& var,
                                  const Generator& mechanism, const MorphSem& sem,
                                  const std::vector<std::string>& new_parents) {
  std::size_t box = mechanism_box(m, var);
  if (mechanism.cod != std::vector<std::string>{var})
    fail(ErrorKind::TypeMismatch, "new mechanism must produce exactly '" + var + "'");
  if (mechanism.dom != new_parents)
    fail(ErrorKind::TypeMismatch, "new mechanism inputs differ from the parent list");
  if (!mechanism.channel || !is_channel(sem))
    fail(ErrorKind::NotChannel, "new mechanism for '" + var + "' is not a channel");
  auto below = descendants(m.network, var);
  for (const auto& p : new_parents)
    if (p == var || std::find(below.begin(), below.end(), p) != below.end())
      fail(ErrorKind::CycleIntroduced, "'" + p + "' depends on '" + var + "'");

  ModelBinding b = m.binding;
  if (const Generator* existing = m.binding.sig->find_generator(mechanism.name)) {
    if (!(*existing == mechanism) || norm_dist(m.binding.morphism(mechanism.name), sem) != 0.0)
      fail(ErrorKind::DuplicateName, "generator '" + mechanism.name + "' already exists");
  } else {
    b = extend_binding(m.binding, {}, {}, {mechanism}, {{mechanism.name, sem}});
  }
  GraphEdit g(m.network.diagram);
  g.set_signature(b.sig);
  auto in_vars = g.inputs_of(box);
  auto [sources, targets] = g.cut_box(box);
  for (std::size_t p = 0; p < sources.size(); ++p) g.discard_at(sources[p], in_vars[p]);
  Box nb;
  nb.id = g.fresh_id(mechanism.name);
  nb.gen = mechanism.name;
  std::size_t mech = g.add_box(nb);
  for (std::size_t p = 0; p < new_parents.size(); ++p) {
    Endpoint src = origin_of(g, new_parents[p]);
    std::size_t w = g.wire_from(src);
    Endpoint old_target = g.wires[w].to;
    g.kill_wire(w);
    Box c;
    c.kind = BoxKind::Copy;
    c.id = g.fresh_id("copy");
    c.var = new_parents[p];
    c.fanout = 2;
    std::size_t cb = g.add_box(c);
    g.add_wire(src, Endpoint{cb, 0}, c.var);
    g.add_wire(Endpoint{cb, 0}, old_target, c.var);
    g.add_wire(Endpoint{cb, 1}, Endpoint{mech, p}, c.var);
  }
  g.add_wire(Endpoint{mech, 0}, targets[0], var);
  return rebuild(b, g);
}

OpenCausalModel open_at(const OpenCausalModel& m, const std::vector<std::string>& vars) {
  GraphEdit g(m.network.diagram);
  for (const auto& var : vars) {
    // Box indices in g stay stable across edits, so the original index is still valid.
    std::size_t box = mechanism_box(m, var);
    auto in_vars = g.inputs_of(box);
    auto [sources, targets] = g.cut_box(box);
    for (std::size_t p = 0; p < sources.size(); ++p) g.discard_at(sources[p], in_vars[p]);
    g.add_wire(g.add_input(var), targets[0], var);
  }
  return rebuild(m.binding, g);
}

StochMatrix condition_sharp(const StochMatrix& state, std::size_t var_index, std::size_t value) {
  require_state(state);
  if (var_index >= state.cod.size()) fail(ErrorKind::IndexOutOfRange, "no such factor");
  if (value >= state.cod[var_index]) fail(ErrorKind::IndexOutOfRange, "no such value");
  Dims rest = state.cod;
  rest.erase(rest.begin() + static_cast<long>(var_index));
  StochMatrix out{{}, rest, Eigen::MatrixXd::Zero(static_cast<long>(product(rest)), 1)};
  double p = 0.0;
  for (std::size_t i = 0; i < column_count(state); ++i) {
    auto digits = unflatten(i, state.cod);
    if (digits[var_index] != value) continue;
    double x = state.m(static_cast<long>(i), 0);
    p += x;
    digits.erase(digits.begin() + static_cast<long>(var_index));
    out.m(static_cast<long>(flatten(digits, rest)), 0) += x;
  }
  if (p <= 0.0)
    throw ModelError(ErrorKind::ZeroSupport, "value " + std::to_string(value) + " has probability 0",
                     static_cast<double>(value));
  out.m /= p;
  return out;
}

namespace {

struct Split {
  Dims x, y;
  std::size_t nx, ny;
};

Split split_joint(const StochMatrix& joint, std::size_t x_factors) {
  require_state(joint);
  if (x_factors > joint.cod.size()) fail(ErrorKind::IndexOutOfRange, "too many X factors");
  Split s;
  s.x.assign(joint.cod.begin(), joint.cod.begin() + static_cast<long>(x_factors));
  s.y.assign(joint.cod.begin() + static_cast<long>(x_factors), joint.cod.end());
  s.nx = product(s.x);
  s.ny = product(s.y);
  return s;
}

// Row-major layout puts X first: flat index = x * ny + y.
double at(const StochMatrix& joint, const Split& s, std::size_t x, std::size_t y) {
  return joint.m(static_cast<long>(x * s.ny + y), 0);
}

void check_evidence(const StochMatrix& evidence, const Split& s) {
  require_state(evidence);
  if (evidence.cod != s.x) fail(ErrorKind::DimensionMismatch, "evidence is not a state of X");
  if (std::abs(evidence.m.sum() - 1.0) > 1e-12 || (evidence.m.array() < 0).any())
    fail(ErrorKind::InvalidArgument, "evidence is not a normalised distribution");
}

}  // namespace

ConditionalChannel conditional_channel(const StochMatrix& joint, std::size_t x_factors) {
  Split s = split_joint(joint, x_factors);
  ConditionalChannel c{StochMatrix{s.x, s.y, Eigen::MatrixXd::Zero(static_cast<long>(s.ny), static_cast<long>(s.nx))},
                       std::vector<bool>(s.nx, false)};
  for (std::size_t x = 0; x < s.nx; ++x) {
    double px = 0.0;
    for (std::size_t y = 0; y < s.ny; ++y) px += at(joint, s, x, y);
    if (px <= 0.0) continue;
    c.defined[x] = true;
    for (std::size_t y = 0; y < s.ny; ++y)
      c.channel.m(static_cast<long>(y), static_cast<long>(x)) = at(joint, s, x, y) / px;
  }
  return c;
}

StochMatrix jeffrey_update(const StochMatrix& joint, std::size_t x_factors, const StochMatrix& evidence) {
  Split s = split_joint(joint, x_factors);
  check_evidence(evidence, s);
  ConditionalChannel c = conditional_channel(joint, x_factors);
  StochMatrix out{{}, s.y, Eigen::MatrixXd::Zero(static_cast<long>(s.ny), 1)};
  for (std::size_t x = 0; x < s.nx; ++x) {
    double e = evidence.m(static_cast<long>(x), 0);
    if (e == 0.0) continue;
    if (!c.defined[x])
      throw ModelError(ErrorKind::ZeroSupport, "evidence on an X value with probability 0",
                       static_cast<double>(x));
    out.m += e * c.channel.m.col(static_cast<long>(x));
  }
  return out;
}

StochMatrix pearl_update(const StochMatrix& joint, std::size_t x_factors, const StochMatrix& evidence) {
  Split s = split_joint(joint, x_factors);
  check_evidence(evidence, s);
  StochMatrix out{{}, s.y, Eigen::MatrixXd::Zero(static_cast<long>(s.ny), 1)};
  for (std::size_t x = 0; x < s.nx; ++x)
    for (std::size_t y = 0; y < s.ny; ++y)
      out.m(static_cast<long>(y), 0) += at(joint, s, x, y) * evidence.m(static_cast<long>(x), 0);
  double z = out.m.sum();
  if (z <= 0.0) fail(ErrorKind::ZeroSupport, "evidence has zero likelihood under the joint");
  out.m /= z;
  return out;
}

FCM make_fcm(const OpenCausalModel& m, const std::vector<std::string>& exogenous) {
  if (m.binding.backend != Backend::FinFn && m.binding.backend != Backend::Stoch)
    fail(ErrorKind::UnsupportedBackend, "functional causal models need a finite classical backend");
  if (!m.network.inputs.empty())
    fail(ErrorKind::InvalidArgument, "a functional causal model must have no open inputs");
  const auto& parents = m.network.parents_of;
  std::set<std::string> exo(exogenous.begin(), exogenous.end());
  for (const auto& u : exogenous) {
    auto it = parents.find(u);
    if (it == parents.end()) fail(ErrorKind::NotAVariable, "'" + u + "' has no mechanism");
    if (!it->second.empty()) fail(ErrorKind::InvalidArgument, "exogenous '" + u + "' has parents");
    std::size_t children = 0;
    for (const auto& [child, ps] : parents)
      if (std::find(ps.begin(), ps.end(), u) != ps.end()) {
        if (exo.count(child)) fail(ErrorKind::InvalidArgument, "'" + u + "' feeds an exogenous variable");
        ++children;
      }
    if (children != 1)
      fail(ErrorKind::InvalidArgument, "exogenous '" + u + "' must feed exactly one variable");
  }
  FCM f{m, exogenous, {}};
  // Topological order of the endogenous variables.
  std::set<std::string> placed(exo);
  while (true) {
    bool progress = false;
    for (const auto& [v, ps] : parents) {
      if (placed.count(v)) continue;
      if (!std::all_of(ps.begin(), ps.end(), [&](const std::string& p) { return placed.count(p) > 0; }))
        continue;
      const Box& box = *std::find_if(m.network.diagram.boxes().begin(), m.network.diagram.boxes().end(),
                                     [&](const Box& b) { return b.id == m.network.mechanism_of.at(v); });
      if (!m.binding.sig->generator(box.gen).deterministic)
        fail(ErrorKind::NotDeterministic, "mechanism of '" + v + "' is not deterministic");
      f.endogenous.push_back(v);
      placed.insert(v);
      progress = true;
    }
    if (!progress) break;
  }
  return f;
}

CounterfactualResult counterfactual_query(const FCM& f, const WorldSpec& spec) {
  const auto& worlds = spec.worlds;
  if (worlds.empty()) fail(ErrorKind::InvalidWorldSpec, "no worlds");
  if (std::none_of(worlds.begin(), worlds.end(), [](const World& w) { return !w.query.empty(); }))
    fail(ErrorKind::InvalidWorldSpec, "no world is queried");
  ModelBinding base = as_stochastic(f.base.binding);
  std::set<std::string> endo(f.endogenous.begin(), f.endogenous.end());
  auto check_var = [&](const std::string& v, const char* what) {
    if (!endo.count(v)) fail(ErrorKind::InvalidWorldSpec, std::string(what) + " '" + v + "' is not endogenous");
  };
  auto check_label = [&](const std::string& v, const std::string& label) {
    if (!base.object(v).index_of(label))
      fail(ErrorKind::InvalidWorldSpec, "'" + label + "' is not a value of " + v);
  };
  for (const World& w : worlds) {
    for (const auto& [v, l] : w.intervene) check_var(v, "intervened"), check_label(v, l);
    for (const auto& [v, l] : w.observe) check_var(v, "observed"), check_label(v, l);
    for (const auto& v : w.query) check_var(v, "queried");
    for (const auto& v : w.marginalize) {
      if (!base.sig->has_variable(v) || !f.base.network.parents_of.count(v))
        fail(ErrorKind::InvalidWorldSpec, "marginalized '" + v + "' is not a model variable");
      if (w.observe.count(v) || std::find(w.query.begin(), w.query.end(), v) != w.query.end())
        fail(ErrorKind::InvalidWorldSpec, "'" + v + "' is both marginalized and used");
    }
  }

  std::vector<Generator> new_gens;
  std::map<std::string, MorphSem> new_sems;
  std::vector<std::map<std::string, std::string>> do_gen(worlds.size());
  for (std::size_t j = 0; j < worlds.size(); ++j)
    for (const auto& [v, l] : worlds[j].intervene)
      do_gen[j][v] = sharp_state_for(base, v, l, new_gens, new_sems);
  ModelBinding b = new_gens.empty() ? base : extend_binding(base, {}, {}, new_gens, new_sems);

  const auto& parents = f.base.network.parents_of;
  auto mech_gen = [&](const std::string& v) {
    const Diagram& d = f.base.network.diagram;
    return d.boxes()[*d.find_box(f.base.network.mechanism_of.at(v))].gen;
  };
  // How many times each variable's value is consumed in each world.
  std::vector<std::map<std::string, std::size_t>> uses(worlds.size());
  for (std::size_t j = 0; j < worlds.size(); ++j) {
    for (const auto& x : f.endogenous)
      if (!worlds[j].intervene.count(x))
        for (const auto& p : parents.at(x)) ++uses[j][p];
    for (const auto& [v, l] : worlds[j].observe) ++uses[j][v];
    for (const auto& v : worlds[j].query) ++uses[j][v];
  }

  DiagramBuilder db(b.sig);
  using Handle = DiagramBuilder::Handle;
  std::vector<std::map<std::string, std::vector<Handle>>> value(worlds.size());
  auto spread = [&](std::size_t j, const std::string& v, Handle h) {
    value[j][v] = db.copy(h, uses[j][v]);
  };
  auto take = [&](std::size_t j, const std::string& v) {
    auto& hs = value[j].at(v);
    Handle h = hs.front();
    hs.erase(hs.begin());
    return h;
  };
  for (const auto& u : f.exogenous) {
    Handle h = db.add1(mech_gen(u), {});
    auto per_world = db.copy(h, worlds.size());
    for (std::size_t j = 0; j < worlds.size(); ++j) spread(j, u, per_world[j]);
  }
  for (std::size_t j = 0; j < worlds.size(); ++j) {
    for (const auto& x : f.endogenous) {
      Handle h;
      if (auto it = do_gen[j].find(x); it != do_gen[j].end()) {
        h = db.add1(it->second, {});
      } else {
        std::vector<Handle> args;
        for (const auto& p : parents.at(x)) args.push_back(take(j, p));
        h = db.add1(mech_gen(x), args);
      }
      spread(j, x, h);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> observed;  // output position, value index
  std::vector<std::string> factors;
  std::size_t pos = 0;
  for (std::size_t j = 0; j < worlds.size(); ++j) {
    for (const auto& [v, l] : worlds[j].observe) {
      db.output(take(j, v));
      observed.emplace_back(pos++, *b.object(v).index_of(l));
    }
    for (const auto& v : worlds[j].query) {
      db.output(take(j, v));
      factors.push_back("w" + std::to_string(j) + ":" + v);
      ++pos;
    }
  }
  Diagram d = db.build();
  StochMatrix state = std::get<StochMatrix>(eval_diagram(b, d));
  for (auto it = observed.rbegin(); it != observed.rend(); ++it) {
    try {
      state = condition_sharp(state, it->first, it->second);
    } catch (const ModelError& e) {
      if (e.kind() != ErrorKind::ZeroSupport) throw;
      fail(ErrorKind::ZeroSupportObservation, "the observations have probability 0");
    }
  }
  return CounterfactualResult{state, factors, d, b};
}

}  // namespace compmodel
