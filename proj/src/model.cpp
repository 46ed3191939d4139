#include "compmodel/model.hpp"

#include <algorithm>

#include "compmodel/error.hpp"

namespace compmodel {

const ObjectSem& ModelBinding::object(const std::string& var) const {
  auto it = objects.find(var);
  if (it == objects.end()) fail(ErrorKind::UndefinedOnVariable, "no object bound to '" + var + "'");
  return it->second;
}

const MorphSem& ModelBinding::morphism(const std::string& gen) const {
  auto it = morphisms.find(gen);
  if (it == morphisms.end()) fail(ErrorKind::UnboundGenerator, gen);
  return it->second;
}

Dims ModelBinding::dims_of(const std::vector<std::string>& vars) const {
  Dims out;
  for (const auto& v : vars) out.push_back(object(v).size());
  return out;
}

const Diagram& ModelBinding::diagram(const std::string& name) const {
  auto it = distinguished.find(name);
  if (it == distinguished.end()) fail(ErrorKind::UnresolvedReference, "diagram '" + name + "'");
  return it->second;
}

namespace {

void check_morphism_shape(const ModelBinding& b, const Generator& g, const MorphSem& m) {
  if (backend_of(m) != b.backend)
    fail(ErrorKind::TypeMismatch, "'" + g.name + "' is bound to a morphism of another backend");
  if (dom_of(m) != b.dims_of(g.dom) || cod_of(m) != b.dims_of(g.cod))
    fail(ErrorKind::TypeMismatch, "'" + g.name + "' semantics has the wrong dimensions");
  const std::size_t rows = product(cod_of(m)), cols = product(dom_of(m));
  switch (m.index()) {
    case 0: {
      const auto& t = std::get<FnTable>(m);
      if (t.map.size() != cols) fail(ErrorKind::TypeMismatch, "'" + g.name + "' table is not total");
      for (auto v : t.map)
        if (v >= rows) fail(ErrorKind::TypeMismatch, "'" + g.name + "' table value out of range");
      break;
    }
    case 1: {
      const auto& s = std::get<StochMatrix>(m);
      if (static_cast<std::size_t>(s.m.rows()) != rows || static_cast<std::size_t>(s.m.cols()) != cols)
        fail(ErrorKind::TypeMismatch, "'" + g.name + "' matrix shape");
      if ((s.m.array() < 0.0).any() || !s.m.allFinite())
        fail(ErrorKind::TypeMismatch, "'" + g.name + "' matrix has negative entries");
      break;
    }
    case 2: {
      const auto& k = std::get<KrausMap>(m);
      if (k.ops.empty()) fail(ErrorKind::TypeMismatch, "'" + g.name + "' has no Kraus operators");
      for (const auto& op : k.ops)
        if (static_cast<std::size_t>(op.rows()) != rows || static_cast<std::size_t>(op.cols()) != cols)
          fail(ErrorKind::TypeMismatch, "'" + g.name + "' Kraus operator shape");
      break;
    }
    default:
      try {
        check_real_expr(std::get<RealExpr>(m));
      } catch (const ModelError& e) {
        fail(ErrorKind::TypeMismatch, "'" + g.name + "': " + e.what());
      }
  }
}

void check_flags(const Generator& g, const MorphSem& m) {
  auto violation = [&](const char* flag) {
    fail(ErrorKind::FlagViolation, "'" + g.name + "' is flagged " + flag + " but is not");
  };
  if (g.channel && !is_channel(m)) violation("channel");
  if (g.deterministic) {
    if (backend_of(m) == Backend::Quant) {
      // No copy in quantum semantics; deterministic means a pure channel.
      if (compress(std::get<KrausMap>(m)).ops.size() != 1) violation("deterministic");
    } else if (!is_deterministic(m)) {
      violation("deterministic");
    }
  }
  if (g.sharp && !g.dom.empty()) violation("sharp");
}

}  // namespace

ModelBinding bind_model(SignaturePtr sig, Backend backend, std::map<std::string, ObjectSem> objects,
                        std::map<std::string, MorphSem> morphisms,
                        std::map<std::string, Diagram> distinguished, BindOptions options) {
  if (backend == Backend::Quant && sig->language() == Language::CD)
    fail(ErrorKind::UnsupportedLanguage, "quantum backend cannot bind a cd signature");
  ModelBinding b{sig, backend, std::move(objects), std::move(morphisms), {}};
  for (const auto& v : sig->variables()) {
    const ObjectSem& o = b.object(v);
    if (o.kind != object_kind_for(backend))
      fail(ErrorKind::TypeMismatch, "variable '" + v + "' bound to an object of another backend");
  }
  for (const auto& g : sig->generators()) {
    const MorphSem& m = b.morphism(g.name);
    check_morphism_shape(b, g, m);
    check_flags(g, m);
  }
  for (auto& [name, d] : distinguished) {
    Diagram r = retarget(d, sig);
    require_valid(r);
    b.distinguished.emplace(name, std::move(r));
  }
  if (options.check_equations) {
    auto bad = check_equations(b);
    if (!bad.empty())
      throw ModelError(ErrorKind::EquationViolation,
                       "equation " + std::to_string(bad.front().index) + " off by " +
                           std::to_string(bad.front().distance),
                       bad.front().distance);
  }
  return b;
}

ModelBinding extend_binding(const ModelBinding& b, std::vector<std::string> new_vars,
                            std::map<std::string, ObjectSem> new_objects,
                            std::vector<Generator> new_gens,
                            std::map<std::string, MorphSem> new_morphisms) {
  SignaturePtr sig = extend_signature(b.sig, std::move(new_vars), std::move(new_gens));
  auto objects = b.objects;
  objects.insert(new_objects.begin(), new_objects.end());
  auto morphisms = b.morphisms;
  morphisms.insert(new_morphisms.begin(), new_morphisms.end());
  return bind_model(sig, b.backend, std::move(objects), std::move(morphisms), b.distinguished,
                    BindOptions{false});
}

MorphSem eval_diagram(const ModelBinding& binding, const Diagram& d) {
  require_valid(d);
  const Backend be = binding.backend;
  const Signature& sig = *d.signature();
  Wiring w = make_wiring(d);
  std::vector<std::size_t> order = topological_order(d, w);

  MorphSem m = identity_sem(be, binding.dims_of(d.inputs()));
  std::vector<std::size_t> live = w.input;  // wires currently carried, in factor order

  auto bring_front = [&](const std::vector<std::size_t>& wanted) {
    std::vector<std::size_t> perm;
    std::vector<bool> taken(live.size(), false);
    for (auto wi : wanted) {
      auto it = std::find(live.begin(), live.end(), wi);
      perm.push_back(static_cast<std::size_t>(it - live.begin()));
      taken[perm.back()] = true;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < live.size(); ++i)
      if (!taken[i]) {
        perm.push_back(i);
        rest.push_back(live[i]);
      }
    m = permute_cod(m, perm);
    return rest;
  };

  for (std::size_t b : order) {
    const Box& box = d.boxes()[b];
    std::vector<std::size_t> rest = bring_front(w.in[b]);
    switch (box.kind) {
      case BoxKind::Gen: {
        const MorphSem& g = binding.morphism(box.gen);
        const Generator& gen = sig.generator(box.gen);
        if (dom_of(g) != binding.dims_of(gen.dom) || cod_of(g) != binding.dims_of(gen.cod))
          fail(ErrorKind::DimensionMismatch, "generator '" + box.gen + "'");
        m = apply_front(g, m);
        break;
      }
      case BoxKind::Copy:
        m = apply_front(copy_sem(be, binding.object(box.var).size(), box.fanout), m);
        break;
      case BoxKind::Discard:
        m = apply_front(discard_sem(be, {binding.object(box.var).size()}), m);
        break;
      case BoxKind::Swap:
        m = apply_front(swap_sem(be, binding.object(box.var).size(), binding.object(box.var2).size()), m);
        break;
    }
    live = w.out[b];
    live.insert(live.end(), rest.begin(), rest.end());
  }
  bring_front(w.output);
  return m;
}

std::vector<EquationCheck> equation_distances(const ModelBinding& b) {
  std::vector<EquationCheck> out;
  const auto& eqs = b.sig->equations();
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    MorphSem l = eval_diagram(b, retarget(eqs[i].lhs, b.sig));
    MorphSem r = eval_diagram(b, retarget(eqs[i].rhs, b.sig));
    out.push_back({i, norm_dist(l, r)});
  }
  return out;
}

std::vector<EquationCheck> check_equations(const ModelBinding& b) {
  std::vector<EquationCheck> out;
  for (const auto& e : equation_distances(b))
    if (e.distance > backend_tolerance(b.backend)) out.push_back(e);
  return out;
}

std::vector<EquationCheck> check_map_equations(const SignatureMap& m, const ModelBinding& target) {
  std::vector<EquationCheck> out;
  const auto& eqs = m.source->equations();
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    Diagram l = retarget(apply_map(m, retarget(eqs[i].lhs, m.source)), target.sig);
    Diagram r = retarget(apply_map(m, retarget(eqs[i].rhs, m.source)), target.sig);
    double dist = norm_dist(eval_diagram(target, l), eval_diagram(target, r));
    if (dist > backend_tolerance(target.backend)) out.push_back({i, dist});
  }
  return out;
}

bool check_refinement(const BoundModelDiagram& coarse, const BoundModelDiagram& fine,
                      const SignatureMap& m) {
  if (coarse.binding.backend != fine.binding.backend)
    fail(ErrorKind::BoundaryMismatch, "refinement across different backends");
  auto mapped = [&](const std::vector<std::string>& vars, const std::vector<std::string>& expect) {
    if (vars.size() != expect.size()) fail(ErrorKind::BoundaryMismatch, "boundary length differs");
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto it = m.var_map.find(vars[i]);
      if (it == m.var_map.end() || it->second != expect[i])
        fail(ErrorKind::BoundaryMismatch, "boundary variable '" + vars[i] + "' not identified");
      if (!(coarse.binding.object(vars[i]) == fine.binding.object(expect[i])))
        fail(ErrorKind::BoundaryMismatch, "boundary variable '" + vars[i] + "' bound differently");
    }
  };
  mapped(coarse.diagram.inputs(), fine.diagram.inputs());
  mapped(coarse.diagram.outputs(), fine.diagram.outputs());
  MorphSem a = eval_diagram(coarse.binding, coarse.diagram);
  MorphSem b = eval_diagram(fine.binding, fine.diagram);
  return norm_dist(a, b) <= backend_tolerance(fine.binding.backend);
}

ModelBinding as_stochastic(const ModelBinding& b) {
  if (b.backend == Backend::Stoch) return b;
  if (b.backend != Backend::FinFn)
    fail(ErrorKind::UnsupportedBackend, "only finite function bindings convert to matrices");
  std::map<std::string, ObjectSem> objects;
  for (const auto& [v, o] : b.objects) objects[v] = ObjectSem::prob_space(o.elements);
  std::map<std::string, MorphSem> morphisms;
  for (const auto& [g, m] : b.morphisms) morphisms[g] = to_matrix(std::get<FnTable>(m));
  return bind_model(b.sig, Backend::Stoch, std::move(objects), std::move(morphisms), b.distinguished,
                    BindOptions{false});
}

const Generator* find_sharp_state(const ModelBinding& b, const std::string& var,
                                  const std::string& label) {
  auto idx = b.object(var).index_of(label);
  if (!idx) return nullptr;
  MorphSem point = point_state(b.backend, b.object(var).size(), *idx);
  for (const auto& g : b.sig->generators()) {
    if (!g.sharp || g.cod != std::vector<std::string>{var}) continue;
    if (norm_dist(b.morphism(g.name), point) <= backend_tolerance(b.backend)) return &g;
  }
  return nullptr;
}

}  // namespace compmodel
