#include "compmodel/signature.hpp"

#include <set>

#include "compmodel/diagram.hpp"
#include "compmodel/error.hpp"

namespace compmodel {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Monoidal: return "monoidal";
    case Language::Discard: return "discard";
    case Language::CD: return "cd";
  }
  return "cd";
}

Language language_from_string(std::string_view s) {
  if (s == "monoidal") return Language::Monoidal;
  if (s == "discard") return Language::Discard;
  if (s == "cd") return Language::CD;
  fail(ErrorKind::ParseError, "unknown language '" + std::string(s) + "'");
}

Signature::Signature() = default;
Signature::Signature(const Signature&) = default;
Signature::Signature(Signature&&) noexcept = default;
Signature& Signature::operator=(const Signature&) = default;
Signature& Signature::operator=(Signature&&) noexcept = default;
Signature::~Signature() = default;

bool Signature::has_variable(std::string_view v) const { return var_index_.count(v) != 0; }

const Generator* Signature::find_generator(std::string_view name) const {
  auto it = gen_index_.find(name);
  return it == gen_index_.end() ? nullptr : &generators_[it->second];
}

const Generator& Signature::generator(std::string_view name) const {
  const Generator* g = find_generator(name);
  if (!g) fail(ErrorKind::UnresolvedReference, "generator '" + std::string(name) + "'");
  return *g;
}

SignaturePtr build_signature(std::vector<std::string> variables, std::vector<Generator> generators,
                             std::vector<Equation> equations, Language language) {
  auto sig = std::make_shared<Signature>();
  sig->language_ = language;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (!sig->var_index_.emplace(variables[i], i).second)
      fail(ErrorKind::DuplicateName, "variable '" + variables[i] + "'");
  }
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const Generator& g = generators[i];
    if (!sig->gen_index_.emplace(g.name, i).second)
      fail(ErrorKind::DuplicateName, "generator '" + g.name + "'");
    for (const auto* side : {&g.dom, &g.cod})
      for (const auto& v : *side)
        if (!sig->var_index_.count(v))
          fail(ErrorKind::UnresolvedReference,
               "generator '" + g.name + "' uses unknown variable '" + v + "'");
    if (g.sharp && !g.dom.empty())
      fail(ErrorKind::FlagContradiction, "sharp state '" + g.name + "' has inputs");
    if (g.sharp && !g.deterministic)
      fail(ErrorKind::FlagContradiction, "sharp state '" + g.name + "' is not deterministic");
    if (g.deterministic && !g.channel)
      fail(ErrorKind::FlagContradiction, "deterministic '" + g.name + "' is not a channel");
  }
  sig->variables_ = std::move(variables);
  sig->generators_ = std::move(generators);

  for (std::size_t i = 0; i < equations.size(); ++i) {
    const Equation& eq = equations[i];
    for (const Diagram* d : {&eq.lhs, &eq.rhs}) {
      if (!d->signature() || !vocabulary_includes(*sig, *d->signature()))
        fail(ErrorKind::UnresolvedReference,
             "equation " + std::to_string(i) + " uses generators outside the signature");
      auto violations = validate(retarget(*d, sig));
      if (!violations.empty())
        fail(ErrorKind::InvalidDiagram,
             "equation " + std::to_string(i) + ": " + violations.front().detail);
    }
    if (eq.lhs.inputs() != eq.rhs.inputs() || eq.lhs.outputs() != eq.rhs.outputs())
      fail(ErrorKind::EquationInterfaceMismatch, "equation " + std::to_string(i));
  }
  sig->equations_ = std::move(equations);
  return sig;
}

SignaturePtr extend_signature(const SignaturePtr& base, std::vector<std::string> variables,
                              std::vector<Generator> generators) {
  std::vector<std::string> vars = base->variables();
  vars.insert(vars.end(), variables.begin(), variables.end());
  std::vector<Generator> gens = base->generators();
  gens.insert(gens.end(), generators.begin(), generators.end());
  return build_signature(std::move(vars), std::move(gens), base->equations(), base->language());
}

SignaturePtr strip_equations(const SignaturePtr& sig) {
  return build_signature(sig->variables(), sig->generators(), {}, sig->language());
}

bool vocabulary_includes(const Signature& big, const Signature& small) {
  if (&big == &small) return true;
  for (const auto& v : small.variables())
    if (!big.has_variable(v)) return false;
  for (const auto& g : small.generators()) {
    const Generator* h = big.find_generator(g.name);
    if (!h || !(*h == g)) return false;
  }
  return true;
}

bool same_vocabulary(const Signature& a, const Signature& b) {
  if (&a == &b) return true;
  return a.language() == b.language() && a.variables().size() == b.variables().size() &&
         a.generators().size() == b.generators().size() && vocabulary_includes(a, b);
}

SignatureMap make_signature_map(SignaturePtr source, SignaturePtr target,
                                std::map<std::string, std::string> var_map,
                                std::map<std::string, std::string> gen_map) {
  for (const auto& [from, to] : var_map) {
    if (!source->has_variable(from))
      fail(ErrorKind::UnresolvedReference, "map source variable '" + from + "'");
    if (!target->has_variable(to))
      fail(ErrorKind::UnresolvedReference, "map target variable '" + to + "'");
  }
  for (const auto& [from, to] : gen_map) {
    const Generator& g = source->generator(from);
    const Generator& h = target->generator(to);
    auto mapped = [&](const std::vector<std::string>& vs) {
      std::vector<std::string> out;
      for (const auto& v : vs) {
        auto it = var_map.find(v);
        if (it == var_map.end())
          fail(ErrorKind::UndefinedOnVariable,
               "map defined on '" + from + "' but not on its variable '" + v + "'");
        out.push_back(it->second);
      }
      return out;
    };
    if (mapped(g.dom) != h.dom || mapped(g.cod) != h.cod)
      fail(ErrorKind::TypeMismatch, "'" + from + "' and '" + to + "' have different types");
  }
  SignatureMap m{std::move(source), std::move(target), std::move(var_map), std::move(gen_map)};
  m.total = m.var_map.size() == m.source->variables().size() &&
            m.gen_map.size() == m.source->generators().size();
  return m;
}

SignatureMap identity_map(const SignaturePtr& sig) {
  std::map<std::string, std::string> vars, gens;
  for (const auto& v : sig->variables()) vars[v] = v;
  for (const auto& g : sig->generators()) gens[g.name] = g.name;
  return make_signature_map(sig, sig, std::move(vars), std::move(gens));
}

Diagram apply_map(const SignatureMap& m, const Diagram& d) {
  auto var = [&](const std::string& v) -> std::string {
    auto it = m.var_map.find(v);
    if (it == m.var_map.end()) fail(ErrorKind::UndefinedOnVariable, v);
    return it->second;
  };
  std::vector<Box> boxes = d.boxes();
  for (auto& b : boxes) {
    if (b.kind == BoxKind::Gen) {
      auto it = m.gen_map.find(b.gen);
      if (it == m.gen_map.end()) fail(ErrorKind::UndefinedOnGenerator, b.gen);
      b.gen = it->second;
    } else {
      b.var = var(b.var);
      if (b.kind == BoxKind::Swap) b.var2 = var(b.var2);
    }
  }
  std::vector<Wire> wires = d.wires();
  for (auto& w : wires) w.var = var(w.var);
  std::vector<std::string> ins, outs;
  for (const auto& v : d.inputs()) ins.push_back(var(v));
  for (const auto& v : d.outputs()) outs.push_back(var(v));
  return Diagram(m.target, std::move(boxes), std::move(wires), std::move(ins), std::move(outs));
}

SignatureMap compose_maps(const SignatureMap& first, const SignatureMap& second) {
  if (!same_vocabulary(*first.target, *second.source))
    fail(ErrorKind::TargetSourceMismatch, "first map's target is not the second map's source");
  std::map<std::string, std::string> vars, gens;
  for (const auto& [a, b] : first.var_map)
    if (auto it = second.var_map.find(b); it != second.var_map.end()) vars[a] = it->second;
  for (const auto& [a, b] : first.gen_map)
    if (auto it = second.gen_map.find(b); it != second.gen_map.end()) gens[a] = it->second;
  // The composite may now be undefined on a variable of a generator it keeps.
  for (auto it = gens.begin(); it != gens.end();) {
    const Generator& g = first.source->generator(it->first);
    bool ok = true;
    for (const auto* side : {&g.dom, &g.cod})
      for (const auto& v : *side) ok = ok && vars.count(v);
    it = ok ? std::next(it) : gens.erase(it);
  }
  return make_signature_map(first.source, second.target, std::move(vars), std::move(gens));
}

}  // namespace compmodel
