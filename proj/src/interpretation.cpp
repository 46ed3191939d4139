#include "compmodel/interpretation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "compmodel/error.hpp"

namespace compmodel {

namespace {

std::string num(double x, int digits) {
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  std::string s = buf;
  return s == "-0" ? "0" : s;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::string dims_str(const Dims& d) {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) out += (i ? "x" : "") + std::to_string(d[i]);
  return out;
}

std::string payload(const MorphSem& m) {
  std::string out = std::string(to_string(backend_of(m))) + "|" + dims_str(dom_of(m)) + "->" +
                    dims_str(cod_of(m)) + "|";
  switch (m.index()) {
    case 0:
      for (auto v : std::get<FnTable>(m).map) out += std::to_string(v) + ";";
      break;
    case 1: {
      const auto& s = std::get<StochMatrix>(m).m;
      for (long r = 0; r < s.rows(); ++r)
        for (long c = 0; c < s.cols(); ++c) out += num(s(r, c), 12) + ";";
      break;
    }
    case 2: {
      Eigen::MatrixXcd ch = choi(std::get<KrausMap>(m));
      for (long r = 0; r < ch.rows(); ++r)
        for (long c = 0; c < ch.cols(); ++c)
          out += num(ch(r, c).real(), 9) + "," + num(ch(r, c).imag(), 9) + ";";
      break;
    }
    default: {
      // Sampled outputs at fixed points.
      const auto& e = std::get<RealExpr>(m);
      std::mt19937_64 rng(0x1ab3);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const int samples = e.dom.empty() ? 1 : 8;
      for (int s = 0; s < samples; ++s) {
        std::vector<Eigen::VectorXd> in;
        for (auto d : e.dom) {
          Eigen::VectorXd v(static_cast<long>(d));
          for (long k = 0; k < v.size(); ++k) v(k) = u(rng);
          in.push_back(v);
        }
        for (const auto& v : eval_real(e, in))
          for (long k = 0; k < v.size(); ++k) out += num(v(k), 9) + ";";
        out += "/";
      }
    }
  }
  return out;
}

std::optional<std::string> rule_term(const Interpretation& i, const std::string& var,
                                     const Eigen::VectorXd& v) {
  std::string out;
  for (long k = 0; k < v.size(); ++k) {
    std::optional<std::string> hit;
    for (const auto& r : i.rules) {
      if (r.var != var || r.component != static_cast<std::size_t>(k)) continue;
      if (r.leq && !(v(k) <= *r.leq)) continue;
      if (r.gt && !(v(k) > *r.gt)) continue;
      hit = r.term;
      break;
    }
    if (!hit) return std::nullopt;
    out += (k ? ", " : "") + *hit;
  }
  return out;
}

bool rules_cover(const Interpretation& i, const std::string& var, std::size_t dim) {
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& r : i.rules)
      if (r.var == var && r.component == k) iv.emplace_back(r.gt ? *r.gt : -inf, r.leq ? *r.leq : inf);
    std::sort(iv.begin(), iv.end());
    if (iv.empty() || iv.front().first != -inf) return false;
    double reach = -inf;
    for (const auto& [lo, hi] : iv) {
      if (lo > reach) return false;
      reach = std::max(reach, hi);
    }
    if (reach != inf) return false;
  }
  return true;
}

}  // namespace

std::string concrete_key(const std::vector<std::string>& dom, const std::vector<std::string>& cod,
                         const MorphSem& sem) {
  return "[" + join(dom) + "]->[" + join(cod) + "]|" + payload(sem);
}

void Interpretation::set_concrete(std::vector<std::string> dom, std::vector<std::string> cod,
                                  MorphSem sem, std::string term) {
  std::string key = concrete_key(dom, cod, sem);
  con[key] = ConcreteEntry{std::move(dom), std::move(cod), std::move(sem), std::move(term)};
}

void Interpretation::set_concrete_for(const std::string& gen, std::string term) {
  const Generator& g = model->sig->generator(gen);
  set_concrete(g.dom, g.cod, model->morphism(gen), std::move(term));
}

void Interpretation::set_concrete_point(const std::string& var, const std::string& label,
                                        std::string term) {
  const ObjectSem& o = model->object(var);
  auto idx = o.index_of(label);
  if (!idx) fail(ErrorKind::UnresolvedReference, "'" + label + "' is not an element of " + var);
  set_concrete({}, {var}, point_state(model->backend, o.size(), *idx), std::move(term));
}

std::optional<std::string> Interpretation::concrete_term(const std::vector<std::string>& dom,
                                                         const std::vector<std::string>& cod,
                                                         const MorphSem& sem) const {
  auto it = con.find(concrete_key(dom, cod, sem));
  if (it != con.end()) return it->second.term;
  if (model->backend == Backend::RealVec && dom.empty() && cod.size() == 1) {
    auto v = eval_real(std::get<RealExpr>(sem), {});
    return rule_term(*this, cod[0], v[0]);
  }
  return std::nullopt;
}

std::optional<std::string> Interpretation::concrete_term_for(const std::string& gen) const {
  const Generator* g = model->sig->find_generator(gen);
  auto m = model->morphisms.find(gen);
  if (!g || m == model->morphisms.end()) return std::nullopt;
  return concrete_term(g->dom, g->cod, m->second);
}

Interpretation make_interpretation(std::shared_ptr<const ModelBinding> model) {
  Interpretation i;
  i.model = std::move(model);
  return i;
}

std::string_view to_string(InterpViolationKind k) {
  switch (k) {
    case InterpViolationKind::CommutativityViolation: return "CommutativityViolation";
    case InterpViolationKind::PartialityViolation: return "PartialityViolation";
    case InterpViolationKind::UnknownTerm: return "UnknownTerm";
  }
  return "?";
}

std::vector<InterpViolation> check_interpretation(const Interpretation& i) {
  std::vector<InterpViolation> out;
  const Signature& sig = *i.model->sig;
  for (const auto& [var, term] : i.abs_var) {
    if (!sig.has_variable(var))
      out.push_back({InterpViolationKind::UnknownTerm, var, "not a variable of the model"});
    else if (i.human.closed && !i.human.object_terms.count(term))
      out.push_back({InterpViolationKind::UnknownTerm, var, "'" + term + "' is not an object term"});
  }
  for (const auto& [gen, term] : i.abs_gen) {
    const Generator* g = sig.find_generator(gen);
    if (!g) {
      out.push_back({InterpViolationKind::UnknownTerm, gen, "not a generator of the model"});
      continue;
    }
    if (i.human.closed) {
      auto it = i.human.morphism_terms.find(term);
      if (it == i.human.morphism_terms.end()) {
        out.push_back({InterpViolationKind::UnknownTerm, gen, "'" + term + "' is not a morphism term"});
      } else {
        // Declared term interfaces must agree with the abstract images of the variables.
        auto image = [&](const std::vector<std::string>& vs) {
          std::vector<std::string> r;
          for (const auto& v : vs) {
            auto a = i.abs_var.find(v);
            r.push_back(a == i.abs_var.end() ? "?" : a->second);
          }
          return r;
        };
        const MorphismTerm& mt = it->second;
        if ((!mt.dom.empty() || !mt.cod.empty()) && (image(g->dom) != mt.dom || image(g->cod) != mt.cod))
          out.push_back({InterpViolationKind::UnknownTerm, gen, "'" + term + "' has another interface"});
      }
    }
    if (auto c = i.concrete_term_for(gen); c && *c != term)
      out.push_back({InterpViolationKind::CommutativityViolation, gen,
                     "abstract '" + term + "' but concrete '" + *c + "'"});
  }
  for (const auto& [key, entry] : i.con) {
    for (const auto* side : {&entry.dom, &entry.cod})
      for (const auto& v : *side)
        if (!i.abs_var.count(v))
          out.push_back({InterpViolationKind::PartialityViolation, entry.term,
                         "concrete entry on variable '" + v + "' without an abstract term"});
    if (i.human.closed && !i.human.morphism_terms.count(entry.term))
      out.push_back({InterpViolationKind::UnknownTerm, entry.term, "concrete term not in vocabulary"});
  }
  return out;
}

Completeness completeness(const Interpretation& i) {
  Completeness c;
  const ModelBinding& b = *i.model;
  for (const auto& v : b.sig->variables())
    if (!i.abs_var.count(v)) c.uninterpreted_variables.push_back(v);
  for (const auto& g : b.sig->generators())
    if (!i.abs_gen.count(g.name)) c.uninterpreted_generators.push_back(g.name);
  c.complete = c.uninterpreted_variables.empty() && c.uninterpreted_generators.empty();
  for (const auto& v : b.sig->variables()) {
    const ObjectSem& o = b.object(v);
    if (o.kind == ObjectSem::Kind::RealSpace) {
      if (!rules_cover(i, v, o.dim)) c.uninterpreted_values.push_back(v);
      continue;
    }
    for (std::size_t k = 0; k < o.size(); ++k) {
      MorphSem point = point_state(b.backend, o.size(), k);
      if (!i.concrete_term({}, {v}, point)) {
        std::string label = o.finite() ? o.elements[k] : std::to_string(k);
        c.uninterpreted_values.push_back(v + "=" + label);
      }
    }
  }
  c.complete_concrete = c.complete && c.uninterpreted_values.empty();
  return c;
}

std::optional<std::string> box_term(const Interpretation& i, const Diagram& d, std::size_t box) {
  const Box& bx = d.boxes()[box];
  switch (bx.kind) {
    case BoxKind::Copy: return "copy";
    case BoxKind::Discard: return "discard";
    case BoxKind::Swap: return "swap";
    case BoxKind::Gen: break;
  }
  const Generator* g = d.signature()->find_generator(bx.gen);
  auto m = i.model->morphisms.find(bx.gen);
  if (!g || m == i.model->morphisms.end()) return std::nullopt;
  return i.concrete_term(g->dom, g->cod, m->second);
}

bool is_interpreted_diagram(const Interpretation& i, const Diagram& d) {
  for (const auto& w : d.wires())
    if (!i.abs_var.count(w.var)) return false;
  for (const auto& v : d.inputs())
    if (!i.abs_var.count(v)) return false;
  for (const auto& v : d.outputs())
    if (!i.abs_var.count(v)) return false;
  for (std::size_t b = 0; b < d.boxes().size(); ++b)
    if (!box_term(i, d, b)) return false;
  return true;
}

std::string describe(const Interpretation& i, const Diagram& d) {
  std::string out;
  for (std::size_t b = 0; b < d.boxes().size(); ++b) {
    const Box& bx = d.boxes()[b];
    std::optional<std::string> term;
    if (bx.kind == BoxKind::Gen) {
      term = box_term(i, d, b);
      if (!term) {
        auto a = i.abs_gen.find(bx.gen);
        if (a != i.abs_gen.end()) term = a->second;
      }
    } else {
      std::string var = bx.var;
      if (auto a = i.abs_var.find(var); a != i.abs_var.end()) var = a->second;
      term = *box_term(i, d, b) + " " + var;
    }
    if (!out.empty()) out += "\n";
    out += bx.id + ": " + (term ? *term : "UNINTERPRETED");
  }
  return out;
}

}  // namespace compmodel
