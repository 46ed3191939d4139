#include "compmodel/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "compmodel/error.hpp"

namespace compmodel {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  fail(ErrorKind::ParseError, (path.empty() ? std::string("<root>") : path) + ": " + msg);
}

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Strict mode: every key must be one of `allowed`.
void fields(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      bad(path, "unknown field '" + k + "'");
}

const Json& need(const Json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(path, "missing field '" + std::string(key) + "'");
  return *it;
}

const Json* maybe(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string str(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

std::size_t count(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    bad(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected true or false");
  return j.get<bool>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

std::vector<std::string> strings(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(str(j[i], at(path, i)));
  return out;
}

std::map<std::string, std::string> string_map(const Json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) out[k] = str(v, at(path, k));
  return out;
}

// Objects in, flat index -> per-factor labels.
std::vector<std::string> labels_of(const std::vector<ObjectSem>& objs, std::size_t flat) {
  Dims dims;
  for (const auto& o : objs) dims.push_back(o.size());
  auto digits = unflatten(flat, dims);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < objs.size(); ++k)
    out.push_back(objs[k].finite() ? objs[k].elements[digits[k]] : std::to_string(digits[k]));
  return out;
}

std::size_t parse_tuple(std::string s, const std::vector<ObjectSem>& objs, const std::string& path) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  else if (objs.size() != 1) bad(path, "'" + s + "' is not a tuple");
  std::vector<std::string> parts;
  if (!s.empty() || !objs.empty()) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) parts.push_back(part);
    if (!s.empty() && s.back() == ',') parts.push_back("");
  }
  if (parts.size() != objs.size())
    bad(path, "'" + s + "' has " + std::to_string(parts.size()) + " components, expected " +
                  std::to_string(objs.size()));
  Dims dims;
  std::vector<std::size_t> digits;
  for (std::size_t k = 0; k < objs.size(); ++k) {
    dims.push_back(objs[k].size());
    std::optional<std::size_t> idx = objs[k].index_of(parts[k]);
    if (!objs[k].finite()) {
      try {
        std::size_t pos = 0;
        unsigned long v = std::stoul(parts[k], &pos);
        if (pos == parts[k].size() && v < objs[k].size()) idx = v;
      } catch (const std::exception&) {
      }
    }
    if (!idx) bad(path, "'" + parts[k] + "' is not an element");
    digits.push_back(*idx);
  }
  return flatten(digits, dims);
}

Dims dims_of(const std::vector<ObjectSem>& objs) {
  Dims d;
  for (const auto& o : objs) d.push_back(o.size());
  return d;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const Json& j, const std::string& path, long rows, long cols) {
  array(j, path);
  if (rows >= 0 && static_cast<long>(j.size()) != rows)
    bad(path, "expected " + std::to_string(rows) + " rows");
  long n = static_cast<long>(j.size());
  long width = cols >= 0 ? cols : (n ? static_cast<long>(array(j[0], at(path, 0)).size()) : 0);
  Eigen::MatrixXd m(n, width);
  for (long r = 0; r < n; ++r) {
    const std::string rp = at(path, static_cast<std::size_t>(r));
    if (static_cast<long>(array(j[r], rp).size()) != width)
      bad(rp, "expected " + std::to_string(width) + " columns");
    for (long c = 0; c < width; ++c) m(r, c) = number(j[r][c], at(rp, static_cast<std::size_t>(c)));
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (long k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

Eigen::VectorXd vector_from(const Json& j, const std::string& path) {
  array(j, path);
  Eigen::VectorXd v(static_cast<long>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<long>(k)) = number(j[k], at(path, k));
  return v;
}

Json endpoint_json(const Diagram& d, const Endpoint& e, bool source) {
  if (e.boundary()) return Json::array({source ? "in" : "out", e.port});
  return Json::array({d.boxes()[e.box].id, e.port});
}

Endpoint endpoint_from(const Json& j, const std::string& path, const std::map<std::string, std::size_t>& ids,
                       bool source) {
  if (!j.is_array() || j.size() != 2) bad(path, "expected [box, port]");
  std::string who = str(j[0], at(path, 0));
  std::size_t port = count(j[1], at(path, 1));
  if (who == (source ? "in" : "out")) return Endpoint{Endpoint::kBoundary, port};
  auto it = ids.find(who);
  if (it == ids.end()) bad(path, "unknown box '" + who + "'");
  return Endpoint{it->second, port};
}

Json generator_json(const Generator& g) {
  return Json{{"name", g.name},          {"dom", g.dom},
              {"cod", g.cod},            {"channel", g.channel},
              {"deterministic", g.deterministic}, {"sharp", g.sharp}};
}

Generator generator_from(const Json& j, const std::string& path) {
  fields(j, path, {"name", "dom", "cod", "channel", "deterministic", "sharp"});
  Generator g;
  g.name = str(need(j, path, "name"), at(path, "name"));
  g.dom = strings(need(j, path, "dom"), at(path, "dom"));
  g.cod = strings(need(j, path, "cod"), at(path, "cod"));
  if (auto* f = maybe(j, "channel")) g.channel = boolean(*f, at(path, "channel"));
  if (auto* f = maybe(j, "deterministic")) g.deterministic = boolean(*f, at(path, "deterministic"));
  if (auto* f = maybe(j, "sharp")) g.sharp = boolean(*f, at(path, "sharp"));
  return g;
}

Diagram diagram_from(const Json& j, const std::string& path, const SignaturePtr& sig) {
  fields(j, path, {"boxes", "wires", "inputs", "outputs"});
  std::vector<Box> boxes;
  std::map<std::string, std::size_t> ids;
  const Json& jb = array(need(j, path, "boxes"), at(path, "boxes"));
  for (std::size_t i = 0; i < jb.size(); ++i) {
    const std::string bp = at(at(path, "boxes"), i);
    fields(jb[i], bp, {"id", "kind", "gen", "n", "var", "vars"});
    Box b;
    b.id = str(need(jb[i], bp, "id"), at(bp, "id"));
    const std::string kind = str(need(jb[i], bp, "kind"), at(bp, "kind"));
    auto only = [&](std::initializer_list<std::string_view> keys) { fields(jb[i], bp, keys); };
    if (kind == "gen") {
      only({"id", "kind", "gen"});
      b.kind = BoxKind::Gen;
      b.gen = str(need(jb[i], bp, "gen"), at(bp, "gen"));
    } else if (kind == "copy") {
      only({"id", "kind", "n", "var"});
      b.kind = BoxKind::Copy;
      b.fanout = count(need(jb[i], bp, "n"), at(bp, "n"));
      b.var = str(need(jb[i], bp, "var"), at(bp, "var"));
    } else if (kind == "discard") {
      only({"id", "kind", "var"});
      b.kind = BoxKind::Discard;
      b.var = str(need(jb[i], bp, "var"), at(bp, "var"));
    } else if (kind == "swap") {
      only({"id", "kind", "vars"});
      b.kind = BoxKind::Swap;
      auto vs = strings(need(jb[i], bp, "vars"), at(bp, "vars"));
      if (vs.size() != 2) bad(at(bp, "vars"), "a swap names two variables");
      b.var = vs[0];
      b.var2 = vs[1];
    } else {
      bad(at(bp, "kind"), "unknown box kind '" + kind + "'");
    }
    if (!ids.emplace(b.id, boxes.size()).second) bad(at(bp, "id"), "duplicate box id '" + b.id + "'");
    boxes.push_back(std::move(b));
  }
  auto inputs = strings(need(j, path, "inputs"), at(path, "inputs"));
  auto outputs = strings(need(j, path, "outputs"), at(path, "outputs"));
  std::vector<Wire> wires;
  const Json& jw = array(need(j, path, "wires"), at(path, "wires"));
  for (std::size_t i = 0; i < jw.size(); ++i) {
    const std::string wp = at(at(path, "wires"), i);
    fields(jw[i], wp, {"from", "to", "var"});
    Wire w;
    w.from = endpoint_from(need(jw[i], wp, "from"), at(wp, "from"), ids, true);
    w.to = endpoint_from(need(jw[i], wp, "to"), at(wp, "to"), ids, false);
    if (auto* v = maybe(jw[i], "var")) {
      w.var = str(*v, at(wp, "var"));
    } else if (w.from.boundary()) {
      if (w.from.port >= inputs.size()) bad(at(wp, "from"), "no such input");
      w.var = inputs[w.from.port];
    } else {
      auto outs = box_outputs(*sig, boxes[w.from.box]);
      if (w.from.port >= outs.size()) bad(at(wp, "from"), "no such port");
      w.var = outs[w.from.port];
    }
    wires.push_back(std::move(w));
  }
  Diagram d(sig, std::move(boxes), std::move(wires), std::move(inputs), std::move(outputs));
  auto v = validate(d);
  if (!v.empty())
    fail(ErrorKind::InvalidDiagram,
         (path.empty() ? "diagram" : path) + ": " + std::string(to_string(v.front().kind)) + " " +
             v.front().detail);
  return d;
}

ObjectSem object_from(const Json& j, const std::string& path) {
  fields(j, path, {"kind", "elements", "dim"});
  const std::string kind = str(need(j, path, "kind"), at(path, "kind"));
  auto elements = [&] {
    fields(j, path, {"kind", "elements"});
    auto e = strings(need(j, path, "elements"), at(path, "elements"));
    std::set<std::string> seen;
    for (const auto& s : e) {
      if (!seen.insert(s).second) fail(ErrorKind::DuplicateLabel, at(path, "elements") + ": '" + s + "'");
      if (s.find_first_of("(),") != std::string::npos)
        bad(at(path, "elements"), "label '" + s + "' contains a tuple delimiter");
    }
    return e;
  };
  auto dim = [&] {
    fields(j, path, {"kind", "dim"});
    return count(need(j, path, "dim"), at(path, "dim"));
  };
  if (kind == "set") return ObjectSem::fin_set(elements());
  if (kind == "prob") return ObjectSem::prob_space(elements());
  if (kind == "hilbert") return ObjectSem::hilbert(dim());
  if (kind == "real") return ObjectSem::real_space(dim());
  bad(at(path, "kind"), "unknown object kind '" + kind + "'");
}

Json real_node_json(const RealNode& n) {
  Json j{{"op", to_string(n.op)}, {"args", n.args}};
  switch (n.op) {
    case RealOp::Linear: j["matrix"] = matrix_json(n.matrix); break;
    case RealOp::BiasAdd:
    case RealOp::Const: j["vector"] = vector_json(n.vector); break;
    case RealOp::Activation: j["activation"] = to_string(n.activation); break;
    case RealOp::ScalarMult: j["scalar"] = n.scalar; break;
    case RealOp::Add: break;
  }
  j["dim"] = n.dim;
  return j;
}

RealNode real_node_from(const Json& j, const std::string& path) {
  fields(j, path, {"op", "args", "matrix", "vector", "activation", "scalar", "dim"});
  RealNode n;
  try {
    n.op = real_op_from_string(str(need(j, path, "op"), at(path, "op")));
  } catch (const ModelError& e) {
    bad(at(path, "op"), e.what());
  }
  const Json& args = array(need(j, path, "args"), at(path, "args"));
  for (std::size_t i = 0; i < args.size(); ++i) n.args.push_back(count(args[i], at(at(path, "args"), i)));
  n.dim = count(need(j, path, "dim"), at(path, "dim"));
  switch (n.op) {
    case RealOp::Linear:
      fields(j, path, {"op", "args", "matrix", "dim"});
      n.matrix = matrix_from(need(j, path, "matrix"), at(path, "matrix"), -1, -1);
      break;
    case RealOp::BiasAdd:
    case RealOp::Const:
      fields(j, path, {"op", "args", "vector", "dim"});
      n.vector = vector_from(need(j, path, "vector"), at(path, "vector"));
      break;
    case RealOp::Activation:
      fields(j, path, {"op", "args", "activation", "dim"});
      try {
        n.activation = activation_from_string(str(need(j, path, "activation"), at(path, "activation")));
      } catch (const ModelError& e) {
        bad(at(path, "activation"), e.what());
      }
      break;
    case RealOp::ScalarMult:
      fields(j, path, {"op", "args", "scalar", "dim"});
      n.scalar = number(need(j, path, "scalar"), at(path, "scalar"));
      break;
    case RealOp::Add: fields(j, path, {"op", "args", "dim"}); break;
  }
  return n;
}

MorphSem morphism_from(const Json& j, const std::string& path, Backend backend,
                       const std::vector<ObjectSem>& dom, const std::vector<ObjectSem>& cod) {
  const Dims dd = dims_of(dom), cd = dims_of(cod);
  const std::size_t cols = product(dd), rows = product(cd);
  switch (backend) {
    case Backend::FinFn: {
      fields(j, path, {"table"});
      const Json& t = need(j, path, "table");
      const std::string tp = at(path, "table");
      if (!t.is_object()) bad(tp, "expected an object");
      FnTable f{dd, cd, std::vector<std::size_t>(cols, 0)};
      std::vector<bool> seen(cols, false);
      for (const auto& [k, v] : t.items()) {
        std::size_t x = parse_tuple(k, dom, at(tp, k));
        if (seen[x]) bad(at(tp, k), "input listed twice");
        seen[x] = true;
        f.map[x] = parse_tuple(str(v, at(tp, k)), cod, at(tp, k));
      }
      for (std::size_t x = 0; x < cols; ++x)
        if (!seen[x]) bad(tp, "no value for " + tuple_label(dom, x));
      return f;
    }
    case Backend::Stoch: {
      fields(j, path, {"matrix", "rows", "cols"});
      auto check = [&](const char* key, const std::vector<ObjectSem>& objs, std::size_t n) {
        const Json* lj = maybe(j, key);
        if (!lj) return;
        auto labels = strings(*lj, at(path, key));
        if (labels.size() != n) bad(at(path, key), "expected " + std::to_string(n) + " labels");
        for (std::size_t i = 0; i < n; ++i)
          if (parse_tuple(labels[i], objs, at(at(path, key), i)) != i)
            bad(at(at(path, key), i), "labels must follow the row-major order");
      };
      check("rows", cod, rows);
      check("cols", dom, cols);
      return StochMatrix{dd, cd,
                         matrix_from(need(j, path, "matrix"), at(path, "matrix"), static_cast<long>(rows),
                                     static_cast<long>(cols))};
    }
    case Backend::Quant: {
      fields(j, path, {"kraus"});
      const std::string kp = at(path, "kraus");
      const Json& ks = array(need(j, path, "kraus"), kp);
      KrausMap k{dd, cd, {}};
      for (std::size_t o = 0; o < ks.size(); ++o) {
        const std::string op = at(kp, o);
        if (array(ks[o], op).size() != rows) bad(op, "expected " + std::to_string(rows) + " rows");
        Eigen::MatrixXcd m(static_cast<long>(rows), static_cast<long>(cols));
        for (std::size_t r = 0; r < rows; ++r) {
          const std::string rp = at(op, r);
          if (array(ks[o][r], rp).size() != cols) bad(rp, "expected " + std::to_string(cols) + " columns");
          for (std::size_t c = 0; c < cols; ++c) {
            const Json& z = ks[o][r][c];
            if (!z.is_array() || z.size() != 2) bad(at(rp, c), "expected [re, im]");
            m(static_cast<long>(r), static_cast<long>(c)) = {number(z[0], at(rp, c)), number(z[1], at(rp, c))};
          }
        }
        k.ops.push_back(std::move(m));
      }
      return k;
    }
    case Backend::RealVec: {
      fields(j, path, {"real"});
      const std::string rp = at(path, "real");
      const Json& r = need(j, path, "real");
      fields(r, rp, {"nodes", "outputs"});
      RealExpr e{dd, cd, {}, {}};
      const Json& nodes = array(need(r, rp, "nodes"), at(rp, "nodes"));
      for (std::size_t i = 0; i < nodes.size(); ++i) e.nodes.push_back(real_node_from(nodes[i], at(at(rp, "nodes"), i)));
      const Json& outs = array(need(r, rp, "outputs"), at(rp, "outputs"));
      for (std::size_t i = 0; i < outs.size(); ++i) e.outputs.push_back(count(outs[i], at(at(rp, "outputs"), i)));
      try {
        check_real_expr(e);
      } catch (const ModelError& err) {
        bad(rp, err.what());
      }
      return e;
    }
  }
  bad(path, "unknown backend");
}

std::vector<ObjectSem> objects_for(const ModelBinding& b, const std::vector<std::string>& vars,
                                   const std::string& path) {
  std::vector<ObjectSem> out;
  for (const auto& v : vars) {
    auto it = b.objects.find(v);
    if (it == b.objects.end()) bad(path, "no object bound to '" + v + "'");
    out.push_back(it->second);
  }
  return out;
}

Interpretation interpretation_from(const Json& j, const std::string& path,
                                   std::shared_ptr<const ModelBinding> b) {
  fields(j, path, {"objects", "generators", "concrete", "rules", "vocabulary"});
  Interpretation i = make_interpretation(b);
  if (auto* f = maybe(j, "objects")) i.abs_var = string_map(*f, at(path, "objects"));
  if (auto* f = maybe(j, "generators")) i.abs_gen = string_map(*f, at(path, "generators"));
  if (auto* f = maybe(j, "vocabulary")) {
    const std::string vp = at(path, "vocabulary");
    fields(*f, vp, {"closed", "objects", "morphisms"});
    if (auto* c = maybe(*f, "closed")) i.human.closed = boolean(*c, at(vp, "closed"));
    if (auto* o = maybe(*f, "objects"))
      for (auto& s : strings(*o, at(vp, "objects"))) i.human.object_terms.insert(s);
    if (auto* m = maybe(*f, "morphisms")) {
      const std::string mp = at(vp, "morphisms");
      if (!m->is_object()) bad(mp, "expected an object");
      for (const auto& [term, t] : m->items()) {
        const std::string tp = at(mp, term);
        fields(t, tp, {"dom", "cod"});
        MorphismTerm mt;
        if (auto* d = maybe(t, "dom")) mt.dom = strings(*d, at(tp, "dom"));
        if (auto* c = maybe(t, "cod")) mt.cod = strings(*c, at(tp, "cod"));
        i.human.morphism_terms[term] = std::move(mt);
      }
    }
  }
  if (auto* f = maybe(j, "concrete")) {
    const std::string cp = at(path, "concrete");
    for (std::size_t k = 0; k < array(*f, cp).size(); ++k) {
      const Json& e = (*f)[k];
      const std::string ep = at(cp, k);
      fields(e, ep, {"dom", "cod", "value", "term"});
      auto dom = strings(need(e, ep, "dom"), at(ep, "dom"));
      auto cod = strings(need(e, ep, "cod"), at(ep, "cod"));
      std::string term = str(need(e, ep, "term"), at(ep, "term"));
      const Json& v = need(e, ep, "value");
      MorphSem sem;
      if (v.is_string()) {
        // A generator name stands for its bound morphism.
        const std::string gen = v.get<std::string>();
        auto m = b->morphisms.find(gen);
        if (m == b->morphisms.end()) bad(at(ep, "value"), "unknown generator '" + gen + "'");
        sem = m->second;
        if (dom_of(sem) != b->dims_of(dom) || cod_of(sem) != b->dims_of(cod))
          bad(at(ep, "value"), "'" + gen + "' does not fit the entry's interface");
      } else {
        sem = morphism_from(v, at(ep, "value"), b->backend, objects_for(*b, dom, at(ep, "dom")),
                            objects_for(*b, cod, at(ep, "cod")));
      }
      i.set_concrete(std::move(dom), std::move(cod), std::move(sem), std::move(term));
    }
  }
  if (auto* f = maybe(j, "rules")) {
    const std::string rp = at(path, "rules");
    for (std::size_t k = 0; k < array(*f, rp).size(); ++k) {
      const Json& r = (*f)[k];
      const std::string ep = at(rp, k);
      fields(r, ep, {"var", "component", "cond", "term"});
      PredicateRule pr;
      pr.var = str(need(r, ep, "var"), at(ep, "var"));
      if (auto* c = maybe(r, "component")) pr.component = count(*c, at(ep, "component"));
      const Json& cond = need(r, ep, "cond");
      fields(cond, at(ep, "cond"), {"leq", "gt"});
      if (auto* x = maybe(cond, "leq")) pr.leq = number(*x, at(at(ep, "cond"), "leq"));
      if (auto* x = maybe(cond, "gt")) pr.gt = number(*x, at(at(ep, "cond"), "gt"));
      pr.term = str(need(r, ep, "term"), at(ep, "term"));
      i.rules.push_back(std::move(pr));
    }
  }
  return i;
}

RewriteRule rule_from(const Json& j, const std::string& path, const ModelBinding& b) {
  fields(j, path, {"name", "lhs", "rhs", "epsilon", "status", "measured"});
  std::string name = str(need(j, path, "name"), at(path, "name"));
  Diagram lhs = diagram_from(need(j, path, "lhs"), at(path, "lhs"), b.sig);
  Diagram rhs = diagram_from(need(j, path, "rhs"), at(path, "rhs"), b.sig);
  double eps = 0.0;
  if (auto* e = maybe(j, "epsilon")) eps = number(*e, at(path, "epsilon"));
  std::string status = "verified";
  if (auto* s = maybe(j, "status")) status = str(*s, at(path, "status"));
  RewriteRule r = make_rule(std::move(name), std::move(lhs), std::move(rhs), eps);
  if (status == "asserted") return r;
  if (status != "verified" && status != "evaluation") bad(at(path, "status"), "unknown status '" + status + "'");
  r = verify_rule(b, r);
  if (status == "evaluation") r.status = RuleStatus::Evaluation;
  return r;
}

}  // namespace

std::string tuple_label(const std::vector<ObjectSem>& objs, std::size_t flat) {
  std::string out = "(";
  auto parts = labels_of(objs, flat);
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? "," : "") + parts[k];
  return out + ")";
}

std::string value_label(const std::vector<ObjectSem>& objs, std::size_t flat) {
  if (objs.size() == 1) return labels_of(objs, flat)[0];
  return tuple_label(objs, flat);
}

Json signature_to_json(const Signature& sig) {
  Json gens = Json::array();
  for (const auto& g : sig.generators()) gens.push_back(generator_json(g));
  Json eqs = Json::array();
  for (const auto& e : sig.equations())
    eqs.push_back(Json{{"lhs", diagram_to_json(e.lhs)}, {"rhs", diagram_to_json(e.rhs)}});
  return Json{{"language", to_string(sig.language())},
              {"variables", sig.variables()},
              {"generators", std::move(gens)},
              {"equations", std::move(eqs)}};
}

Json diagram_to_json(const Diagram& d) {
  Json boxes = Json::array();
  for (const auto& b : d.boxes()) {
    switch (b.kind) {
      case BoxKind::Gen: boxes.push_back(Json{{"id", b.id}, {"kind", "gen"}, {"gen", b.gen}}); break;
      case BoxKind::Copy:
        boxes.push_back(Json{{"id", b.id}, {"kind", "copy"}, {"n", b.fanout}, {"var", b.var}});
        break;
      case BoxKind::Discard: boxes.push_back(Json{{"id", b.id}, {"kind", "discard"}, {"var", b.var}}); break;
      case BoxKind::Swap:
        boxes.push_back(Json{{"id", b.id}, {"kind", "swap"}, {"vars", Json::array({b.var, b.var2})}});
        break;
    }
  }
  Json wires = Json::array();
  for (const auto& w : d.wires())
    wires.push_back(Json{{"from", endpoint_json(d, w.from, true)}, {"to", endpoint_json(d, w.to, false)},
                         {"var", w.var}});
  return Json{{"boxes", std::move(boxes)}, {"wires", std::move(wires)}, {"inputs", d.inputs()},
              {"outputs", d.outputs()}};
}

Diagram diagram_from_json(const Json& j, const SignaturePtr& sig) { return diagram_from(j, "", sig); }

Json object_to_json(const ObjectSem& o) {
  switch (o.kind) {
    case ObjectSem::Kind::FinSet: return Json{{"kind", "set"}, {"elements", o.elements}};
    case ObjectSem::Kind::ProbSpace: return Json{{"kind", "prob"}, {"elements", o.elements}};
    case ObjectSem::Kind::Hilbert: return Json{{"kind", "hilbert"}, {"dim", o.dim}};
    case ObjectSem::Kind::RealSpace: return Json{{"kind", "real"}, {"dim", o.dim}};
  }
  return Json{};
}

ObjectSem object_from_json(const Json& j) { return object_from(j, ""); }

Json morphism_to_json(const MorphSem& m, const std::vector<ObjectSem>& dom, const std::vector<ObjectSem>& cod) {
  switch (m.index()) {
    case 0: {
      const auto& f = std::get<FnTable>(m);
      Json t = Json::object();
      for (std::size_t x = 0; x < f.map.size(); ++x) t[tuple_label(dom, x)] = value_label(cod, f.map[x]);
      return Json{{"table", std::move(t)}};
    }
    case 1: {
      const auto& s = std::get<StochMatrix>(m);
      Json rows = Json::array(), cols = Json::array();
      for (long r = 0; r < s.m.rows(); ++r) rows.push_back(tuple_label(cod, static_cast<std::size_t>(r)));
      for (long c = 0; c < s.m.cols(); ++c) cols.push_back(tuple_label(dom, static_cast<std::size_t>(c)));
      return Json{{"matrix", matrix_json(s.m)}, {"rows", std::move(rows)}, {"cols", std::move(cols)}};
    }
    case 2: {
      Json ops = Json::array();
      for (const auto& op : std::get<KrausMap>(m).ops) {
        Json rows = Json::array();
        for (long r = 0; r < op.rows(); ++r) {
          Json row = Json::array();
          for (long c = 0; c < op.cols(); ++c) row.push_back(Json::array({op(r, c).real(), op(r, c).imag()}));
          rows.push_back(std::move(row));
        }
        ops.push_back(std::move(rows));
      }
      return Json{{"kraus", std::move(ops)}};
    }
    default: {
      const auto& e = std::get<RealExpr>(m);
      Json nodes = Json::array();
      for (const auto& n : e.nodes) nodes.push_back(real_node_json(n));
      return Json{{"real", Json{{"nodes", std::move(nodes)}, {"outputs", e.outputs}}}};
    }
  }
}

MorphSem morphism_from_json(const Json& j, Backend backend, const std::vector<ObjectSem>& dom,
                            const std::vector<ObjectSem>& cod) {
  return morphism_from(j, "", backend, dom, cod);
}

Json interpretation_to_json(const Interpretation& i) {
  const ModelBinding& b = *i.model;
  Json concrete = Json::array();
  for (const auto& [key, e] : i.con) {
    std::vector<ObjectSem> dom, cod;
    for (const auto& v : e.dom) dom.push_back(b.object(v));
    for (const auto& v : e.cod) cod.push_back(b.object(v));
    concrete.push_back(
        Json{{"dom", e.dom}, {"cod", e.cod}, {"value", morphism_to_json(e.sem, dom, cod)}, {"term", e.term}});
  }
  Json rules = Json::array();
  for (const auto& r : i.rules) {
    Json cond = Json::object();
    if (r.leq) cond["leq"] = *r.leq;
    if (r.gt) cond["gt"] = *r.gt;
    rules.push_back(Json{{"var", r.var}, {"component", r.component}, {"cond", std::move(cond)}, {"term", r.term}});
  }
  Json morphisms = Json::object();
  for (const auto& [term, mt] : i.human.morphism_terms) morphisms[term] = Json{{"dom", mt.dom}, {"cod", mt.cod}};
  Json objects = Json::object(), gens = Json::object();
  for (const auto& [k, v] : i.abs_var) objects[k] = v;
  for (const auto& [k, v] : i.abs_gen) gens[k] = v;
  return Json{{"objects", std::move(objects)},
              {"generators", std::move(gens)},
              {"concrete", std::move(concrete)},
              {"rules", std::move(rules)},
              {"vocabulary", Json{{"closed", i.human.closed},
                                  {"objects", std::vector<std::string>(i.human.object_terms.begin(),
                                                                       i.human.object_terms.end())},
                                  {"morphisms", std::move(morphisms)}}}};
}

Interpretation interpretation_from_json(const Json& j, std::shared_ptr<const ModelBinding> b) {
  return interpretation_from(j, "", std::move(b));
}

Json rule_to_json(const RewriteRule& r) {
  return Json{{"name", r.name},
              {"lhs", diagram_to_json(r.lhs)},
              {"rhs", diagram_to_json(r.rhs)},
              {"epsilon", r.epsilon},
              {"status", to_string(r.status)},
              {"measured", r.measured}};
}

RewriteRule rule_from_json(const Json& j, const ModelBinding& b) { return rule_from(j, "", b); }

std::vector<RewriteRule> rules_from_json(const Json& j, const ModelBinding& b) {
  std::vector<RewriteRule> out;
  if (j.is_object()) {
    // Either a single rule or {"rules": [...]}.
    if (j.contains("rules") && j.size() == 1) return rules_from_json(j["rules"], b);
    out.push_back(rule_from(j, "", b));
    return out;
  }
  for (std::size_t i = 0; i < array(j, "").size(); ++i) out.push_back(rule_from(j[i], at("", i), b));
  return out;
}

Json model_to_json(const ZooModel& m) {
  const ModelBinding& b = m.binding();
  Json j{{"version", kSchemaVersion}, {"name", m.name}, {"description", m.description}};
  Json sig = signature_to_json(*b.sig);
  for (auto& [k, v] : sig.items()) j[k] = v;
  j["backend"] = to_string(b.backend);
  Json objects = Json::object();
  for (const auto& v : b.sig->variables()) objects[v] = object_to_json(b.object(v));
  j["objects"] = std::move(objects);
  Json morphisms = Json::object();
  for (const auto& g : b.sig->generators()) {
    std::vector<ObjectSem> dom, cod;
    for (const auto& v : g.dom) dom.push_back(b.object(v));
    for (const auto& v : g.cod) cod.push_back(b.object(v));
    morphisms[g.name] = morphism_to_json(b.morphism(g.name), dom, cod);
  }
  j["morphisms"] = std::move(morphisms);
  Json dist = Json::object();
  for (const auto& [name, d] : b.distinguished) dist[name] = diagram_to_json(d);
  j["distinguished"] = std::move(dist);
  j["interpretation"] = interpretation_to_json(m.interpretation);
  Json rules = Json::array();
  for (const auto& r : m.rules) rules.push_back(rule_to_json(r));
  j["rules"] = std::move(rules);
  return j;
}

ZooModel model_from_json(const Json& j) {
  try {
    if (!j.is_object()) bad("", "expected an object");
    const Json* ver = maybe(j, "version");
    if (!ver) fail(ErrorKind::SchemaVersionMismatch, "missing field 'version'");
    if (!ver->is_number_integer() || ver->get<long long>() != kSchemaVersion)
      fail(ErrorKind::SchemaVersionMismatch,
           "version " + ver->dump() + ", expected " + std::to_string(kSchemaVersion));
    fields(j, "", {"version", "name", "description", "language", "variables", "generators", "equations",
                   "backend", "objects", "morphisms", "distinguished", "interpretation", "rules"});
    ZooModel m;
    if (auto* f = maybe(j, "name")) m.name = str(*f, "name");
    if (auto* f = maybe(j, "description")) m.description = str(*f, "description");

    Language lang = Language::CD;
    try {
      lang = language_from_string(str(need(j, "", "language"), "language"));
    } catch (const ModelError& e) {
      if (e.kind() != ErrorKind::ParseError) throw;
      bad("language", e.what());
    }
    auto vars = strings(need(j, "", "variables"), "variables");
    std::vector<Generator> gens;
    const Json& jg = array(need(j, "", "generators"), "generators");
    for (std::size_t i = 0; i < jg.size(); ++i) gens.push_back(generator_from(jg[i], at("generators", i)));
    std::vector<Equation> eqs;
    if (auto* f = maybe(j, "equations")) {
      SignaturePtr bare = build_signature(vars, gens, {}, lang);
      for (std::size_t i = 0; i < array(*f, "equations").size(); ++i) {
        const std::string ep = at("equations", i);
        fields((*f)[i], ep, {"lhs", "rhs"});
        eqs.push_back(Equation{diagram_from(need((*f)[i], ep, "lhs"), at(ep, "lhs"), bare),
                               diagram_from(need((*f)[i], ep, "rhs"), at(ep, "rhs"), bare)});
      }
    }
    SignaturePtr sig = build_signature(vars, gens, std::move(eqs), lang);

    Backend backend = Backend::FinFn;
    try {
      backend = backend_from_string(str(need(j, "", "backend"), "backend"));
    } catch (const ModelError& e) {
      if (e.kind() != ErrorKind::ParseError) throw;
      bad("backend", e.what());
    }
    std::map<std::string, ObjectSem> objects;
    const Json& jo = need(j, "", "objects");
    if (!jo.is_object()) bad("objects", "expected an object");
    for (const auto& [k, v] : jo.items()) objects[k] = object_from(v, at("objects", k));
    std::map<std::string, MorphSem> morphisms;
    const Json& jm = need(j, "", "morphisms");
    if (!jm.is_object()) bad("morphisms", "expected an object");
    for (const auto& [k, v] : jm.items()) {
      const Generator* g = sig->find_generator(k);
      if (!g) bad(at("morphisms", k), "not a generator");
      std::vector<ObjectSem> dom, cod;
      for (const auto& var : g->dom) {
        auto it = objects.find(var);
        if (it == objects.end()) fail(ErrorKind::UndefinedOnVariable, "no object bound to '" + var + "'");
        dom.push_back(it->second);
      }
      for (const auto& var : g->cod) {
        auto it = objects.find(var);
        if (it == objects.end()) fail(ErrorKind::UndefinedOnVariable, "no object bound to '" + var + "'");
        cod.push_back(it->second);
      }
      morphisms[k] = morphism_from(v, at("morphisms", k), backend, dom, cod);
    }
    std::map<std::string, Diagram> dist;
    if (auto* f = maybe(j, "distinguished")) {
      if (!f->is_object()) bad("distinguished", "expected an object");
      for (const auto& [k, v] : f->items()) dist.emplace(k, diagram_from(v, at("distinguished", k), sig));
    }
    auto binding = std::make_shared<const ModelBinding>(
        bind_model(sig, backend, std::move(objects), std::move(morphisms), std::move(dist)));
    if (auto* f = maybe(j, "interpretation"))
      m.interpretation = interpretation_from(*f, "interpretation", binding);
    else
      m.interpretation = make_interpretation(binding);
    if (auto* f = maybe(j, "rules"))
      for (std::size_t i = 0; i < array(*f, "rules").size(); ++i)
        m.rules.push_back(rule_from((*f)[i], at("rules", i), *binding));
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

Json world_spec_to_json(const WorldSpec& w) {
  Json worlds = Json::array();
  for (const auto& x : w.worlds) {
    Json jw = Json::object();
    jw["do"] = Json(x.intervene);
    jw["observe"] = Json(x.observe);
    jw["marginalize"] = x.marginalize;
    jw["query"] = x.query;
    worlds.push_back(std::move(jw));
  }
  return Json{{"worlds", std::move(worlds)}};
}

WorldSpec world_spec_from_json(const Json& j) {
  try {
    fields(j, "", {"worlds"});
    WorldSpec w;
    const Json& jw = array(need(j, "", "worlds"), "worlds");
    for (std::size_t i = 0; i < jw.size(); ++i) {
      const std::string p = at("worlds", i);
      fields(jw[i], p, {"do", "observe", "marginalize", "query"});
      World x;
      if (auto* f = maybe(jw[i], "do")) x.intervene = string_map(*f, at(p, "do"));
      if (auto* f = maybe(jw[i], "observe")) x.observe = string_map(*f, at(p, "observe"));
      if (auto* f = maybe(jw[i], "marginalize")) x.marginalize = strings(*f, at(p, "marginalize"));
      if (auto* f = maybe(jw[i], "query")) x.query = strings(*f, at(p, "query"));
      w.worlds.push_back(std::move(x));
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

Json proof_to_json(const RewriteProof& p) {
  Json steps = Json::array();
  Diagram host = normalize(p.start);
  for (const auto& s : p.steps) {
    Json sites = Json::array();
    for (auto b : s.match.boxes) sites.push_back(host.boxes()[b].id);
    steps.push_back(Json{{"rule", s.rule},
                         {"direction", s.dir == Direction::Forward ? "forward" : "backward"},
                         {"boxes", std::move(sites)},
                         {"epsilon", s.epsilon},
                         {"interpreted", s.interpreted}});
    host = normalize(s.result);
  }
  return Json{{"found", true},
              {"steps", std::move(steps)},
              {"epsilon_total", p.epsilon_total},
              {"epsilon_bounded", p.epsilon_bounded},
              {"all_interpreted", p.all_interpreted},
              {"end", diagram_to_json(p.end)}};
}

Json failure_to_json(const ProofFailure& f) {
  return Json{{"found", false}, {"reason", to_string(f.reason)}, {"explored", f.explored}};
}

Json distribution_to_json(const StochMatrix& state, const std::vector<ObjectSem>& objs) {
  Json d = Json::object();
  for (long r = 0; r < state.m.rows(); ++r) d[tuple_label(objs, static_cast<std::size_t>(r))] = state.m(r, 0);
  return d;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, path + ": cannot open file");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    fail(ErrorKind::ParseError, path + ":" + std::to_string(line) + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, path + ": cannot write file");
  out << j.dump(2) << "\n";
}

ZooModel load_model(const std::string& path) {
  Json j = read_json_file(path);
  try {
    return model_from_json(j);
  } catch (const ModelError& e) {
    if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::SchemaVersionMismatch)
      throw ModelError(e.kind(), path + ": " + e.what(), e.value());
    throw;
  }
}

void save_model(const std::string& path, const ZooModel& m) { write_json_file(path, model_to_json(m)); }

}  // namespace compmodel
