#include "compmodel/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "compmodel/error.hpp"

namespace compmodel {

const Diagram& ZooModel::diagram(const std::string& name) const { return binding().diagram(name); }

namespace {

using DigitFn = std::function<std::vector<std::size_t>(const std::vector<std::size_t>&)>;

std::vector<std::string> int_labels(int lo, int hi, int step = 1) {
  std::vector<std::string> out;
  for (int v = lo; v <= hi; v += step) out.push_back(std::to_string(v));
  return out;
}

// Accumulates variables and generators, then binds and interprets them.
class Fixture {
 public:
  Fixture(Backend backend, Language lang) : backend_(backend), lang_(lang) {}

  void var(const std::string& name, ObjectSem o, std::string term = {}) {
    vars_.push_back(name);
    objects_[name] = std::move(o);
    if (!term.empty()) var_terms_[name] = std::move(term);
  }

  // Variable with an abstract term but no concrete reading of its values.
  void opaque(const std::string& name) { opaque_.insert(name); }

  // Flags are read off the semantics.
  void gen(const std::string& name, std::vector<std::string> dom, std::vector<std::string> cod,
           MorphSem m, std::string term = {}) {
    const bool det = backend_ != Backend::Quant && is_deterministic(m);
    const bool sharp = det && dom.empty();
    gens_.push_back(Generator{name, std::move(dom), std::move(cod), is_channel(m), det, sharp});
    sems_[name] = std::move(m);
    if (!term.empty()) gen_terms_[name] = std::move(term);
  }

  bool has_gen(const std::string& name) const { return sems_.count(name) > 0; }

  std::string point_term(const std::string& var, const std::string& label) const {
    return var_terms_.at(var) + " " + label;
  }

  // Sharp states "var=label" for every label.
  void points(const std::string& var) {
    const ObjectSem& o = objects_.at(var);
    for (std::size_t k = 0; k < o.size(); ++k)
      gen(var + "=" + o.elements[k], {}, {var}, point_state(backend_, o.size(), k),
          point_term(var, o.elements[k]));
  }

  Dims dims(const std::vector<std::string>& vars) const {
    Dims out;
    for (const auto& v : vars) out.push_back(objects_.at(v).size());
    return out;
  }

  MorphSem table(const std::vector<std::string>& dom, const std::vector<std::string>& cod,
                 const DigitFn& f) const {
    FnTable t{dims(dom), dims(cod), {}};
    for (std::size_t i = 0; i < product(t.dom); ++i) t.map.push_back(flatten(f(unflatten(i, t.dom)), t.cod));
    return t;
  }

  MorphSem table_stoch(const std::vector<std::string>& dom, const std::vector<std::string>& cod,
                       const DigitFn& f) const {
    return to_matrix(std::get<FnTable>(table(dom, cod, f)));
  }

  // Columns are conditional distributions, one per flat domain index.
  MorphSem stoch(const std::vector<std::string>& dom, const std::vector<std::string>& cod,
                 const std::vector<std::vector<double>>& cols) const {
    StochMatrix s{dims(dom), dims(cod), Eigen::MatrixXd(product(dims(cod)), product(dims(dom)))};
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t r = 0; r < cols[c].size(); ++r)
        s.m(static_cast<long>(r), static_cast<long>(c)) = cols[c][r];
    return s;
  }

  const ObjectSem& object(const std::string& var) const { return objects_.at(var); }

  const SignaturePtr& sig() {
    if (!sig_) sig_ = build_signature(vars_, gens_, {}, lang_);
    return sig_;
  }

  ZooModel finish(std::string name, std::string description, std::map<std::string, Diagram> diagrams) {
    auto binding = std::make_shared<const ModelBinding>(
        bind_model(sig(), backend_, objects_, sems_, std::move(diagrams)));
    ZooModel z{std::move(name), std::move(description), make_interpretation(binding), {}};
    Interpretation& in = z.interpretation;
    in.abs_var = var_terms_;
    in.abs_gen = gen_terms_;
    for (const auto& [g, term] : gen_terms_) in.set_concrete_for(g, term);
    // Point readings fill whatever a named state has not already claimed.
    for (const auto& [v, term] : var_terms_) {
      const ObjectSem& o = objects_.at(v);
      if (!o.finite() || opaque_.count(v)) continue;
      for (std::size_t k = 0; k < o.size(); ++k) {
        MorphSem p = point_state(backend_, o.size(), k);
        if (!in.concrete_term({}, {v}, p)) in.set_concrete({}, {v}, p, point_term(v, o.elements[k]));
      }
    }
    auto bad = check_interpretation(in);
    if (!bad.empty())
      fail(ErrorKind::InvalidArgument, z.name + ": interpretation of '" + bad.front().subject +
                                           "' is inconsistent (" + bad.front().detail + ")");
    return z;
  }

 private:
  Backend backend_;
  Language lang_;
  std::vector<std::string> vars_;
  std::map<std::string, ObjectSem> objects_;
  std::map<std::string, std::string> var_terms_;
  std::set<std::string> opaque_;
  std::vector<Generator> gens_;
  std::map<std::string, MorphSem> sems_;
  std::map<std::string, std::string> gen_terms_;
  SignaturePtr sig_;
};

RealNode real_node(RealOp op, std::vector<std::size_t> args, std::size_t dim) {
  RealNode n;
  n.op = op;
  n.args = std::move(args);
  n.dim = dim;
  return n;
}

RealExpr scalar_mult(double s) {
  RealNode n = real_node(RealOp::ScalarMult, {0}, 1);
  n.scalar = s;
  return RealExpr{{1}, {1}, {n}, {1}};
}

RealExpr constant(const Eigen::VectorXd& v) {
  RealNode n = real_node(RealOp::Const, {}, static_cast<std::size_t>(v.size()));
  n.vector = v;
  return RealExpr{{}, {n.dim}, {n}, {0}};
}

RealExpr adder(std::size_t dim) { return RealExpr{{dim, dim}, {dim}, {real_node(RealOp::Add, {0, 1}, dim)}, {2}}; }

RealExpr affine(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, Activation act) {
  const auto in = static_cast<std::size_t>(w.cols()), out = static_cast<std::size_t>(w.rows());
  RealNode lin = real_node(RealOp::Linear, {0}, out);
  lin.matrix = w;
  RealNode bias = real_node(RealOp::BiasAdd, {1}, out);
  bias.vector = b;
  RealNode fn = real_node(RealOp::Activation, {2}, out);
  fn.activation = act;
  return RealExpr{{in}, {out}, {lin, bias, fn}, {3}};
}

void bool_rules(Interpretation& in, const std::string& var, const std::string& term) {
  in.rules.push_back(PredicateRule{var, 0, 0.0, std::nullopt, term + " non-positive"});
  in.rules.push_back(PredicateRule{var, 0, std::nullopt, 0.0, term + " positive"});
}

RewriteRule verified(const ModelBinding& b, std::string name, Diagram lhs, Diagram rhs, double eps) {
  return verify_rule(b, make_rule(std::move(name), std::move(lhs), std::move(rhs), eps));
}

Eigen::MatrixXcd ket(std::size_t dim, std::size_t k) {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(static_cast<long>(dim), 1);
  v(static_cast<long>(k), 0) = 1.0;
  return v;
}

}  // namespace

std::vector<std::string> run_finite(const ModelBinding& b, const Diagram& d,
                                    const std::vector<std::string>& inputs) {
  if (b.backend != Backend::FinFn) fail(ErrorKind::UnsupportedBackend, "run_finite needs a finite function binding");
  if (inputs.size() != d.inputs().size()) fail(ErrorKind::ArityMismatch, "wrong number of inputs");
  std::vector<std::size_t> digits;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto idx = b.object(d.inputs()[i]).index_of(inputs[i]);
    if (!idx) fail(ErrorKind::UnresolvedReference, "'" + inputs[i] + "' is not a value of " + d.inputs()[i]);
    digits.push_back(*idx);
  }
  FnTable t = std::get<FnTable>(eval_diagram(b, d));
  auto out = unflatten(t.map[flatten(digits, t.dom)], t.cod);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < out.size(); ++i) labels.push_back(b.object(d.outputs()[i]).elements[out[i]]);
  return labels;
}

std::vector<Eigen::VectorXd> run_real(const ModelBinding& b, const Diagram& d,
                                      const std::vector<Eigen::VectorXd>& inputs) {
  if (b.backend != Backend::RealVec) fail(ErrorKind::UnsupportedBackend, "run_real needs a real vector binding");
  if (inputs.size() != d.inputs().size()) fail(ErrorKind::ArityMismatch, "wrong number of inputs");
  const RealExpr e = std::get<RealExpr>(eval_diagram(b, d));
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (static_cast<std::size_t>(inputs[i].size()) != e.dom[i])
      fail(ErrorKind::DimensionMismatch, "input " + std::to_string(i));
  return eval_real(e, inputs);
}

ZooModel linear_model(const std::vector<double>& weights, double bias) {
  Fixture fx(Backend::RealVec, Language::CD);
  const std::size_t n = weights.size();
  for (std::size_t i = 0; i < n; ++i) fx.var("X" + std::to_string(i + 1), ObjectSem::real_space(1), "feature " + std::to_string(i + 1));
  fx.var("Y", ObjectSem::real_space(1), "score");
  for (std::size_t i = 0; i < n; ++i)
    fx.gen("w" + std::to_string(i + 1), {"X" + std::to_string(i + 1)}, {"Y"}, scalar_mult(weights[i]),
           "weight " + std::to_string(i + 1));
  fx.gen("bias", {}, {"Y"}, constant(Eigen::VectorXd::Constant(1, bias)), "bias");
  fx.gen("add", {"Y", "Y"}, {"Y"}, adder(1), "sum");

  DiagramBuilder db(fx.sig());
  std::vector<DiagramBuilder::Handle> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(db.input("X" + std::to_string(i + 1)));
  auto acc = db.add1("bias", {});
  for (std::size_t i = 0; i < n; ++i)
    acc = db.add1("add", {acc, db.add1("w" + std::to_string(i + 1), {xs[i]})});
  db.output(acc);

  ZooModel z = fx.finish("linear", "Affine combination of scalar features.", {{"model", db.build()}});
  for (std::size_t i = 0; i < n; ++i)
    bool_rules(z.interpretation, "X" + std::to_string(i + 1), "feature " + std::to_string(i + 1));
  bool_rules(z.interpretation, "Y", "score");
  return z;
}

ZooModel scoring_system(const std::vector<FiniteInput>& inputs, const std::vector<ScoreRule>& rules) {
  if (rules.empty()) fail(ErrorKind::InvalidArgument, "a scoring system needs at least one rule");
  Fixture fx(Backend::FinFn, Language::CD);
  std::map<std::string, std::size_t> uses;
  for (const auto& in : inputs) {
    fx.var(in.var, ObjectSem::fin_set(in.labels), in.term);
    uses[in.var] = 0;
  }
  int lo = 0, hi = 0;
  for (const auto& r : rules) {
    (r.points < 0 ? lo : hi) += r.points;
    for (const auto& v : r.inputs) {
      auto it = uses.find(v);
      if (it == uses.end()) fail(ErrorKind::UnresolvedReference, "rule '" + r.name + "' reads unknown '" + v + "'");
      ++it->second;
    }
  }
  fx.var("B", ObjectSem::fin_set({"no", "yes"}), "rule holds");
  fx.var("Score", ObjectSem::fin_set(int_labels(lo, hi)), "score");
  for (const auto& in : inputs) fx.points(in.var);
  fx.points("B");
  fx.points("Score");

  for (const auto& r : rules) {
    fx.gen(r.name, r.inputs, {"B"}, fx.table(r.inputs, {"B"}, [&](const std::vector<std::size_t>& d) {
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < d.size(); ++i) labels.push_back(fx.object(r.inputs[i]).elements[d[i]]);
      return std::vector<std::size_t>{r.holds(labels) ? 1u : 0u};
    }), r.name);
    const std::string pts = "points(" + r.name + ")";
    fx.gen(pts, {"B"}, {"Score"}, fx.table({"B"}, {"Score"}, [&](const std::vector<std::size_t>& d) {
      return std::vector<std::size_t>{static_cast<std::size_t>((d[0] ? r.points : 0) - lo)};
    }), (r.points >= 0 ? "+" : "") + std::to_string(r.points) + " points");
  }
  // Only partial sums occur on reachable inputs; they never leave [lo, hi].
  fx.gen("add", {"Score", "Score"}, {"Score"}, fx.table({"Score", "Score"}, {"Score"}, [&](const std::vector<std::size_t>& d) {
    int s = static_cast<int>(d[0]) + static_cast<int>(d[1]) + 2 * lo;
    return std::vector<std::size_t>{static_cast<std::size_t>(std::clamp(s, lo, hi) - lo)};
  }), "sum");

  DiagramBuilder db(fx.sig());
  std::map<std::string, std::vector<DiagramBuilder::Handle>> wires;
  for (const auto& in : inputs) {
    auto h = db.input(in.var);
    const std::size_t n = uses[in.var];
    if (n == 0) db.discard(h);
    else if (n == 1) wires[in.var] = {h};
    else wires[in.var] = db.copy(h, n);
  }
  std::optional<DiagramBuilder::Handle> total;
  for (const auto& r : rules) {
    std::vector<DiagramBuilder::Handle> args;
    for (const auto& v : r.inputs) {
      args.push_back(wires[v].back());
      wires[v].pop_back();
    }
    auto s = db.add1("points(" + r.name + ")", {db.add1(r.name, args)});
    total = total ? db.add1("add", {*total, s}) : s;
  }
  db.output(*total);
  ZooModel z = fx.finish("scoring", "Additive points model over finite inputs.", {{"model", db.build()}});
  return z;
}

ZooModel arrest_score() {
  auto num = [](const std::string& s) { return std::stoi(s); };
  std::vector<FiniteInput> inputs{{"P", int_labels(0, 10), "prior arrests"},
                                  {"L", {"no", "yes"}, "prior arrests for local ordinance"},
                                  {"A", int_labels(18, 80), "age at release"}};
  std::vector<ScoreRule> rules{
      {"prior arrests >= 2", {"P"}, [=](const auto& v) { return num(v[0]) >= 2; }, 1},
      {"prior arrests >= 5", {"P"}, [=](const auto& v) { return num(v[0]) >= 5; }, 1},
      {"prior arrests for local ordinance", {"L"}, [](const auto& v) { return v[0] == "yes"; }, 1},
      {"age at release 18-24", {"A"}, [=](const auto& v) { return num(v[0]) <= 24; }, 1},
      {"age at release >= 40", {"A"}, [=](const auto& v) { return num(v[0]) >= 40; }, -1}};
  ZooModel z = scoring_system(inputs, rules);
  z.name = "arrest_score";
  z.description = "Five-rule rearrest points score.";
  return z;
}

ZooModel decision_list() {
  Fixture fx(Backend::FinFn, Language::CD);
  fx.var("S", ObjectSem::fin_set({"male", "female"}), "sex");
  fx.var("A", ObjectSem::fin_set(int_labels(18, 80)), "age");
  fx.var("P", ObjectSem::fin_set(int_labels(0, 10)), "prior offences");
  fx.var("B", ObjectSem::fin_set({"no", "yes"}), "condition");
  fx.var("O", ObjectSem::fin_set({"no", "yes"}), "predict arrest");
  for (const char* v : {"S", "A", "P", "B", "O"}) fx.points(v);
  auto test = [&](const std::string& name, const std::string& var, std::function<bool(std::size_t)> p,
                  const std::string& term) {
    fx.gen(name, {var}, {"B"}, fx.table({var}, {"B"}, [=](const auto& d) {
      return std::vector<std::size_t>{p(d[0]) ? 1u : 0u};
    }), term);
  };
  // Indices: A is age - 18, P is the number of priors.
  test("male?", "S", [](std::size_t s) { return s == 0; }, "sex is male");
  test("18-20", "A", [](std::size_t a) { return a <= 2; }, "age 18-20");
  test("21-23", "A", [](std::size_t a) { return a >= 3 && a <= 5; }, "age 21-23");
  test("2-3", "P", [](std::size_t p) { return p == 2 || p == 3; }, "2-3 prior offences");
  test(">3", "P", [](std::size_t p) { return p > 3; }, "more than three priors");
  fx.gen("and", {"B", "B"}, {"B"}, fx.table({"B", "B"}, {"B"}, [](const auto& d) {
    return std::vector<std::size_t>{d[0] & d[1]};
  }), "and");
  fx.gen("r", {"B"}, {"O"}, fx.table({"B"}, {"O"}, [](const auto& d) { return d; }), "then predict arrest");
  fx.gen("first", {"O", "O", "O"}, {"O"}, fx.table({"O", "O", "O"}, {"O"}, [](const auto& d) {
    return std::vector<std::size_t>{d[0] | d[1] | d[2]};
  }), "first applicable rule");

  auto build = [&](bool closed) {
    DiagramBuilder db(fx.sig());
    auto s = closed ? db.add1("S=female", {}) : db.input("S");
    auto a = db.copy(closed ? db.add1("A=22", {}) : db.input("A"), 2);
    auto p = db.copy(closed ? db.add1("P=2", {}) : db.input("P"), 2);
    auto r1 = db.add1("r", {db.add1("and", {db.add1("18-20", {a[0]}), db.add1("male?", {s})})});
    auto r2 = db.add1("r", {db.add1("and", {db.add1("21-23", {a[1]}), db.add1("2-3", {p[0]})})});
    auto r3 = db.add1("r", {db.add1(">3", {p[1]})});
    db.output(db.add1("first", {r1, r2, r3}));
    return db.build();
  };
  const SignaturePtr sig = fx.sig();
  DiagramBuilder lhs(sig), rhs(sig);
  {
    auto x = lhs.input("O"), y = lhs.input("O");
    lhs.output(lhs.add1("first", {x, lhs.add1("O=yes", {}), y}));
    rhs.discard(rhs.input("O"));
    rhs.discard(rhs.input("O"));
    rhs.output(rhs.add1("O=yes", {}));
  }
  ZooModel z = fx.finish("decision_list", "Three-rule arrest decision list.",
                         {{"model", build(false)}, {"query", build(true)}, {"goal", from_generator(sig, "O=yes")}});
  const ModelBinding& b = z.binding();
  z.rules = {make_eval_rule(b, "21-23", {"A=22"}), make_eval_rule(b, "2-3", {"P=2"}),
             make_eval_rule(b, "and", {"B=yes", "B=yes"}), make_eval_rule(b, "r", {"B=yes"}),
             verified(b, "a yes in the second slot wins", lhs.build(), rhs.build(), 0.0)};
  return z;
}

ZooModel decision_tree() {
  Fixture fx(Backend::FinFn, Language::CD);
  const auto days = int_labels(0, 750, 50);
  const std::vector<std::string> temps{"-5", "0", "5", "10", "11", "15", "20", "25", "30", "35"};
  std::vector<std::string> xs;
  for (const auto& d : days)
    for (const auto& t : temps)
      for (const char* c : {"0", "1"}) xs.push_back("D=" + d + " T=" + t + " control=" + c);
  fx.var("D", ObjectSem::fin_set(days), "days since 2011");
  fx.var("T", ObjectSem::fin_set(temps), "temperature");
  fx.var("X*", ObjectSem::fin_set(xs), "input with control");
  fx.var("Out", ObjectSem::fin_set({"0", "o1", "o2", "o3", "o4"}), "expected rentals");
  for (const char* v : {"D", "T", "X*", "Out"}) fx.points(v);

  // X* digits are (d, t, control) flattened row-major.
  const std::size_t nt = temps.size();
  auto digits = [nt](std::size_t x) { return std::vector<std::size_t>{x / (2 * nt), (x / 2) % nt, x % 2}; };
  auto pack = [nt](std::size_t d, std::size_t t, std::size_t c) { return (d * nt + t) * 2 + c; };
  fx.gen("start", {"D", "T"}, {"X*"}, fx.table({"D", "T"}, {"X*"}, [&](const auto& d) {
    return std::vector<std::size_t>{pack(d[0], d[1], 1)};
  }), "start with control");
  auto question = [&](const std::string& name, std::function<bool(int, int)> q, const std::string& term) {
    fx.gen(name, {"X*"}, {"X*", "X*"}, fx.table({"X*"}, {"X*", "X*"}, [&, q](const auto& in) {
      auto x = digits(in[0]);
      const bool yes = q(std::stoi(days[x[0]]), std::stoi(temps[x[1]]));
      return std::vector<std::size_t>{pack(x[0], x[1], x[2] && yes), pack(x[0], x[1], x[2] && !yes)};
    }), term);
  };
  question("<=400 days", [](int d, int) { return d <= 400; }, "at most 400 days since 2011");
  question("<=100 days", [](int d, int) { return d <= 100; }, "at most 100 days since 2011");
  question(">=11 degrees", [](int, int t) { return t >= 11; }, "at least 11 degrees");
  for (std::size_t j = 1; j <= 4; ++j)
    fx.gen("o" + std::to_string(j), {"X*"}, {"Out"}, fx.table({"X*"}, {"Out"}, [&, j](const auto& in) {
      return std::vector<std::size_t>{digits(in[0])[2] ? j : 0};
    }), "leaf o" + std::to_string(j));
  fx.gen("sum", {"Out", "Out", "Out", "Out"}, {"Out"},
         fx.table({"Out", "Out", "Out", "Out"}, {"Out"}, [](const auto& in) {
           for (auto v : in)
             if (v) return std::vector<std::size_t>{v};
           return std::vector<std::size_t>{0};
         }), "sum of leaves");

  DiagramBuilder db(fx.sig());
  auto d = db.input("D");
  auto t = db.input("T");
  auto top = db.add("<=400 days", {db.add1("start", {d, t})});
  auto left = db.add("<=100 days", {top[0]});
  auto right = db.add(">=11 degrees", {top[1]});
  db.output(db.add1("sum", {db.add1("o1", {left[0]}), db.add1("o2", {left[1]}), db.add1("o3", {right[0]}),
                            db.add1("o4", {right[1]})}));
  return fx.finish("decision_tree", "Bike rental regression tree with control-carrying questions.",
                   {{"model", db.build()}});
}

ZooModel mlp(const std::vector<std::size_t>& sizes, const std::vector<Eigen::MatrixXd>& weights,
             const std::vector<Eigen::VectorXd>& biases, const std::vector<Activation>& activations) {
  if (sizes.size() < 2) fail(ErrorKind::DimensionMismatch, "a network needs at least two layer sizes");
  const std::size_t layers = sizes.size() - 1;
  if (weights.size() != layers || biases.size() != layers || activations.size() != layers)
    fail(ErrorKind::DimensionMismatch, "one weight matrix, bias and activation per layer");
  for (std::size_t i = 0; i < layers; ++i) {
    if (static_cast<std::size_t>(weights[i].rows()) != sizes[i + 1] ||
        static_cast<std::size_t>(weights[i].cols()) != sizes[i])
      fail(ErrorKind::DimensionMismatch, "weights of layer " + std::to_string(i + 1));
    if (static_cast<std::size_t>(biases[i].size()) != sizes[i + 1])
      fail(ErrorKind::DimensionMismatch, "bias of layer " + std::to_string(i + 1));
  }
  Fixture fx(Backend::RealVec, Language::CD);
  auto name = [&](std::size_t i) { return i == 0 ? std::string("X") : i == layers ? std::string("Y") : "H" + std::to_string(i); };
  fx.var("X", ObjectSem::real_space(sizes[0]), "input features");
  for (std::size_t i = 1; i < layers; ++i) fx.var(name(i), ObjectSem::real_space(sizes[i]));
  fx.var("Y", ObjectSem::real_space(sizes[layers]), "prediction");
  for (std::size_t i = 0; i < layers; ++i)
    fx.gen("layer" + std::to_string(i + 1), {name(i)}, {name(i + 1)}, affine(weights[i], biases[i], activations[i]));
  DiagramBuilder db(fx.sig());
  auto h = db.input("X");
  for (std::size_t i = 0; i < layers; ++i) h = db.add1("layer" + std::to_string(i + 1), {h});
  db.output(h);
  return fx.finish("mlp", "Feed-forward network; hidden layers carry no interpretation.", {{"model", db.build()}});
}

ZooModel transformer_stub(std::size_t tokens) {
  if (tokens == 0) fail(ErrorKind::InvalidArgument, "at least one token");
  Fixture fx(Backend::RealVec, Language::CD);
  fx.var("token", ObjectSem::real_space(1), "token");
  fx.var("embedding", ObjectSem::real_space(2));
  fx.var("logits", ObjectSem::real_space(3), "next token scores");
  Eigen::MatrixXd embed(2, 1), unembed(3, 2);
  embed << 1.0, 0.5;
  unembed << 1, 0, 0, 1, 1, -1;
  fx.gen("embed", {"token"}, {"embedding"}, affine(embed, Eigen::VectorXd::Zero(2), Activation::Id));
  // Every position receives the sum over all positions.
  RealExpr attn{Dims(tokens, 2), Dims(tokens, 2), {}, {}};
  std::size_t acc = 0;
  for (std::size_t k = 1; k < tokens; ++k) {
    attn.nodes.push_back(real_node(RealOp::Add, {acc, k}, 2));
    acc = tokens + attn.nodes.size() - 1;
  }
  attn.outputs.assign(tokens, acc);
  fx.gen("attention", std::vector<std::string>(tokens, "embedding"), std::vector<std::string>(tokens, "embedding"),
         attn);
  fx.gen("feed forward", {"embedding"}, {"embedding"},
         affine(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), Activation::Relu));
  fx.gen("unembed", {"embedding"}, {"logits"}, affine(unembed, Eigen::VectorXd::Zero(3), Activation::Softmax));
  DiagramBuilder db(fx.sig());
  std::vector<DiagramBuilder::Handle> hs;
  for (std::size_t k = 0; k < tokens; ++k) hs.push_back(db.add1("embed", {db.input("token")}));
  hs = db.add("attention", hs);
  for (std::size_t k = 0; k + 1 < tokens; ++k) db.discard(db.add1("feed forward", {hs[k]}));
  db.output(db.add1("unembed", {db.add1("feed forward", {hs.back()})}));
  return fx.finish("transformer", "Opaque transformer-shaped diagram.", {{"model", db.build()}});
}

Diagram sequence_state(const ModelBinding& b, const std::vector<std::string>& words, const std::string& initial) {
  const Generator* init = b.sig->find_generator(initial);
  if (!init || !init->dom.empty() || init->cod.size() != 1)
    fail(ErrorKind::UnresolvedReference, "'" + initial + "' is not a single-variable state");
  const std::string& var = init->cod[0];
  DiagramBuilder db(b.sig);
  auto h = db.add1(initial, {});
  for (const auto& w : words) {
    const Generator* g = b.sig->find_generator(w);
    if (!g || g->dom != std::vector<std::string>{var} || g->cod != g->dom)
      fail(ErrorKind::UnknownWord, "'" + w + "' is not a word on " + var);
    h = db.add1(w, {h});
  }
  db.output(h);
  return db.build();
}

namespace {

void loan_vocabulary(Fixture& fx) {
  fx.var("X", ObjectSem::prob_space({"reliable", "unreliable", "neutral"}), "applicant");
  fx.var("L", ObjectSem::prob_space({"yes", "no"}), "loan decision");
  fx.points("L");
  fx.gen("reliable", {}, {"X"}, fx.stoch({}, {"X"}, {{0.95, 0.05, 0.0}}), "reliable applicant");
  fx.gen("loan?", {"X"}, {"L"}, fx.stoch({"X"}, {"L"}, {{0.98, 0.02}, {0.1, 0.9}, {0.5, 0.5}}), "grant loan?");
}

}  // namespace

ZooModel loan_sequence() {
  Fixture fx(Backend::Stoch, Language::CD);
  loan_vocabulary(fx);
  fx.gen("*", {}, {"X"}, fx.stoch({}, {"X"}, {{0, 0, 1}}), "applicant neutral");
  fx.gen("homeowner", {"X"}, {"X"}, fx.stoch({"X"}, {"X"}, {{1, 0, 0}, {0, 1, 0}, {0.5, 0, 0.5}}), "is a homeowner");
  fx.gen("employed", {"X"}, {"X"}, fx.stoch({"X"}, {"X"}, {{0.95, 0.05, 0}, {0, 1, 0}, {0.9, 0.1, 0}}), "is employed");
  DiagramBuilder q(fx.sig());
  q.output(q.add1("loan?", {q.add1("employed", {q.add1("homeowner", {q.add1("*", {})})})}));
  const SignaturePtr sig = fx.sig();
  ZooModel z = fx.finish("loan_sequence", "Word-sequence loan model with approximate rules.",
                         {{"query", q.build()}, {"goal", from_generator(sig, "L=yes")}});
  const ModelBinding& b = z.binding();
  z.rules = {verified(b, "homeowner and employed is reliable", sequence_state(b, {"homeowner", "employed"}),
                      from_generator(sig, "reliable"), 0.1),
             verified(b, "reliable applicants get a loan",
                      compose_seq(from_generator(sig, "reliable"), from_generator(sig, "loan?")),
                      from_generator(sig, "L=yes"), 0.13)};
  return z;
}

ZooModel loan_black_box() {
  Fixture fx(Backend::Stoch, Language::CD);
  loan_vocabulary(fx);
  fx.var("W", ObjectSem::prob_space({"employed", "homeowner", "and"}), "word");
  fx.points("W");
  std::vector<std::vector<double>> enc2(9, {0, 0, 1});
  enc2[1] = {0.925, 0.075, 0};  // (employed, homeowner)
  fx.gen("enc2", {"W", "W"}, {"X"}, fx.stoch({"W", "W"}, {"X"}, enc2), "two word encoder");
  fx.gen("enc3", {"W", "W", "W"}, {"X"},
         fx.stoch({"W", "W", "W"}, {"X"}, std::vector<std::vector<double>>(27, {0.5, 0.25, 0.25})),
         "three word encoder");
  const SignaturePtr sig = fx.sig();
  DiagramBuilder q(sig), two(sig);
  q.output(q.add1("loan?", {q.add1("enc3", {q.add1("W=employed", {}), q.add1("W=and", {}), q.add1("W=homeowner", {})})}));
  two.output(two.add1("enc2", {two.add1("W=employed", {}), two.add1("W=homeowner", {})}));
  ZooModel z = fx.finish("loan_black_box", "Encoder model whose rules do not cover three-word inputs.",
                         {{"query", q.build()}, {"goal", from_generator(sig, "L=yes")}});
  const ModelBinding& b = z.binding();
  z.rules = {verified(b, "employed homeowner encodes reliable", two.build(), from_generator(sig, "reliable"), 0.1),
             verified(b, "reliable applicants get a loan",
                      compose_seq(from_generator(sig, "reliable"), from_generator(sig, "loan?")),
                      from_generator(sig, "L=yes"), 0.13)};
  return z;
}

namespace {

void add_space(Fixture& fx, const std::vector<ConceptDomain>& domains, const std::vector<Concept>& concepts) {
  std::set<std::string> names;
  for (const auto& d : domains) {
    if (!names.insert(d.name).second) fail(ErrorKind::DomainMismatch, "domain '" + d.name + "' repeated");
    fx.var(d.name, ObjectSem::prob_space(d.labels), d.name);
    fx.points(d.name);
  }
  for (const auto& c : concepts) {
    std::size_t size = 1;
    for (const auto& d : c.domains) {
      if (!names.count(d)) fail(ErrorKind::DomainMismatch, "concept '" + c.name + "' uses unknown domain '" + d + "'");
      size *= fx.object(d).size();
    }
    if (c.effect.size() != size) fail(ErrorKind::DomainMismatch, "effect of '" + c.name + "' has the wrong size");
    for (double e : c.effect)
      if (!(e >= 0.0 && e <= 1.0)) fail(ErrorKind::InvalidArgument, "effect of '" + c.name + "' leaves [0, 1]");
    StochMatrix s{fx.dims(c.domains), {}, Eigen::MatrixXd(1, static_cast<long>(size))};
    for (std::size_t k = 0; k < size; ++k) s.m(0, static_cast<long>(k)) = c.effect[k];
    fx.gen("concept:" + c.name, c.domains, {}, s, c.name);
  }
}

}  // namespace

ZooModel conceptual_space(const std::vector<ConceptDomain>& domains, const std::vector<Concept>& concepts) {
  Fixture fx(Backend::Stoch, Language::CD);
  add_space(fx, domains, concepts);
  return fx.finish("conceptual_space", "Product conceptual space with effect concepts.", {});
}

double concept_fit(const ZooModel& space, const std::map<std::string, std::vector<double>>& instance,
                   const std::string& concept_name) {
  const ModelBinding& b = space.binding();
  const Generator* c = b.sig->find_generator("concept:" + concept_name);
  if (!c) fail(ErrorKind::UnresolvedReference, "no concept '" + concept_name + "'");
  std::vector<Generator> gens;
  std::map<std::string, MorphSem> sems;
  for (const auto& [dom, dist] : instance) {
    if (!b.sig->has_variable(dom)) fail(ErrorKind::DomainMismatch, "unknown domain '" + dom + "'");
    if (dist.size() != b.object(dom).size()) fail(ErrorKind::DomainMismatch, "instance on '" + dom + "' has the wrong size");
    double total = 0.0;
    for (double p : dist) {
      if (!(p >= 0.0)) fail(ErrorKind::InvalidArgument, "instance on '" + dom + "' is not a distribution");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) fail(ErrorKind::InvalidArgument, "instance on '" + dom + "' is not normalized");
    StochMatrix s{{}, {dist.size()}, Eigen::Map<const Eigen::VectorXd>(dist.data(), static_cast<long>(dist.size()))};
    gens.push_back(Generator{"instance:" + dom, {}, {dom}, true, false, false});
    sems["instance:" + dom] = s;
  }
  for (const auto& d : c->dom)
    if (!instance.count(d)) fail(ErrorKind::DomainMismatch, "instance has no value on '" + d + "'");
  ModelBinding ext = extend_binding(b, {}, {}, gens, sems);
  DiagramBuilder db(ext.sig);
  std::map<std::string, DiagramBuilder::Handle> hs;
  for (const auto& [dom, dist] : instance) hs.emplace(dom, db.add1("instance:" + dom, {}));
  std::vector<DiagramBuilder::Handle> args;
  std::set<std::string> used;
  for (const auto& d : c->dom) {
    if (!used.insert(d).second) fail(ErrorKind::DomainMismatch, "concept reads '" + d + "' twice");
    args.push_back(hs.at(d));
  }
  db.add("concept:" + concept_name, args);
  for (const auto& [dom, h] : hs)
    if (!used.count(dom)) db.discard(h);
  return std::get<StochMatrix>(eval_diagram(ext, db.build())).m(0, 0);
}

ZooModel banana() {
  Fixture fx(Backend::Stoch, Language::CD);
  add_space(fx,
            {{"Colour", {"yellow", "green", "brown"}}, {"Taste", {"sweet", "bitter", "sour"}}},
            {{"yellow", {"Colour"}, {1, 0, 0}}, {"green", {"Colour"}, {0, 1, 0}},
             {"sweet", {"Taste"}, {1, 0, 0}}, {"bitter", {"Taste"}, {0, 1, 0}}});
  fx.var("Answer", ObjectSem::prob_space({"no", "yes"}), "answer");
  fx.points("Answer");
  fx.gen("yellow banana", {}, {"Colour", "Taste"},
         point_state(Backend::Stoch, Dims{3, 3}, {0, 0}), "yellow banana");
  fx.gen("bitter?", {"Taste"}, {"Answer"}, fx.stoch({"Taste"}, {"Answer"}, {{1, 0}, {0, 1}, {1, 0}}), "is it bitter?");
  const SignaturePtr sig = fx.sig();
  auto banana_then = [&](bool keep_colour, bool ask) {
    DiagramBuilder db(sig);
    auto ct = db.add("yellow banana", {});
    if (keep_colour) db.output(ct[0]);
    else db.discard(ct[0]);
    if (keep_colour) db.discard(ct[1]);
    else db.output(ask ? db.add1("bitter?", {ct[1]}) : ct[1]);
    return db.build();
  };
  ZooModel z = fx.finish("banana", "Colour and taste concepts with a bitterness question.",
                         {{"query", banana_then(false, true)}, {"goal", from_generator(sig, "Answer=no")}});
  const ModelBinding& b = z.binding();
  z.rules = {verified(b, "a yellow banana is sweet", banana_then(false, false), from_generator(sig, "Taste=sweet"), 0.0),
             verified(b, "a yellow banana is yellow", banana_then(true, false), from_generator(sig, "Colour=yellow"), 0.0),
             verified(b, "sweet is not bitter",
                      compose_seq(from_generator(sig, "Taste=sweet"), from_generator(sig, "bitter?")),
                      from_generator(sig, "Answer=no"), 0.0)};
  return z;
}

std::size_t arity(WordKind k) { return k == WordKind::TransitiveVerb ? 2 : 1; }

namespace {

std::string app_name(const GateApp& a) {
  std::string out = a.word + "(";
  for (std::size_t i = 0; i < a.nouns.size(); ++i) out += (i ? "," : "") + a.nouns[i];
  return out + ")";
}

void expand(const Lexicon& lex, const GateApp& app, std::vector<GateApp>& out, int depth) {
  if (depth > 16) fail(ErrorKind::InvalidArgument, "macro expansion of '" + app.word + "' does not terminate");
  auto m = lex.macros.find(app.word);
  if (m == lex.macros.end()) {
    out.push_back(app);
    return;
  }
  std::size_t holes = 0;
  for (const auto& g : m->second)
    for (const auto& n : g.nouns)
      if (n.size() > 1 && n[0] == '$') holes = std::max<std::size_t>(holes, std::stoul(n.substr(1)));
  if (app.nouns.size() != holes)
    fail(ErrorKind::ArityMismatch, "'" + app.word + "' takes " + std::to_string(holes) + " nouns");
  for (GateApp g : m->second) {
    for (auto& n : g.nouns)
      if (n.size() > 1 && n[0] == '$') n = app.nouns[std::stoul(n.substr(1)) - 1];
    expand(lex, g, out, depth + 1);
  }
}

}  // namespace

ZooModel text_circuit(const TextScript& script, const Lexicon& lex) {
  std::set<std::string> refs;
  for (const auto& r : script.referents)
    if (!refs.insert(r).second) fail(ErrorKind::DuplicateLabel, "referent '" + r + "' appears twice");
  auto check_nouns = [&](const GateApp& a) {
    std::set<std::string> seen;
    for (const auto& n : a.nouns) {
      if (!refs.count(n)) fail(ErrorKind::UnresolvedReference, "'" + n + "' is not a referent");
      if (!seen.insert(n).second) fail(ErrorKind::DuplicateLabel, "'" + app_name(a) + "' repeats a wire");
    }
  };

  std::vector<GateApp> gates, questions, extra_gates, extra_questions;
  auto sort_app = [&](const GateApp& app, std::vector<GateApp>& gs, std::vector<GateApp>& qs) {
    if (lex.questions.count(app.word)) {
      if (app.nouns.size() != 1) fail(ErrorKind::ArityMismatch, "a question reads one noun");
      check_nouns(app);
      qs.push_back(app);
      return;
    }
    std::vector<GateApp> flat;
    expand(lex, app, flat, 0);
    for (const auto& g : flat) {
      auto w = lex.words.find(g.word);
      if (w == lex.words.end()) fail(ErrorKind::UnknownWord, "'" + g.word + "'");
      if (g.nouns.size() != arity(w->second.kind))
        fail(ErrorKind::ArityMismatch, "'" + g.word + "' takes " + std::to_string(arity(w->second.kind)) + " nouns");
      check_nouns(g);
      gs.push_back(g);
    }
  };
  for (const auto& g : script.gates) sort_app(g, gates, gates);
  for (const auto& q : script.questions) {
    if (!lex.questions.count(q.word)) fail(ErrorKind::UnknownWord, "'" + q.word + "' is not a question");
    sort_app(q, gates, questions);
  }
  for (const auto& v : script.vocabulary) sort_app(v, extra_gates, extra_questions);
  for (const auto& g : gates)
    if (lex.questions.count(g.word)) fail(ErrorKind::InvalidArgument, "questions close the circuit; list them separately");

  Fixture fx(lex.backend, lex.backend == Backend::Quant ? Language::Discard : Language::CD);
  for (const auto& r : script.referents) fx.var(r, lex.noun_space, r);
  std::set<std::string> answers;
  for (const auto* qs : {&questions, &extra_questions})
    for (const auto& q : *qs) {
      const std::string& var = lex.questions.at(q.word).answer_var;
      if (answers.count(var)) continue;
      auto a = lex.answer_spaces.find(var);
      if (a == lex.answer_spaces.end()) fail(ErrorKind::UnresolvedReference, "no answer space '" + var + "'");
      fx.var(var, a->second.first, a->second.second);
      if (a->second.first.finite()) fx.points(var);
      answers.insert(var);
    }
  for (const auto* gs : {&gates, &extra_gates})
    for (const auto& g : *gs) {
      const std::string name = app_name(g);
      if (!fx.has_gen(name)) fx.gen(name, g.nouns, g.nouns, lex.words.at(g.word).sem, lex.words.at(g.word).term);
    }
  for (const auto* qs : {&questions, &extra_questions})
    for (const auto& q : *qs) {
      const std::string name = app_name(q);
      const Question& spec = lex.questions.at(q.word);
      if (!fx.has_gen(name)) fx.gen(name, q.nouns, {spec.answer_var}, spec.sem, spec.term);
    }
  std::map<std::string, std::string> state_of;
  if (script.close)
    for (const auto& r : script.referents) {
      auto s = lex.states.find(r);
      if (s == lex.states.end()) s = lex.states.find("*");
      if (s == lex.states.end()) fail(ErrorKind::UnresolvedReference, "no initial state for '" + r + "'");
      state_of[r] = s->first + "(" + r + ")";
      fx.gen(state_of[r], {}, {r}, s->second.first, s->second.second);
    }

  DiagramBuilder db(fx.sig());
  std::map<std::string, DiagramBuilder::Handle> wire;
  for (const auto& r : script.referents) wire.emplace(r, script.close ? db.add1(state_of[r], {}) : db.input(r));
  std::map<std::string, int> seen;
  auto box_id = [&](const std::string& name) {
    const int k = ++seen[name];
    return k == 1 ? name : name + "#" + std::to_string(k);
  };
  for (const auto& g : gates) {
    std::vector<DiagramBuilder::Handle> args;
    for (const auto& n : g.nouns) args.push_back(wire.at(n));
    const std::string name = app_name(g);
    auto outs = db.add(name, args, box_id(name));
    for (std::size_t i = 0; i < outs.size(); ++i) wire.at(g.nouns[i]) = outs[i];
  }
  std::set<std::string> asked;
  for (const auto& q : questions) {
    if (!asked.insert(q.nouns[0]).second) fail(ErrorKind::DuplicateLabel, "'" + q.nouns[0] + "' is asked about twice");
    db.output(db.add1(app_name(q), {wire.at(q.nouns[0])}, box_id(app_name(q))));
  }
  for (const auto& r : script.referents) {
    if (asked.count(r)) continue;
    if (script.discard_unasked) db.discard(wire.at(r));
    else db.output(wire.at(r));
  }
  return fx.finish("text_circuit", "Text circuit over labelled noun wires.", {{"model", db.build()}});
}

namespace {

// gate ; (question on first ⊗ discard) = discard ⊗ question on second.
RewriteRule gate_question_rule(const ModelBinding& b, const std::string& word, const std::string& first,
                               const std::string& second, const std::string& question) {
  DiagramBuilder lhs(b.sig), rhs(b.sig);
  auto x = lhs.input(first), y = lhs.input(second);
  auto out = lhs.add(word + "(" + first + "," + second + ")", {x, y});
  lhs.output(lhs.add1(question + "(" + first + ")", {out[0]}));
  lhs.discard(out[1]);
  rhs.discard(rhs.input(first));
  rhs.output(rhs.add1(question + "(" + second + ")", {rhs.input(second)}));
  return verified(b, word + " passes the location of " + second + " to " + first, lhs.build(), rhs.build(), 0.0);
}

TextScript location_script() {
  TextScript s;
  s.referents = {"Alice", "Bob", "Claire", "kitchen", "garden"};
  s.gates = {{"is_in", {"Bob", "kitchen"}}, {"is_in", {"Claire", "garden"}}, {"follows", {"Alice", "Bob"}}};
  s.questions = {{"where?", {"Alice"}}};
  s.vocabulary = {{"where?", {"Bob"}}, {"where?", {"kitchen"}}};
  return s;
}

}  // namespace

ZooModel location_circuit() {
  Lexicon lex;
  lex.backend = Backend::FinFn;
  const std::vector<std::string> places{"kitchen", "garden", "nowhere"};
  lex.noun_space = ObjectSem::fin_set(places);
  lex.answer_spaces["Loc"] = {ObjectSem::fin_set(places), "location"};
  // Both verbs hand the second referent's place to the first.
  FnTable same_place{{3, 3}, {3, 3}, {}};
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t p = 0; p < 3; ++p) same_place.map.push_back(p * 3 + p);
  lex.words["is_in"] = {WordKind::TransitiveVerb, same_place, "is in"};
  lex.words["follows"] = {WordKind::TransitiveVerb, same_place, "follows"};
  lex.questions["where?"] = {"Loc", FnTable{{3}, {3}, {0, 1, 2}}, "where is"};
  lex.states["*"] = {point_state(Backend::FinFn, 3, 2), "unplaced"};
  lex.states["kitchen"] = {point_state(Backend::FinFn, 3, 0), "the kitchen"};
  lex.states["garden"] = {point_state(Backend::FinFn, 3, 1), "the garden"};
  ZooModel t = text_circuit(location_script(), lex);

  // Same model with the proof goal attached.
  auto bound = t.binding();
  bound.distinguished["goal"] = from_generator(bound.sig, "Loc=kitchen");
  auto shared = std::make_shared<const ModelBinding>(std::move(bound));
  t.interpretation.model = shared;
  t.name = "location";
  t.description = "Where is Alice, given who is where and who follows whom.";
  const ModelBinding& b = *shared;
  t.rules = {gate_question_rule(b, "follows", "Alice", "Bob", "where?"),
             gate_question_rule(b, "is_in", "Bob", "kitchen", "where?"),
             make_eval_rule(b, "where?(kitchen)", {"kitchen(kitchen)"})};
  return t;
}

ZooModel location_circuit_quantum() {
  Lexicon lex;
  lex.backend = Backend::Quant;
  lex.noun_space = ObjectSem::hilbert(2);
  lex.answer_spaces["Loc"] = {ObjectSem::hilbert(2), "location"};
  Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  lex.words["is_in"] = {WordKind::TransitiveVerb, KrausMap{{2, 2}, {2, 2}, {swap}}, "is in"};
  lex.words["follows"] = {WordKind::TransitiveVerb, KrausMap{{2, 2}, {2, 2}, {swap}}, "follows"};
  Eigen::MatrixXcd p0 = ket(2, 0) * ket(2, 0).adjoint(), p1 = ket(2, 1) * ket(2, 1).adjoint();
  lex.questions["where?"] = {"Loc", KrausMap{{2}, {2}, {p0, p1}}, "where is"};
  const double h = std::sqrt(0.5);
  lex.states["*"] = {KrausMap{{}, {2}, {ket(2, 0) * h, ket(2, 1) * h}}, "unplaced"};
  lex.states["kitchen"] = {KrausMap{{}, {2}, {ket(2, 0)}}, "the kitchen"};
  lex.states["garden"] = {KrausMap{{}, {2}, {ket(2, 1)}}, "the garden"};
  ZooModel t = text_circuit(location_script(), lex);
  t.name = "location_quantum";
  t.description = "Location story on qubit wires; basis 0 is the kitchen, 1 the garden.";
  const ModelBinding& b = t.binding();
  t.rules = {gate_question_rule(b, "follows", "Alice", "Bob", "where?"),
             gate_question_rule(b, "is_in", "Bob", "kitchen", "where?")};
  return t;
}

ZooModel hiring_circuit() {
  Lexicon lex;
  lex.backend = Backend::FinFn;
  lex.noun_space = ObjectSem::fin_set({"employed", "unemployed", "unknown"});
  lex.answer_spaces["Answer"] = {ObjectSem::fin_set({"no", "yes"}), "answer"};
  auto sets_second = [](std::size_t status) {
    FnTable t{{3, 3}, {3, 3}, {}};
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t y = 0; y < 3; ++y) t.map.push_back(x * 3 + status);
    return t;
  };
  FnTable id{{3, 3}, {3, 3}, {}};
  for (std::size_t k = 0; k < 9; ++k) id.map.push_back(k);
  lex.words["hired"] = {WordKind::TransitiveVerb, sets_second(0), "hired"};
  lex.words["fired"] = {WordKind::TransitiveVerb, sets_second(1), "fired"};
  lex.words["spoke_to"] = {WordKind::TransitiveVerb, id, "spoke to"};
  lex.questions["employed?"] = {"Answer", FnTable{{3}, {2}, {1, 0, 0}}, "is employed"};
  lex.states["*"] = {point_state(Backend::FinFn, 3, 2), "status unknown"};
  TextScript s;
  s.referents = {"Alice", "Bob", "Claire"};
  s.gates = {{"hired", {"Alice", "Bob"}}, {"spoke_to", {"Alice", "Claire"}}};
  s.vocabulary = {{"fired", {"Alice", "Bob"}}, {"employed?", {"Bob"}}};
  s.close = false;
  s.discard_unasked = false;
  ZooModel t = text_circuit(s, lex);
  // The question is asked after the story, keeping Bob's wire visible in "model".
  auto bound = t.binding();
  const Diagram ask = compose_par(compose_par(identity(bound.sig, {"Alice"}), from_generator(bound.sig, "employed?(Bob)")),
                                  identity(bound.sig, {"Claire"}));
  bound.distinguished["query"] = compose_seq(t.diagram(), ask);
  t.interpretation.model = std::make_shared<const ModelBinding>(std::move(bound));
  t.name = "hiring";
  t.description = "Alice hired Bob and then spoke to Claire; is Bob employed?";
  return t;
}

ZooModel sprinkler() {
  Fixture fx(Backend::Stoch, Language::CD);
  fx.var("Se", ObjectSem::prob_space({"winter", "spring", "summer", "autumn"}), "season");
  fx.var("Sp", ObjectSem::prob_space({"off", "on"}), "sprinkler");
  fx.var("R", ObjectSem::prob_space({"no", "yes"}), "rain");
  fx.var("W", ObjectSem::prob_space({"dry", "wet"}), "wet grass");
  fx.var("Sl", ObjectSem::prob_space({"no", "yes"}), "slippery");
  for (const char* v : {"Se", "Sp", "R", "W", "Sl"}) fx.points(v);
  fx.gen("f", {"Se"}, {"Sp"}, fx.stoch({"Se"}, {"Sp"}, {{0.9, 0.1}, {0.5, 0.5}, {0.2, 0.8}, {0.7, 0.3}}),
         "sprinkler activation");
  fx.gen("g", {"Se"}, {"R"}, fx.stoch({"Se"}, {"R"}, {{0.3, 0.7}, {0.6, 0.4}, {0.9, 0.1}, {0.4, 0.6}}),
         "rain by season");
  fx.gen("h", {"Sp", "R"}, {"W"}, fx.stoch({"Sp", "R"}, {"W"}, {{1, 0}, {0.2, 0.8}, {0.1, 0.9}, {0.01, 0.99}}),
         "grass wetness");
  fx.gen("k", {"W"}, {"Sl"}, fx.stoch({"W"}, {"Sl"}, {{0.95, 0.05}, {0.3, 0.7}}), "slipperiness");
  DiagramBuilder db(fx.sig());
  auto se = db.copy(db.input("Se"), 2);
  auto sp = db.copy(db.add1("f", {se[0]}), 2);
  auto r = db.copy(db.add1("g", {se[1]}), 2);
  auto w = db.copy(db.add1("h", {sp[1], r[1]}), 2);
  db.output(sp[0]);
  db.output(r[0]);
  db.output(w[0]);
  db.output(db.add1("k", {w[1]}));
  return fx.finish("sprinkler", "Season-driven sprinkler, rain, wet grass and slipperiness.", {{"model", db.build()}});
}

ZooModel smoking() {
  Fixture fx(Backend::Stoch, Language::CD);
  fx.var("A", ObjectSem::prob_space({"young", "adult", "senior"}), "age");
  fx.var("B", ObjectSem::prob_space({"low", "high"}), "background conditions");
  fx.var("S", ObjectSem::prob_space({"no", "yes"}), "smokes");
  fx.var("L", ObjectSem::prob_space({"no", "yes"}), "lung cancer");
  fx.opaque("B");
  for (const char* v : {"A", "S", "L"}) fx.points(v);
  fx.gen("cA", {}, {"A"}, fx.stoch({}, {"A"}, {{0.3, 0.45, 0.25}}), "age distribution");
  fx.gen("cB", {"A"}, {"B"}, fx.stoch({"A"}, {"B"}, {{0.6, 0.4}, {0.5, 0.5}, {0.4, 0.6}}), "background given age");
  fx.gen("cS", {"B"}, {"S"}, fx.stoch({"B"}, {"S"}, {{0.6, 0.4}, {0.8, 0.2}}), "smoking given background");
  std::vector<std::vector<double>> cl;
  for (int s = 0; s < 2; ++s)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 3; ++a) {
        const double p = 0.02 + 0.15 * s + 0.05 * b + 0.04 * a;
        cl.push_back({1 - p, p});
      }
  fx.gen("cL", {"S", "B", "A"}, {"L"}, fx.stoch({"S", "B", "A"}, {"L"}, cl), "cancer risk");
  fx.gen("policy", {"A"}, {"S"}, fx.stoch({"A"}, {"S"}, {{0.6, 0.4}, {0.9, 0.1}, {0.9, 0.1}}),
         "smoking under an age-based policy");
  DiagramBuilder db(fx.sig());
  auto a = db.copy(db.add1("cA", {}), 3);
  auto b = db.copy(db.add1("cB", {a[0]}), 3);
  auto s = db.copy(db.add1("cS", {b[0]}), 2);
  auto l = db.add1("cL", {s[0], b[1], a[1]});
  db.output(a[2]);
  db.output(b[2]);
  db.output(s[1]);
  db.output(l);
  return fx.finish("smoking", "Age, latent background, smoking and lung cancer.", {{"model", db.build()}});
}

ZooModel aspirin() {
  Fixture fx(Backend::Stoch, Language::CD);
  fx.var("UA", ObjectSem::prob_space({"0", "1"}), "aspirin disposition");
  fx.var("UH", ObjectSem::prob_space({"never", "always", "cured", "caused"}), "headache response type");
  fx.var("A", ObjectSem::prob_space({"n", "y"}), "took aspirin");
  fx.var("H", ObjectSem::prob_space({"n", "y"}), "headache");
  for (const char* v : {"UA", "UH", "A", "H"}) fx.points(v);
  fx.gen("uA", {}, {"UA"}, fx.stoch({}, {"UA"}, {{0.3, 0.7}}), "disposition prior");
  fx.gen("uH", {}, {"UH"}, fx.stoch({}, {"UH"}, {{0.2, 0.3, 0.4, 0.1}}), "response type prior");
  fx.gen("fA", {"UA"}, {"A"}, fx.table_stoch({"UA"}, {"A"}, [](const auto& d) {
    return std::vector<std::size_t>{d[0] == 0 ? 1u : 0u};
  }), "takes aspirin");
  fx.gen("fH", {"A", "UH"}, {"H"}, fx.table_stoch({"A", "UH"}, {"H"}, [](const auto& d) {
    const std::size_t a = d[0], u = d[1];
    return std::vector<std::size_t>{u == 0 ? 0 : u == 1 ? 1 : u == 2 ? 1 - a : a};
  }), "headache outcome");
  DiagramBuilder db(fx.sig());
  auto a = db.copy(db.add1("fA", {db.add1("uA", {})}), 2);
  db.output(a[0]);
  db.output(db.add1("fH", {a[1], db.add1("uH", {})}));
  return fx.finish("aspirin", "Aspirin and headache with exogenous response types.", {{"model", db.build()}});
}

std::vector<std::string> zoo_names() {
  return {"linear", "arrest_score", "decision_list", "decision_tree", "mlp", "transformer",
          "loan_sequence", "loan_black_box", "banana", "location", "location_quantum", "hiring",
          "sprinkler", "smoking", "aspirin"};
}

ZooModel zoo_fixture(const std::string& name) {
  if (name == "linear") return linear_model({0.5, -1.25, 2.0}, 0.75);
  if (name == "arrest_score") return arrest_score();
  if (name == "decision_list") return decision_list();
  if (name == "decision_tree") return decision_tree();
  if (name == "mlp") {
    Eigen::MatrixXd w1(2, 3), w2(1, 2);
    w1 << 0.5, -1, 0.25, 1.5, 0.75, -0.5;
    w2 << 1, -2;
    return mlp({3, 2, 1}, {w1, w2}, {Eigen::Vector2d(0.1, -0.2), Eigen::VectorXd::Constant(1, 0.3)},
               {Activation::Relu, Activation::Sigmoid});
  }
  if (name == "transformer") return transformer_stub(3);
  if (name == "loan_sequence") return loan_sequence();
  if (name == "loan_black_box") return loan_black_box();
  if (name == "banana") return banana();
  if (name == "location") return location_circuit();
  if (name == "location_quantum") return location_circuit_quantum();
  if (name == "hiring") return hiring_circuit();
  if (name == "sprinkler") return sprinkler();
  if (name == "smoking") return smoking();
  if (name == "aspirin") return aspirin();
  fail(ErrorKind::UnresolvedReference, "no fixture '" + name + "'");
}

}  // namespace compmodel
