#include "random_models.hpp"

#include <Eigen/QR>
#include <algorithm>

namespace testsupport {

using namespace compmodel;

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

struct Op {
  enum Kind { Gen, Copy, Discard, Swap } kind;
  std::string gen;
  std::vector<std::size_t> args;  // positions in the live list, consumed in order
  std::size_t n = 0;
};

struct Shape {
  std::vector<std::string> inputs;
  std::vector<Op> ops;
};

struct Pool {
  std::vector<std::string> vars;
  std::map<std::string, std::size_t> size;
  std::vector<Generator> gens;
};

std::size_t live_product(const Pool& pool, const std::vector<std::string>& live) {
  std::size_t p = 1;
  for (const auto& v : live) p *= pool.size.at(v);
  return p;
}

std::size_t weight(const Pool& pool, const RandomOptions& opt, const std::string& v) {
  // RealVec dimensions add rather than multiply; bound them loosely.
  return opt.backend == Backend::RealVec ? 2 : pool.size.at(v);
}

std::size_t bound_product(const Pool& pool, const RandomOptions& opt,
                          const std::vector<std::string>& live) {
  if (opt.backend != Backend::RealVec) return live_product(pool, live);
  std::size_t p = 1;
  for (const auto& v : live) p *= weight(pool, opt, v);
  return p;
}

Shape random_shape(std::mt19937_64& rng, const RandomOptions& opt, Pool& pool,
                   std::vector<std::string> inputs, std::vector<std::string>& outputs) {
  Shape s{inputs, {}};
  std::vector<std::string> live = inputs;
  const bool can_copy = opt.language == Language::CD;
  const bool can_discard = opt.language != Language::Monoidal;
  const std::size_t limit =
      opt.language == Language::Monoidal ? opt.max_boundary : opt.max_live;
  const std::size_t boxes = 1 + pick(rng, opt.max_boxes);

  for (std::size_t step = 0; step < boxes; ++step) {
    double r = std::uniform_real_distribution<double>(0, 1)(rng);
    if (can_copy && r < 0.15 && !live.empty()) {
      std::size_t p = pick(rng, live.size());
      std::size_t n = 2 + pick(rng, 2);
      auto next = live;
      for (std::size_t k = 1; k < n; ++k) next.push_back(live[p]);
      if (bound_product(pool, opt, next) > limit) continue;
      Op op{Op::Copy, "", {p}, n};
      std::string v = live[p];
      live.erase(live.begin() + static_cast<long>(p));
      for (std::size_t k = 0; k < n; ++k) live.insert(live.begin(), v);
      s.ops.push_back(op);
      continue;
    }
    if (can_discard && r < 0.25 && !live.empty()) {
      std::size_t p = pick(rng, live.size());
      s.ops.push_back(Op{Op::Discard, "", {p}, 0});
      live.erase(live.begin() + static_cast<long>(p));
      continue;
    }
    if (opt.allow_swap && r < 0.33 && live.size() >= 2) {
      std::size_t a = pick(rng, live.size());
      std::size_t b = pick(rng, live.size() - 1);
      if (b >= a) ++b;
      std::string va = live[a], vb = live[b];
      s.ops.push_back(Op{Op::Swap, "", {a, b}, 0});
      // Remove both then push swapped outputs to the front.
      live.erase(live.begin() + static_cast<long>(std::max(a, b)));
      live.erase(live.begin() + static_cast<long>(std::min(a, b)));
      live.insert(live.begin(), va);
      live.insert(live.begin(), vb);
      continue;
    }
    // Generator with up to two inputs and up to two outputs.
    std::size_t k = std::min<std::size_t>(pick(rng, 3), live.size());
    std::vector<std::size_t> args;
    std::vector<std::size_t> avail(live.size());
    for (std::size_t i = 0; i < avail.size(); ++i) avail[i] = i;
    std::shuffle(avail.begin(), avail.end(), rng);
    args.assign(avail.begin(), avail.begin() + static_cast<long>(k));
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < live.size(); ++i)
      if (std::find(args.begin(), args.end(), i) == args.end()) rest.push_back(live[i]);
    std::size_t m = pick(rng, 3);
    if (!can_discard && m == 0) m = 1;
    std::vector<std::string> cod;
    for (std::size_t j = 0; j < m; ++j) cod.push_back(pool.vars[pick(rng, pool.vars.size())]);
    auto next = cod;
    next.insert(next.end(), rest.begin(), rest.end());
    if (bound_product(pool, opt, next) > limit) continue;

    Generator g;
    g.name = "g" + std::to_string(pool.gens.size());
    for (auto a : args) g.dom.push_back(live[a]);
    g.cod = cod;
    g.channel = opt.channels_only || coin(rng, 0.7) || opt.backend == Backend::FinFn ||
                opt.backend == Backend::RealVec;
    if (opt.backend == Backend::FinFn || opt.backend == Backend::RealVec) g.deterministic = true;
    else g.deterministic = g.channel && coin(rng, 0.3);
    if (opt.backend == Backend::Quant && g.deterministic) {
      std::size_t din = 1, dout = 1;
      for (const auto& v : g.dom) din *= pool.size.at(v);
      for (const auto& v : g.cod) dout *= pool.size.at(v);
      if (dout < din) g.deterministic = false;
    }
    g.sharp = g.deterministic && g.dom.empty() && opt.backend != Backend::RealVec;
    if (opt.backend == Backend::RealVec) g.sharp = false;
    pool.gens.push_back(g);
    s.ops.push_back(Op{Op::Gen, g.name, args, 0});
    live = next;
  }
  // Trim the boundary.
  while (can_discard && !live.empty() && bound_product(pool, opt, live) > opt.max_boundary) {
    s.ops.push_back(Op{Op::Discard, "", {0}, 0});
    live.erase(live.begin());
  }
  outputs = live;
  return s;
}

Diagram replay(const SignaturePtr& sig, const Shape& s) {
  DiagramBuilder b(sig);
  std::vector<DiagramBuilder::Handle> live;
  for (const auto& v : s.inputs) live.push_back(b.input(v));
  auto take = [&](std::vector<std::size_t> pos) {
    std::vector<DiagramBuilder::Handle> hs;
    for (auto p : pos) hs.push_back(live[p]);
    std::sort(pos.rbegin(), pos.rend());
    for (auto p : pos) live.erase(live.begin() + static_cast<long>(p));
    return hs;
  };
  for (const Op& op : s.ops) {
    switch (op.kind) {
      case Op::Copy: {
        auto hs = take(op.args);
        auto outs = b.copy(hs[0], op.n);
        live.insert(live.begin(), outs.begin(), outs.end());
        break;
      }
      case Op::Discard: b.discard(take(op.args)[0]); break;
      case Op::Swap: {
        auto hs = take(op.args);
        auto [x, y] = b.swap(hs[0], hs[1]);
        live.insert(live.begin(), y);
        live.insert(live.begin(), x);
        break;
      }
      case Op::Gen: {
        auto hs = take(op.args);
        auto outs = b.add(op.gen, hs);
        live.insert(live.begin(), outs.begin(), outs.end());
        break;
      }
    }
  }
  for (auto h : live) b.output(h);
  return b.build();
}

Eigen::MatrixXcd random_isometry(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd a(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) a(i, j) = {n(rng), n(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
}

}  // namespace

Eigen::MatrixXd dyadic_stochastic(std::mt19937_64& rng, long rows, long cols) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (long c = 0; c < cols; ++c)
    for (int unit = 0; unit < 8; ++unit)
      m(static_cast<long>(pick(rng, static_cast<std::size_t>(rows))), c) += 0.125;
  return m;
}

MorphSem random_morphism(std::mt19937_64& rng, Backend backend, const Dims& dom, const Dims& cod,
                         bool channel, bool deterministic, bool dyadic) {
  const long rows = static_cast<long>(product(cod)), cols = static_cast<long>(product(dom));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (backend) {
    case Backend::FinFn: {
      FnTable t{dom, cod, std::vector<std::size_t>(static_cast<std::size_t>(cols))};
      for (auto& v : t.map) v = pick(rng, static_cast<std::size_t>(rows));
      return t;
    }
    case Backend::Stoch: {
      StochMatrix s{dom, cod, Eigen::MatrixXd::Zero(rows, cols)};
      if (deterministic) {
        for (long c = 0; c < cols; ++c) s.m(static_cast<long>(pick(rng, static_cast<std::size_t>(rows))), c) = 1.0;
      } else if (dyadic) {
        s.m = dyadic_stochastic(rng, rows, cols);
        if (!channel)
          for (long c = 0; c < cols; ++c) s.m.col(c) *= 0.125 * static_cast<double>(1 + pick(rng, 12));
      } else {
        for (long r = 0; r < rows; ++r)
          for (long c = 0; c < cols; ++c) s.m(r, c) = u(rng);
        for (long c = 0; c < cols; ++c) s.m.col(c) /= s.m.col(c).sum();
        if (!channel) s.m *= 0.5 + u(rng);
      }
      return s;
    }
    case Backend::Quant: {
      long env = deterministic ? 1 : 1 + static_cast<long>(pick(rng, 2));
      while (rows * env < cols) ++env;
      Eigen::MatrixXcd v = random_isometry(rng, rows * env, cols);
      KrausMap k{dom, cod, {}};
      for (long e = 0; e < env; ++e) k.ops.push_back(v.middleRows(e * rows, rows));
      if (!channel)
        for (auto& op : k.ops) op *= std::sqrt(0.25 + 0.5 * u(rng));
      return k;
    }
    case Backend::RealVec: {
      std::normal_distribution<double> n(0.0, 1.0);
      RealExpr e{dom, cod, {}, {}};
      auto push = [&](RealNode node) {
        e.nodes.push_back(std::move(node));
        return dom.size() + e.nodes.size() - 1;
      };
      for (auto d : cod) {
        std::size_t acc;
        if (dom.empty()) {
          RealNode c;
          c.op = RealOp::Const;
          c.vector = Eigen::VectorXd::NullaryExpr(static_cast<long>(d), [&] { return n(rng); });
          c.dim = d;
          acc = push(c);
        } else {
          for (std::size_t i = 0; i < dom.size(); ++i) {
            RealNode lin;
            lin.op = RealOp::Linear;
            lin.args = {i};
            lin.matrix = Eigen::MatrixXd::NullaryExpr(static_cast<long>(d), static_cast<long>(dom[i]),
                                                      [&] { return n(rng); });
            lin.dim = d;
            std::size_t r = push(lin);
            if (i == 0) {
              acc = r;
            } else {
              RealNode add;
              add.op = RealOp::Add;
              add.args = {acc, r};
              add.dim = d;
              acc = push(add);
            }
          }
          RealNode bias;
          bias.op = RealOp::BiasAdd;
          bias.args = {acc};
          bias.vector = Eigen::VectorXd::NullaryExpr(static_cast<long>(d), [&] { return n(rng); });
          bias.dim = d;
          acc = push(bias);
          static const Activation acts[] = {Activation::Relu, Activation::Sigmoid, Activation::Tanh,
                                            Activation::Softmax, Activation::Id};
          RealNode act;
          act.op = RealOp::Activation;
          act.activation = acts[pick(rng, 5)];
          act.args = {acc};
          act.dim = d;
          acc = push(act);
          if (coin(rng, 0.3)) {
            RealNode sc;
            sc.op = RealOp::ScalarMult;
            sc.scalar = n(rng);
            sc.args = {acc};
            sc.dim = d;
            acc = push(sc);
          }
        }
        e.outputs.push_back(acc);
      }
      return e;
    }
  }
  return FnTable{};
}

RandomCase random_case(std::mt19937_64& rng, const RandomOptions& opt) {
  Pool pool;
  const std::size_t nvars = 3 + pick(rng, 3);
  for (std::size_t i = 0; i < nvars; ++i) {
    std::string v = "V" + std::to_string(i);
    pool.vars.push_back(v);
    std::size_t size = 0;
    switch (opt.backend) {
      case Backend::Quant: size = 2; break;
      case Backend::RealVec: size = 1 + pick(rng, 3); break;
      default: size = 2 + pick(rng, opt.max_carrier - 1);
    }
    pool.size[v] = size;
  }
  // Inputs of the first diagram: up to two variables within the boundary bound.
  std::vector<std::string> inputs;
  std::size_t nin = pick(rng, 3);
  for (std::size_t i = 0; i < nin; ++i) {
    inputs.push_back(pool.vars[pick(rng, pool.vars.size())]);
    if (bound_product(pool, opt, inputs) > opt.max_boundary) inputs.pop_back();
  }
  std::vector<std::string> mid, out;
  Shape s1 = random_shape(rng, opt, pool, inputs, mid);
  Shape s2 = random_shape(rng, opt, pool, mid, out);

  SignaturePtr sig = build_signature(pool.vars, pool.gens, {}, opt.language);
  std::map<std::string, ObjectSem> objects;
  for (const auto& v : pool.vars) {
    std::size_t n = pool.size[v];
    switch (opt.backend) {
      case Backend::FinFn:
      case Backend::Stoch: {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back(v + "_" + std::to_string(i));
        objects[v] = opt.backend == Backend::FinFn ? ObjectSem::fin_set(labels)
                                                   : ObjectSem::prob_space(labels);
        break;
      }
      case Backend::Quant: objects[v] = ObjectSem::hilbert(n); break;
      case Backend::RealVec: objects[v] = ObjectSem::real_space(n); break;
    }
  }
  std::map<std::string, MorphSem> morphisms;
  for (const auto& g : pool.gens) {
    Dims dom, cod;
    for (const auto& v : g.dom) dom.push_back(pool.size[v]);
    for (const auto& v : g.cod) cod.push_back(pool.size[v]);
    morphisms[g.name] =
        random_morphism(rng, opt.backend, dom, cod, g.channel, g.deterministic, opt.dyadic);
  }
  ModelBinding b = bind_model(sig, opt.backend, objects, morphisms);
  return RandomCase{b, replay(sig, s1), replay(sig, s2)};
}

}  // namespace testsupport
