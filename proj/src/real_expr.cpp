#include <cmath>
#include <functional>
#include <random>

#include "compmodel/error.hpp"
#include "semantics_impl.hpp"

namespace compmodel {

namespace detail {

namespace {

// Appends `src` nodes to `dst`, translating register numbers through `reg`.
void append_nodes(RealExpr& dst, const RealExpr& src,
                  const std::function<std::size_t(std::size_t)>& reg) {
  for (RealNode n : src.nodes) {
    for (auto& a : n.args) a = reg(a);
    dst.nodes.push_back(std::move(n));
  }
}

std::size_t register_count(const RealExpr& e) { return e.dom.size() + e.nodes.size(); }

}  // namespace

RealExpr real_identity(const Dims& dims) {
  RealExpr e{dims, dims, {}, {}};
  for (std::size_t i = 0; i < dims.size(); ++i) e.outputs.push_back(i);
  return e;
}

RealExpr real_copy(std::size_t dim, std::size_t fanout) {
  return RealExpr{{dim}, Dims(fanout, dim), {}, std::vector<std::size_t>(fanout, 0)};
}

RealExpr real_discard(const Dims& dims) { return RealExpr{dims, {}, {}, {}}; }

RealExpr real_compose(const RealExpr& f, const RealExpr& g) {
  RealExpr out{f.dom, g.cod, f.nodes, {}};
  const std::size_t base = register_count(f);
  auto reg = [&](std::size_t r) {
    return r < g.dom.size() ? f.outputs[r] : base + (r - g.dom.size());
  };
  append_nodes(out, g, reg);
  for (auto r : g.outputs) out.outputs.push_back(reg(r));
  return out;
}

RealExpr real_tensor(const RealExpr& f, const RealExpr& g) {
  const std::size_t fi = f.dom.size(), gi = g.dom.size(), fn = f.nodes.size();
  RealExpr out{concat(f.dom, g.dom), concat(f.cod, g.cod), {}, {}};
  auto freg = [&](std::size_t r) { return r < fi ? r : fi + gi + (r - fi); };
  auto greg = [&](std::size_t r) { return r < gi ? fi + r : fi + gi + fn + (r - gi); };
  append_nodes(out, f, freg);
  append_nodes(out, g, greg);
  for (auto r : f.outputs) out.outputs.push_back(freg(r));
  for (auto r : g.outputs) out.outputs.push_back(greg(r));
  return out;
}

RealExpr real_permute(const RealExpr& m, const std::vector<std::size_t>& perm) {
  if (perm.size() != m.cod.size())
    fail(ErrorKind::DimensionMismatch, "permutation length differs from factor count");
  RealExpr out{m.dom, {}, m.nodes, {}};
  for (auto p : perm) {
    out.cod.push_back(m.cod.at(p));
    out.outputs.push_back(m.outputs.at(p));
  }
  return out;
}

RealExpr real_apply_front(const RealExpr& box, const RealExpr& m) {
  const std::size_t k = box.dom.size();
  RealExpr out{m.dom, box.cod, m.nodes, {}};
  const std::size_t base = register_count(m);
  auto reg = [&](std::size_t r) { return r < k ? m.outputs[r] : base + (r - k); };
  append_nodes(out, box, reg);
  for (auto r : box.outputs) out.outputs.push_back(reg(r));
  for (std::size_t j = k; j < m.outputs.size(); ++j) {
    out.outputs.push_back(m.outputs[j]);
    out.cod.push_back(m.cod[j]);
  }
  return out;
}

double real_dist(const RealExpr& a, const RealExpr& b) {
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 256; ++s) {
    std::vector<Eigen::VectorXd> in;
    for (auto d : a.dom) {
      Eigen::VectorXd v(static_cast<long>(d));
      for (long i = 0; i < v.size(); ++i) v(i) = u(rng);
      in.push_back(std::move(v));
    }
    auto x = eval_real(a, in);
    auto y = eval_real(b, in);
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j].size() > 0) worst = std::max(worst, (x[j] - y[j]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace detail

std::vector<Eigen::VectorXd> eval_real(const RealExpr& e, const std::vector<Eigen::VectorXd>& in) {
  if (in.size() != e.dom.size()) fail(ErrorKind::DimensionMismatch, "real program arity");
  std::vector<Eigen::VectorXd> regs = in;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (static_cast<std::size_t>(in[i].size()) != e.dom[i])
      fail(ErrorKind::DimensionMismatch, "real program input dimension");
  for (const RealNode& n : e.nodes) {
    auto arg = [&](std::size_t i) -> const Eigen::VectorXd& { return regs.at(n.args.at(i)); };
    Eigen::VectorXd v;
    switch (n.op) {
      case RealOp::Linear: v = n.matrix * arg(0); break;
      case RealOp::BiasAdd: v = arg(0) + n.vector; break;
      case RealOp::Add: v = arg(0) + arg(1); break;
      case RealOp::ScalarMult: v = n.scalar * arg(0); break;
      case RealOp::Const: v = n.vector; break;
      case RealOp::Activation: {
        const auto& x = arg(0);
        switch (n.activation) {
          case Activation::Relu: v = x.cwiseMax(0.0); break;
          case Activation::Sigmoid: v = (1.0 + (-x.array()).exp()).inverse().matrix(); break;
          case Activation::Tanh: v = x.array().tanh().matrix(); break;
          case Activation::Id: v = x; break;
          case Activation::Softmax: {
            if (x.size() == 0) {
              v = x;
              break;
            }
            Eigen::ArrayXd ex = (x.array() - x.maxCoeff()).exp();
            v = (ex / ex.sum()).matrix();
            break;
          }
        }
        break;
      }
    }
    regs.push_back(std::move(v));
  }
  std::vector<Eigen::VectorXd> out;
  for (auto r : e.outputs) out.push_back(regs.at(r));
  return out;
}

void check_real_expr(const RealExpr& e) {
  std::vector<std::size_t> dims(e.dom.begin(), e.dom.end());
  for (const RealNode& n : e.nodes) {
    auto arg = [&](std::size_t i) {
      if (i >= n.args.size() || n.args[i] >= dims.size())
        fail(ErrorKind::DimensionMismatch, "real node refers to a later or missing register");
      return dims[n.args[i]];
    };
    std::size_t d = 0;
    switch (n.op) {
      case RealOp::Linear:
        if (static_cast<std::size_t>(n.matrix.cols()) != arg(0))
          fail(ErrorKind::DimensionMismatch, "linear map width");
        d = static_cast<std::size_t>(n.matrix.rows());
        break;
      case RealOp::BiasAdd:
        if (static_cast<std::size_t>(n.vector.size()) != arg(0))
          fail(ErrorKind::DimensionMismatch, "bias length");
        d = arg(0);
        break;
      case RealOp::Add:
        if (arg(0) != arg(1)) fail(ErrorKind::DimensionMismatch, "add of unequal dimensions");
        d = arg(0);
        break;
      case RealOp::ScalarMult:
      case RealOp::Activation: d = arg(0); break;
      case RealOp::Const: d = static_cast<std::size_t>(n.vector.size()); break;
    }
    if (n.dim != d) fail(ErrorKind::DimensionMismatch, "real node declared dimension");
    dims.push_back(d);
  }
  if (e.outputs.size() != e.cod.size())
    fail(ErrorKind::DimensionMismatch, "real program output count");
  for (std::size_t j = 0; j < e.outputs.size(); ++j)
    if (e.outputs[j] >= dims.size() || dims[e.outputs[j]] != e.cod[j])
      fail(ErrorKind::DimensionMismatch, "real program output dimension");
}

}  // namespace compmodel
