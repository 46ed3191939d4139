#include "compmodel/influence.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "compmodel/error.hpp"
#include "compmodel/graph_edit.hpp"

namespace compmodel {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::StructuralNoInfluence: return "structural_no_influence";
    case Verdict::SemanticNoInfluence: return "semantic_no_influence";
    case Verdict::InfluenceWitness: return "influence_witness";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

void require_channels(const Diagram& d) {
  const Signature& sig = *d.signature();
  for (const Box& b : d.boxes())
    if (b.kind == BoxKind::Gen && !sig.generator(b.gen).channel)
      fail(ErrorKind::NonChannelBox, "box '" + b.id + "' is not flagged as a channel");
}

void check_indices(const std::vector<std::size_t>& idx, std::size_t n, const char* what) {
  for (auto i : idx)
    if (i >= n) fail(ErrorKind::IndexOutOfRange, std::string(what) + " index " + std::to_string(i));
}

SignaturePtr with_discard(const SignaturePtr& sig) {
  if (sig->language() != Language::Monoidal) return sig;
  return build_signature(sig->variables(), sig->generators(), {}, Language::Discard);
}

}  // namespace

std::vector<bool> reaches(const Diagram& d, std::size_t out_idx) {
  require_valid(d);
  check_indices({out_idx}, d.outputs().size(), "output");
  Wiring w = make_wiring(d);
  // Backward search from the output wire.
  std::vector<bool> box_seen(d.boxes().size(), false), hit(d.inputs().size(), false);
  std::deque<std::size_t> todo{w.output[out_idx]};
  std::set<std::size_t> wire_seen{w.output[out_idx]};
  while (!todo.empty()) {
    const Wire& wire = d.wires()[todo.front()];
    todo.pop_front();
    if (wire.from.boundary()) {
      hit[wire.from.port] = true;
      continue;
    }
    std::size_t b = wire.from.box;
    if (box_seen[b]) continue;
    box_seen[b] = true;
    for (auto wi : w.in[b])
      if (wire_seen.insert(wi).second) todo.push_back(wi);
  }
  return hit;
}

Diagram discard_simplify(const Diagram& d, const std::vector<std::size_t>& keep) {
  require_valid(d);
  require_channels(d);
  check_indices(keep, d.outputs().size(), "output");
  std::set<std::size_t> kept(keep.begin(), keep.end());
  GraphEdit g(d);
  g.set_signature(with_discard(d.signature()));
  for (std::size_t k = d.outputs().size(); k-- > 0;) {
    if (kept.count(k)) continue;
    std::size_t w = g.wire_into(Endpoint{Endpoint::kBoundary, k});
    Endpoint src = g.wires[w].from;
    std::string var = g.wires[w].var;
    g.kill_wire(w);
    g.remove_output(k);
    g.discard_at(src, var);
  }
  return normalize(g.finish());
}

InfluenceCertificate structural_no_influence(const Diagram& d, const std::vector<std::size_t>& ins,
                                             const std::vector<std::size_t>& outs) {
  require_valid(d);
  require_channels(d);
  check_indices(ins, d.inputs().size(), "input");
  check_indices(outs, d.outputs().size(), "output");
  InfluenceCertificate c{d, ins, outs, Verdict::Unknown, std::nullopt, std::nullopt};
  for (auto o : outs) {
    auto hit = reaches(d, o);
    for (auto i : ins)
      if (hit[i]) return c;
  }
  std::vector<std::size_t> keep(outs);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  c.verdict = Verdict::StructuralNoInfluence;
  c.simplified = discard_simplify(d, keep);
  return c;
}

InfluenceCertificate structural_no_influence(const Diagram& d, std::size_t in_idx, std::size_t out_idx) {
  return structural_no_influence(d, std::vector<std::size_t>{in_idx}, std::vector<std::size_t>{out_idx});
}

InfluenceCertificate semantic_no_influence(const ModelBinding& b, const Diagram& d,
                                           const std::vector<std::size_t>& ins,
                                           const std::vector<std::size_t>& outs, double tol) {
  if (b.backend != Backend::FinFn && b.backend != Backend::Stoch)
    fail(ErrorKind::InfiniteCarrier, "semantic influence needs finite classical carriers");
  require_valid(d);
  check_indices(ins, d.inputs().size(), "input");
  check_indices(outs, d.outputs().size(), "output");
  MorphSem full = eval_diagram(b, d);
  MorphSem marg = marginal(full, outs);
  Eigen::MatrixXd m = marg.index() == 0 ? to_matrix(std::get<FnTable>(marg)).m : std::get<StochMatrix>(marg).m;
  const Dims dims = b.dims_of(d.inputs());
  std::set<std::size_t> varied(ins.begin(), ins.end());

  InfluenceCertificate c{d, ins, outs, Verdict::SemanticNoInfluence, std::nullopt, std::nullopt};
  // For each column, compare against the column that agrees on the fixed inputs
  // and has the varied inputs at 0; visiting columns in order gives the least witness.
  const std::size_t cols = product(dims);
  for (std::size_t col = 0; col < cols; ++col) {
    auto digits = unflatten(col, dims);
    auto base = digits;
    for (auto i : varied) base[i] = 0;
    std::size_t ref = flatten(base, dims);
    if (ref == col) continue;
    double diff = (m.col(static_cast<long>(col)) - m.col(static_cast<long>(ref))).cwiseAbs().maxCoeff();
    if (diff > tol) {
      c.verdict = Verdict::InfluenceWitness;
      c.witness = InfluenceWitnessPair{base, digits, m.col(static_cast<long>(ref)), m.col(static_cast<long>(col))};
      return c;
    }
  }
  return c;
}

InfluenceCertificate semantic_no_influence(const ModelBinding& b, const Diagram& d, std::size_t in_idx,
                                           std::size_t out_idx, double tol) {
  return semantic_no_influence(b, d, std::vector<std::size_t>{in_idx}, std::vector<std::size_t>{out_idx},
                               tol);
}

}  // namespace compmodel
