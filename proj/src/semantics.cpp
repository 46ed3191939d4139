#include "compmodel/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "compmodel/error.hpp"
#include "semantics_impl.hpp"

namespace compmodel {

namespace detail {

Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void require_dims(const Dims& expected, const Dims& found, const char* what) {
  if (expected != found) fail(ErrorKind::DimensionMismatch, what);
}

std::vector<std::size_t> permutation_index(const Dims& old_dims,
                                           const std::vector<std::size_t>& perm,
                                           Dims* new_dims) {
  if (perm.size() != old_dims.size())
    fail(ErrorKind::DimensionMismatch, "permutation length differs from factor count");
  std::vector<bool> seen(perm.size(), false);
  Dims nd(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size() || seen[perm[i]])
      fail(ErrorKind::InvalidArgument, "not a permutation");
    seen[perm[i]] = true;
    nd[i] = old_dims[perm[i]];
  }
  const std::size_t total = product(old_dims);
  std::vector<std::size_t> out(total);
  std::vector<std::size_t> digits(old_dims.size(), 0), nd_digits(perm.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t i = 0; i < perm.size(); ++i) nd_digits[i] = digits[perm[i]];
    out[idx] = flatten(nd_digits, nd);
    for (std::size_t f = old_dims.size(); f-- > 0;) {
      if (++digits[f] < old_dims[f]) break;
      digits[f] = 0;
    }
  }
  if (new_dims) *new_dims = nd;
  return out;
}

}  // namespace detail

using namespace detail;

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::FinFn: return "finfn";
    case Backend::Stoch: return "stoch";
    case Backend::Quant: return "quant";
    case Backend::RealVec: return "realvec";
  }
  return "finfn";
}

Backend backend_from_string(std::string_view s) {
  if (s == "finfn") return Backend::FinFn;
  if (s == "stoch") return Backend::Stoch;
  if (s == "quant") return Backend::Quant;
  if (s == "realvec") return Backend::RealVec;
  fail(ErrorKind::ParseError, "unknown backend '" + std::string(s) + "'");
}

namespace {

void check_elements(const std::vector<std::string>& elements) {
  if (elements.empty()) fail(ErrorKind::InvalidArgument, "empty element list");
  std::set<std::string> seen(elements.begin(), elements.end());
  if (seen.size() != elements.size()) fail(ErrorKind::DuplicateName, "repeated element label");
}

}  // namespace

ObjectSem ObjectSem::fin_set(std::vector<std::string> elements) {
  check_elements(elements);
  return ObjectSem{Kind::FinSet, std::move(elements), 0};
}
ObjectSem ObjectSem::prob_space(std::vector<std::string> elements) {
  check_elements(elements);
  return ObjectSem{Kind::ProbSpace, std::move(elements), 0};
}
ObjectSem ObjectSem::hilbert(std::size_t dim) {
  if (dim == 0) fail(ErrorKind::InvalidArgument, "Hilbert space of dimension 0");
  return ObjectSem{Kind::Hilbert, {}, dim};
}
ObjectSem ObjectSem::real_space(std::size_t dim) { return ObjectSem{Kind::RealSpace, {}, dim}; }

std::size_t ObjectSem::size() const { return finite() ? elements.size() : dim; }

std::optional<std::size_t> ObjectSem::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i] == label) return i;
  return std::nullopt;
}

ObjectSem::Kind object_kind_for(Backend b) {
  switch (b) {
    case Backend::FinFn: return ObjectSem::Kind::FinSet;
    case Backend::Stoch: return ObjectSem::Kind::ProbSpace;
    case Backend::Quant: return ObjectSem::Kind::Hilbert;
    case Backend::RealVec: return ObjectSem::Kind::RealSpace;
  }
  return ObjectSem::Kind::FinSet;
}

std::size_t product(const Dims& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

std::vector<std::size_t> unflatten(std::size_t index, const Dims& dims) {
  std::vector<std::size_t> digits(dims.size());
  for (std::size_t f = dims.size(); f-- > 0;) {
    digits[f] = index % dims[f];
    index /= dims[f];
  }
  return digits;
}

std::size_t flatten(const std::vector<std::size_t>& digits, const Dims& dims) {
  std::size_t index = 0;
  for (std::size_t f = 0; f < dims.size(); ++f) index = index * dims[f] + digits[f];
  return index;
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Softmax: return "softmax";
    case Activation::Id: return "id";
  }
  return "id";
}

Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::Relu;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "tanh") return Activation::Tanh;
  if (s == "softmax") return Activation::Softmax;
  if (s == "id") return Activation::Id;
  fail(ErrorKind::ParseError, "unknown activation '" + std::string(s) + "'");
}

std::string_view to_string(RealOp op) {
  switch (op) {
    case RealOp::Linear: return "linear";
    case RealOp::BiasAdd: return "bias";
    case RealOp::Activation: return "activation";
    case RealOp::Add: return "add";
    case RealOp::ScalarMult: return "scale";
    case RealOp::Const: return "const";
  }
  return "add";
}

RealOp real_op_from_string(std::string_view s) {
  if (s == "linear") return RealOp::Linear;
  if (s == "bias") return RealOp::BiasAdd;
  if (s == "activation") return RealOp::Activation;
  if (s == "add") return RealOp::Add;
  if (s == "scale") return RealOp::ScalarMult;
  if (s == "const") return RealOp::Const;
  fail(ErrorKind::ParseError, "unknown real op '" + std::string(s) + "'");
}

Backend backend_of(const MorphSem& m) {
  switch (m.index()) {
    case 0: return Backend::FinFn;
    case 1: return Backend::Stoch;
    case 2: return Backend::Quant;
    default: return Backend::RealVec;
  }
}

const Dims& dom_of(const MorphSem& m) {
  return std::visit([](const auto& x) -> const Dims& { return x.dom; }, m);
}
const Dims& cod_of(const MorphSem& m) {
  return std::visit([](const auto& x) -> const Dims& { return x.cod; }, m);
}

double backend_tolerance(Backend b) {
  switch (b) {
    case Backend::FinFn: return 0.0;
    case Backend::Stoch: return 1e-12;
    case Backend::Quant: return 1e-10;
    case Backend::RealVec: return 1e-9;
  }
  return 0.0;
}

StochMatrix to_matrix(const FnTable& f) {
  StochMatrix s{f.dom, f.cod, Eigen::MatrixXd::Zero(static_cast<long>(product(f.cod)),
                                                   static_cast<long>(product(f.dom)))};
  for (std::size_t d = 0; d < f.map.size(); ++d) s.m(static_cast<long>(f.map[d]), static_cast<long>(d)) = 1.0;
  return s;
}

// ---------------------------------------------------------------------------
// Structural morphisms

MorphSem identity_sem(Backend b, const Dims& dims) {
  const std::size_t n = product(dims);
  switch (b) {
    case Backend::FinFn: {
      FnTable t{dims, dims, std::vector<std::size_t>(n)};
      std::iota(t.map.begin(), t.map.end(), 0);
      return t;
    }
    case Backend::Stoch:
      return StochMatrix{dims, dims, Eigen::MatrixXd::Identity(static_cast<long>(n), static_cast<long>(n))};
    case Backend::Quant: return kraus_identity(dims);
    case Backend::RealVec: return real_identity(dims);
  }
  return FnTable{};
}

MorphSem copy_sem(Backend b, std::size_t size, std::size_t fanout) {
  const Dims dom{size};
  const Dims cod(fanout, size);
  auto diag = [&](std::size_t x) { return flatten(std::vector<std::size_t>(fanout, x), cod); };
  switch (b) {
    case Backend::FinFn: {
      FnTable t{dom, cod, std::vector<std::size_t>(size)};
      for (std::size_t x = 0; x < size; ++x) t.map[x] = diag(x);
      return t;
    }
    case Backend::Stoch: {
      StochMatrix s{dom, cod, Eigen::MatrixXd::Zero(static_cast<long>(product(cod)), static_cast<long>(size))};
      for (std::size_t x = 0; x < size; ++x) s.m(static_cast<long>(diag(x)), static_cast<long>(x)) = 1.0;
      return s;
    }
    case Backend::Quant:
      fail(ErrorKind::UnsupportedStructural, "copy has no quantum semantics");
    case Backend::RealVec: return real_copy(size, fanout);
  }
  return FnTable{};
}

MorphSem discard_sem(Backend b, const Dims& dims) {
  const std::size_t n = product(dims);
  switch (b) {
    case Backend::FinFn: return FnTable{dims, {}, std::vector<std::size_t>(n, 0)};
    case Backend::Stoch: return StochMatrix{dims, {}, Eigen::MatrixXd::Ones(1, static_cast<long>(n))};
    case Backend::Quant: return kraus_discard(dims);
    case Backend::RealVec: return real_discard(dims);
  }
  return FnTable{};
}

MorphSem swap_sem(Backend b, std::size_t first, std::size_t second) {
  return permute_cod(identity_sem(b, Dims{first, second}), {1, 0});
}

// ---------------------------------------------------------------------------
// Composition

namespace {

void require_same_backend(const MorphSem& a, const MorphSem& b) {
  if (a.index() != b.index())
    fail(ErrorKind::ObjectMismatch, "morphisms from different backends");
}

StochMatrix kron(const StochMatrix& f, const StochMatrix& g) {
  const long r1 = f.m.rows(), c1 = f.m.cols(), r2 = g.m.rows(), c2 = g.m.cols();
  StochMatrix out{concat(f.dom, g.dom), concat(f.cod, g.cod), Eigen::MatrixXd::Zero(r1 * r2, c1 * c2)};
  for (long i = 0; i < r1; ++i)
    for (long j = 0; j < c1; ++j)
      if (f.m(i, j) != 0.0) out.m.block(i * r2, j * c2, r2, c2) = f.m(i, j) * g.m;
  return out;
}

}  // namespace

MorphSem compose(const MorphSem& f, const MorphSem& g) {
  require_same_backend(f, g);
  require_dims(cod_of(f), dom_of(g), "composite codomain/domain differ");
  switch (f.index()) {
    case 0: {
      const auto& a = std::get<FnTable>(f);
      const auto& b = std::get<FnTable>(g);
      FnTable t{a.dom, b.cod, std::vector<std::size_t>(a.map.size())};
      for (std::size_t d = 0; d < a.map.size(); ++d) t.map[d] = b.map[a.map[d]];
      return t;
    }
    case 1: {
      const auto& a = std::get<StochMatrix>(f);
      const auto& b = std::get<StochMatrix>(g);
      return StochMatrix{a.dom, b.cod, b.m * a.m};
    }
    case 2: return kraus_compose(std::get<KrausMap>(f), std::get<KrausMap>(g));
    default: return real_compose(std::get<RealExpr>(f), std::get<RealExpr>(g));
  }
}

MorphSem tensor(const MorphSem& f, const MorphSem& g) {
  require_same_backend(f, g);
  switch (f.index()) {
    case 0: {
      const auto& a = std::get<FnTable>(f);
      const auto& b = std::get<FnTable>(g);
      const std::size_t n2 = b.map.size(), c2 = product(b.cod);
      FnTable t{concat(a.dom, b.dom), concat(a.cod, b.cod), std::vector<std::size_t>(a.map.size() * n2)};
      for (std::size_t x = 0; x < a.map.size(); ++x)
        for (std::size_t y = 0; y < n2; ++y) t.map[x * n2 + y] = a.map[x] * c2 + b.map[y];
      return t;
    }
    case 1: return kron(std::get<StochMatrix>(f), std::get<StochMatrix>(g));
    case 2: return kraus_tensor(std::get<KrausMap>(f), std::get<KrausMap>(g));
    default: return real_tensor(std::get<RealExpr>(f), std::get<RealExpr>(g));
  }
}

MorphSem permute_cod(const MorphSem& m, const std::vector<std::size_t>& perm) {
  bool trivial = true;
  for (std::size_t i = 0; i < perm.size(); ++i) trivial = trivial && perm[i] == i;
  if (trivial && perm.size() == cod_of(m).size()) return m;
  switch (m.index()) {
    case 0: {
      // Per entry, since the codomain of a wide table may be too large to index.
      const auto& a = std::get<FnTable>(m);
      Dims nd;
      for (auto p : perm) nd.push_back(a.cod[p]);
      FnTable t{a.dom, nd, a.map};
      std::vector<std::size_t> digits(perm.size());
      for (auto& v : t.map) {
        auto old = unflatten(v, a.cod);
        for (std::size_t i = 0; i < perm.size(); ++i) digits[i] = old[perm[i]];
        v = flatten(digits, nd);
      }
      return t;
    }
    case 1: {
      const auto& a = std::get<StochMatrix>(m);
      Dims nd;
      auto idx = permutation_index(a.cod, perm, &nd);
      StochMatrix s{a.dom, nd, Eigen::MatrixXd(a.m.rows(), a.m.cols())};
      for (long r = 0; r < a.m.rows(); ++r) s.m.row(static_cast<long>(idx[static_cast<std::size_t>(r)])) = a.m.row(r);
      return s;
    }
    case 2: return kraus_permute(std::get<KrausMap>(m), perm);
    default: return real_permute(std::get<RealExpr>(m), perm);
  }
}

MorphSem apply_front(const MorphSem& box, const MorphSem& m) {
  require_same_backend(box, m);
  const Dims& cod = cod_of(m);
  const Dims& bdom = dom_of(box);
  if (bdom.size() > cod.size() || !std::equal(bdom.begin(), bdom.end(), cod.begin()))
    fail(ErrorKind::DimensionMismatch, "box inputs do not match leading factors");
  const Dims rest(cod.begin() + static_cast<long>(bdom.size()), cod.end());
  const std::size_t R = product(rest);
  switch (m.index()) {
    case 0: {
      const auto& b = std::get<FnTable>(box);
      const auto& a = std::get<FnTable>(m);
      FnTable t{a.dom, concat(b.cod, rest), a.map};
      for (auto& v : t.map) v = b.map[v / R] * R + v % R;
      return t;
    }
    case 1: {
      const auto& b = std::get<StochMatrix>(box);
      const auto& a = std::get<StochMatrix>(m);
      const long G = b.m.rows(), F = b.m.cols(), Rl = static_cast<long>(R);
      StochMatrix s{a.dom, concat(b.cod, rest), Eigen::MatrixXd::Zero(G * Rl, a.m.cols())};
      for (long g = 0; g < G; ++g)
        for (long f = 0; f < F; ++f)
          if (b.m(g, f) != 0.0) s.m.middleRows(g * Rl, Rl) += b.m(g, f) * a.m.middleRows(f * Rl, Rl);
      return s;
    }
    case 2: return kraus_apply_front(std::get<KrausMap>(box), std::get<KrausMap>(m));
    default: return real_apply_front(std::get<RealExpr>(box), std::get<RealExpr>(m));
  }
}

// ---------------------------------------------------------------------------
// Predicates and distances

bool is_channel(const MorphSem& m) {
  switch (m.index()) {
    case 0: return true;
    case 1: {
      const auto& a = std::get<StochMatrix>(m).m;
      if ((a.array() < 0.0).any()) return false;
      for (long c = 0; c < a.cols(); ++c)
        if (std::abs(a.col(c).sum() - 1.0) > 1e-12) return false;
      return true;
    }
    case 2: return kraus_is_channel(std::get<KrausMap>(m));
    default: return true;
  }
}

bool is_deterministic(const MorphSem& m) {
  switch (m.index()) {
    case 0: return true;
    case 1: {
      const auto& a = std::get<StochMatrix>(m).m;
      for (long c = 0; c < a.cols(); ++c) {
        int ones = 0;
        for (long r = 0; r < a.rows(); ++r) {
          double v = a(r, c);
          if (std::abs(v - 1.0) <= 1e-12) ++ones;
          else if (std::abs(v) > 1e-12) return false;
        }
        if (ones != 1) return false;
      }
      return true;
    }
    case 2: fail(ErrorKind::UnsupportedStructural, "determinism needs copy; quantum has none");
    default: {
      auto copy_all = [](const Dims& dims) {
        RealExpr c = real_identity(dims);
        c.cod = concat(dims, dims);
        c.outputs.insert(c.outputs.end(), c.outputs.begin(), c.outputs.end());
        return MorphSem(c);
      };
      MorphSem lhs = compose(m, copy_all(cod_of(m)));
      MorphSem rhs = compose(copy_all(dom_of(m)), tensor(m, m));
      return norm_dist(lhs, rhs) <= backend_tolerance(Backend::RealVec);
    }
  }
}

MorphSem marginal(const MorphSem& m, const std::vector<std::size_t>& keep_outputs) {
  const Dims& cod = cod_of(m);
  std::vector<bool> keep(cod.size(), false);
  for (auto k : keep_outputs) {
    if (k >= cod.size()) fail(ErrorKind::IndexOutOfRange, "marginal index " + std::to_string(k));
    keep[k] = true;
  }
  std::vector<std::size_t> perm;
  Dims dropped;
  for (std::size_t i = 0; i < cod.size(); ++i)
    if (!keep[i]) {
      perm.push_back(i);
      dropped.push_back(cod[i]);
    }
  for (std::size_t i = 0; i < cod.size(); ++i)
    if (keep[i]) perm.push_back(i);
  if (dropped.empty()) return m;
  return apply_front(discard_sem(backend_of(m), dropped), permute_cod(m, perm));
}

double norm_dist(const MorphSem& a, const MorphSem& b) {
  if (a.index() != b.index() || dom_of(a) != dom_of(b) || cod_of(a) != cod_of(b))
    fail(ErrorKind::ObjectMismatch, "morphisms have different types");
  switch (a.index()) {
    case 0: return std::get<FnTable>(a).map == std::get<FnTable>(b).map ? 0.0 : 2.0;
    case 1: {
      const auto& x = std::get<StochMatrix>(a).m;
      const auto& y = std::get<StochMatrix>(b).m;
      if (x.cols() == 0) return 0.0;
      return (x - y).cwiseAbs().colwise().sum().maxCoeff();
    }
    case 2: return kraus_dist(std::get<KrausMap>(a), std::get<KrausMap>(b));
    default: return real_dist(std::get<RealExpr>(a), std::get<RealExpr>(b));
  }
}

bool approx_equal(const MorphSem& a, const MorphSem& b, double eps) {
  return norm_dist(a, b) <= eps;
}

MorphSem point_state(Backend b, std::size_t size, std::size_t index) {
  return point_state(b, Dims{size}, {index});
}

MorphSem point_state(Backend b, const Dims& dims, const std::vector<std::size_t>& indices) {
  if (indices.size() != dims.size()) fail(ErrorKind::DimensionMismatch, "point state arity");
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (indices[i] >= dims[i]) fail(ErrorKind::IndexOutOfRange, "point state index");
  const std::size_t flat = flatten(indices, dims);
  const long n = static_cast<long>(product(dims));
  switch (b) {
    case Backend::FinFn: return FnTable{{}, dims, {flat}};
    case Backend::Stoch: {
      StochMatrix s{{}, dims, Eigen::MatrixXd::Zero(n, 1)};
      s.m(static_cast<long>(flat), 0) = 1.0;
      return s;
    }
    case Backend::Quant: {
      KrausMap k{{}, dims, {Eigen::MatrixXcd::Zero(n, 1)}};
      k.ops[0](static_cast<long>(flat), 0) = 1.0;
      return k;
    }
    case Backend::RealVec:
      fail(ErrorKind::InfiniteCarrier, "real vector spaces have no basis point states");
  }
  return FnTable{};
}

}  // namespace compmodel
