#include <Eigen/Eigenvalues>
#include <cmath>

#include "compmodel/error.hpp"
#include "semantics_impl.hpp"

namespace compmodel {

namespace detail {

namespace {

long lsize(const Dims& d) { return static_cast<long>(product(d)); }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      if (a(i, j) != std::complex<double>(0.0))
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Kraus lists grow multiplicatively under composition; above the Choi rank
// bound they are re-derived from the Choi matrix.
KrausMap maybe_compress(KrausMap k) {
  const std::size_t bound = product(k.dom) * product(k.cod);
  if (k.ops.size() > std::max<std::size_t>(bound, 1)) return compress(k);
  return k;
}

}  // namespace

KrausMap kraus_identity(const Dims& dims) {
  return KrausMap{dims, dims, {Eigen::MatrixXcd::Identity(lsize(dims), lsize(dims))}};
}

KrausMap kraus_discard(const Dims& dims) {
  const long n = lsize(dims);
  KrausMap k{dims, {}, {}};
  for (long i = 0; i < n; ++i) {
    Eigen::MatrixXcd bra = Eigen::MatrixXcd::Zero(1, n);
    bra(0, i) = 1.0;
    k.ops.push_back(bra);
  }
  return k;
}

KrausMap kraus_compose(const KrausMap& f, const KrausMap& g) {
  KrausMap out{f.dom, g.cod, {}};
  for (const auto& b : g.ops)
    for (const auto& a : f.ops) out.ops.push_back(b * a);
  return maybe_compress(std::move(out));
}

KrausMap kraus_tensor(const KrausMap& f, const KrausMap& g) {
  KrausMap out{concat(f.dom, g.dom), concat(f.cod, g.cod), {}};
  for (const auto& a : f.ops)
    for (const auto& b : g.ops) out.ops.push_back(kron(a, b));
  return maybe_compress(std::move(out));
}

KrausMap kraus_permute(const KrausMap& m, const std::vector<std::size_t>& perm) {
  Dims nd;
  auto idx = permutation_index(m.cod, perm, &nd);
  KrausMap out{m.dom, nd, {}};
  for (const auto& k : m.ops) {
    Eigen::MatrixXcd p(k.rows(), k.cols());
    for (long r = 0; r < k.rows(); ++r) p.row(static_cast<long>(idx[static_cast<std::size_t>(r)])) = k.row(r);
    out.ops.push_back(std::move(p));
  }
  return out;
}

KrausMap kraus_apply_front(const KrausMap& box, const KrausMap& m) {
  const Dims rest(m.cod.begin() + static_cast<long>(box.dom.size()), m.cod.end());
  const long R = lsize(rest);
  KrausMap out{m.dom, concat(box.cod, rest), {}};
  for (const auto& b : box.ops)
    for (const auto& k : m.ops) {
      Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(b.rows() * R, k.cols());
      for (long g = 0; g < b.rows(); ++g)
        for (long f = 0; f < b.cols(); ++f)
          if (b(g, f) != std::complex<double>(0.0))
            n.middleRows(g * R, R) += b(g, f) * k.middleRows(f * R, R);
      out.ops.push_back(std::move(n));
    }
  return maybe_compress(std::move(out));
}

bool kraus_is_channel(const KrausMap& m) {
  const long n = lsize(m.dom);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& k : m.ops) s += k.adjoint() * k;
  return (s - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10;
}

double kraus_dist(const KrausMap& a, const KrausMap& b) { return (choi(a) - choi(b)).norm(); }

}  // namespace detail

Eigen::MatrixXcd choi(const KrausMap& k) {
  const long n = static_cast<long>(product(k.dom) * product(k.cod));
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& op : k.ops) {
    Eigen::Map<const Eigen::VectorXcd> v(op.data(), n);
    j += v * v.adjoint();
  }
  return j;
}

KrausMap compress(const KrausMap& k) {
  const long rows = static_cast<long>(product(k.cod));
  const long cols = static_cast<long>(product(k.dom));
  Eigen::MatrixXcd j = choi(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(j);
  const auto& vals = es.eigenvalues();
  const double top = vals.size() ? std::max(vals.maxCoeff(), 0.0) : 0.0;
  KrausMap out{k.dom, k.cod, {}};
  for (long i = vals.size() - 1; i >= 0; --i) {
    if (vals(i) <= 1e-14 * std::max(1.0, top)) break;
    Eigen::VectorXcd v = std::sqrt(vals(i)) * es.eigenvectors().col(i);
    out.ops.push_back(Eigen::Map<Eigen::MatrixXcd>(v.data(), rows, cols));
  }
  if (out.ops.empty()) out.ops.push_back(Eigen::MatrixXcd::Zero(rows, cols));
  return out;
}

Eigen::MatrixXcd density(const KrausMap& state) {
  if (!state.dom.empty()) fail(ErrorKind::DimensionMismatch, "density of a non-state");
  const long n = static_cast<long>(product(state.cod));
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& k : state.ops) rho += k * k.adjoint();
  return rho;
}

}  // namespace compmodel
