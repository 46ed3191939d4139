#pragma once

#include "compmodel/semantics.hpp"

namespace compmodel::detail {

// old flat codomain index -> new flat index after reordering factors.
std::vector<std::size_t> permutation_index(const Dims& old_dims,
                                           const std::vector<std::size_t>& perm, Dims* new_dims);

Dims concat(const Dims& a, const Dims& b);
void require_dims(const Dims& expected, const Dims& found, const char* what);

KrausMap kraus_identity(const Dims& dims);
KrausMap kraus_discard(const Dims& dims);
KrausMap kraus_compose(const KrausMap& f, const KrausMap& g);
KrausMap kraus_tensor(const KrausMap& f, const KrausMap& g);
KrausMap kraus_permute(const KrausMap& m, const std::vector<std::size_t>& perm);
KrausMap kraus_apply_front(const KrausMap& box, const KrausMap& m);
bool kraus_is_channel(const KrausMap& m);
double kraus_dist(const KrausMap& a, const KrausMap& b);

RealExpr real_identity(const Dims& dims);
RealExpr real_copy(std::size_t dim, std::size_t fanout);
RealExpr real_discard(const Dims& dims);
RealExpr real_compose(const RealExpr& f, const RealExpr& g);
RealExpr real_tensor(const RealExpr& f, const RealExpr& g);
RealExpr real_permute(const RealExpr& m, const std::vector<std::size_t>& perm);
RealExpr real_apply_front(const RealExpr& box, const RealExpr& m);
double real_dist(const RealExpr& a, const RealExpr& b);

}  // namespace compmodel::detail
