#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "compmodel/model.hpp"

namespace compmodel {

enum class Verdict { StructuralNoInfluence, SemanticNoInfluence, InfluenceWitness, Unknown };
std::string_view to_string(Verdict v);

// Two full input assignments (flat value indices per input) whose marginals differ.
struct InfluenceWitnessPair {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  Eigen::VectorXd first_marginal;
  Eigen::VectorXd second_marginal;
};

struct InfluenceCertificate {
  Diagram diagram;
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> outputs;
  Verdict verdict = Verdict::Unknown;
  // Present for StructuralNoInfluence: the kept outputs with the inputs' paths cut.
  std::optional<Diagram> simplified;
  std::optional<InfluenceWitnessPair> witness;
};

// Reachability-based check; refuses diagrams with non-channel generators.
InfluenceCertificate structural_no_influence(const Diagram& d, std::size_t in_idx, std::size_t out_idx);
// Set version: no input in `ins` reaches any output in `outs`.
InfluenceCertificate structural_no_influence(const Diagram& d, const std::vector<std::size_t>& ins,
                                             const std::vector<std::size_t>& outs);

// Exhaustive check over all sharp inputs; FinFn and Stoch only. Marginals are
// compared entrywise with absolute tolerance `tol` (0 means exact).
InfluenceCertificate semantic_no_influence(const ModelBinding& b, const Diagram& d, std::size_t in_idx,
                                           std::size_t out_idx, double tol = 0.0);
// Set version: the inputs in `ins` vary jointly.
InfluenceCertificate semantic_no_influence(const ModelBinding& b, const Diagram& d,
                                           const std::vector<std::size_t>& ins,
                                           const std::vector<std::size_t>& outs, double tol = 0.0);

// Discards every output not in `keep` (kept outputs stay in their relative
// order) and normalizes. Monoidal signatures are lifted to the discard language.
Diagram discard_simplify(const Diagram& d, const std::vector<std::size_t>& keep);

// Input indices whose wires reach the output index.
std::vector<bool> reaches(const Diagram& d, std::size_t out_idx);

}  // namespace compmodel
