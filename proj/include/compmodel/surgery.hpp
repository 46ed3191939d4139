#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "compmodel/model.hpp"

namespace compmodel {

enum class SurgeryKind { ReplaceBox, Probe, ObserveProbe, ReplaceInput };
std::string_view to_string(SurgeryKind k);

struct SurgeryRecord {
  Diagram original;
  Diagram result;
  SurgeryKind kind;
  std::string site;
  std::string note;
};

// Wires are named by their source: "in:<k>" for diagram input k, or
// "<box id>:<port>" for an output port (a copy branch is one of its ports).
std::string wire_name(const Diagram& d, const Wire& w);

// Splices `replacement` in place of the box. The replacement may live over a
// larger signature; the host is retargeted to it.
SurgeryRecord replace_box(const Diagram& d, std::string_view box_id, const Diagram& replacement);

// Cuts the wire and routes it through `probe`: V -> V C; C becomes a new trailing output.
SurgeryRecord insert_probe(const Diagram& d, std::string_view wire, const std::string& probe);

// Copies the wire and feeds one branch to `classifier`: V -> C, appended as an
// output. Without a classifier the branch is discarded.
SurgeryRecord observe_probe(const Diagram& d, std::string_view wire,
                            const std::optional<std::string>& classifier);

// Closes input `in_idx` with the state generator.
SurgeryRecord replace_input(const Diagram& d, std::size_t in_idx, const std::string& state);

struct CfeDistance {
  enum class Kind { Hamming, Weighted, Ordinal };
  Kind kind = Kind::Hamming;
  // Per input factor; empty means all 1.
  std::vector<double> weights;
};

struct CfeResult {
  double distance = 0.0;
  std::vector<std::vector<std::size_t>> inputs;  // all minimal inputs, lexicographic
};

double cfe_distance(const CfeDistance& dist, const std::vector<std::size_t>& a,
                    const std::vector<std::size_t>& b);

// Exhaustive counterfactual explanation search over the finite input grid.
// `target` holds one value index per diagram output.
CfeResult cfe_search(const ModelBinding& b, const Diagram& d, const std::vector<std::size_t>& x,
                     const std::vector<std::size_t>& target, const CfeDistance& dist = {});

}  // namespace compmodel
