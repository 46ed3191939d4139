#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compmodel/model.hpp"

namespace compmodel {

struct NetworkDiagram {
  Diagram diagram;
  std::map<std::string, std::string> mechanism_of;  // variable -> box id
  std::map<std::string, std::vector<std::string>> parents_of;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

// Throws MultiOutputBox, DuplicateLabel, NonChannelMechanism.
NetworkDiagram validate_network(const Diagram& d);

struct OpenCausalModel {
  ModelBinding binding;
  NetworkDiagram network;
};

// Requires a FinFn or Stoch binding whose signature contains the diagram.
OpenCausalModel make_causal_model(const ModelBinding& b, const Diagram& d);

// Variables downstream of `var` (excluding var).
std::vector<std::string> descendants(const NetworkDiagram& n, const std::string& var);

// Each value is either the label of an element of the variable, or the name of
// a sharp-state generator for it.
OpenCausalModel do_intervention(const OpenCausalModel& m,
                                const std::map<std::string, std::string>& assignments);

// Replaces the mechanism of `var` by `mechanism` (cod = [var]) reading `new_parents`.
OpenCausalModel intervene_general(const OpenCausalModel& m, const std::string& var,
                                  const Generator& mechanism, const MorphSem& sem,
                                  const std::vector<std::string>& new_parents);

// Drops the mechanisms of `vars`; each becomes a trailing diagram input.
OpenCausalModel open_at(const OpenCausalModel& m, const std::vector<std::string>& vars);

// P(rest | factor var_index = value) for a state over several factors.
StochMatrix condition_sharp(const StochMatrix& state, std::size_t var_index, std::size_t value);

struct ConditionalChannel {
  StochMatrix channel;        // X -> Y
  std::vector<bool> defined;  // per flat X value; undefined columns are zero
};

// Joint over X ⊗ Y where X is the first `x_factors` factors.
ConditionalChannel conditional_channel(const StochMatrix& joint, std::size_t x_factors);

StochMatrix jeffrey_update(const StochMatrix& joint, std::size_t x_factors, const StochMatrix& evidence);
StochMatrix pearl_update(const StochMatrix& joint, std::size_t x_factors, const StochMatrix& evidence);

struct FCM {
  OpenCausalModel base;
  std::vector<std::string> exogenous;
  std::vector<std::string> endogenous;  // topological order
};

// Validates the functional causal model structure of a closed network.
FCM make_fcm(const OpenCausalModel& m, const std::vector<std::string>& exogenous);

struct World {
  std::map<std::string, std::string> intervene;  // variable -> label
  std::map<std::string, std::string> observe;    // variable -> label
  std::vector<std::string> marginalize;
  std::vector<std::string> query;
};

struct WorldSpec {
  std::vector<World> worlds;
};

struct CounterfactualResult {
  StochMatrix state;                // over the queried factors, world by world
  std::vector<std::string> factors;  // "w<j>:<var>"
  Diagram diagram;                   // the flattened parallel-worlds diagram
  ModelBinding binding;              // binding the diagram is evaluated in
};

CounterfactualResult counterfactual_query(const FCM& f, const WorldSpec& w);

}  // namespace compmodel
