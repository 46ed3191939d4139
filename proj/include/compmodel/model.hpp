#pragma once

#include <map>
#include <string>
#include <vector>

#include "compmodel/diagram.hpp"
#include "compmodel/semantics.hpp"
#include "compmodel/signature.hpp"

namespace compmodel {

struct ModelBinding {
  SignaturePtr sig;
  Backend backend = Backend::FinFn;
  std::map<std::string, ObjectSem> objects;
  std::map<std::string, MorphSem> morphisms;
  std::map<std::string, Diagram> distinguished;

  const ObjectSem& object(const std::string& var) const;
  // Throws UnboundGenerator.
  const MorphSem& morphism(const std::string& gen) const;
  Dims dims_of(const std::vector<std::string>& vars) const;
  const Diagram& diagram(const std::string& name) const;
};

struct BindOptions {
  bool check_equations = true;
};

// Validates objects, morphism types, flags and equations eagerly.
ModelBinding bind_model(SignaturePtr sig, Backend backend, std::map<std::string, ObjectSem> objects,
                        std::map<std::string, MorphSem> morphisms,
                        std::map<std::string, Diagram> distinguished = {},
                        BindOptions options = {});

// Adds generators (with their semantics) and variables to an existing binding.
ModelBinding extend_binding(const ModelBinding& b, std::vector<std::string> new_vars,
                            std::map<std::string, ObjectSem> new_objects,
                            std::vector<Generator> new_gens,
                            std::map<std::string, MorphSem> new_morphisms);

// The functorial image of a diagram.
MorphSem eval_diagram(const ModelBinding& binding, const Diagram& d);

struct EquationCheck {
  std::size_t index;
  double distance;
};
// Distances for equations that fail within the backend tolerance.
std::vector<EquationCheck> check_equations(const ModelBinding& b);
// Distances for every equation.
std::vector<EquationCheck> equation_distances(const ModelBinding& b);

// Source equations mapped through `m` and evaluated under the target binding;
// returns those that do not hold.
std::vector<EquationCheck> check_map_equations(const SignatureMap& m, const ModelBinding& target);

struct BoundModelDiagram {
  const ModelBinding& binding;
  const Diagram& diagram;
};

// Fine diagram refines coarse when both evaluate to the same morphism once
// coarse boundary variables are renamed through `m`.
bool check_refinement(const BoundModelDiagram& coarse, const BoundModelDiagram& fine,
                      const SignatureMap& m);

// FinFn binding re-expressed with 0/1 matrices; Stoch bindings are returned unchanged.
ModelBinding as_stochastic(const ModelBinding& b);

// Sharp state generator in `b` whose semantics is the point at `label` of `var`.
const Generator* find_sharp_state(const ModelBinding& b, const std::string& var,
                                  const std::string& label);

}  // namespace compmodel
