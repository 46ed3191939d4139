#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "compmodel/model.hpp"

namespace compmodel {

struct MorphismTerm {
  std::vector<std::string> dom;  // object terms; empty lists mean unconstrained
  std::vector<std::string> cod;
};

// Vocabulary of human-friendly terms. When `closed` is false any term is admissible.
struct HumanSignature {
  bool closed = false;
  std::set<std::string> object_terms;
  std::map<std::string, MorphismTerm> morphism_terms;
};

struct ConcreteEntry {
  std::vector<std::string> dom;
  std::vector<std::string> cod;
  MorphSem sem;
  std::string term;
};

// Term for a value of a real variable: applies when gt < x_component <= leq.
struct PredicateRule {
  std::string var;
  std::size_t component = 0;
  std::optional<double> leq;
  std::optional<double> gt;
  std::string term;
};

// Canonical key of a morphism together with its variable interface.
std::string concrete_key(const std::vector<std::string>& dom, const std::vector<std::string>& cod,
                         const MorphSem& sem);

struct Interpretation {
  std::shared_ptr<const ModelBinding> model;
  HumanSignature human;
  std::map<std::string, std::string> abs_var;
  std::map<std::string, std::string> abs_gen;
  std::map<std::string, ConcreteEntry> con;  // keyed by concrete_key
  std::vector<PredicateRule> rules;

  void set_concrete(std::vector<std::string> dom, std::vector<std::string> cod, MorphSem sem,
                    std::string term);
  // Concrete term for a generator's bound morphism.
  void set_concrete_for(const std::string& gen, std::string term);
  // Point state of `var` at `label`.
  void set_concrete_point(const std::string& var, const std::string& label, std::string term);

  std::optional<std::string> concrete_term(const std::vector<std::string>& dom,
                                           const std::vector<std::string>& cod,
                                           const MorphSem& sem) const;
  std::optional<std::string> concrete_term_for(const std::string& gen) const;
};

Interpretation make_interpretation(std::shared_ptr<const ModelBinding> model);

enum class InterpViolationKind { CommutativityViolation, PartialityViolation, UnknownTerm };
std::string_view to_string(InterpViolationKind k);

struct InterpViolation {
  InterpViolationKind kind;
  std::string subject;
  std::string detail;
};

std::vector<InterpViolation> check_interpretation(const Interpretation& i);

struct Completeness {
  bool complete = false;
  bool complete_concrete = false;
  std::vector<std::string> uninterpreted_variables;
  std::vector<std::string> uninterpreted_generators;
  // "var=label" points, or "var" for real variables without rule coverage.
  std::vector<std::string> uninterpreted_values;
};

Completeness completeness(const Interpretation& i);

bool is_interpreted_diagram(const Interpretation& i, const Diagram& d);

// One line per box: "<id>: <term>" or "<id>: UNINTERPRETED".
std::string describe(const Interpretation& i, const Diagram& d);

// Term for a box, if any (structural boxes get their kind).
std::optional<std::string> box_term(const Interpretation& i, const Diagram& d, std::size_t box);

}  // namespace compmodel
