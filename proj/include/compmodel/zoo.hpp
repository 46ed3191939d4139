#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "compmodel/interpretation.hpp"
#include "compmodel/model.hpp"
#include "compmodel/rewrite.hpp"

namespace compmodel {

// A bound model together with its interpretation, named diagrams (in the
// binding's `distinguished` map, "model" being the main one) and any rewrite
// rules that come with it.
struct ZooModel {
  std::string name;
  std::string description;
  Interpretation interpretation;
  std::vector<RewriteRule> rules;

  const ModelBinding& binding() const { return *interpretation.model; }
  const Diagram& diagram(const std::string& name = "model") const;
};

// Deterministic evaluation helpers. run_finite needs a FinFn binding and maps
// input labels to output labels; run_real needs a RealVec binding.
std::vector<std::string> run_finite(const ModelBinding& b, const Diagram& d,
                                    const std::vector<std::string>& inputs);
std::vector<Eigen::VectorXd> run_real(const ModelBinding& b, const Diagram& d,
                                      const std::vector<Eigen::VectorXd>& inputs);

// <x, w> + b over scalar inputs X1..Xn and output Y.
ZooModel linear_model(const std::vector<double>& weights, double bias);

struct FiniteInput {
  std::string var;
  std::vector<std::string> labels;
  std::string term;
};

struct ScoreRule {
  std::string name;                 // also the human term of the rule box
  std::vector<std::string> inputs;  // variables the predicate reads, in order
  std::function<bool(const std::vector<std::string>&)> holds;
  int points = 1;
};

// Sum of the points of the rules that hold. Score carries every integer
// between the sum of negative and the sum of positive points.
ZooModel scoring_system(const std::vector<FiniteInput>& inputs, const std::vector<ScoreRule>& rules);
// Five-rule rearrest score over P (priors 0..10), L (local ordinance no/yes), A (age 18..80).
ZooModel arrest_score();

// Three-rule arrest decision list over S, A, P with output O in {no, yes}.
// Distinguished diagrams: "model", "query" (female, 22, 2 fed in) and "goal"
// (O=yes); rules: evaluation rules for the boxes the query needs and the
// verified rule that `first` returns a yes in its second slot.
ZooModel decision_list();

// Bike rental tree over D (days) and T (temperature) with leaves o1..o4.
ZooModel decision_tree();

// Layered network; layer i maps sizes[i] to sizes[i+1]. Hidden variables
// have no interpretation. Throws DimensionMismatch.
ZooModel mlp(const std::vector<std::size_t>& sizes, const std::vector<Eigen::MatrixXd>& weights,
             const std::vector<Eigen::VectorXd>& biases, const std::vector<Activation>& activations);

// Transformer-shaped diagram of opaque boxes with no interpretation.
ZooModel transformer_stub(std::size_t tokens);

// words applied in order to the state `initial`. Each word must be a
// generator X -> X where X is the codomain of `initial`. Throws UnknownWord.
Diagram sequence_state(const ModelBinding& b, const std::vector<std::string>& words,
                       const std::string& initial = "*");

// Loan sequence model with two approximate rules; "query" is
// loan? after [homeowner, employed] and "goal" is L=yes.
ZooModel loan_sequence();
// Black-box encoder variant: rules about a two-word encoder, query through a
// three-word encoder. No proof exists.
ZooModel loan_black_box();

struct ConceptDomain {
  std::string name;
  std::vector<std::string> labels;
};

struct Concept {
  std::string name;
  std::vector<std::string> domains;
  std::vector<double> effect;  // flat over the listed domains, values in [0, 1]
};

// Stoch model with one variable per domain and an effect generator
// "concept:<name>" per concept. Throws DomainMismatch.
ZooModel conceptual_space(const std::vector<ConceptDomain>& domains, const std::vector<Concept>& concepts);

// How well a product instance fits a concept; domains the concept does not
// mention are discarded. Throws DomainMismatch and InvalidArgument.
double concept_fit(const ZooModel& space, const std::map<std::string, std::vector<double>>& instance,
                   const std::string& concept_name);

// Colour/taste space with the "yellow banana" instance, a bitterness
// classifier and the rules needed to show a yellow banana is not bitter.
ZooModel banana();

enum class WordKind { Adjective, IntransitiveVerb, TransitiveVerb };
std::size_t arity(WordKind k);

struct Word {
  WordKind kind = WordKind::TransitiveVerb;
  MorphSem sem;  // on noun_space (twice for transitive verbs)
  std::string term;
};

struct Question {
  std::string answer_var;
  MorphSem sem;  // noun_space -> answer space
  std::string term;
};

struct GateApp {
  std::string word;
  std::vector<std::string> nouns;
};

struct Lexicon {
  Backend backend = Backend::FinFn;
  ObjectSem noun_space;
  std::map<std::string, std::pair<ObjectSem, std::string>> answer_spaces;  // var -> (object, term)
  std::map<std::string, Word> words;
  std::map<std::string, Question> questions;
  // Templates over holes "$1", "$2", ... expanded before the diagram is built.
  std::map<std::string, std::vector<GateApp>> macros;
  // State per referent name, with "*" as the default.
  std::map<std::string, std::pair<MorphSem, std::string>> states;
};

struct TextScript {
  std::vector<std::string> referents;
  std::vector<GateApp> gates;
  std::vector<GateApp> questions;  // one noun each
  std::vector<GateApp> vocabulary;  // declared in the signature but not applied
  bool close = true;                // feed initial states instead of open inputs
  bool discard_unasked = true;
};

// One variable per referent; gate generators are named "word(n1,n2)".
// Throws DuplicateLabel, ArityMismatch, UnknownWord, UnresolvedReference.
ZooModel text_circuit(const TextScript& script, const Lexicon& lex);

// Location story: Bob is in the kitchen, Claire is in the garden, Alice
// follows Bob, where is Alice? Finite binding comes with verified rules,
// an evaluation rule and "goal" = Loc=kitchen.
ZooModel location_circuit();
// Same story with qubit wires, swap gates and a dephasing question.
ZooModel location_circuit_quantum();
// Alice hired Bob and then spoke to Claire. Open inputs; "model" outputs the
// three referents, "query" asks whether Bob is employed (outputs Alice,
// Answer, Claire). `fired(Alice,Bob)` is declared for surgery.
ZooModel hiring_circuit();

// Season-driven sprinkler network with mechanisms f, g, h, k.
ZooModel sprinkler();
// Age, latent background, smoking and cancer; includes a `policy` generator A -> S.
ZooModel smoking();
// Aspirin and headache with exogenous UA, UH.
ZooModel aspirin();

// Every named fixture.
std::vector<std::string> zoo_names();
ZooModel zoo_fixture(const std::string& name);

}  // namespace compmodel
