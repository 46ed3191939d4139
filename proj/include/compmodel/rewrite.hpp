#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "compmodel/interpretation.hpp"
#include "compmodel/model.hpp"

namespace compmodel {

enum class RuleStatus { Asserted, Verified, Evaluation };
std::string_view to_string(RuleStatus s);

struct RewriteRule {
  std::string name;
  Diagram lhs;
  Diagram rhs;
  double epsilon = 0.0;
  RuleStatus status = RuleStatus::Asserted;
  double measured = 0.0;  // backend distance, set by verify_rule
};

// Checks the boundaries agree and epsilon is nonnegative.
RewriteRule make_rule(std::string name, Diagram lhs, Diagram rhs, double epsilon = 0.0);

// Measures norm_dist(lhs, rhs); throws EpsilonExceeded (carrying the distance)
// when it exceeds epsilon by more than the backend tolerance.
RewriteRule verify_rule(const ModelBinding& b, const RewriteRule& r);

// (input states ; box) -> output sharp states, status Evaluation.
RewriteRule make_eval_rule(const ModelBinding& b, const std::string& box,
                           const std::vector<std::string>& input_states);

// Evaluation rules for every deterministic box that forward evaluation of
// `start` reaches with sharp inputs, in the order they fire.
std::vector<RewriteRule> evaluation_rules(const ModelBinding& b, const Diagram& start);

enum class Direction { Forward, Backward };

struct Match {
  Direction dir = Direction::Forward;
  std::vector<std::size_t> boxes;  // host box per pattern box
  std::vector<Endpoint> sources;   // host endpoint feeding each pattern input
  std::vector<Endpoint> targets;   // host endpoint fed by each pattern output
  std::size_t host_hash = 0;

  bool operator==(const Match& o) const {
    return dir == o.dir && boxes == o.boxes && sources == o.sources && targets == o.targets;
  }
};

// All convex occurrences of the rule side (lhs for Forward) in the host, in a
// deterministic order. Both host and pattern are normalized first, so matches
// refer to box indices of normalize(host). Patterns whose inputs run straight to
// outputs are not matched.
std::vector<Match> find_matches(const Diagram& host, const RewriteRule& rule,
                                Direction dir = Direction::Forward);

// Replaces the matched region of normalize(host) by the other rule side.
// Throws InvalidMatch if the match does not belong to this host.
Diagram apply_rule(const Diagram& host, const Match& match, const RewriteRule& rule);

struct ProofStep {
  std::string rule;
  Direction dir;
  Match match;
  Diagram result;  // normalized
  double epsilon;
  bool interpreted;
  Diagram rule_lhs;
  Diagram rule_rhs;
};

struct RewriteProof {
  Diagram start;
  Diagram end;
  std::vector<ProofStep> steps;
  double epsilon_total = 0.0;
  // False when the additive bound is not justified (non-channel or non-classical with ε > 0).
  bool epsilon_bounded = true;
  bool all_interpreted = false;
};

struct ProofFailure {
  enum class Reason { BudgetExhausted, NotFound };
  Reason reason;
  std::size_t explored = 0;
};
std::string_view to_string(ProofFailure::Reason r);

struct ProveOptions {
  std::size_t max_steps = 16;
  std::size_t max_nodes = 20000;
  bool allow_backward = false;
};

using ProveResult = std::variant<RewriteProof, ProofFailure>;

// Breadth-first search from start to goal (up to isomorphism after normalization).
// Rules must be Verified or have Evaluation status.
ProveResult prove(const ModelBinding& b, const Interpretation* interp, const Diagram& start,
                  const Diagram& goal, const std::vector<RewriteRule>& rules, const ProveOptions& opt = {});

// Every diagram in the proof, and each used rule's sides, is interpreted.
bool validate_explanation(const Interpretation& i, const RewriteProof& p);

}  // namespace compmodel
