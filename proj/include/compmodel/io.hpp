#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "compmodel/causal.hpp"
#include "compmodel/rewrite.hpp"
#include "compmodel/zoo.hpp"

namespace compmodel {

using Json = nlohmann::ordered_json;

// Version written to and required in every model file.
inline constexpr int kSchemaVersion = 1;

// Element tuples are written "(a,b)"; a single codomain value is written bare.
std::string tuple_label(const std::vector<ObjectSem>& objs, std::size_t flat);
std::string value_label(const std::vector<ObjectSem>& objs, std::size_t flat);

Json signature_to_json(const Signature& sig);
Json diagram_to_json(const Diagram& d);
Diagram diagram_from_json(const Json& j, const SignaturePtr& sig);

Json object_to_json(const ObjectSem& o);
ObjectSem object_from_json(const Json& j);

// dom and cod are the objects of the interface the payload lives on.
Json morphism_to_json(const MorphSem& m, const std::vector<ObjectSem>& dom,
                      const std::vector<ObjectSem>& cod);
MorphSem morphism_from_json(const Json& j, Backend backend, const std::vector<ObjectSem>& dom,
                            const std::vector<ObjectSem>& cod);

Json interpretation_to_json(const Interpretation& i);
Interpretation interpretation_from_json(const Json& j, std::shared_ptr<const ModelBinding> b);

// Verified and evaluation rules are re-measured on load; EpsilonExceeded if
// the stored epsilon no longer holds.
Json rule_to_json(const RewriteRule& r);
RewriteRule rule_from_json(const Json& j, const ModelBinding& b);
std::vector<RewriteRule> rules_from_json(const Json& j, const ModelBinding& b);

Json model_to_json(const ZooModel& m);
ZooModel model_from_json(const Json& j);

Json world_spec_to_json(const WorldSpec& w);
WorldSpec world_spec_from_json(const Json& j);

Json proof_to_json(const RewriteProof& p);
Json failure_to_json(const ProofFailure& f);

// Distribution over the flat states of `objs`, keyed by tuple labels.
Json distribution_to_json(const StochMatrix& state, const std::vector<ObjectSem>& objs);

// Reads a file as JSON. ParseError carries the path and, for syntax errors,
// the line.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

ZooModel load_model(const std::string& path);
void save_model(const std::string& path, const ZooModel& m);

}  // namespace compmodel
