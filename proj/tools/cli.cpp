#include "compmodel/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "compmodel/causal.hpp"
#include "compmodel/error.hpp"
#include "compmodel/influence.hpp"
#include "compmodel/io.hpp"
#include "compmodel/render.hpp"
#include "compmodel/surgery.hpp"

namespace fs = std::filesystem;

namespace compmodel {

namespace {

// Flag combinations the parser cannot express; reported as usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Semantics payloads larger than this are left out of command output.
constexpr std::size_t kMaxPayload = 1u << 16;

std::string pick_diagram(const ZooModel& m, const std::string& requested) {
  const auto& dist = m.binding().distinguished;
  if (!requested.empty()) {
    if (!dist.count(requested)) fail(ErrorKind::UnresolvedReference, "diagram '" + requested + "'");
    return requested;
  }
  for (const char* name : {"model", "main"})
    if (dist.count(name)) return name;
  if (dist.empty()) fail(ErrorKind::UnresolvedReference, "model has no diagrams");
  return dist.begin()->first;
}

std::vector<ObjectSem> objects(const ModelBinding& b, const std::vector<std::string>& vars) {
  std::vector<ObjectSem> out;
  for (const auto& v : vars) out.push_back(b.object(v));
  return out;
}

Json semantics_json(const ModelBinding& b, const Diagram& d) {
  const std::size_t size = product(b.dims_of(d.inputs())) * product(b.dims_of(d.outputs()));
  if (size > kMaxPayload) return Json{{"omitted", "payload too large"}, {"entries", size}};
  MorphSem m = eval_diagram(b, d);
  return morphism_to_json(m, objects(b, d.inputs()), objects(b, d.outputs()));
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(ErrorKind::UnresolvedReference, std::string(what) + " '" + name + "'");
  if (std::find(it + 1, names.end(), name) != names.end())
    fail(ErrorKind::InvalidArgument, std::string(what) + " '" + name + "' is ambiguous");
  return static_cast<std::size_t>(it - names.begin());
}

std::size_t label_index(const ModelBinding& b, const std::string& var, const std::string& label) {
  auto idx = b.object(var).index_of(label);
  if (!idx) fail(ErrorKind::UnresolvedReference, "'" + label + "' is not an element of " + var);
  return *idx;
}

// Input labels either positional or as "Var=label".
std::vector<std::size_t> input_indices(const ModelBinding& b, const Diagram& d,
                                       const std::vector<std::string>& given) {
  if (given.size() != d.inputs().size())
    fail(ErrorKind::InvalidArgument, "expected " + std::to_string(d.inputs().size()) + " input values, got " +
                                         std::to_string(given.size()));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < given.size(); ++k) {
    std::string label = given[k];
    if (auto eq = label.find('='); eq != std::string::npos) {
      if (label.substr(0, eq) != d.inputs()[k])
        fail(ErrorKind::InvalidArgument, "input " + std::to_string(k) + " is " + d.inputs()[k]);
      label = label.substr(eq + 1);
    }
    out.push_back(label_index(b, d.inputs()[k], label));
  }
  return out;
}

// Labels of a closed deterministic diagram's outputs.
std::vector<std::string> closed_outputs(const ModelBinding& b, const Diagram& d) {
  if (!d.inputs().empty()) fail(ErrorKind::InvalidArgument, "diagram still has inputs");
  MorphSem m = eval_diagram(b, d);
  std::size_t flat = 0;
  if (m.index() == 0) {
    flat = std::get<FnTable>(m).map.at(0);
  } else if (m.index() == 1) {
    const auto& s = std::get<StochMatrix>(m).m;
    long r = 0;
    if (std::abs(s.col(0).maxCoeff(&r) - 1.0) > backend_tolerance(b.backend))
      fail(ErrorKind::NotDeterministic, "diagram output is not a point state");
    flat = static_cast<std::size_t>(r);
  } else {
    fail(ErrorKind::UnsupportedBackend, "closed outputs need finite carriers");
  }
  auto digits = unflatten(flat, b.dims_of(d.outputs()));
  std::vector<std::string> out;
  for (std::size_t k = 0; k < digits.size(); ++k) out.push_back(b.object(d.outputs()[k]).elements[digits[k]]);
  return out;
}

Diagram point_diagram(const ModelBinding& b, const std::vector<std::string>& vars,
                      const std::vector<std::string>& labels) {
  DiagramBuilder db(b.sig);
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const Generator* g = find_sharp_state(b, vars[k], labels[k]);
    if (!g) fail(ErrorKind::NoSharpStateGenerator, vars[k] + "=" + labels[k]);
    db.output(db.add1(g->name, {}));
  }
  return db.build();
}

Diagram close_inputs(const ModelBinding& b, const Diagram& d, const std::vector<std::string>& labels) {
  auto idx = input_indices(b, d, labels);
  Diagram out = d;
  for (std::size_t k = idx.size(); k-- > 0;) {
    const std::string& var = d.inputs()[k];
    const Generator* g = find_sharp_state(b, var, b.object(var).elements[idx[k]]);
    if (!g) fail(ErrorKind::NoSharpStateGenerator, var + "=" + b.object(var).elements[idx[k]]);
    out = replace_input(out, k, g->name).result;
  }
  return out;
}

std::vector<RewriteRule> select_rules(const ZooModel& m, const std::string& which, const Diagram& start) {
  if (which == "model") return m.rules;
  if (which == "eval") return evaluation_rules(m.binding(), start);
  if (which == "all") {
    auto r = m.rules;
    for (auto& e : evaluation_rules(m.binding(), start)) r.push_back(std::move(e));
    return r;
  }
  return rules_from_json(read_json_file(which), m.binding());
}

Json proof_result(const ZooModel& m, const ProveResult& r) {
  if (const auto* f = std::get_if<ProofFailure>(&r)) return failure_to_json(*f);
  const auto& p = std::get<RewriteProof>(r);
  Json j = proof_to_json(p);
  j["explained"] = validate_explanation(m.interpretation, p);
  return j;
}

}  // namespace

ZooModel resolve_model(const std::string& ref) {
  if (fs::is_regular_file(ref)) return load_model(ref);
  std::string stem = fs::path(ref).filename().string();
  if (fs::path(stem).extension() == ".json") stem = fs::path(stem).stem().string();
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("COMPMODEL_FIXTURES")) dirs.emplace_back(env);
  dirs.emplace_back("fixtures");
  for (const auto& dir : dirs)
    for (const auto& name : {stem, stem + ".json"})
      if (fs::is_regular_file(dir / name)) return load_model((dir / name).string());
  auto names = zoo_names();
  if (std::find(names.begin(), names.end(), stem) != names.end()) return zoo_fixture(stem);
  fail(ErrorKind::UnresolvedReference, "no model file or fixture named '" + ref + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compositional model toolkit", "compmodel"};
  app.require_subcommand(1);

  std::string model, diagram;
  auto with_model = [&](CLI::App* s) {
    s->add_option("--model", model, "model file or fixture name")->required();
    s->add_option("--diagram", diagram, "distinguished diagram (default: model)");
    return s;
  };

  auto* validate_cmd = with_model(app.add_subcommand("validate", "load and check a model"));

  std::vector<std::string> inputs;
  auto* eval_cmd = with_model(app.add_subcommand("eval", "evaluate a diagram"));
  eval_cmd->add_option("--input", inputs, "input labels (or comma separated reals)");

  std::vector<std::string> in_names, out_names;
  bool semantic = false;
  auto* influence_cmd = with_model(app.add_subcommand("influence", "no-influence check"));
  influence_cmd->add_option("--input", in_names, "input variable")->required();
  influence_cmd->add_option("--output", out_names, "output variable")->required();
  influence_cmd->add_flag("--semantic", semantic, "exhaustive semantic check");

  std::string replace_box_id, with_path;
  std::vector<std::string> dos;
  auto* intervene_cmd = with_model(app.add_subcommand("intervene", "box surgery or do-intervention"));
  intervene_cmd->add_option("--replace-box", replace_box_id, "box id to replace");
  intervene_cmd->add_option("--with", with_path, "replacement diagram file");
  intervene_cmd->add_option("--do", dos, "Var=label");

  std::string wire, classifier;
  auto* probe_cmd = with_model(app.add_subcommand("probe", "attach a classifier to a wire"));
  probe_cmd->add_option("--wire", wire, "wire name, e.g. in:0 or box:0")->required();
  probe_cmd->add_option("--classifier", classifier, "classifier generator");

  std::string spec_path;
  std::vector<std::string> exogenous;
  auto* cf_cmd = with_model(app.add_subcommand("counterfactual", "parallel-worlds query"));
  cf_cmd->add_option("--spec", spec_path, "world spec file")->required();
  cf_cmd->add_option("--exogenous", exogenous, "exogenous variables (default: root variables)");

  std::string cond_var, cond_value, evidence_path, update = "pearl";
  auto* condition_cmd = with_model(app.add_subcommand("condition", "condition a state"));
  condition_cmd->add_option("--var", cond_var, "variable to condition on")->required();
  condition_cmd->add_option("--value", cond_value, "sharp observation");
  condition_cmd->add_option("--evidence", evidence_path, "soft evidence file {label: p}");
  condition_cmd->add_option("--update", update, "jeffrey or pearl")->check(CLI::IsMember({"jeffrey", "pearl"}));

  std::string state_path, distance = "hamming";
  std::vector<std::string> targets;
  std::vector<double> weights;
  auto* cfe_cmd = with_model(app.add_subcommand("cfe", "counterfactual explanation search"));
  cfe_cmd->add_option("--input", state_path, "input state file")->required();
  cfe_cmd->add_option("--target", targets, "target output label(s), Var=label")->required();
  cfe_cmd->add_option("--distance", distance, "hamming, weighted or ordinal")
      ->check(CLI::IsMember({"hamming", "weighted", "ordinal"}));
  cfe_cmd->add_option("--weights", weights, "per-input weights");

  std::string rules = "model", start_name, goal_name;
  std::size_t max_steps = 16;
  bool backward = false;
  auto* rewrite_cmd = with_model(app.add_subcommand("rewrite", "search for a rewrite proof"));
  rewrite_cmd->add_option("--rules", rules, "model, eval, all or a rules file");
  rewrite_cmd->add_option("--start", start_name, "start diagram (default: query)");
  rewrite_cmd->add_option("--goal", goal_name, "goal diagram (default: goal)");
  rewrite_cmd->add_option("--max-steps", max_steps, "proof length bound");
  rewrite_cmd->add_flag("--backward", backward, "also apply rules right to left");

  std::vector<std::string> labels;
  auto* explain_cmd = with_model(app.add_subcommand("explain", "explain an output by rewriting"));
  explain_cmd->add_option("--input", labels, "input labels, positional or Var=label");
  explain_cmd->add_option("--rules", rules, "model, eval, all or a rules file");
  explain_cmd->add_option("--goal", goal_name, "goal diagram (default: computed output)");
  explain_cmd->add_option("--max-steps", max_steps, "proof length bound");

  std::string out_path;
  bool plain = false;
  auto* render_cmd = with_model(app.add_subcommand("render", "Graphviz output"));
  render_cmd->add_option("--out", out_path, "write DOT here instead of standard output");
  render_cmd->add_flag("--plain", plain, "ignore the interpretation");

  std::string dir;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "write the built-in fixtures as model files");
  fixtures_cmd->add_option("--out", dir, "directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    out << Json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return kExitUsage;
  }

  try {
    Json result;
    if (fixtures_cmd->parsed()) {
      fs::create_directories(dir);
      Json written = Json::array();
      for (const auto& name : zoo_names()) {
        fs::path p = fs::path(dir) / (name + ".json");
        save_model(p.string(), zoo_fixture(name));
        written.push_back(p.string());
      }
      result = Json{{"written", std::move(written)}};
      out << result.dump(2) << "\n";
      return kExitOk;
    }

    ZooModel zm = resolve_model(model);
    const ModelBinding& b = zm.binding();

    if (validate_cmd->parsed()) {
      Json diagrams = Json::array();
      for (const auto& [name, d] : b.distinguished) diagrams.push_back(name);
      Json violations = Json::array();
      for (const auto& v : check_interpretation(zm.interpretation))
        violations.push_back(Json{{"kind", to_string(v.kind)}, {"subject", v.subject}, {"detail", v.detail}});
      Completeness c = completeness(zm.interpretation);
      result = Json{{"ok", true},
                    {"name", zm.name},
                    {"backend", to_string(b.backend)},
                    {"language", to_string(b.sig->language())},
                    {"variables", b.sig->variables().size()},
                    {"generators", b.sig->generators().size()},
                    {"equations", b.sig->equations().size()},
                    {"diagrams", std::move(diagrams)},
                    {"rules", zm.rules.size()},
                    {"interpretation",
                     Json{{"violations", std::move(violations)},
                          {"complete", c.complete},
                          {"complete_concrete", c.complete_concrete},
                          {"uninterpreted_variables", c.uninterpreted_variables},
                          {"uninterpreted_generators", c.uninterpreted_generators}}}};
    } else if (eval_cmd->parsed()) {
      const std::string name = pick_diagram(zm, diagram);
      const Diagram& d = b.diagram(name);
      result = Json{{"diagram", name}, {"inputs", d.inputs()}, {"outputs", d.outputs()}};
      if (inputs.empty()) {
        result["semantics"] = semantics_json(b, d);
      } else if (b.backend == Backend::FinFn) {
        std::vector<std::string> given;
        for (auto x : input_indices(b, d, inputs)) given.push_back(b.object(d.inputs()[given.size()]).elements[x]);
        result["values"] = run_finite(b, d, given);
      } else if (b.backend == Backend::Stoch) {
        auto idx = input_indices(b, d, inputs);
        MorphSem m = eval_diagram(b, d);
        const auto& s = std::get<StochMatrix>(m);
        StochMatrix col{{}, s.cod, s.m.col(static_cast<long>(flatten(idx, s.dom)))};
        result["distribution"] = distribution_to_json(col, objects(b, d.outputs()));
      } else if (b.backend == Backend::RealVec) {
        if (inputs.size() != d.inputs().size())
          fail(ErrorKind::InvalidArgument, "expected " + std::to_string(d.inputs().size()) + " input vectors");
        std::vector<Eigen::VectorXd> vs;
        for (const auto& text : inputs) {
          std::vector<double> xs;
          std::stringstream ss(text);
          std::string part;
          while (std::getline(ss, part, ',')) {
            try {
              xs.push_back(std::stod(part));
            } catch (const std::exception&) {
              throw UsageError("'" + part + "' is not a number");
            }
          }
          vs.push_back(Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<long>(xs.size())));
        }
        Json outs = Json::array();
        for (const auto& v : run_real(b, d, vs)) outs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        result["values"] = std::move(outs);
      } else {
        throw UsageError("quantum diagrams are evaluated without --input");
      }
    } else if (influence_cmd->parsed()) {
      const Diagram& d = b.diagram(pick_diagram(zm, diagram));
      std::vector<std::size_t> ins, outs;
      for (const auto& n : in_names) ins.push_back(index_of(d.inputs(), n, "input"));
      for (const auto& n : out_names) outs.push_back(index_of(d.outputs(), n, "output"));
      InfluenceCertificate c = semantic ? semantic_no_influence(b, d, ins, outs) : structural_no_influence(d, ins, outs);
      result = Json{{"verdict", to_string(c.verdict)}};
      result["input"] = in_names.size() == 1 ? Json(in_names[0]) : Json(in_names);
      result["output"] = out_names.size() == 1 ? Json(out_names[0]) : Json(out_names);
      if (c.witness) {
        auto label = [&](const std::vector<std::size_t>& xs) {
          Json a = Json::array();
          for (std::size_t k = 0; k < ins.size(); ++k)
            a.push_back(b.object(d.inputs()[ins[k]]).elements[xs[k]]);
          return a;
        };
        result["witness"] = Json{{"first", label(c.witness->first)}, {"second", label(c.witness->second)}};
      }
    } else if (intervene_cmd->parsed()) {
      const std::string name = pick_diagram(zm, diagram);
      const Diagram& d = b.diagram(name);
      if (!replace_box_id.empty() == !dos.empty())
        throw UsageError("give either --replace-box with --with, or --do");
      if (!replace_box_id.empty()) {
        if (with_path.empty()) throw UsageError("--replace-box needs --with");
        Diagram replacement = diagram_from_json(read_json_file(with_path), b.sig);
        SurgeryRecord r = replace_box(d, replace_box_id, replacement);
        result = Json{{"surgery", to_string(r.kind)}, {"site", r.site}, {"diagram", diagram_to_json(r.result)}};
        result["semantics"] = semantics_json(b, retarget(r.result, b.sig));
      } else {
        std::map<std::string, std::string> assign;
        for (const auto& a : dos) {
          auto eq = a.find('=');
          if (eq == std::string::npos) throw UsageError("--do expects Var=label, got '" + a + "'");
          assign[a.substr(0, eq)] = a.substr(eq + 1);
        }
        OpenCausalModel m = do_intervention(make_causal_model(b, d), assign);
        result = Json{{"surgery", "do"}, {"diagram", diagram_to_json(m.network.diagram)}};
        result["semantics"] = semantics_json(m.binding, m.network.diagram);
      }
    } else if (probe_cmd->parsed()) {
      const Diagram& d = b.diagram(pick_diagram(zm, diagram));
      SurgeryRecord r = observe_probe(d, wire, classifier.empty() ? std::nullopt : std::optional(classifier));
      result = Json{{"surgery", to_string(r.kind)}, {"site", r.site}, {"diagram", diagram_to_json(r.result)}};
      result["semantics"] = semantics_json(b, r.result);
    } else if (cf_cmd->parsed()) {
      const Diagram& d = b.diagram(pick_diagram(zm, diagram));
      OpenCausalModel m = make_causal_model(b, d);
      if (exogenous.empty())
        for (const auto& [var, parents] : m.network.parents_of)
          if (parents.empty()) exogenous.push_back(var);
      FCM f = make_fcm(m, exogenous);
      CounterfactualResult r = counterfactual_query(f, world_spec_from_json(read_json_file(spec_path)));
      std::vector<ObjectSem> objs;
      for (const auto& factor : r.factors) objs.push_back(r.binding.object(factor.substr(factor.find(':') + 1)));
      result = Json{{"exogenous", exogenous}, {"factors", r.factors}, {"distribution", distribution_to_json(r.state, objs)}};
    } else if (condition_cmd->parsed()) {
      if (cond_value.empty() == evidence_path.empty()) throw UsageError("give either --value or --evidence");
      const Diagram& d = b.diagram(pick_diagram(zm, diagram));
      if (!d.inputs().empty()) fail(ErrorKind::InvalidArgument, "conditioning needs a closed diagram");
      ModelBinding sb = as_stochastic(b);
      StochMatrix joint = std::get<StochMatrix>(eval_diagram(sb, d));
      std::size_t k = index_of(d.outputs(), cond_var, "output");
      std::vector<std::string> rest;
      for (std::size_t i = 0; i < d.outputs().size(); ++i)
        if (i != k) rest.push_back(d.outputs()[i]);
      StochMatrix post;
      if (!cond_value.empty()) {
        post = condition_sharp(joint, k, label_index(b, cond_var, cond_value));
      } else {
        std::vector<std::size_t> perm{k};
        for (std::size_t i = 0; i < d.outputs().size(); ++i)
          if (i != k) perm.push_back(i);
        StochMatrix front = std::get<StochMatrix>(permute_cod(joint, perm));
        Json ev = read_json_file(evidence_path);
        const ObjectSem& o = b.object(cond_var);
        StochMatrix e{{}, {o.size()}, Eigen::MatrixXd::Zero(static_cast<long>(o.size()), 1)};
        if (!ev.is_object()) fail(ErrorKind::ParseError, evidence_path + ": expected {label: probability}");
        for (const auto& [label, p] : ev.items()) {
          if (!p.is_number()) fail(ErrorKind::ParseError, evidence_path + ": " + label + ": expected a number");
          e.m(static_cast<long>(label_index(b, cond_var, label)), 0) = p.get<double>();
        }
        post = update == "jeffrey" ? jeffrey_update(front, 1, e) : pearl_update(front, 1, e);
      }
      result = Json{{"factors", rest}, {"distribution", distribution_to_json(post, objects(b, rest))}};
    } else if (cfe_cmd->parsed()) {
      const Diagram& d = b.diagram(pick_diagram(zm, diagram));
      Json st = read_json_file(state_path);
      std::vector<std::string> given;
      if (st.is_array()) {
        for (const auto& x : st) {
          if (!x.is_string()) fail(ErrorKind::ParseError, state_path + ": expected labels");
          given.push_back(x.get<std::string>());
        }
      } else if (st.is_object()) {
        for (const auto& v : d.inputs()) {
          if (!st.contains(v) || !st[v].is_string()) fail(ErrorKind::ParseError, state_path + ": missing " + v);
          given.push_back(st[v].get<std::string>());
        }
        if (st.size() != d.inputs().size()) fail(ErrorKind::ParseError, state_path + ": unknown input name");
      } else {
        fail(ErrorKind::ParseError, state_path + ": expected an array or object of labels");
      }
      std::vector<std::size_t> x = input_indices(b, d, given);
      std::vector<std::size_t> target(d.outputs().size());
      std::vector<bool> set(d.outputs().size(), false);
      for (const auto& t : targets) {
        std::size_t o = 0;
        std::string label = t;
        if (auto eq = t.find('='); eq != std::string::npos) {
          o = index_of(d.outputs(), t.substr(0, eq), "output");
          label = t.substr(eq + 1);
        } else if (d.outputs().size() != 1) {
          throw UsageError("targets need Var=label when the diagram has several outputs");
        }
        target[o] = label_index(b, d.outputs()[o], label);
        set[o] = true;
      }
      if (std::find(set.begin(), set.end(), false) != set.end())
        throw UsageError("every output needs a target");
      CfeDistance dist;
      dist.kind = distance == "hamming" ? CfeDistance::Kind::Hamming
                  : distance == "weighted" ? CfeDistance::Kind::Weighted
                                           : CfeDistance::Kind::Ordinal;
      dist.weights = weights;
      CfeResult r = cfe_search(b, d, x, target, dist);
      Json found = Json::array();
      for (const auto& xs : r.inputs) {
        Json row = Json::object();
        for (std::size_t k = 0; k < xs.size(); ++k) row[d.inputs()[k]] = b.object(d.inputs()[k]).elements[xs[k]];
        found.push_back(std::move(row));
      }
      result = Json{{"distance", r.distance}, {"counterfactuals", std::move(found)}};
    } else if (rewrite_cmd->parsed()) {
      std::string sname = start_name;
      if (sname.empty()) sname = b.distinguished.count("query") ? "query" : pick_diagram(zm, diagram);
      const Diagram& start = b.diagram(sname);
      const Diagram& goal = b.diagram(goal_name.empty() ? "goal" : goal_name);
      ProveOptions opt;
      opt.max_steps = max_steps;
      opt.allow_backward = backward;
      result = proof_result(zm, prove(b, &zm.interpretation, start, goal, select_rules(zm, rules, start), opt));
    } else if (explain_cmd->parsed()) {
      const Diagram& d = b.diagram(pick_diagram(zm, diagram));
      Diagram start = close_inputs(b, d, labels);
      Diagram goal;
      if (!goal_name.empty()) {
        goal = b.diagram(goal_name);
      } else {
        goal = point_diagram(b, start.outputs(), closed_outputs(b, start));
      }
      ProveOptions opt;
      opt.max_steps = max_steps;
      result = proof_result(zm, prove(b, &zm.interpretation, start, goal, select_rules(zm, rules, start), opt));
      result["outputs"] = closed_outputs(b, start);
      result["start"] = describe(zm.interpretation, normalize(start));
    } else if (render_cmd->parsed()) {
      const Diagram& d = b.diagram(pick_diagram(zm, diagram));
      std::string dot = render_dot(d, plain ? nullptr : &zm.interpretation);
      if (out_path.empty()) {
        out << dot;
        return kExitOk;
      }
      std::ofstream f(out_path, std::ios::binary);
      if (!f) fail(ErrorKind::InvalidArgument, out_path + ": cannot write file");
      f << dot;
      result = Json{{"written", out_path}};
    }
    out << result.dump(2) << "\n";
    return kExitOk;
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    out << Json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return kExitUsage;
  } catch (const ModelError& e) {
    out << Json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    out << Json{{"error", "InvalidArgument"}, {"message", e.what()}}.dump() << "\n";
    return kExitDomainError;
  }
}

}  // namespace compmodel
