#include "compmodel/rewrite.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>
#include <unordered_map>

#include "compmodel/error.hpp"
#include "compmodel/graph_edit.hpp"

namespace compmodel {

std::string_view to_string(RuleStatus s) {
  switch (s) {
    case RuleStatus::Asserted: return "asserted";
    case RuleStatus::Verified: return "verified";
    case RuleStatus::Evaluation: return "evaluation";
  }
  return "?";
}

std::string_view to_string(ProofFailure::Reason r) {
  return r == ProofFailure::Reason::BudgetExhausted ? "BudgetExhausted" : "NotFound";
}

RewriteRule make_rule(std::string name, Diagram lhs, Diagram rhs, double epsilon) {
  require_valid(lhs);
  require_valid(rhs);
  if (lhs.inputs() != rhs.inputs() || lhs.outputs() != rhs.outputs())
    fail(ErrorKind::BoundaryMismatch, "rule '" + name + "' sides have different boundaries");
  if (!(epsilon >= 0.0)) fail(ErrorKind::InvalidArgument, "rule '" + name + "' has a negative epsilon");
  return RewriteRule{std::move(name), std::move(lhs), std::move(rhs), epsilon, RuleStatus::Asserted, 0.0};
}

RewriteRule verify_rule(const ModelBinding& b, const RewriteRule& r) {
  double d = norm_dist(eval_diagram(b, retarget(r.lhs, b.sig)), eval_diagram(b, retarget(r.rhs, b.sig)));
  if (d > r.epsilon + backend_tolerance(b.backend))
    throw ModelError(ErrorKind::EpsilonExceeded,
                     "rule '" + r.name + "' sides differ by " + std::to_string(d) + " > " +
                         std::to_string(r.epsilon),
                     d);
  RewriteRule out = r;
  if (out.status != RuleStatus::Evaluation) out.status = RuleStatus::Verified;
  out.measured = d;
  return out;
}

RewriteRule make_eval_rule(const ModelBinding& b, const std::string& box,
                           const std::vector<std::string>& input_states) {
  if (b.backend != Backend::FinFn && b.backend != Backend::Stoch)
    fail(ErrorKind::UnsupportedBackend, "evaluation rules need a finite classical backend");
  const Signature& sig = *b.sig;
  const Generator& g = sig.generator(box);
  if (input_states.size() != g.dom.size())
    fail(ErrorKind::ArityMismatch, "'" + box + "' takes " + std::to_string(g.dom.size()) + " inputs");
  if (!is_deterministic(b.morphism(box))) fail(ErrorKind::NotDeterministic, "'" + box + "' is not deterministic");
  DiagramBuilder lhs(b.sig);
  std::vector<DiagramBuilder::Handle> args;
  for (std::size_t k = 0; k < input_states.size(); ++k) {
    const Generator& s = sig.generator(input_states[k]);
    if (!s.sharp || s.cod != std::vector<std::string>{g.dom[k]} || !is_deterministic(b.morphism(s.name)))
      fail(ErrorKind::NotSharp, "'" + s.name + "' is not a sharp state of " + g.dom[k]);
    args.push_back(lhs.add1(s.name, {}));
  }
  for (auto h : lhs.add(box, args)) lhs.output(h);
  Diagram left = lhs.build();
  MorphSem value = eval_diagram(b, left);
  Eigen::MatrixXd m = value.index() == 0 ? to_matrix(std::get<FnTable>(value)).m : std::get<StochMatrix>(value).m;
  Eigen::Index flat = 0;
  m.col(0).maxCoeff(&flat);
  auto digits = unflatten(static_cast<std::size_t>(flat), b.dims_of(g.cod));
  DiagramBuilder rhs(b.sig);
  for (std::size_t k = 0; k < g.cod.size(); ++k) {
    const std::string& label = b.object(g.cod[k]).elements[digits[k]];
    const Generator* s = find_sharp_state(b, g.cod[k], label);
    if (!s) fail(ErrorKind::NoSharpStateGenerator, "no sharp state for " + g.cod[k] + "=" + label);
    rhs.output(rhs.add1(s->name, {}));
  }
  std::string name = "eval:" + box + "(";
  for (std::size_t k = 0; k < input_states.size(); ++k) name += (k ? "," : "") + input_states[k];
  RewriteRule r = make_rule(name + ")", std::move(left), rhs.build(), 0.0);
  r.status = RuleStatus::Evaluation;
  return r;
}

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

bool compatible(const Box& p, const Box& h) {
  if (p.kind != h.kind) return false;
  switch (p.kind) {
    case BoxKind::Gen: return p.gen == h.gen;
    case BoxKind::Copy: return p.var == h.var && p.fanout == h.fanout;
    case BoxKind::Discard: return p.var == h.var;
    case BoxKind::Swap: return p.var == h.var && p.var2 == h.var2;
  }
  return false;
}

class Matcher {
 public:
  Matcher(const Diagram& host, const Diagram& pattern)
      : h_(host), p_(pattern), hw_(make_wiring(host)), pmap_(pattern.boxes().size(), npos),
        used_(host.boxes().size(), false), port_(pattern.boxes().size()), done_(pattern.wires().size(), false) {
    for (std::size_t b = 0; b < p_.boxes().size(); ++b)
      if (p_.boxes()[b].kind == BoxKind::Copy) port_[b].assign(p_.boxes()[b].fanout, npos);
  }

  std::vector<Match> run() {
    for (const Wire& w : p_.wires())
      if (w.from.boundary() && w.to.boundary()) return {};
    if (p_.boxes().empty()) return {};
    search();
    return std::move(out_);
  }

 private:
  const Diagram& h_;
  const Diagram& p_;
  Wiring hw_;
  std::vector<std::size_t> pmap_;
  std::vector<bool> used_;
  std::vector<std::vector<std::size_t>> port_;  // copy output port maps
  std::vector<bool> done_;
  std::vector<Match> out_;

  bool is_copy(std::size_t pb) const { return p_.boxes()[pb].kind == BoxKind::Copy; }

  bool port_taken(std::size_t pb, std::size_t hp) const {
    return std::find(port_[pb].begin(), port_[pb].end(), hp) != port_[pb].end();
  }

  void map_box(std::size_t pb, std::size_t hb) {
    pmap_[pb] = hb;
    used_[hb] = true;
  }
  void unmap_box(std::size_t pb) {
    used_[pmap_[pb]] = false;
    pmap_[pb] = npos;
  }

  // Tries the next step with wire `wi` marked done, undoing on return.
  void recurse_done(std::size_t wi) {
    done_[wi] = true;
    search();
    done_[wi] = false;
  }

  void search() {
    for (std::size_t wi = 0; wi < p_.wires().size(); ++wi) {
      if (done_[wi]) continue;
      const Wire& w = p_.wires()[wi];
      if (w.from.boundary() || w.to.boundary()) continue;
      const std::size_t pb = w.from.box, qb = w.to.box;
      const bool from_mapped = pmap_[pb] != npos, to_mapped = pmap_[qb] != npos;
      if (!from_mapped && !to_mapped) continue;
      if (to_mapped) {
        const Wire& hwire = h_.wires()[hw_.in[pmap_[qb]][w.to.port]];
        if (hwire.from.boundary()) return;
        const std::size_t hb = hwire.from.box, hp = hwire.from.port;
        if (from_mapped) {
          if (hb != pmap_[pb]) return;
          if (!is_copy(pb)) {
            if (hp == w.from.port) recurse_done(wi);
          } else if (port_[pb][w.from.port] == hp) {
            recurse_done(wi);
          } else if (port_[pb][w.from.port] == npos && !port_taken(pb, hp)) {
            port_[pb][w.from.port] = hp;
            recurse_done(wi);
            port_[pb][w.from.port] = npos;
          }
          return;
        }
        if (used_[hb] || !compatible(p_.boxes()[pb], h_.boxes()[hb])) return;
        if (!is_copy(pb) && hp != w.from.port) return;
        map_box(pb, hb);
        if (is_copy(pb)) port_[pb][w.from.port] = hp;
        recurse_done(wi);
        if (is_copy(pb)) port_[pb][w.from.port] = npos;
        unmap_box(pb);
        return;
      }
      // Source mapped, target free: follow the host wire out of the source port.
      std::vector<std::size_t> ports;
      if (!is_copy(pb)) {
        ports.push_back(w.from.port);
      } else if (port_[pb][w.from.port] != npos) {
        ports.push_back(port_[pb][w.from.port]);
      } else {
        for (std::size_t j = 0; j < p_.boxes()[pb].fanout; ++j)
          if (!port_taken(pb, j)) ports.push_back(j);
      }
      const bool fresh_port = is_copy(pb) && port_[pb][w.from.port] == npos;
      for (std::size_t hp : ports) {
        const Wire& hwire = h_.wires()[hw_.out[pmap_[pb]][hp]];
        if (hwire.to.boundary() || hwire.to.port != w.to.port) continue;
        const std::size_t hb = hwire.to.box;
        if (used_[hb] || !compatible(p_.boxes()[qb], h_.boxes()[hb])) continue;
        map_box(qb, hb);
        if (fresh_port) port_[pb][w.from.port] = hp;
        recurse_done(wi);
        if (fresh_port) port_[pb][w.from.port] = npos;
        unmap_box(qb);
      }
      return;
    }
    // No constraint reaches an unmapped box; anchor the next component.
    for (std::size_t pb = 0; pb < pmap_.size(); ++pb) {
      if (pmap_[pb] != npos) continue;
      for (std::size_t hb = 0; hb < h_.boxes().size(); ++hb) {
        if (used_[hb] || !compatible(p_.boxes()[pb], h_.boxes()[hb])) continue;
        map_box(pb, hb);
        search();
        unmap_box(pb);
      }
      return;
    }
    finish();
  }

  void finish() {
    Match m;
    m.boxes = pmap_;
    m.sources.resize(p_.inputs().size());
    m.targets.resize(p_.outputs().size());
    auto ports = port_;
    for (const Wire& w : p_.wires()) {
      if (w.from.boundary()) {
        const Wire& hwire = h_.wires()[hw_.in[pmap_[w.to.box]][w.to.port]];
        if (!hwire.from.boundary() && used_[hwire.from.box]) return;
        m.sources[w.from.port] = hwire.from;
      }
    }
    for (const Wire& w : p_.wires()) {
      if (!w.to.boundary()) continue;
      const std::size_t pb = w.from.box;
      std::size_t hp = w.from.port;
      if (is_copy(pb)) {
        if (ports[pb][hp] == npos) {
          std::size_t j = 0;
          while (std::find(ports[pb].begin(), ports[pb].end(), j) != ports[pb].end()) ++j;
          ports[pb][hp] = j;
        }
        hp = ports[pb][hp];
      }
      const Wire& hwire = h_.wires()[hw_.out[pmap_[pb]][hp]];
      if (!hwire.to.boundary() && used_[hwire.to.box]) return;
      m.targets[w.to.port] = hwire.to;
    }
    if (!convex(m)) return;
    if (std::find(out_.begin(), out_.end(), m) == out_.end()) out_.push_back(std::move(m));
  }

  // No host path leaves the region and comes back.
  bool convex(const Match& m) const {
    std::vector<bool> seen(h_.boxes().size(), false);
    std::deque<std::size_t> todo;
    for (const Endpoint& t : m.targets)
      if (!t.boundary() && !seen[t.box]) seen[t.box] = true, todo.push_back(t.box);
    while (!todo.empty()) {
      std::size_t b = todo.front();
      todo.pop_front();
      if (used_[b]) return false;
      for (std::size_t wi : hw_.out[b]) {
        const Endpoint& to = h_.wires()[wi].to;
        if (!to.boundary() && !seen[to.box]) seen[to.box] = true, todo.push_back(to.box);
      }
    }
    return true;
  }
};

const Diagram& side(const RewriteRule& r, Direction dir, bool pattern) {
  return (dir == Direction::Forward) == pattern ? r.lhs : r.rhs;
}

std::vector<Match> matches_in_normal(const Diagram& host_n, std::size_t hash, const RewriteRule& rule,
                                     Direction dir) {
  Diagram pattern = normalize(side(rule, dir, true));
  auto out = Matcher(host_n, pattern).run();
  for (auto& m : out) {
    m.dir = dir;
    m.host_hash = hash;
  }
  return out;
}

Diagram splice(const Diagram& host_n, const Match& m, const RewriteRule& rule) {
  Diagram piece = side(rule, m.dir, false);
  if (piece.signature() != host_n.signature()) piece = retarget(piece, host_n.signature());
  GraphEdit g(host_n);
  std::set<std::size_t> region(m.boxes.begin(), m.boxes.end());
  for (std::size_t w = 0; w < g.wires.size(); ++w) {
    const Wire& wire = g.wires[w];
    if ((!wire.from.boundary() && region.count(wire.from.box)) || (!wire.to.boundary() && region.count(wire.to.box)))
      g.kill_wire(w);
  }
  for (auto b : region) g.kill_box(b);
  g.insert(piece, m.sources, m.targets);
  Diagram out = g.finish();
  require_valid(out);
  return out;
}

}  // namespace

std::vector<Match> find_matches(const Diagram& host, const RewriteRule& rule, Direction dir) {
  Diagram h = normalize(host);
  return matches_in_normal(h, structural_hash(h), rule, dir);
}

Diagram apply_rule(const Diagram& host, const Match& match, const RewriteRule& rule) {
  Diagram h = normalize(host);
  std::size_t hash = structural_hash(h);
  if (hash != match.host_hash) fail(ErrorKind::InvalidMatch, "match was found in a different diagram");
  auto current = matches_in_normal(h, hash, rule, match.dir);
  if (std::find(current.begin(), current.end(), match) == current.end())
    fail(ErrorKind::InvalidMatch, "match is not an occurrence of rule '" + rule.name + "'");
  return splice(h, match, rule);
}

namespace {

bool all_channels(const Diagram& d) {
  const Signature& sig = *d.signature();
  return std::all_of(d.boxes().begin(), d.boxes().end(), [&](const Box& b) {
    return b.kind != BoxKind::Gen || sig.generator(b.gen).channel;
  });
}

}  // namespace

ProveResult prove(const ModelBinding& b, const Interpretation* interp, const Diagram& start,
                  const Diagram& goal, const std::vector<RewriteRule>& rules, const ProveOptions& opt) {
  for (const auto& r : rules)
    if (r.status == RuleStatus::Asserted)
      fail(ErrorKind::InvalidArgument, "rule '" + r.name + "' has not been verified");
  const Diagram goal_n = normalize(retarget(goal, b.sig));
  struct Node {
    Diagram d;
    std::size_t hash;
    std::size_t parent;
    std::size_t rule;
    Match match;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::size_t, std::vector<std::size_t>> seen;
  auto known = [&](const Diagram& d, std::size_t hash) {
    auto it = seen.find(hash);
    if (it == seen.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](std::size_t n) { return isomorphic(nodes[n].d, d); });
  };
  const std::size_t goal_hash = structural_hash(goal_n);
  auto is_goal = [&](const Diagram& d, std::size_t hash) { return hash == goal_hash && isomorphic(d, goal_n); };

  Diagram s = normalize(retarget(start, b.sig));
  nodes.push_back(Node{s, structural_hash(s), npos, npos, Match{}, 0});
  seen[nodes[0].hash].push_back(0);
  std::optional<std::size_t> found;
  if (is_goal(nodes[0].d, nodes[0].hash)) found = 0;
  bool truncated = false;
  for (std::size_t cur = 0; !found && cur < nodes.size(); ++cur) {
    if (nodes[cur].depth >= opt.max_steps) {
      truncated = true;
      continue;
    }
    for (std::size_t ri = 0; ri < rules.size() && !found; ++ri) {
      for (Direction dir : {Direction::Forward, Direction::Backward}) {
        if (dir == Direction::Backward && !opt.allow_backward) continue;
        for (const Match& m : matches_in_normal(nodes[cur].d, nodes[cur].hash, rules[ri], dir)) {
          Diagram next = normalize(splice(nodes[cur].d, m, rules[ri]));
          std::size_t hash = structural_hash(next);
          if (known(next, hash)) continue;
          if (nodes.size() >= opt.max_nodes) return ProofFailure{ProofFailure::Reason::BudgetExhausted, nodes.size()};
          nodes.push_back(Node{std::move(next), hash, cur, ri, m, nodes[cur].depth + 1});
          seen[hash].push_back(nodes.size() - 1);
          if (is_goal(nodes.back().d, hash)) {
            found = nodes.size() - 1;
            break;
          }
        }
        if (found) break;
      }
    }
  }
  if (!found)
    return ProofFailure{truncated ? ProofFailure::Reason::BudgetExhausted : ProofFailure::Reason::NotFound,
                        nodes.size()};

  RewriteProof p;
  p.start = nodes[0].d;
  p.end = nodes[*found].d;
  std::vector<std::size_t> chain;
  for (std::size_t n = *found; n != 0; n = nodes[n].parent) chain.push_back(n);
  std::reverse(chain.begin(), chain.end());
  bool channels = all_channels(p.start);
  bool all_zero = true;
  for (std::size_t n : chain) {
    const RewriteRule& r = rules[nodes[n].rule];
    bool interpreted = interp && is_interpreted_diagram(*interp, nodes[n].d);
    p.steps.push_back(ProofStep{r.name, nodes[n].match.dir, nodes[n].match, nodes[n].d, r.epsilon, interpreted,
                                r.lhs, r.rhs});
    p.epsilon_total += r.epsilon;
    all_zero = all_zero && r.epsilon == 0.0;
    channels = channels && all_channels(nodes[n].d) && all_channels(r.lhs) && all_channels(r.rhs);
  }
  const bool classical = b.backend == Backend::FinFn || b.backend == Backend::Stoch;
  p.epsilon_bounded = all_zero || (classical && channels);
  p.all_interpreted = interp && validate_explanation(*interp, p);
  return p;
}

bool validate_explanation(const Interpretation& i, const RewriteProof& p) {
  if (!is_interpreted_diagram(i, p.start) || !is_interpreted_diagram(i, p.end)) return false;
  for (const auto& s : p.steps)
    if (!is_interpreted_diagram(i, s.result) || !is_interpreted_diagram(i, s.rule_lhs) ||
        !is_interpreted_diagram(i, s.rule_rhs))
      return false;
  return true;
}

std::vector<RewriteRule> evaluation_rules(const ModelBinding& b, const Diagram& start) {
  const Signature& sig = *b.sig;
  std::vector<RewriteRule> out;
  std::set<std::string> names;
  Diagram d = normalize(start);
  for (bool progress = true; progress;) {
    progress = false;
    const Wiring w = make_wiring(d);
    for (std::size_t i = 0; i < d.boxes().size() && !progress; ++i) {
      const Box& bx = d.boxes()[i];
      if (bx.kind != BoxKind::Gen) continue;
      const Generator& g = sig.generator(bx.gen);
      if (g.dom.empty()) continue;
      std::vector<std::string> states;
      for (auto wi : w.in[i]) {
        const Endpoint& src = d.wires()[wi].from;
        if (src.boundary()) break;
        const Box& sb = d.boxes()[src.box];
        if (sb.kind != BoxKind::Gen || !sig.generator(sb.gen).sharp || sig.generator(sb.gen).cod.size() != 1) break;
        states.push_back(sb.gen);
      }
      if (states.size() != g.dom.size()) continue;
      std::optional<RewriteRule> r;
      try {
        r = make_eval_rule(b, g.name, states);
      } catch (const ModelError&) {
        continue;
      }
      auto ms = find_matches(d, *r);
      if (ms.empty()) continue;
      d = normalize(apply_rule(d, ms.front(), *r));
      if (names.insert(r->name).second) out.push_back(*r);
      progress = true;
    }
  }
  return out;
}

}  // namespace compmodel
