#include "support/random_rewrites.hpp"

#include <algorithm>
#include <set>

#include "support/random_models.hpp"

namespace testsupport {

using namespace compmodel;

RewriteCase random_rewrite_case(std::mt19937_64& rng) {
  RandomOptions opt;
  opt.channels_only = true;
  opt.max_boxes = 8;
  while (true) {
    RandomCase c = random_case(rng, opt);
    Diagram host = compose_seq(c.first, c.second);
    std::vector<std::string> present;
    for (const Box& b : host.boxes())
      if (b.kind == BoxKind::Gen && std::find(present.begin(), present.end(), b.gen) == present.end())
        present.push_back(b.gen);
    if (present.empty()) continue;
    std::shuffle(present.begin(), present.end(), rng);
    present.resize(std::min<std::size_t>(present.size(), 2));

    std::vector<Generator> alts;
    std::map<std::string, MorphSem> sems;
    for (const auto& name : present) {
      const Generator& g = c.binding.sig->generator(name);
      Generator alt{"alt_" + name, g.dom, g.cod, true, false, false};
      const Dims dom = c.binding.dims_of(g.dom), cod = c.binding.dims_of(g.cod);
      sems[alt.name] = StochMatrix{dom, cod, dyadic_stochastic(rng, static_cast<long>(product(cod)),
                                                               static_cast<long>(product(dom)))};
      alts.push_back(alt);
    }
    RewriteCase rc{extend_binding(c.binding, {}, {}, alts, sems), host, host, {}, 0};
    for (const auto& name : present) {
      RewriteRule r = make_rule("swap_" + name, from_generator(rc.binding.sig, name),
                                from_generator(rc.binding.sig, "alt_" + name));
      r.epsilon = norm_dist(rc.binding.morphism(name), rc.binding.morphism("alt_" + name));
      rc.rules.push_back(verify_rule(rc.binding, r));
    }
    rc.start = retarget(host, rc.binding.sig);
    rc.goal = rc.start;
    const std::size_t steps = 1 + rng() % 3;
    for (std::size_t s = 0; s < steps; ++s) {
      const RewriteRule& r = rc.rules[rng() % rc.rules.size()];
      auto ms = find_matches(rc.goal, r);
      if (ms.empty()) continue;
      rc.goal = apply_rule(rc.goal, ms[rng() % ms.size()], r);
      ++rc.walk_length;
    }
    return rc;
  }
}

}  // namespace testsupport
