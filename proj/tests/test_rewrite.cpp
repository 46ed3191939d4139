#include <doctest.h>

#include <random>

#include "compmodel/rewrite.hpp"
#include "support/random_rewrites.hpp"
#include "support/test_util.hpp"

using namespace compmodel;
using testsupport::kind_of;

namespace {

Generator det(std::string name, std::vector<std::string> dom, std::vector<std::string> cod) {
  const bool sharp = dom.empty();
  return Generator{std::move(name), std::move(dom), std::move(cod), true, true, sharp};
}

Generator chan(std::string name, std::vector<std::string> dom, std::vector<std::string> cod) {
  return Generator{std::move(name), std::move(dom), std::move(cod), true, false, false};
}

// Boolean toy: states t/f, and, not, and a noisy channel.
struct Logic {
  SignaturePtr sig;
  ModelBinding b;

  Logic() {
    sig = build_signature({"B"},
                          {det("t", {}, {"B"}), det("f", {}, {"B"}), det("and", {"B", "B"}, {"B"}),
                           det("not", {"B"}, {"B"}), chan("noise", {"B"}, {"B"}), chan("coin", {}, {"B"})},
                          {}, Language::CD);
    auto bit = ObjectSem::prob_space({"0", "1"});
    Eigen::MatrixXd t(2, 1), f(2, 1), a(2, 4), n(2, 2), noise(2, 2), coin(2, 1);
    t << 0, 1;
    f << 1, 0;
    a << 1, 1, 1, 0, 0, 0, 0, 1;
    n << 0, 1, 1, 0;
    noise << 0.75, 0.25, 0.25, 0.75;
    coin << 0.5, 0.5;
    b = bind_model(sig, Backend::Stoch, {{"B", bit}},
                   {{"t", StochMatrix{{}, {2}, t}}, {"f", StochMatrix{{}, {2}, f}},
                    {"and", StochMatrix{{2, 2}, {2}, a}}, {"not", StochMatrix{{2}, {2}, n}},
                    {"noise", StochMatrix{{2}, {2}, noise}}, {"coin", StochMatrix{{}, {2}, coin}}});
  }

  Diagram state(const std::string& s) const { return from_generator(sig, s); }
};

}  // namespace

TEST_CASE("rule construction and verification") {
  Logic L;
  CHECK(kind_of([&] { make_rule("bad", L.state("t"), from_generator(L.sig, "not")); }) ==
        ErrorKind::BoundaryMismatch);
  CHECK(kind_of([&] { make_rule("neg", L.state("t"), L.state("f"), -1.0); }) == ErrorKind::InvalidArgument);
  RewriteRule same = verify_rule(L.b, make_rule("same", L.state("t"), L.state("t")));
  CHECK(same.status == RuleStatus::Verified);
  CHECK(same.measured == 0.0);
  // not ; t = f exactly; coin is at l1 distance 1 from t.
  RewriteRule neg = verify_rule(L.b, make_rule("neg", compose_seq(L.state("t"), from_generator(L.sig, "not")),
                                               L.state("f")));
  CHECK(neg.measured == 0.0);
  RewriteRule approx = verify_rule(L.b, make_rule("approx", L.state("coin"), L.state("t"), 1.0));
  CHECK(approx.measured == doctest::Approx(1.0).epsilon(1e-12));
  try {
    verify_rule(L.b, make_rule("tight", L.state("coin"), L.state("t"), 0.1));
    FAIL("expected EpsilonExceeded");
  } catch (const ModelError& e) {
    CHECK(e.kind() == ErrorKind::EpsilonExceeded);
    CHECK(e.value() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("evaluation rules") {
  Logic L;
  RewriteRule r = make_eval_rule(L.b, "and", {"t", "t"});
  CHECK(r.status == RuleStatus::Evaluation);
  CHECK(r.epsilon == 0.0);
  CHECK(isomorphic(r.rhs, L.state("t")));
  CHECK(verify_rule(L.b, r).measured == 0.0);
  CHECK(isomorphic(make_eval_rule(L.b, "and", {"t", "f"}).rhs, L.state("f")));
  CHECK(kind_of([&] { make_eval_rule(L.b, "noise", {"t"}); }) == ErrorKind::NotDeterministic);
  CHECK(kind_of([&] { make_eval_rule(L.b, "and", {"t"}); }) == ErrorKind::ArityMismatch);
  CHECK(kind_of([&] { make_eval_rule(L.b, "not", {"coin"}); }) == ErrorKind::NotSharp);
}

TEST_CASE("matching single boxes and oversized patterns") {
  Logic L;
  Diagram two = compose_par(from_generator(L.sig, "not"), from_generator(L.sig, "not"));
  RewriteRule r = make_rule("id", from_generator(L.sig, "not"), from_generator(L.sig, "not"));
  CHECK(find_matches(two, r).size() == 2);
  RewriteRule big = make_rule("big", two, two);
  CHECK(find_matches(from_generator(L.sig, "not"), big).empty());
  // Applying an identity rule leaves the host unchanged.
  auto ms = find_matches(two, r);
  CHECK(iso_equal(apply_rule(two, ms[0], r), two));
}

TEST_CASE("non-convex occurrences are excluded") {
  auto sig = build_signature({"X", "A", "B", "C", "D", "E"},
                             {chan("a", {"X"}, {"A", "B"}), chan("m", {"A"}, {"C"}), chan("c", {"C", "B"}, {"D"}),
                              chan("k", {"D"}, {"E"})},
                             {}, Language::CD);
  DiagramBuilder host(sig);
  auto ab = host.add("a", {host.input("X")});
  host.output(host.add1("k", {host.add1("c", {host.add1("m", {ab[0]}), ab[1]})}));
  Diagram h = host.build();
  DiagramBuilder pat(sig);
  auto pab = pat.add("a", {pat.input("X")});
  auto pc = pat.input("C");
  pat.output(pab[0]);
  pat.output(pat.add1("c", {pc, pab[1]}));
  Diagram p = pat.build();
  CHECK(find_matches(h, make_rule("nonconvex", p, p)).empty());
  // The convex region {m, c} is found.
  DiagramBuilder pat2(sig);
  auto b2 = pat2.input("B");
  pat2.output(pat2.add1("c", {pat2.add1("m", {pat2.input("A")}), b2}));
  Diagram p2 = pat2.build();
  CHECK(kind_of([&] { make_rule("x", p2, p); }) == ErrorKind::BoundaryMismatch);
  CHECK(find_matches(h, make_rule("convex", p2, p2)).size() == 1);
}

TEST_CASE("stale matches are rejected") {
  Logic L;
  DiagramBuilder db(L.sig);
  db.output(db.add1("not", {db.add1("not", {db.add1("t", {})})}));
  Diagram d = db.build();
  RewriteRule r = make_eval_rule(L.b, "not", {"t"});
  auto ms = find_matches(d, r);
  REQUIRE(ms.size() == 1);
  Diagram once = apply_rule(d, ms[0], r);
  CHECK(kind_of([&] { apply_rule(once, ms[0], r); }) == ErrorKind::InvalidMatch);
  CHECK(validate(once).empty());
  CHECK(once.outputs() == d.outputs());
}

TEST_CASE("proofs by evaluation") {
  Logic L;
  DiagramBuilder db(L.sig);
  db.output(db.add1("and", {db.add1("not", {db.add1("f", {})}), db.add1("t", {})}));
  Diagram start = db.build();
  std::vector<RewriteRule> rules{make_eval_rule(L.b, "not", {"f"}), make_eval_rule(L.b, "not", {"t"}),
                                 make_eval_rule(L.b, "and", {"t", "t"})};
  ProveResult res = prove(L.b, nullptr, start, L.state("t"), rules);
  REQUIRE(std::holds_alternative<RewriteProof>(res));
  const RewriteProof& p = std::get<RewriteProof>(res);
  CHECK(p.steps.size() == 2);
  CHECK(p.steps[0].rule == "eval:not(f)");
  CHECK(p.epsilon_total == 0.0);
  CHECK(p.epsilon_bounded);
  CHECK_FALSE(p.all_interpreted);

  ProveResult trivial = prove(L.b, nullptr, start, start, rules);
  REQUIRE(std::holds_alternative<RewriteProof>(trivial));
  CHECK(std::get<RewriteProof>(trivial).steps.empty());

  ProveResult miss = prove(L.b, nullptr, start, L.state("f"), rules);
  REQUIRE(std::holds_alternative<ProofFailure>(miss));
  CHECK(std::get<ProofFailure>(miss).reason == ProofFailure::Reason::NotFound);
  ProveOptions tight;
  tight.max_steps = 1;
  ProveResult cut = prove(L.b, nullptr, start, L.state("t"), rules, tight);
  REQUIRE(std::holds_alternative<ProofFailure>(cut));
  CHECK(std::get<ProofFailure>(cut).reason == ProofFailure::Reason::BudgetExhausted);
  CHECK(kind_of([&] { prove(L.b, nullptr, start, start, {make_rule("raw", L.state("t"), L.state("t"))}); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("explanations need interpreted diagrams") {
  Logic L;
  auto model = std::make_shared<const ModelBinding>(L.b);
  Interpretation i = make_interpretation(model);
  i.abs_var["B"] = "truth";
  for (const auto& g : {"t", "f", "and", "not"}) {
    i.abs_gen[g] = g;
    i.set_concrete_for(g, g);
  }
  DiagramBuilder db(L.sig);
  db.output(db.add1("not", {db.add1("f", {})}));
  std::vector<RewriteRule> rules{make_eval_rule(L.b, "not", {"f"})};
  ProveResult res = prove(L.b, &i, db.build(), L.state("t"), rules);
  REQUIRE(std::holds_alternative<RewriteProof>(res));
  const RewriteProof& p = std::get<RewriteProof>(res);
  CHECK(p.all_interpreted);
  CHECK(validate_explanation(i, p));
  for (const auto& g : {"t", "f", "not"}) {
    Interpretation j = i;
    const Generator& gen = L.sig->generator(g);
    j.con.erase(concrete_key(gen.dom, gen.cod, L.b.morphism(g)));
    CHECK_FALSE(validate_explanation(j, p));
  }
  Interpretation k = i;
  k.abs_var.erase("B");
  CHECK_FALSE(validate_explanation(k, p));
}

TEST_CASE("proof epsilon bounds the semantic distance on random channel models") {
  std::mt19937_64 rng(31);
  int proofs = 0;
  for (int t = 0; t < 60; ++t) {
    auto rc = testsupport::random_rewrite_case(rng);
    ProveOptions opt;
    opt.max_steps = rc.walk_length;
    ProveResult res = prove(rc.binding, nullptr, rc.start, rc.goal, rc.rules, opt);
    REQUIRE(std::holds_alternative<RewriteProof>(res));
    const RewriteProof& p = std::get<RewriteProof>(res);
    ++proofs;
    CHECK(p.epsilon_bounded);
    double d = norm_dist(eval_diagram(rc.binding, rc.start), eval_diagram(rc.binding, rc.goal));
    CHECK(d <= p.epsilon_total);
    // Every step is an occurrence of its rule in the previous diagram.
    Diagram cur = p.start;
    for (const auto& s : p.steps) {
      CHECK(validate(s.result).empty());
      CHECK(s.result.inputs() == cur.inputs());
      CHECK(s.result.outputs() == cur.outputs());
      cur = s.result;
    }
  }
  CHECK(proofs == 60);
}
