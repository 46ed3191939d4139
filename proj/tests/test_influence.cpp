#include <doctest.h>

#include <random>

#include "compmodel/influence.hpp"
#include "support/random_models.hpp"
#include "support/test_util.hpp"

using namespace compmodel;
using testsupport::kind_of;

namespace {

Generator chan(std::string name, std::vector<std::string> dom, std::vector<std::string> cod) {
  return Generator{std::move(name), std::move(dom), std::move(cod), true, false, false};
}

StochMatrix stoch(Dims dom, Dims cod, Eigen::MatrixXd m) {
  return StochMatrix{std::move(dom), std::move(cod), std::move(m)};
}

struct Product {
  SignaturePtr sig;
  ModelBinding b;
  Diagram d;
};

// f(x1) and g(x1, x2) with x1 copied.
Product product_model() {
  auto sig = build_signature({"X1", "X2", "Y1", "Y2"},
                             {chan("f", {"X1"}, {"Y1"}), chan("g", {"X1", "X2"}, {"Y2"})}, {},
                             Language::CD);
  Eigen::MatrixXd f(2, 2), g(2, 4);
  f << 0.75, 0.25, 0.25, 0.75;
  g << 1, 0.5, 0.125, 0, 0, 0.5, 0.875, 1;
  auto bin = ObjectSem::prob_space({"0", "1"});
  ModelBinding b = bind_model(sig, Backend::Stoch, {{"X1", bin}, {"X2", bin}, {"Y1", bin}, {"Y2", bin}},
                              {{"f", stoch({2}, {2}, f)}, {"g", stoch({2, 2}, {2}, g)}});
  DiagramBuilder db(sig);
  auto x1 = db.copy(db.input("X1"), 2);
  auto x2 = db.input("X2");
  db.output(db.add1("f", {x1[0]}));
  db.output(db.add1("g", {x1[1], x2}));
  return {sig, b, db.build()};
}

}  // namespace

TEST_CASE("disjoint paths give a structural certificate") {
  Product p = product_model();
  InfluenceCertificate c = structural_no_influence(p.d, 1, 0);
  CHECK(c.verdict == Verdict::StructuralNoInfluence);
  REQUIRE(c.simplified);
  // The X2 input runs straight into a discard in the simplified diagram.
  const Diagram& s = *c.simplified;
  bool cut = false;
  for (const auto& w : s.wires())
    if (w.from.boundary() && w.from.port == 1 && !w.to.boundary())
      cut = s.boxes()[w.to.box].kind == BoxKind::Discard;
  CHECK(cut);
  CHECK(semantic_no_influence(p.b, p.d, 1, 0).verdict == Verdict::SemanticNoInfluence);
  CHECK(structural_no_influence(p.d, 0, 1).verdict == Verdict::Unknown);
  CHECK(structural_no_influence(p.d, 1, 1).verdict == Verdict::Unknown);
  CHECK(semantic_no_influence(p.b, p.d, 1, 1).verdict == Verdict::InfluenceWitness);
}

TEST_CASE("a fully connected two layer network has no structural certificate") {
  auto sig = build_signature({"A", "B", "H1", "H2", "O1", "O2"},
                             {chan("h1", {"A", "B"}, {"H1"}), chan("h2", {"A", "B"}, {"H2"}),
                              chan("o1", {"H1", "H2"}, {"O1"}), chan("o2", {"H1", "H2"}, {"O2"})},
                             {}, Language::CD);
  DiagramBuilder db(sig);
  auto a = db.copy(db.input("A"), 2);
  auto bb = db.copy(db.input("B"), 2);
  auto h1 = db.copy(db.add1("h1", {a[0], bb[0]}), 2);
  auto h2 = db.copy(db.add1("h2", {a[1], bb[1]}), 2);
  db.output(db.add1("o1", {h1[0], h2[0]}));
  db.output(db.add1("o2", {h1[1], h2[1]}));
  Diagram d = db.build();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t o = 0; o < 2; ++o) CHECK(structural_no_influence(d, i, o).verdict == Verdict::Unknown);
}

TEST_CASE("xor table witness") {
  auto sig = build_signature({"X1", "X2", "Y"}, {Generator{"xor", {"X1", "X2"}, {"Y"}, true, true, false}}, {},
                             Language::CD);
  auto bit = ObjectSem::fin_set({"0", "1"});
  ModelBinding b = bind_model(sig, Backend::FinFn, {{"X1", bit}, {"X2", bit}, {"Y", bit}},
                              {{"xor", FnTable{{2, 2}, {2}, {0, 1, 1, 0}}}});
  Diagram d = from_generator(sig, "xor");
  InfluenceCertificate c = semantic_no_influence(b, d, 1, 0);
  REQUIRE(c.verdict == Verdict::InfluenceWitness);
  CHECK(c.witness->first == std::vector<std::size_t>{0, 0});
  CHECK(c.witness->second == std::vector<std::size_t>{0, 1});
  CHECK(c.witness->first_marginal(0) == 1.0);
  CHECK(c.witness->second_marginal(1) == 1.0);
  // Jointly varying both inputs also influences.
  CHECK(semantic_no_influence(b, d, {0, 1}, {0}).verdict == Verdict::InfluenceWitness);
}

TEST_CASE("constant channel: semantic certificate without a structural one") {
  auto sig = build_signature({"X", "Y"}, {chan("c", {"X"}, {"Y"})}, {}, Language::CD);
  auto bin = ObjectSem::prob_space({"0", "1"});
  Eigen::MatrixXd m(2, 2);
  m << 0.25, 0.25, 0.75, 0.75;
  ModelBinding b = bind_model(sig, Backend::Stoch, {{"X", bin}, {"Y", bin}}, {{"c", stoch({2}, {2}, m)}});
  Diagram d = from_generator(sig, "c");
  CHECK(structural_no_influence(d, 0, 0).verdict == Verdict::Unknown);
  CHECK(semantic_no_influence(b, d, 0, 0).verdict == Verdict::SemanticNoInfluence);
}

TEST_CASE("influence analysis errors") {
  auto sig = build_signature({"X", "Y"}, {Generator{"raw", {"X"}, {"Y"}, false, false, false}}, {},
                             Language::CD);
  Diagram d = from_generator(sig, "raw");
  CHECK(kind_of([&] { structural_no_influence(d, 0, 0); }) == ErrorKind::NonChannelBox);
  CHECK(kind_of([&] { discard_simplify(d, {}); }) == ErrorKind::NonChannelBox);
  Product p = product_model();
  CHECK(kind_of([&] { structural_no_influence(p.d, 2, 0); }) == ErrorKind::IndexOutOfRange);

  auto qsig = build_signature({"Q"}, {chan("u", {"Q"}, {"Q"})}, {}, Language::Discard);
  KrausMap id{{2}, {2}, {Eigen::MatrixXcd::Identity(2, 2)}};
  ModelBinding qb = bind_model(qsig, Backend::Quant, {{"Q", ObjectSem::hilbert(2)}}, {{"u", id}});
  CHECK(kind_of([&] { semantic_no_influence(qb, from_generator(qsig, "u"), 0, 0); }) ==
        ErrorKind::InfiniteCarrier);
}

TEST_CASE("discard simplification") {
  Product p = product_model();
  CHECK(iso_equal(discard_simplify(p.d, {0, 1}), p.d));
  // Keeping f's output leaves f with the other inputs discarded.
  DiagramBuilder db(p.sig);
  db.output(db.add1("f", {db.input("X1")}));
  db.discard(db.input("X2"));
  CHECK(isomorphic(discard_simplify(p.d, {0}), db.build()));
  // Monoidal signatures are lifted to the discard language.
  auto msig = build_signature({"X", "Y"}, {chan("a", {"X"}, {"Y"}), chan("b", {"X"}, {"Y"})}, {},
                              Language::Monoidal);
  Diagram two = compose_par(from_generator(msig, "a"), from_generator(msig, "b"));
  Diagram kept = discard_simplify(two, {1});
  CHECK(kept.signature()->language() == Language::Discard);
  CHECK(kept.boxes().size() == 2);
}

TEST_CASE("structural certificates are semantically sound on random channel diagrams") {
  std::mt19937_64 rng(2024);
  testsupport::RandomOptions opt;
  opt.channels_only = true;
  int certified = 0;
  for (int t = 0; t < 200; ++t) {
    auto c = testsupport::random_case(rng, opt);
    Diagram d = compose_seq(c.first, c.second);
    for (std::size_t i = 0; i < d.inputs().size(); ++i)
      for (std::size_t o = 0; o < d.outputs().size(); ++o) {
        auto s = structural_no_influence(d, i, o);
        if (s.verdict != Verdict::StructuralNoInfluence) continue;
        ++certified;
        CHECK(semantic_no_influence(c.binding, d, i, o).verdict == Verdict::SemanticNoInfluence);
        // The simplified diagram computes the kept marginal exactly.
        double dist = norm_dist(eval_diagram(c.binding, *s.simplified), marginal(eval_diagram(c.binding, d), {o}));
        CHECK(dist == 0.0);
      }
  }
  CHECK(certified > 50);
}
