#include <doctest.h>

#include <random>

#include "compmodel/diagram.hpp"
#include "compmodel/error.hpp"
#include "compmodel/signature.hpp"
#include "support/test_util.hpp"

using namespace compmodel;
using testsupport::kind_of;

namespace {

Generator gen(std::string name, std::vector<std::string> dom, std::vector<std::string> cod,
              bool channel = true) {
  return Generator{std::move(name), std::move(dom), std::move(cod), channel, false, false};
}

SignaturePtr sprinkler_sig() {
  return build_signature({"Se", "R", "Sp", "W", "Sl"},
                         {gen("f", {"Se"}, {"Sp"}), gen("g", {"Se"}, {"R"}),
                          gen("h", {"R", "Sp"}, {"W"}), gen("k", {"W"}, {"Sl"})},
                         {}, Language::CD);
}

Diagram sprinkler_diagram(const SignaturePtr& sig) {
  DiagramBuilder b(sig);
  auto se = b.copy(b.input("Se"), 2);
  auto sp = b.add1("f", {se[0]});
  auto r = b.add1("g", {se[1]});
  auto w = b.add1("h", {r, sp});
  b.output(b.add1("k", {w}));
  return b.build();
}

}  // namespace

TEST_CASE("empty signature is valid") {
  auto sig = build_signature({}, {}, {}, Language::Monoidal);
  CHECK(sig->variables().empty());
  CHECK(sig->generators().empty());
}

TEST_CASE("sprinkler signature builds") {
  auto sig = sprinkler_sig();
  CHECK(sig->variables().size() == 5);
  CHECK(sig->generator("h").dom == std::vector<std::string>{"R", "Sp"});
  CHECK(sig->find_generator("nope") == nullptr);
}

TEST_CASE("signature construction errors") {
  CHECK(kind_of([] { build_signature({"A"}, {gen("f", {"A"}, {"B"})}, {}, Language::CD); }) ==
        ErrorKind::UnresolvedReference);
  CHECK(kind_of([] { build_signature({"A", "A"}, {}, {}, Language::CD); }) ==
        ErrorKind::DuplicateName);
  CHECK(kind_of([] {
          build_signature({"A"}, {gen("f", {"A"}, {"A"}), gen("f", {}, {"A"})}, {}, Language::CD);
        }) == ErrorKind::DuplicateName);
  CHECK(kind_of([] {
          build_signature({"A"}, {Generator{"s", {"A"}, {"A"}, true, true, true}}, {}, Language::CD);
        }) == ErrorKind::FlagContradiction);
  CHECK(kind_of([] {
          build_signature({"A"}, {Generator{"s", {}, {"A"}, true, false, true}}, {}, Language::CD);
        }) == ErrorKind::FlagContradiction);
  CHECK(kind_of([] {
          build_signature({"A"}, {Generator{"s", {}, {"A"}, false, true, false}}, {}, Language::CD);
        }) == ErrorKind::FlagContradiction);
}

TEST_CASE("equations are checked against interfaces and language") {
  auto base = build_signature({"A", "B"}, {gen("f", {"A"}, {"B"}), gen("g", {"A"}, {"B"})}, {},
                              Language::CD);
  Equation ok{from_generator(base, "f"), from_generator(base, "g")};
  auto sig = build_signature({"A", "B"}, {gen("f", {"A"}, {"B"}), gen("g", {"A"}, {"B"})}, {ok},
                             Language::CD);
  CHECK(sig->equations().size() == 1);

  Equation bad{from_generator(base, "f"), identity(base, {"A"})};
  CHECK(kind_of([&] {
          build_signature({"A", "B"}, {gen("f", {"A"}, {"B"}), gen("g", {"A"}, {"B"})}, {bad},
                          Language::CD);
        }) == ErrorKind::EquationInterfaceMismatch);

  DiagramBuilder db(base);
  auto c = db.copy(db.input("A"), 2);
  db.output(db.add1("f", {c[0]}));
  db.output(db.add1("g", {c[1]}));
  Diagram copying = db.build();
  DiagramBuilder db2(base);
  auto a = db2.input("A");
  auto c2 = db2.copy(a, 2);
  db2.output(db2.add1("g", {c2[0]}));
  db2.output(db2.add1("f", {c2[1]}));
  Equation with_copy{copying, db2.build()};
  CHECK_THROWS_AS(build_signature({"A", "B"},
                                  {gen("f", {"A"}, {"B"}), gen("g", {"A"}, {"B"})}, {with_copy},
                                  Language::Discard),
                  ModelError);
}

TEST_CASE("apply_map with identity and renaming") {
  auto sig = sprinkler_sig();
  Diagram d = sprinkler_diagram(sig);
  Diagram same = apply_map(identity_map(sig), d);
  CHECK(same.boxes() == d.boxes());
  CHECK(same.wires() == d.wires());

  auto renamed = build_signature({"Season", "R", "Sp", "W", "Sl"},
                                 {gen("f", {"Season"}, {"Sp"}), gen("g", {"Season"}, {"R"}),
                                  gen("h", {"R", "Sp"}, {"W"}), gen("k", {"W"}, {"Sl"})},
                                 {}, Language::CD);
  auto m = make_signature_map(sig, renamed,
                              {{"Se", "Season"}, {"R", "R"}, {"Sp", "Sp"}, {"W", "W"}, {"Sl", "Sl"}},
                              {{"f", "f"}, {"g", "g"}, {"h", "h"}, {"k", "k"}});
  CHECK(m.total);
  Diagram out = apply_map(m, d);
  CHECK(validate(out).empty());
  CHECK(out.inputs() == std::vector<std::string>{"Season"});

  // Reference built directly over the renamed signature.
  DiagramBuilder b(renamed);
  auto se = b.copy(b.input("Season"), 2);
  auto sp = b.add1("f", {se[0]});
  auto r = b.add1("g", {se[1]});
  b.output(b.add1("k", {b.add1("h", {r, sp})}));
  CHECK(isomorphic(out, b.build()));
}

TEST_CASE("apply_map partiality errors") {
  auto sig = sprinkler_sig();
  auto partial = make_signature_map(
      sig, sig, {{"Se", "Se"}, {"R", "R"}, {"Sp", "Sp"}, {"W", "W"}, {"Sl", "Sl"}},
      {{"f", "f"}, {"g", "g"}, {"h", "h"}});
  CHECK_FALSE(partial.total);
  CHECK(kind_of([&] { apply_map(partial, sprinkler_diagram(sig)); }) ==
        ErrorKind::UndefinedOnGenerator);
  CHECK(kind_of([&] { make_signature_map(sig, sig, {{"Se", "Se"}}, {{"f", "f"}}); }) ==
        ErrorKind::UndefinedOnVariable);
  CHECK(kind_of([&] {
          make_signature_map(sig, sig, {{"Se", "Se"}, {"Sp", "Sp"}}, {{"f", "g"}});
        }) == ErrorKind::TypeMismatch);
}

TEST_CASE("compose_maps laws") {
  auto sig = sprinkler_sig();
  auto id = identity_map(sig);
  auto partial = make_signature_map(sig, sig, {{"Se", "Se"}, {"Sp", "Sp"}}, {{"f", "f"}});
  auto c = compose_maps(partial, id);
  CHECK(c.var_map == partial.var_map);
  CHECK(c.gen_map == partial.gen_map);
  CHECK(compose_maps(id, id).total);

  // first defined on f, second undefined on its image.
  auto other = build_signature({"X", "Y"}, {gen("u", {"X"}, {"Y"})}, {}, Language::CD);
  auto to_other = make_signature_map(sig, other, {{"Se", "X"}, {"Sp", "Y"}}, {{"f", "u"}});
  auto back = make_signature_map(other, sig, {{"X", "Se"}}, {});
  auto comp = compose_maps(to_other, back);
  CHECK(comp.gen_map.empty());
  CHECK(comp.var_map == std::map<std::string, std::string>{{"Se", "Se"}});

  CHECK(kind_of([&] { compose_maps(to_other, to_other); }) == ErrorKind::TargetSourceMismatch);
}

TEST_CASE("compose_maps is associative on random partial maps") {
  std::mt19937_64 rng(7);
  auto sig = build_signature({"A", "B", "C"},
                             {gen("f", {"A"}, {"B"}), gen("g", {"B"}, {"C"}),
                              gen("h", {"A"}, {"B"}), gen("k", {"B"}, {"C"})},
                             {}, Language::CD);
  // Random endomaps that send f/h to f/h and g/k to g/k with the identity on variables
  // where defined.
  auto random_map = [&] {
    std::map<std::string, std::string> vars, gens;
    for (const char* v : {"A", "B", "C"})
      if (rng() % 4 != 0) vars[v] = v;
    for (const char* g : {"f", "h"})
      if (vars.count("A") && vars.count("B") && rng() % 3 != 0) gens[g] = rng() % 2 ? "f" : "h";
    for (const char* g : {"g", "k"})
      if (vars.count("B") && vars.count("C") && rng() % 3 != 0) gens[g] = rng() % 2 ? "g" : "k";
    return make_signature_map(sig, sig, vars, gens);
  };
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_map(), b = random_map(), c = random_map();
    auto left = compose_maps(compose_maps(a, b), c);
    auto right = compose_maps(a, compose_maps(b, c));
    CHECK(left.var_map == right.var_map);
    CHECK(left.gen_map == right.gen_map);
  }
}

TEST_CASE("apply_map commutes with sequential composition") {
  auto sig = sprinkler_sig();
  auto m = identity_map(sig);
  DiagramBuilder b1(sig);
  auto se = b1.copy(b1.input("Se"), 2);
  b1.output(b1.add1("g", {se[0]}));
  b1.output(b1.add1("f", {se[1]}));
  Diagram d1 = b1.build();
  DiagramBuilder b2(sig);
  auto r = b2.input("R");
  auto sp = b2.input("Sp");
  b2.output(b2.add1("k", {b2.add1("h", {r, sp})}));
  Diagram d2 = b2.build();
  Diagram whole = apply_map(m, compose_seq(d1, d2));
  Diagram parts = compose_seq(apply_map(m, d1), apply_map(m, d2));
  CHECK(isomorphic(whole, parts));
  CHECK(validate(whole).empty());
}
