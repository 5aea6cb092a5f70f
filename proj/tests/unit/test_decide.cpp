#include <doctest.h>

#include <random>

#include "gen.hpp"
#include "llq/decide.hpp"

using namespace llq;

namespace {

std::vector<Judgement> theory(const char* text) { return parse_theory(text); }

}  // namespace

TEST_CASE("sat: one or not one") {
  auto V = theory("|- 1 \\/ !1");
  auto r = sat(V);
  CHECK_FALSE(r.satisfiable);
  CHECK(verify_sat(V, r).empty());
}

TEST_CASE("sat: witness") {
  auto V = theory("p, p |- q (x) 1\n q |- 3");
  auto r = sat(V);
  REQUIRE(r.satisfiable);
  CHECK(satisfies_all(*r.witness, V));
  CHECK(verify_sat(V, r).empty());
}

TEST_CASE("sat: infeasible affine leaf has certificate") {
  auto V = theory("2 |- p\n p |- 3");
  auto r = sat(V);
  CHECK_FALSE(r.satisfiable);
  bool saw_cert = false;
  for (const auto& e : r.evidence) saw_cert |= e.certificate.has_value();
  CHECK(saw_cert);
  CHECK(verify_sat(V, r).empty());
}

TEST_CASE("consequence: deduction theorem failure") {
  auto phi = parse_formula("eta /\\ ((eta (x) rho) -o theta)");
  auto psi = parse_formula("rho -o theta");
  Judgement hyp{{}, phi}, goal{{}, psi};
  auto with = consequence({hyp}, goal);
  CHECK(with.entailed);
  CHECK(verify_consequence({hyp}, goal, with).empty());

  Judgement imp{{}, Formula::limp(phi, psi)};
  auto without = consequence({}, imp);
  CHECK_FALSE(without.entailed);
  CHECK(verify_consequence({}, imp, without).empty());

  Model m = parse_model("eta = 1/4\nrho = 0\ntheta = 1");
  CHECK_FALSE(satisfies(m, imp));
}

TEST_CASE("consequence: incompleteness family") {
  for (int k : {1, 2, 5}) {
    std::vector<Judgement> S;
    for (int n = 1; n <= k; ++n)
      S.push_back(Judgement{{Formula::ntimes(static_cast<unsigned>(n + 1), Formula::atom("p"))},
                            Formula::ntimes(static_cast<unsigned>(n), Formula::atom("q"))});
    Judgement goal = parse_judgement("p |- q");
    auto r = consequence(S, goal);
    CHECK_FALSE(r.entailed);
    CHECK(verify_consequence(S, goal, r).empty());
    Model m;
    m.set("p", ExtValue(Rational(k) / Rational(k + 1)));
    m.set("q", ExtValue(1));
    CHECK(satisfies_all(m, S));
    CHECK_FALSE(satisfies(m, goal));
  }
}

TEST_CASE("consequence: elaborated proofs check") {
  DecideOptions o;
  o.elaborate = true;
  auto S = theory("p |- q\n q |- r (x) 1");
  auto goal = parse_judgement("2 * p |- r (x) r (x) 2");
  auto res = consequence(S, goal, o);
  REQUIRE(res.entailed);
  int proofs = 0;
  for (const auto& lv : res.leaves)
    for (const auto& g : lv.goals)
      if (g.proof) ++proofs;
  CHECK(proofs > 0);
  CHECK(verify_consequence(S, goal, res).empty());
}

TEST_CASE("consequence: random pairs against sampled models") {
  std::mt19937_64 rng(7);
  testgen::GenOptions g;
  g.atoms = {"p", "q", "r"};
  g.depth = 2;
  DecideOptions o;
  o.elaborate = true;
  int entailed = 0, refuted = 0;
  for (int i = 0; i < 60; ++i) {
    std::vector<Judgement> S;
    int n = static_cast<int>(rng() % 3);
    for (int j = 0; j < n; ++j) S.push_back(testgen::random_judgement(rng, g));
    Judgement goal = testgen::random_judgement(rng, g);
    auto r = consequence(S, goal, o);
    INFO(print(goal));
    CHECK(verify_consequence(S, goal, r).empty());
    if (r.entailed) {
      ++entailed;
      for (int k = 0; k < 100; ++k) {
        Model m = sample_model({"p", "q", "r"}, rng);
        if (satisfies_all(m, S)) CHECK(satisfies(m, goal));
      }
    } else {
      ++refuted;
    }
  }
  CHECK(entailed > 0);
  CHECK(refuted > 0);
}

TEST_CASE("consequence: jobs agree") {
  auto S = theory("p \\/ q |- r\n r |- 1");
  auto goal = parse_judgement("p /\\ q |- 1");
  DecideOptions o;
  o.jobs = 3;
  CHECK(consequence(S, goal, o).entailed == consequence(S, goal).entailed);
}

TEST_CASE("inductive inference model check") {
  // s = t within eps + 1/i for every i, conclusion s = t within eps
  Model m = parse_model("d = 1/2");
  HypStream h = [](std::size_t i) {
    return Judgement{{Formula::constant(Rational(1, 2) + Rational(1, static_cast<long>(i)))}, Formula::atom("d")};
  };
  Judgement concl{{Formula::constant(Rational(1, 2))}, Formula::atom("d")};
  auto r = check_inference_model(m, h, concl, 10);
  CHECK(r.verdict == InferenceVerdict::Satisfies);
  CHECK(r.conclusion_holds);

  HypStream bad = [](std::size_t i) {
    return Judgement{{Formula::constant(Rational(static_cast<long>(i)))}, Formula::atom("d")};
  };
  CHECK_THROWS_AS(check_inference_model(m, bad, concl, 5), MonotonicityError);
}
