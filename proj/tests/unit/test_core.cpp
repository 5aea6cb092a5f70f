#include <doctest.h>

#include <random>

#include "gen.hpp"
#include "llq/linarith.hpp"
#include "llq/semantics.hpp"

using namespace llq;

namespace {

ExtValue q(const char* s) { return parse_extvalue(s); }
const ExtValue inf = ExtValue::infinity();

AffineConstraint row(std::map<std::string, Rational> c, Rational k = 0) {
  AffineConstraint a;
  a.coeffs = std::move(c);
  a.constant = k;
  return a;
}

}  // namespace

TEST_CASE("extended arithmetic") {
  CHECK(add(q("1/2"), q("1/3")) == q("5/6"));
  CHECK(add(inf, ExtValue::zero()) == inf);
  CHECK(tsub(ExtValue(5), ExtValue(3)) == ExtValue(2));
  CHECK(tsub(ExtValue(3), ExtValue(5)).is_zero());
  CHECK(tsub(inf, inf).is_zero());
  CHECK(tsub(inf, ExtValue(7)) == inf);
  CHECK(tsub(ExtValue(7), inf).is_zero());
  CHECK(scale(Rational(0), inf).is_zero());
  CHECK(scale(Rational(2), inf) == inf);
  CHECK(scale(Rational(3, 2), q("4/3")) == ExtValue(2));
  CHECK(max(inf, ExtValue(5)) == inf);
  CHECK(min(inf, ExtValue(5)) == ExtValue(5));
  CHECK(leq(ExtValue::zero(), inf));
  CHECK(to_string(q("6/4")) == "3/2");
  CHECK(to_string(inf) == "inf");
  CHECK_THROWS(parse_extvalue("-1"));
  CHECK_THROWS(parse_extvalue("1/0"));
}

TEST_CASE("residuation: a + b >= c iff a >= c - b") {
  std::mt19937_64 rng(1);
  std::vector<ExtValue> vals{ExtValue::zero(), q("1/2"), ExtValue(1), ExtValue(3), inf};
  for (const auto& a : vals)
    for (const auto& b : vals)
      for (const auto& c : vals) CHECK(leq(c, add(a, b)) == leq(tsub(c, b), a));
}

TEST_CASE("parsing and printing") {
  Formula f = parse_formula("1/2*phi (x) psi /\\ 2*psi -o theta");
  CHECK(f.is(Kind::Limp));
  CHECK(f.left().is(Kind::And));
  CHECK(f.left().left().is(Kind::Tensor));
  CHECK(parse_formula("!bot") == Formula::limp(Formula::bot(), Formula::bot()));
  CHECK(parse_formula("2") == Formula::scale(Rational(2), Formula::one()));
  CHECK(print(Formula::scale(Rational(2), Formula::one())) == "2*1");
  CHECK(print(Formula::limp(Formula::atom("p"), Formula::bot())) == "!p");
  CHECK(print(parse_formula("p -o p")) == "p -o p");
  Judgement j = parse_judgement("p, q |- p (x) q");
  CHECK(j.antecedents.size() == 2);
  CHECK(parse_judgement("|- top").antecedents.empty());
  CHECK(level_of(parse_formula("p -o q")) == Level::L);
  CHECK(level_of(parse_formula("1 (x) p")) == Level::L1);
  CHECK(level_of(parse_formula("(1/2)*p")) == Level::L1star);
  CHECK_THROWS_AS(require_level(parse_judgement("|- 1/2 * p"), Level::L1), LevelError);
  CHECK_THROWS_AS(parse_formula("p (x)"), ParseError);
  CHECK_THROWS_AS(parse_judgement("p |- q |- r"), ParseError);
}

TEST_CASE("printer round trip on random formulas") {
  std::mt19937_64 rng(2);
  testgen::GenOptions g;
  g.depth = 4;
  for (int i = 0; i < 500; ++i) {
    Judgement j = testgen::random_judgement(rng, g);
    CHECK(parse_judgement(print(j)) == j);
  }
}

TEST_CASE("evaluation") {
  Model m = parse_model("eta = 1/4\nrho = 0\ntheta = 1");
  Formula phi = parse_formula("eta /\\ ((eta (x) rho) -o theta)");
  Formula psi = parse_formula("rho -o theta");
  CHECK(eval(m, Formula::limp(phi, psi)) == q("1/4"));

  std::mt19937_64 rng(3);
  testgen::GenOptions g;
  for (int i = 0; i < 300; ++i) {
    Model s = sample_model({"p", "q", "r", "s"}, rng);
    Formula a = testgen::random_formula(rng, g, 3), b = testgen::random_formula(rng, g, 3);
    CHECK(eval(s, Formula::limp(a, a)).is_zero());
    ExtValue va = eval(s, a), vb = eval(s, b);
    CHECK(eval(s, Formula::biimp(a, b)) == max(tsub(vb, va), tsub(va, vb)));
    CHECK(eval(s, Formula::neg(Formula::neg(a))) == (va.is_finite() ? ExtValue::zero() : inf));
    CHECK_FALSE(satisfies(s, parse_judgement("|- 1 \\/ !1")));
    CHECK(satisfies(s, Judgement{{Formula::bot()}, a}));
  }
  for (unsigned n = 0; n <= 10; ++n) {
    Model s = sample_model({"p"}, rng);
    Formula w = Formula::neg(Formula::ntimes(n, parse_formula("1 \\/ !1")));
    CHECK(eval(s, w) == inf);
  }

  Model k;
  k.set("p", q("1/2"));
  k.set("q", ExtValue(1));
  CHECK(satisfies(k, parse_judgement("2*p |- q")));
  CHECK_FALSE(satisfies(k, parse_judgement("p |- q")));
}

TEST_CASE("diagrams") {
  Model m;
  m.set("p", inf);
  m.set("q", q("3/2"));
  auto d = model_to_diagram(m, {"p", "q"});
  REQUIRE(d.size() == 2);
  CHECK(d[0].infinite);
  CHECK(d[1].eps == Rational(3, 2));
  CHECK(diagram_to_model(d) == m);
  CHECK(satisfies_all(m, diagram_judgements(d)));
  CHECK(sample_model({"p", "q"}, 9) == sample_model({"p", "q"}, 9));
}

TEST_CASE("fourier motzkin") {
  LinSystem s{{row({{"x", 1}, {"y", -1}}), row({{"y", 1}}, -1)}, {}};
  auto e = fm_eliminate(s, "y");
  REQUIRE(e.system.constraints.size() == 1);
  CHECK(e.system.constraints[0] == row({{"x", 1}}, -1));

  LinSystem bad{{row({{"x", 1}}, -1), row({{"x", -1}})}, {}};
  auto f = feasible(bad);
  REQUIRE(std::holds_alternative<InfeasibilityCertificate>(f));
  CHECK(verify_infeasibility(bad, std::get<InfeasibilityCertificate>(f)));

  auto w = feasible(s);
  REQUIRE(std::holds_alternative<Point>(w));
  CHECK(s.holds(std::get<Point>(w)));
  CHECK(std::holds_alternative<Point>(feasible(LinSystem{})));
}

TEST_CASE("linear entailment") {
  LinSystem h{{row({{"p", 1}, {"q", -1}})}, {}};
  auto r = entails(h, row({{"p", 2}, {"q", -2}}));
  REQUIRE(std::holds_alternative<Entailed>(r));
  CHECK(std::get<Entailed>(r).combination.multipliers.at(0) == Rational(2));

  LinSystem inc{{row({{"p", 2}, {"q", -1}})}, {"p", "q"}};
  auto c = entails(inc, row({{"p", 1}, {"q", -1}}));
  REQUIRE(std::holds_alternative<Countermodel>(c));
  Point pt = std::get<Countermodel>(c).point;
  CHECK(inc.holds(pt));
  CHECK(row({{"p", 1}, {"q", -1}}).value(pt) < 0);
  Point known{{"p", Rational(1, 2)}, {"q", Rational(1)}};
  CHECK(inc.holds(known));

  auto t = entails(LinSystem{}, row({}));
  REQUIRE(std::holds_alternative<Entailed>(t));
  CHECK(std::get<Entailed>(t).combination.multipliers.empty());

  // random systems: entailment agrees with the certificate or the point
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    LinSystem s;
    s.nonneg = {"x", "y"};
    for (int k = 0; k < 3; ++k)
      s.constraints.push_back(row({{"x", static_cast<long>(rng() % 5) - 2}, {"y", static_cast<long>(rng() % 5) - 2}},
                                  static_cast<long>(rng() % 5) - 2));
    for (auto& c2 : s.constraints) c2.canonicalize();
    AffineConstraint goal = row({{"x", static_cast<long>(rng() % 5) - 2}, {"y", static_cast<long>(rng() % 5) - 2}},
                                static_cast<long>(rng() % 3));
    goal.canonicalize();
    auto res = entails(s, goal);
    if (auto* ok = std::get_if<Entailed>(&res)) CHECK(verify_combination(s, goal, ok->combination));
    if (auto* cm = std::get_if<Countermodel>(&res)) {
      CHECK(s.holds(cm->point));
      CHECK(goal.value(cm->point) < 0);
    }
    if (auto* hi = std::get_if<HypsInfeasible>(&res)) CHECK(verify_infeasibility(s, hi->certificate));
  }
}
