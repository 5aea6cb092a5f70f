#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "llq/qalg.hpp"

using namespace llq;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(LLQ_FIXTURES_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("terms") {
  Signature sig;
  sig.ops["f"] = 2;
  sig.ops["c"] = 0;
  Term t = parse_term("f(x, f(c, y))", sig);
  CHECK(print(t) == "f(x, f(c, y))");
  CHECK(parse_term("f(x,f(c(),y))", sig) == t);
  CHECK_THROWS_AS(parse_term("f(x)", sig), ParseError);
  CHECK_THROWS_AS(parse_term("g(x)", sig), ParseError);
  // the proposition name survives the formula printer and parser
  Formula a = eq_formula(t, Term::var("x"));
  CHECK(parse_formula(print(a)) == a);
}

TEST_CASE("rule instances have the expected shape") {
  Signature sig;
  sig.ops["f"] = 2;
  Term x = Term::var("x"), y = Term::var("y");
  std::vector<Term> u{x, y, Term::app("f", {x, y}), Term::app("f", {y, x})};
  RuleSet rs = instantiate_rules(sig, u, {Rational(0), Rational(1, 2)});
  std::map<QRule, int> n;
  for (const auto& q : rs.instances) ++n[q.rule];
  CHECK(n[QRule::REFL] == 4);
  CHECK(n[QRule::SYMM] == 4 * 4 * 2);
  CHECK(n[QRule::TRIANG] == 4 * 4 * 4 * 2 * 2);
  CHECK(n[QRule::MAX] == 4 * 4 * 2);
  CHECK(n[QRule::NEXP] == 2 * 2 * 2);
  CHECK(rs.cont.size() == 4 * 4 * 2);
  CHECK(print(rs.instances.front().conclusion) == "|- `f(x, y)=f(x, y)`");
}

TEST_CASE("line metric passes, stretched distance fails triang only") {
  QAlgInput in = parse_qalg(slurp("qalg_line.terms"));
  CHECK(in.terms.size() == 12);
  RuleSet rs = instantiate_rules(in.sig, in.terms, in.eps);
  Model good = metric_model(in.points, parse_distances(slurp("qalg_line.dist")));
  QReport r = check_rules(good, rs, 10);
  CHECK(r.failures.empty());
  CHECK(r.ok());

  Model bad = metric_model(in.points, parse_distances(slurp("qalg_broken.dist")));
  RuleSet finite{rs.instances, {}};
  QReport b = check_rules(bad, finite);
  REQUIRE_FALSE(b.failures.empty());
  for (const auto& f : b.failures) {
    CHECK(f.instance.rule == QRule::TRIANG);
    // d(t, s) is the stretched distance
    CHECK(eval(bad, f.instance.conclusion.consequent) == ExtValue(4));
  }
}

TEST_CASE("metric table validation") {
  std::map<Term, std::string> pts{{Term::var("x"), "a"}, {Term::var("y"), "b"}};
  DistanceTable d{{{"a", "b"}, ExtValue(1)}, {{"b", "a"}, ExtValue(2)}};
  CHECK_THROWS_AS(metric_model(pts, d), MetricError);
  DistanceTable diag{{{"a", "b"}, ExtValue(1)}, {{"b", "a"}, ExtValue(1)}, {{"a", "a"}, ExtValue(1)}};
  CHECK_THROWS_AS(metric_model(pts, diag), MetricError);
  CHECK_THROWS_AS(metric_model(pts, {}), MetricError);
  Model m = metric_model(pts, parse_distances("a b 1/2\n"));
  CHECK(m.get("x=y") == ExtValue(Rational(1, 2)));
  CHECK(satisfies(m, parse_judgement("1/2 |- `x=y`")));
  CHECK(m.get("x=x").is_zero());
}

TEST_CASE("symm holds iff the table is symmetric") {
  std::mt19937_64 rng(17);
  Signature sig;
  std::vector<Term> u{Term::var("x"), Term::var("y"), Term::var("z")};
  std::map<Term, std::string> pts{{u[0], "a"}, {u[1], "b"}, {u[2], "c"}};
  std::vector<Rational> eps{Rational(0), Rational(1), Rational(2), Rational(3)};
  RuleSet rs = instantiate_rules(sig, u, eps);
  RuleSet symm;
  for (const auto& q : rs.instances)
    if (q.rule == QRule::SYMM) symm.instances.push_back(q);
  for (int k = 0; k < 50; ++k) {
    DistanceTable d;
    bool symmetric = true;
    for (const char* a : {"a", "b", "c"})
      for (const char* b : {"a", "b", "c"}) {
        if (std::string(a) == b) continue;
        if (std::string(a) > b && rng() % 2) {
          d[{a, b}] = d[{b, a}];
          continue;
        }
        d[{a, b}] = ExtValue(static_cast<long>(rng() % 4));
      }
    for (const auto& [key, v] : d) symmetric &= d.at({key.second, key.first}) == v;
    CHECK(check_rules(metric_model(pts, d, false), symm).failures.empty() == symmetric);
  }
}

TEST_CASE("cont streams") {
  Term s = Term::var("s"), t = Term::var("t");
  ContStream c{s, t, Rational(1, 3)};
  Model at_eps;
  at_eps.set(eq_atom(s, t), ExtValue(Rational(1, 3)));
  auto r = check_inference_model(at_eps, c.hyps(), c.conclusion(), 10);
  CHECK(r.verdict == InferenceVerdict::Satisfies);
  CHECK(r.conclusion_holds);

  Model above;
  above.set(eq_atom(s, t), ExtValue(Rational(1, 3) + Rational(1, 5)));
  auto r2 = check_inference_model(above, c.hyps(), c.conclusion(), 6);
  CHECK(r2.verdict == InferenceVerdict::Satisfies);
  CHECK(r2.falsified == std::optional<std::size_t>(6));
  auto r3 = check_inference_model(above, c.hyps(), c.conclusion(), 5);
  CHECK(r3.verdict == InferenceVerdict::HypsHoldSoFar);
}

TEST_CASE("term file errors") {
  CHECK_THROWS_AS(parse_qalg("op f/2\nterm t = f(x, y)\n"), ParseError);
  CHECK_THROWS_AS(parse_qalg("bogus line\n"), ParseError);
  CHECK_THROWS_AS(parse_distances("a b\n"), ParseError);
}
