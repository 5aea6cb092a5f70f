#include <random>
#include <set>

#include "doctest.h"
#include "gen.hpp"
#include "llq/normalize.hpp"
#include "llq/semantics.hpp"

using namespace llq;

namespace {

std::set<std::set<std::string>> leaf_sets(const BranchTree& t) {
  std::set<std::set<std::string>> out;
  for (const auto& th : leaves(t)) {
    std::set<std::string> s;
    for (const auto& n : th.judgements) s.insert(print(n));
    out.insert(s);
  }
  return out;
}

std::set<std::string> normal_set(std::initializer_list<const char*> js) {
  std::set<std::string> s;
  for (const char* j : js) {
    auto n = classify(parse_judgement(j));
    REQUIRE(n);
    s.insert(print(*n));
  }
  return s;
}

NormalizeOptions structural() {
  NormalizeOptions o;
  o.structural = true;
  return o;
}

}  // namespace

TEST_CASE("classify") {
  auto n = classify(parse_judgement("top |- p"));
  REQUIRE(n);
  CHECK(n->kind == NormalKind::AlethicZero);
  n = classify(parse_judgement("2*p (x) 1*1 |- 3*q (x) 0*1"));
  REQUIRE(n);
  CHECK(n->kind == NormalKind::Affine);
  CHECK(n->lhs.coeffs.at("p") == 2);
  CHECK(n->lhs.constant == 1);
  CHECK(n->rhs.coeffs.at("q") == 3);
  CHECK(n->rhs.constant == 0);
  CHECK_FALSE(classify(parse_judgement("theta |- (phi \\/ psi) (x) rho")));
  CHECK(classify(parse_judgement("p |- bot"))->kind == NormalKind::AlethicInfinite);
  CHECK(classify(parse_judgement("|- !!p"))->kind == NormalKind::Finitist);
  CHECK(classify(parse_judgement("bot |- p -o q"))->kind == NormalKind::Tautological);
  CHECK(classify(parse_judgement("|- 1"))->kind == NormalKind::Inconsistent);
}

TEST_CASE("flatten") {
  CHECK(flatten(parse_formula("2*(p (x) q)")) == parse_formula("2*p (x) 2*q"));
  CHECK(flatten(parse_formula("2*(3*p)")) == parse_formula("6*p"));
  CHECK(flatten(parse_formula("0*(p -o q)")) == Formula::top());
  CHECK(flatten(parse_formula("1*p")) == parse_formula("p"));
}

TEST_CASE("simplify_with_assertives") {
  auto aff = [](const char* j) { return *classify(parse_judgement(j)); };
  CHECK(simplify_with_assertives(aff("2*p |- q"), {{"p", Assertive::Infinite}}).kind == NormalKind::Tautological);
  CHECK(simplify_with_assertives(aff("p |- q"), {{"q", Assertive::Infinite}, {"p", Assertive::Finitist}}).kind ==
        NormalKind::Inconsistent);
  CHECK(simplify_with_assertives(aff("p (x) r |- q"), {{"r", Assertive::Zero}}) == aff("p |- q"));
}

TEST_CASE("tensor under disjunction splits by totality") {
  auto t = normalize({parse_judgement("theta |- (phi \\/ psi) (x) rho")}, structural());
  std::set<std::set<std::string>> want{normal_set({"psi |- phi", "theta |- phi (x) rho"}),
                                       normal_set({"phi |- psi", "theta |- psi (x) rho"})};
  CHECK(leaf_sets(t) == want);
}

TEST_CASE("tensor under implication gives four leaves") {
  auto t = normalize({parse_judgement("theta |- (phi -o psi) (x) rho")}, structural());
  std::set<std::set<std::string>> want{
      normal_set({"phi |- psi", "theta |- rho"}),
      normal_set({"|- !!psi", "psi |- phi", "theta (x) phi |- psi (x) rho"}),
      normal_set({"|- !!phi", "psi |- bot", "theta |- bot"}),
      normal_set({"phi |- bot", "psi |- bot", "theta |- rho"}),
  };
  INFO(print_tree(t));
  CHECK(leaf_sets(t) == want);
}

TEST_CASE("one-or-not-one has only inconsistent leaves") {
  auto t = normalize({parse_judgement("|- 1 \\/ !1")});
  auto ls = leaves(t);
  CHECK(!ls.empty());
  for (const auto& l : ls) CHECK(l.inconsistent());
  CHECK(leaves(t, true).empty());
}

TEST_CASE("empty input has one empty leaf") {
  auto ls = leaves(normalize({}));
  REQUIRE(ls.size() == 1);
  CHECK(ls[0].judgements.empty());
}

TEST_CASE("full leaves are normal theories") {
  std::mt19937_64 rng(7);
  testgen::GenOptions o;
  for (int i = 0; i < 150; ++i) {
    std::vector<Judgement> V;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < n; ++k) V.push_back(testgen::random_judgement(rng, o));
    auto t = normalize(V);
    for (const auto& l : leaves(t, true)) {
      auto errs = check_normal_theory(l);
      INFO(print_tree(t));
      CHECK(errs.empty());
    }
  }
}

TEST_CASE("normal representation agrees with the input on sampled models") {
  std::mt19937_64 rng(11);
  testgen::GenOptions o;
  o.atoms = {"p", "q", "r"};
  int discrepancies = 0;
  for (int i = 0; i < 120; ++i) {
    std::vector<Judgement> V;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < n; ++k) V.push_back(testgen::random_judgement(rng, o));
    auto t = normalize(V);
    auto ls = leaves(t);
    for (int s = 0; s < 60; ++s) {
      Model m = sample_model(o.atoms, rng, static_cast<Profile>(s % 3));
      bool lhs = satisfies_all(m, V);
      bool rhs = false;
      for (const auto& l : ls) rhs = rhs || satisfies_all(m, l.to_judgements());
      if (lhs != rhs) {
        ++discrepancies;
        std::string vs;
        for (auto& j : V) vs += print(j) + "\n";
        FAIL_CHECK("V=\n" << vs << "model: " << print_model(m) << "\n" << print_tree(t));
        if (discrepancies > 3) return;
      }
    }
  }
  CHECK(discrepancies == 0);
}
