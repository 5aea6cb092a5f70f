#pragma once

// Random formulas and judgements for property tests.

#include <random>
#include <string>
#include <vector>

#include "llq/proofkit.hpp"
#include "llq/syntax.hpp"

namespace llq::testgen {

struct GenOptions {
  std::vector<std::string> atoms{"p", "q", "r", "s"};
  int depth = 3;
  Level level = Level::L1star;
  int max_antecedents = 2;
};

inline Rational small_scalar(std::mt19937_64& rng, bool integral) {
  static const char* const fracs[] = {"1/2", "1/3", "2/3", "3/2", "2", "3", "1", "0"};
  static const char* const ints[] = {"1", "2", "3", "0"};
  if (integral) return parse_rational(ints[rng() % 4]);
  return parse_rational(fracs[rng() % 8]);
}

inline Formula random_formula(std::mt19937_64& rng, const GenOptions& o, int depth) {
  auto pick = [&](unsigned n) { return static_cast<unsigned>(rng() % n); };
  auto leaf = [&]() -> Formula {
    unsigned k = pick(10);
    if (k == 0) return Formula::bot();
    if (k == 1) return Formula::top();
    if (k == 2 && o.level != Level::L) {
      if (o.level == Level::L1) return pick(2) ? Formula::one() : Formula::constant(small_scalar(rng, true));
      return pick(2) ? Formula::one() : Formula::constant(small_scalar(rng, false));
    }
    return Formula::atom(o.atoms[pick(static_cast<unsigned>(o.atoms.size()))]);
  };
  if (depth <= 0 || pick(4) == 0) return leaf();
  unsigned k = pick(o.level == Level::L1star ? 6 : 5);
  Formula a = random_formula(rng, o, depth - 1);
  switch (k) {
    case 0:
      return Formula::conj(a, random_formula(rng, o, depth - 1));
    case 1:
      return Formula::disj(a, random_formula(rng, o, depth - 1));
    case 2:
      return Formula::tensor(a, random_formula(rng, o, depth - 1));
    case 3:
      return Formula::limp(a, random_formula(rng, o, depth - 1));
    case 4:
      return Formula::neg(a);
    default:
      return Formula::scale(small_scalar(rng, false), a);
  }
}

inline Judgement random_judgement(std::mt19937_64& rng, const GenOptions& o) {
  Judgement j;
  int n = static_cast<int>(rng() % static_cast<unsigned>(o.max_antecedents + 1));
  for (int i = 0; i < n; ++i) j.antecedents.push_back(random_formula(rng, o, o.depth - 1));
  j.consequent = random_formula(rng, o, o.depth);
  return j;
}

// Fills every metavariable a rule might use. Scalars are positive.
inline Instantiation random_instantiation(std::mt19937_64& rng, const GenOptions& o) {
  static const char* const ops[] = {"and", "or", "tensor", "limp"};
  Instantiation in;
  for (const char* n : {"phi", "psi", "theta"}) in.formulas.emplace(n, random_formula(rng, o, o.depth));
  int ng = static_cast<int>(rng() % 3), nd = static_cast<int>(rng() % 2);
  for (int i = 0; i < ng; ++i) in.gamma.push_back(random_formula(rng, o, o.depth - 1));
  for (int i = 0; i < nd; ++i) in.delta.push_back(random_formula(rng, o, o.depth - 1));
  for (const char* n : {"r", "s"}) {
    Rational q = small_scalar(rng, false);
    in.scalars.emplace(n, sgn(q) > 0 ? q : Rational(1, 2));
  }
  in.op = ops[rng() % 4];
  return in;
}

}  // namespace llq::testgen
