#pragma once

// Natural-deduction proofs: rule schemas, a sequence-style proof checker,
// and derived-rule builders (combination rule, case split by totality).
//
// Proof file format, one step per line:
//   n: <judgement> BY <rule> [i, j, ...] {name := value; ...}
// Premise lists and instantiations are optional. Instantiation names:
// phi psi theta (formulas), Gamma Delta (comma-separated formula lists),
// r s (rationals), op (and | or | tensor | limp), case1 case2 (judgements).

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llq/extval.hpp"
#include "llq/syntax.hpp"

namespace llq {

enum class RuleId {
  HYP,
  ID, CUT, WEAK, PERM,
  TOP, BOT, AND1, AND2, AND3, OR1, OR2, OR3,
  WEM, TOT, TENS1a, TENS1b, TENS2a, TENS2b, TENS3, LIMP1, LIMP2, LIMP3,
  ONE,
  S1a, S1b, S2, S3, S4, S5, S6, S7, S8, S9, S10,
  ADMISSIBLE,
};

/// All primitive rules (everything except HYP and ADMISSIBLE).
const std::vector<RuleId>& primitive_rules();

std::string rule_name(RuleId r);
/// Accepts the names produced by rule_name; `totality` and `affine` map to ADMISSIBLE.
std::optional<RuleId> parse_rule_name(std::string_view s);
/// Number of premises of a primitive rule.
int rule_arity(RuleId r);

struct Instantiation {
  std::map<std::string, Formula> formulas;  // phi, psi, theta
  std::vector<Formula> gamma, delta;
  std::map<std::string, Rational> scalars;  // r, s
  std::string op;                           // S4 connective
  std::optional<Judgement> case1, case2;    // totality

  [[nodiscard]] bool empty() const;
  [[nodiscard]] const Formula& formula(const std::string& name) const;
  [[nodiscard]] const Rational& scalar(const std::string& name) const;
};

struct Inference {
  std::vector<Judgement> premises;
  Judgement conclusion;
};

class InstantiationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The inference obtained by instantiating a primitive rule's schema.
/// Positional rules place the distinguished formula last in the context.
/// Throws InstantiationError on missing metavariables or failed side conditions.
Inference rule_instance(RuleId rule, const Instantiation& inst);

struct Step {
  Judgement conclusion;
  RuleId rule = RuleId::HYP;
  std::string admissible;  // name when rule == ADMISSIBLE
  std::vector<std::size_t> premises;  // indices of earlier steps
  Instantiation inst;
};

struct Proof {
  std::vector<Step> steps;

  [[nodiscard]] const Judgement& conclusion() const { return steps.back().conclusion; }
};

struct Verdict {
  bool accepted = false;
  std::optional<std::size_t> step;  // first offending step (0-based)
  std::string reason;
};

/// HYP steps not among `assumptions` open a local assumption; only the
/// totality rule discharges them. The last step must have none open.
Verdict check(const Proof& p, const std::vector<Judgement>& assumptions);

/// Whether (a, b) is (|- x -o y, |- y -o x) or (|- !x, |- !!x).
bool is_supplementary_pair(const Judgement& a, const Judgement& b);

/// Appends steps, returning step indices.
class ProofBuilder {
 public:
  ProofBuilder() = default;
  explicit ProofBuilder(Proof p) : proof_(std::move(p)) {}

  std::size_t add(Judgement j, RuleId r, std::vector<std::size_t> premises = {}, Instantiation inst = {});
  std::size_t admissible(Judgement j, std::string name, std::vector<std::size_t> premises, Instantiation inst = {});
  /// Copies another proof's steps; returns the index of its last step.
  std::size_t append(const Proof& other);

  std::size_t hyp(const Judgement& j);
  std::size_t id(const Formula& f);
  std::size_t top(std::vector<Formula> ctx);
  /// Adds f at the end of the antecedents.
  std::size_t weak(std::size_t i, const Formula& f);
  std::size_t perm(std::size_t i, std::vector<Formula> order);
  std::size_t cut(std::size_t left, std::size_t right);
  /// Collapses the antecedents into a single (left-nested) tensor, or top when empty.
  std::size_t single(std::size_t i);
  /// From a |- b, r > 0: r*a |- r*b (single antecedent).
  std::size_t scale(std::size_t i, const Rational& r);
  /// From a |- b and c |- d (single antecedents): a (x) c |- b (x) d.
  std::size_t tensor_intro(std::size_t i, std::size_t j);
  /// From a |- b and c |- d: r*a (x) s*c |- r*b (x) s*d.
  std::size_t combine(std::size_t i, std::size_t j, const Rational& r, const Rational& s);

  [[nodiscard]] const Judgement& at(std::size_t i) const { return proof_.steps.at(i).conclusion; }
  [[nodiscard]] std::size_t size() const { return proof_.steps.size(); }
  [[nodiscard]] const Proof& proof() const { return proof_; }
  Proof take() { return std::move(proof_); }

 private:
  Proof proof_;
};

/// Derived combination rule as a standalone proof.
Proof combine(const Proof& p1, const Proof& p2, const Rational& r, const Rational& s);

/// Case split on a supplementary pair: p1 may use case1, p2 may use case2,
/// both conclude the same judgement. Throws std::invalid_argument otherwise.
Proof by_cases(const Proof& p1, const Proof& p2, const Judgement& case1, const Judgement& case2);

class ProofParseError : public std::runtime_error {
 public:
  ProofParseError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

Proof parse_proof(std::string_view text);
std::string print_proof(const Proof& p);

}  // namespace llq
