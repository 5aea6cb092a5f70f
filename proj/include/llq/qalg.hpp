#pragma once

// Quantitative equational logic encoded in L1*: terms over a signature,
// equality atoms "s=t" read as distance bounds, rule instances over a
// finite term universe, and checks against extended metric interpretations.
//
// Term file lines:
//   op f/2                 operation symbol with arity
//   term t1 = f(x, y)      named term (added to the universe)
//   interp f(x, y) a       the point a term denotes (adds the term too)
//   eps 0 1/2 1            the epsilon universe
// Distance file lines: `a b 1/2` (symmetric closure; diagonal defaults to 0).

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llq/decide.hpp"
#include "llq/semantics.hpp"
#include "llq/syntax.hpp"

namespace llq {

struct Signature {
  std::map<std::string, unsigned> ops;

  [[nodiscard]] bool has(const std::string& op) const { return ops.count(op) != 0; }
};

/// A variable (no arguments, not an operation) or an operation applied to terms.
struct Term {
  std::string head;
  std::vector<Term> args;
  bool variable = true;

  static Term var(std::string name) { return Term{std::move(name), {}, true}; }
  static Term app(std::string op, std::vector<Term> args) { return Term{std::move(op), std::move(args), false}; }

  friend bool operator==(const Term&, const Term&) = default;
  friend bool operator<(const Term& a, const Term& b);
};

std::string print(const Term& t);
/// Identifiers declared in `sig` are operations (nullary ones need no parentheses).
Term parse_term(std::string_view text, const Signature& sig);

/// Proposition name of s=t, oriented as written.
std::string eq_atom(const Term& s, const Term& t);
Formula eq_formula(const Term& s, const Term& t);

enum class QRule { REFL, SYMM, TRIANG, MAX, NEXP };

std::string to_string(QRule r);

struct QInstance {
  QRule rule = QRule::REFL;
  std::vector<Judgement> premises;
  Judgement conclusion;
};

std::string describe(const QInstance& q);

/// eps + 1/i |- s=t for i = 1, 2, ...; conclusion eps |- s=t.
struct ContStream {
  Term s, t;
  Rational eps;

  [[nodiscard]] HypStream hyps() const;
  [[nodiscard]] Judgement conclusion() const;
};

struct RuleSet {
  std::vector<QInstance> instances;
  std::vector<ContStream> cont;
};

/// All finitary instances over the universe; NEXP only where both applications
/// are in the universe. MAX pairs eps with each positive eps' of the universe.
RuleSet instantiate_rules(const Signature& sig, const std::vector<Term>& terms, const std::vector<Rational>& eps);

/// Distances between named points.
using DistanceTable = std::map<std::pair<std::string, std::string>, ExtValue>;

DistanceTable parse_distances(std::string_view text);

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// m(s=t) = d(point(s), point(t)). With require_metric the table must have a
/// zero diagonal and be symmetric; every pair of used points needs an entry.
Model metric_model(const std::map<Term, std::string>& points, const DistanceTable& d, bool require_metric = true);

struct QFailure {
  QInstance instance;
  std::string reason;
};

struct ContOutcome {
  ContStream stream;
  InferenceCheck check;
};

struct QReport {
  std::size_t checked = 0;
  std::map<QRule, std::size_t> per_rule;
  std::vector<QFailure> failures;
  std::vector<ContOutcome> cont;

  [[nodiscard]] bool ok() const;
};

QReport check_rules(const Model& m, const RuleSet& rules, std::size_t cont_budget = 10);

struct QAlgInput {
  Signature sig;
  std::vector<Term> terms;
  std::map<Term, std::string> points;
  std::vector<Rational> eps;
};

QAlgInput parse_qalg(std::string_view text);

}  // namespace llq
