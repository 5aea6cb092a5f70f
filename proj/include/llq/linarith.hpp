#pragma once

// Exact rational linear arithmetic: Fourier-Motzkin elimination with
// provenance, feasibility witnesses and nonnegative-combination certificates.
//
// Row indexing convention: a LinSystem with n constraints and nonneg set N
// (sorted) has rows 0..n-1 for the constraints and n+k for the row x_k >= 0
// of the k-th variable of N. Combination multipliers use these indices.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "llq/extval.hpp"

namespace llq {

enum class Rel { GEQ, GT };

using Point = std::map<std::string, Rational>;

/// sum coeffs[x] * x + constant (>= | >) 0
struct AffineConstraint {
  std::map<std::string, Rational> coeffs;
  Rational constant;
  Rel rel = Rel::GEQ;

  void canonicalize();  // drop zero coefficients
  [[nodiscard]] Rational value(const Point& x) const;
  [[nodiscard]] bool holds(const Point& x) const;
  [[nodiscard]] bool is_constant() const { return coeffs.empty(); }

  friend bool operator==(const AffineConstraint&, const AffineConstraint&) = default;
};

std::string to_string(const AffineConstraint& c);

struct LinSystem {
  std::vector<AffineConstraint> constraints;
  std::set<std::string> nonneg;

  [[nodiscard]] std::size_t row_count() const { return constraints.size() + nonneg.size(); }
  /// Row i under the indexing convention (nonneg rows materialized).
  [[nodiscard]] AffineConstraint row(std::size_t i) const;
  [[nodiscard]] std::set<std::string> variables() const;
  [[nodiscard]] bool holds(const Point& x) const;
};

std::string to_string(const LinSystem& s);

struct Combination {
  std::map<std::size_t, Rational> multipliers;  // row index -> t_i >= 0
  Rational slack;                                // t0 >= 0

  friend bool operator==(const Combination&, const Combination&) = default;
};

/// sum_i t_i * row_i, as an affine form (relation GT iff a strict row has t_i > 0).
AffineConstraint expand(const LinSystem& s, const Combination& c);

struct EliminationResult {
  LinSystem system;
  /// provenance[i]: multipliers over the input rows producing output constraint i.
  std::vector<std::map<std::size_t, Rational>> provenance;
};

EliminationResult fm_eliminate(const LinSystem& s, const std::string& v);

/// Combination whose expansion plus slack is the zero form, with either
/// slack > 0 or a strict row used: witnesses 0 > 0 or -slack >= 0.
struct InfeasibilityCertificate {
  Combination combination;
};

bool verify_infeasibility(const LinSystem& s, const InfeasibilityCertificate& cert);

using FeasibilityResult = std::variant<Point, InfeasibilityCertificate>;

FeasibilityResult feasible(const LinSystem& s);

/// goal == sum t_i hyp_i + t0 as affine forms.
bool verify_combination(const LinSystem& hyps, const AffineConstraint& goal, const Combination& c);

struct Entailed {
  Combination combination;
};
struct Countermodel {
  Point point;  // satisfies hyps, goal value < 0
};
struct HypsInfeasible {
  InfeasibilityCertificate certificate;
};

using EntailResult = std::variant<Entailed, Countermodel, HypsInfeasible>;

/// hyps are GEQ rows; goal is treated as GEQ.
EntailResult entails(const LinSystem& hyps, const AffineConstraint& goal);

}  // namespace llq
