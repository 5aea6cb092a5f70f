#pragma once

// Exact arithmetic on the Lawvere quantale [0, inf]: extended nonnegative
// rationals with extended sum, truncated subtraction and scalar products.

#include <compare>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace llq {

using Rational = mpq_class;

/// Parses `p`, `p/q` (optionally signed) into a canonical rational.
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Canonical text: `p` for integers, `p/q` otherwise.
std::string to_string(const Rational& q);

/// A value of [0, inf]. Finite values are canonical nonnegative rationals;
/// infinity is a separate state, never a sentinel number.
class ExtValue {
 public:
  ExtValue() = default;
  ExtValue(long v);  // NOLINT: integer literals are a natural spelling
  explicit ExtValue(Rational q);

  static ExtValue infinity();
  static ExtValue zero() { return ExtValue{}; }

  [[nodiscard]] bool is_infinite() const noexcept { return inf_; }
  [[nodiscard]] bool is_finite() const noexcept { return !inf_; }
  [[nodiscard]] bool is_zero() const noexcept { return !inf_ && sgn(q_) == 0; }

  /// The finite value; throws std::logic_error on infinity.
  [[nodiscard]] const Rational& finite() const;

  friend bool operator==(const ExtValue& a, const ExtValue& b);
  friend std::strong_ordering operator<=>(const ExtValue& a, const ExtValue& b);

 private:
  Rational q_{0};
  bool inf_ = false;
};

/// Accepts `inf`, `p`, `p/q`. Negative values are rejected.
ExtValue parse_extvalue(std::string_view text);
std::string to_string(const ExtValue& v);
std::ostream& operator<<(std::ostream& os, const ExtValue& v);

// Quantale operations.
ExtValue add(const ExtValue& a, const ExtValue& b);
/// Truncated subtraction a - b (note inf - inf = 0).
ExtValue tsub(const ExtValue& a, const ExtValue& b);
/// r * a with 0 * inf = 0. Requires r >= 0.
ExtValue scale(const Rational& r, const ExtValue& a);
ExtValue min(const ExtValue& a, const ExtValue& b);
ExtValue max(const ExtValue& a, const ExtValue& b);
bool leq(const ExtValue& a, const ExtValue& b);

}  // namespace llq
