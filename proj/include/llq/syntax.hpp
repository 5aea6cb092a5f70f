#pragma once

// Formula and judgement ASTs for the three propositional logics over the
// Lawvere quantale (L, L1, L1*), with an ASCII parser and printer.
//
// Concrete syntax (loosest to tightest):
//   a -o b, a o-o b     right-associative implications
//   a /\ b, a \/ b      left-associative lattice connectives
//   a (x) b             tensor, left-associative
//   r*a, !a             scalar product and negation (unary)
//   bot top 1 r ident `quoted ident` (a)
// A bare rational r abbreviates r*1. `#` starts a comment.

#include <compare>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "llq/extval.hpp"

namespace llq {

enum class Kind : unsigned char { Bot, Top, One, Atom, And, Or, Tensor, Limp, Scale };

/// Immutable, structurally compared formula. Copies share nodes.
class Formula {
 public:
  Formula();  // top

  static Formula bot();
  static Formula top();
  static Formula one();
  static Formula atom(std::string name);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula tensor(Formula a, Formula b);
  static Formula limp(Formula a, Formula b);
  /// r * body; throws std::invalid_argument when r < 0.
  static Formula scale(Rational r, Formula body);

  // Derived connectives, expanded on construction.
  static Formula neg(Formula a);                 // a -o bot
  static Formula biimp(Formula a, Formula b);    // (a -o b) /\ (b -o a)
  static Formula ntimes(unsigned n, Formula a);  // a (x) ... (x) a, top for n = 0
  static Formula constant(Rational r);           // r * 1
  /// Left-nested tensor of the list; top when empty.
  static Formula tensor_all(const std::vector<Formula>& parts);

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] bool is(Kind k) const { return kind() == k; }
  [[nodiscard]] const std::string& name() const;   // Atom
  [[nodiscard]] const Rational& coeff() const;     // Scale
  [[nodiscard]] const Formula& left() const;       // binary, Scale body
  [[nodiscard]] const Formula& right() const;      // binary
  [[nodiscard]] const Formula& body() const { return left(); }

  /// Negation sugar: a -o bot.
  [[nodiscard]] bool is_negation() const;
  [[nodiscard]] std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node;
  struct Access;
  friend struct Access;
  explicit Formula(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

struct Judgement {
  std::vector<Formula> antecedents;
  Formula consequent;

  friend bool operator==(const Judgement&, const Judgement&) = default;
  friend std::strong_ordering operator<=>(const Judgement& a, const Judgement& b);
};

enum class Level { L, L1, L1star };

std::string to_string(Level l);
/// Accepts `L`, `L1`, `L1star` (also `L1*`).
Level parse_level(std::string_view s);
Level level_of(const Formula& f);
Level level_of(const Judgement& j);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset, std::size_t line, std::size_t column);
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }
  /// The message without the position suffix.
  [[nodiscard]] const std::string& message() const noexcept { return msg_; }

 private:
  std::string msg_;
  std::size_t offset_, line_, column_;
};

/// Thrown when an input exceeds the logic level requested by the caller.
class LevelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Formula parse_formula(std::string_view text);
Judgement parse_judgement(std::string_view text);
/// One judgement per non-blank line; `#` comments are ignored.
std::vector<Judgement> parse_theory(std::string_view text);

std::string print(const Formula& f);
std::string print(const Judgement& j);

/// Set of atom names occurring in f (sorted, unique), appended to out.
void collect_atoms(const Formula& f, std::vector<std::string>& out);
std::vector<std::string> atoms_of(const std::vector<Judgement>& js);

/// The judgement |- (a1 (x) ... (x) an) -o c, equivalent to a1,...,an |- c.
Judgement internalize(const Judgement& j);

/// Replace atoms by formulas; `lookup` returns nullptr for atoms left alone.
template <class Lookup>
Formula substitute(const Formula& f, const Lookup& lookup);

/// Throws LevelError when j is above `level`.
void require_level(const Judgement& j, Level level);

// --- implementation of the substitution template ---------------------------

template <class Lookup>
Formula substitute(const Formula& f, const Lookup& lookup) {
  switch (f.kind()) {
    case Kind::Atom: {
      const Formula* r = lookup(f.name());
      return r ? *r : f;
    }
    case Kind::Bot:
    case Kind::Top:
    case Kind::One:
      return f;
    case Kind::Scale:
      return Formula::scale(f.coeff(), substitute(f.body(), lookup));
    case Kind::And:
      return Formula::conj(substitute(f.left(), lookup), substitute(f.right(), lookup));
    case Kind::Or:
      return Formula::disj(substitute(f.left(), lookup), substitute(f.right(), lookup));
    case Kind::Tensor:
      return Formula::tensor(substitute(f.left(), lookup), substitute(f.right(), lookup));
    case Kind::Limp:
      return Formula::limp(substitute(f.left(), lookup), substitute(f.right(), lookup));
  }
  return f;
}

}  // namespace llq
