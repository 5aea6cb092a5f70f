#pragma once

// Normal-form judgements and the branching normalization procedure.
//
// normalize() builds a case-split tree: every node holds a judgement set,
// the rewrites applied to it, and either a split on a supplementary pair
// (a |- b , b |- a) / (a |- bot , |- !!a) or a leaf normal theory.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llq/extval.hpp"
#include "llq/syntax.hpp"

namespace llq {

enum class NormalKind { Tautological, Inconsistent, AlethicZero, AlethicInfinite, Finitist, Affine };
std::string to_string(NormalKind k);

struct AffineSide {
  std::map<std::string, Rational> coeffs;  // positive
  Rational constant;                       // coefficient of 1, >= 0

  friend bool operator==(const AffineSide&, const AffineSide&) = default;
};

struct NormalJudgement {
  NormalKind kind = NormalKind::Tautological;
  std::string prop;  // alethic / finitist
  AffineSide lhs, rhs;

  static NormalJudgement tautological() { return {}; }
  static NormalJudgement inconsistent() { return {NormalKind::Inconsistent, {}, {}, {}}; }
  static NormalJudgement alethic_zero(std::string p) { return {NormalKind::AlethicZero, std::move(p), {}, {}}; }
  static NormalJudgement alethic_infinite(std::string p) {
    return {NormalKind::AlethicInfinite, std::move(p), {}, {}};
  }
  static NormalJudgement finitist(std::string p) { return {NormalKind::Finitist, std::move(p), {}, {}}; }
  static NormalJudgement affine(AffineSide l, AffineSide r) {
    return {NormalKind::Affine, {}, std::move(l), std::move(r)};
  }

  [[nodiscard]] bool is_assertive() const {
    return kind == NormalKind::AlethicZero || kind == NormalKind::AlethicInfinite || kind == NormalKind::Finitist;
  }
  [[nodiscard]] Judgement to_judgement() const;
  [[nodiscard]] std::vector<std::string> atoms() const;

  friend bool operator==(const NormalJudgement&, const NormalJudgement&) = default;
  friend bool operator<(const NormalJudgement& a, const NormalJudgement& b);
};

std::string print(const NormalJudgement& n);

/// Pushes scalars onto atoms and constants, collapses r*(s*a), drops 1* and 0*.
Formula flatten(const Formula& f);

/// Syntactic classification after flattening; nullopt when not normal.
std::optional<NormalJudgement> classify(const Judgement& j);

/// Both sides as affine forms after flattening (top counts as nothing);
/// nullopt when a side holds bot or a connective other than (x) and scalars.
std::optional<std::pair<AffineSide, AffineSide>> affine_form(const Judgement& j);

enum class Assertive { Zero, Infinite, Finitist };

/// Substitutes known assertive facts into an affine judgement.
NormalJudgement simplify_with_assertives(const NormalJudgement& a, const std::map<std::string, Assertive>& ctx);

struct NormalTheory {
  std::vector<NormalJudgement> judgements;  // sorted, unique

  [[nodiscard]] bool inconsistent() const;
  [[nodiscard]] std::vector<Judgement> to_judgements() const;
  friend bool operator==(const NormalTheory&, const NormalTheory&) = default;
};

NormalTheory make_theory(std::vector<NormalJudgement> js);

/// Violations of the normal-theory conditions (empty when it is normal).
/// With require_assertives, every atom must carry exactly one assertive judgement.
std::vector<std::string> check_normal_theory(const NormalTheory& t, bool require_assertives = true);

struct Split {
  enum class Kind { Tot, Wem } kind = Kind::Tot;
  Formula a, b;  // b unused for Wem

  /// Tot: a |- b ; Wem: a |- bot
  [[nodiscard]] Judgement first() const;
  /// Tot: b |- a ; Wem: |- !!a
  [[nodiscard]] Judgement second() const;
  [[nodiscard]] std::string describe() const;
};

struct Rewrite {
  std::string rule;
  std::string justification;
  std::string before;
  std::vector<std::string> after;
};

struct BranchNode {
  int parent = -1;
  int branch = -1;  // 0: first member of the parent's pair, 1: second
  std::vector<Judgement> entry, entry_goals;
  std::vector<Rewrite> rewrites;
  std::vector<Judgement> state, state_goals;
  std::optional<Split> split;
  int children[2] = {-1, -1};
  // leaf data
  NormalTheory theory;
  std::vector<NormalJudgement> goals;

  [[nodiscard]] bool is_leaf() const { return !split.has_value(); }
};

struct BranchTree {
  std::vector<Judgement> root;
  std::vector<Judgement> root_goals;
  std::vector<BranchNode> nodes;  // nodes[0] is the root

  [[nodiscard]] std::vector<int> leaf_ids() const;
};

struct NormalizeOptions {
  Level level = Level::L1star;
  /// Stop once every judgement is normal, without splitting atoms that lack
  /// an assertive judgement.
  bool structural = false;
  bool check_termination = true;
  std::size_t max_nodes = 200000;
};

class NormalizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BranchTree normalize(const std::vector<Judgement>& V, const NormalizeOptions& opts = {});
/// Joint normalization: the goal's normal forms are tracked separately and
/// never used as hypotheses.
BranchTree normalize_with_goal(const std::vector<Judgement>& S, const Judgement& goal,
                               const NormalizeOptions& opts = {});

std::vector<NormalTheory> leaves(const BranchTree& t, bool satisfiable_only = false);

std::string print_tree(const BranchTree& t);

}  // namespace llq
