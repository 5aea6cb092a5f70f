#pragma once

// Decision procedures on top of normalization: satisfiability, semantic
// consequence with certificates or countermodels, certificate-to-proof
// elaboration, and model checking of inductive inferences.

#include <functional>
#include <optional>
#include <vector>

#include "llq/linarith.hpp"
#include "llq/normalize.hpp"
#include "llq/proofkit.hpp"
#include "llq/semantics.hpp"

namespace llq {

/// A leaf's affine judgements as a linear system over its finitist atoms.
/// Constraint i is rows[i]; every finitist atom is in `nonneg`.
struct LeafSystem {
  NormalTheory theory;
  LinSystem system;
  std::vector<NormalJudgement> rows;
};

LeafSystem leaf_system(const NormalTheory& t);

/// Row sum(lhs) - sum(rhs) >= 0 of an affine (or alethic-zero) judgement.
AffineConstraint affine_row(const NormalJudgement& n);

/// Lifts a point to a model: alethic atoms to 0 / inf, finitist atoms to the point.
Model lift(const NormalTheory& t, const Point& x);

struct DecideOptions {
  Level level = Level::L1star;
  unsigned jobs = 1;
  bool elaborate = false;  // consequence: build proofs for affine goals
};

struct LeafEvidence {
  int node = -1;  // tree node id
  bool inconsistent = false;
  std::optional<InfeasibilityCertificate> certificate;  // when !inconsistent
  LinSystem system;
};

struct SatResult {
  bool satisfiable = false;
  std::optional<Model> witness;
  int witness_node = -1;
  std::vector<LeafEvidence> evidence;  // one per leaf when unsatisfiable
  std::size_t leaf_count = 0;
};

SatResult sat(const std::vector<Judgement>& V, const DecideOptions& opts = {});
/// Re-checks the witness or every certificate. Empty string when fine.
std::string verify_sat(const std::vector<Judgement>& V, const SatResult& r);

enum class GoalStatus { Tautological, Assertive, Entailed, Failed };

struct GoalEvidence {
  NormalJudgement goal;
  GoalStatus status = GoalStatus::Failed;
  AffineConstraint row;
  std::optional<Combination> combination;
  std::optional<Proof> proof;
};

enum class LeafStatus { Inconsistent, Infeasible, Holds, Refuted };

struct LeafVerdict {
  int node = -1;
  LeafStatus status = LeafStatus::Holds;
  LeafSystem leaf;
  std::optional<InfeasibilityCertificate> certificate;
  std::vector<GoalEvidence> goals;
  std::optional<Point> counterpoint;
};

struct ConsequenceResult {
  bool entailed = false;
  std::optional<Model> countermodel;
  int countermodel_node = -1;
  std::vector<LeafVerdict> leaves;
};

ConsequenceResult consequence(const std::vector<Judgement>& S, const Judgement& goal, const DecideOptions& opts = {});
/// Re-checks countermodels, certificates, Motzkin identities and proofs.
std::string verify_consequence(const std::vector<Judgement>& S, const Judgement& goal, const ConsequenceResult& r);

/// Proof of `goal` from the leaf's judgements following the combination:
/// scaled hypotheses joined by the combination rule, then one affine
/// rearrangement step. Throws std::invalid_argument if c does not verify.
Proof elaborate_proof(const LeafSystem& leaf, const NormalJudgement& goal, const Combination& c);

/// Hypothesis stream i -> judgement, for i = 1, 2, ...
using HypStream = std::function<Judgement(std::size_t)>;

enum class InferenceVerdict { Satisfies, HypsHoldSoFar };

struct InferenceCheck {
  InferenceVerdict verdict = InferenceVerdict::HypsHoldSoFar;
  bool conclusion_holds = false;
  std::optional<std::size_t> falsified;  // first falsified hypothesis index
};

class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Semi-decision over the prefix 1..budget. Monotonicity (later hypotheses
/// entail earlier ones) is checked on consecutive prefix pairs.
InferenceCheck check_inference_model(const Model& m, const HypStream& hyps, const Judgement& conclusion,
                                     std::size_t budget, bool check_monotone = true);

}  // namespace llq
