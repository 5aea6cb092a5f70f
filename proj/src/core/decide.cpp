#include "llq/decide.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

namespace llq {

namespace {

AffineConstraint row_of(const AffineSide& l, const AffineSide& r) {
  AffineConstraint c;
  for (const auto& [p, k] : l.coeffs) c.coeffs[p] += k;
  for (const auto& [p, k] : r.coeffs) c.coeffs[p] -= k;
  c.constant = l.constant - r.constant;
  c.canonicalize();
  return c;
}

// Runs f(i) for i in [0, n) on up to `jobs` threads.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F f) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

bool has(const NormalTheory& t, NormalKind k, const std::string& p) {
  for (const auto& n : t.judgements)
    if (n.kind == k && n.prop == p) return true;
  return false;
}

}  // namespace

AffineConstraint affine_row(const NormalJudgement& n) {
  if (n.kind == NormalKind::AlethicZero) {
    AffineConstraint c;
    c.coeffs[n.prop] = -1;
    return c;
  }
  if (n.kind != NormalKind::Affine) throw std::invalid_argument("affine_row: not an affine judgement");
  return row_of(n.lhs, n.rhs);
}

LeafSystem leaf_system(const NormalTheory& t) {
  LeafSystem ls;
  ls.theory = t;
  for (const auto& n : t.judgements) {
    if (n.kind == NormalKind::Finitist) ls.system.nonneg.insert(n.prop);
    if (n.kind == NormalKind::Affine) {
      ls.rows.push_back(n);
      ls.system.constraints.push_back(affine_row(n));
      for (const auto& p : n.atoms()) ls.system.nonneg.insert(p);
    }
  }
  return ls;
}

Model lift(const NormalTheory& t, const Point& x) {
  Model m;
  for (const auto& n : t.judgements) {
    if (n.kind == NormalKind::AlethicInfinite) m.set(n.prop, ExtValue::infinity());
    if (n.kind == NormalKind::AlethicZero) m.set(n.prop, ExtValue::zero());
  }
  for (const auto& [p, v] : x)
    if (!m.has(p)) m.set(p, ExtValue(v));
  for (const auto& n : t.judgements)
    if (n.kind == NormalKind::Finitist && !m.has(n.prop)) m.set(n.prop, ExtValue::zero());
  return m;
}

// --- satisfiability -------------------------------------------------------------

SatResult sat(const std::vector<Judgement>& V, const DecideOptions& opts) {
  NormalizeOptions no;
  no.level = opts.level;
  BranchTree tree = normalize(V, no);
  std::vector<int> ids = tree.leaf_ids();
  SatResult res;
  res.leaf_count = ids.size();
  std::vector<LeafEvidence> ev(ids.size());
  std::vector<std::optional<Point>> points(ids.size());
  parallel_for(ids.size(), opts.jobs, [&](std::size_t i) {
    const NormalTheory& th = tree.nodes[static_cast<std::size_t>(ids[i])].theory;
    ev[i].node = ids[i];
    if (th.inconsistent()) {
      ev[i].inconsistent = true;
      return;
    }
    LeafSystem ls = leaf_system(th);
    ev[i].system = ls.system;
    auto f = feasible(ls.system);
    if (auto* pt = std::get_if<Point>(&f))
      points[i] = *pt;
    else
      ev[i].certificate = std::get<InfeasibilityCertificate>(f);
  });
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!points[i]) continue;
    const NormalTheory& th = tree.nodes[static_cast<std::size_t>(ids[i])].theory;
    Model m = lift(th, *points[i]);
    if (!satisfies_all(m, V)) throw std::logic_error("sat: lifted witness does not satisfy the input");
    res.satisfiable = true;
    res.witness = std::move(m);
    res.witness_node = ids[i];
    return res;
  }
  res.evidence = std::move(ev);
  return res;
}

std::string verify_sat(const std::vector<Judgement>& V, const SatResult& r) {
  if (r.satisfiable) {
    if (!r.witness) return "satisfiable without witness";
    if (!satisfies_all(*r.witness, V)) return "witness does not satisfy the input";
    return "";
  }
  if (r.evidence.size() != r.leaf_count) return "missing leaf evidence";
  for (const auto& e : r.evidence) {
    if (e.inconsistent) continue;
    if (!e.certificate) return "leaf " + std::to_string(e.node) + " has no certificate";
    if (!verify_infeasibility(e.system, *e.certificate))
      return "certificate of leaf " + std::to_string(e.node) + " does not verify";
  }
  return "";
}

// --- consequence -------------------------------------------------------------------

namespace {

LeafVerdict decide_leaf(const BranchNode& node, int id, bool elaborate) {
  LeafVerdict v;
  v.node = id;
  if (node.theory.inconsistent()) {
    v.status = LeafStatus::Inconsistent;
    return v;
  }
  v.leaf = leaf_system(node.theory);
  auto f = feasible(v.leaf.system);
  if (auto* cert = std::get_if<InfeasibilityCertificate>(&f)) {
    v.status = LeafStatus::Infeasible;
    v.certificate = *cert;
    return v;
  }
  const Point& any_point = std::get<Point>(f);
  v.status = LeafStatus::Holds;
  for (const auto& g : node.goals) {
    GoalEvidence e;
    e.goal = g;
    switch (g.kind) {
      case NormalKind::Tautological:
        e.status = GoalStatus::Tautological;
        break;
      case NormalKind::Inconsistent:
        e.status = GoalStatus::Failed;
        if (!v.counterpoint) v.counterpoint = any_point;
        break;
      case NormalKind::AlethicInfinite:
        e.status = has(node.theory, NormalKind::AlethicInfinite, g.prop) ? GoalStatus::Assertive : GoalStatus::Failed;
        if (e.status == GoalStatus::Failed && !v.counterpoint) v.counterpoint = any_point;
        break;
      case NormalKind::Finitist:
        e.status = has(node.theory, NormalKind::Finitist, g.prop) || has(node.theory, NormalKind::AlethicZero, g.prop)
                       ? GoalStatus::Assertive
                       : GoalStatus::Failed;
        if (e.status == GoalStatus::Failed && !v.counterpoint) v.counterpoint = any_point;
        break;
      case NormalKind::AlethicZero:
      case NormalKind::Affine: {
        if (g.kind == NormalKind::AlethicZero && has(node.theory, NormalKind::AlethicZero, g.prop)) {
          e.status = GoalStatus::Assertive;
          break;
        }
        e.row = affine_row(g);
        auto r = entails(v.leaf.system, e.row);
        if (auto* ok = std::get_if<Entailed>(&r)) {
          e.status = GoalStatus::Entailed;
          e.combination = ok->combination;
          if (elaborate) e.proof = elaborate_proof(v.leaf, g, ok->combination);
        } else if (auto* cm = std::get_if<Countermodel>(&r)) {
          e.status = GoalStatus::Failed;
          if (!v.counterpoint) v.counterpoint = cm->point;
        } else {
          throw std::logic_error("consequence: feasible leaf reported infeasible");
        }
        break;
      }
    }
    if (e.status == GoalStatus::Failed) v.status = LeafStatus::Refuted;
    v.goals.push_back(std::move(e));
  }
  return v;
}

}  // namespace

ConsequenceResult consequence(const std::vector<Judgement>& S, const Judgement& goal, const DecideOptions& opts) {
  NormalizeOptions no;
  no.level = opts.level;
  BranchTree tree = normalize_with_goal(S, goal, no);
  std::vector<int> ids = tree.leaf_ids();
  ConsequenceResult res;
  res.leaves.resize(ids.size());
  parallel_for(ids.size(), opts.jobs, [&](std::size_t i) {
    res.leaves[i] = decide_leaf(tree.nodes[static_cast<std::size_t>(ids[i])], ids[i], opts.elaborate);
  });
  res.entailed = true;
  for (const auto& lv : res.leaves) {
    if (lv.status != LeafStatus::Refuted) continue;
    Model m = lift(lv.leaf.theory, *lv.counterpoint);
    if (!satisfies_all(m, S) || satisfies(m, goal))
      throw std::logic_error("consequence: lifted countermodel does not refute the goal");
    res.entailed = false;
    res.countermodel = std::move(m);
    res.countermodel_node = lv.node;
    break;
  }
  return res;
}

std::string verify_consequence(const std::vector<Judgement>& S, const Judgement& goal, const ConsequenceResult& r) {
  if (!r.entailed) {
    if (!r.countermodel) return "refuted without countermodel";
    if (!satisfies_all(*r.countermodel, S)) return "countermodel violates a hypothesis";
    if (satisfies(*r.countermodel, goal)) return "countermodel satisfies the goal";
    return "";
  }
  for (const auto& lv : r.leaves) {
    if (lv.status == LeafStatus::Refuted) return "entailed with a refuted leaf";
    if (lv.status == LeafStatus::Infeasible && !verify_infeasibility(lv.leaf.system, *lv.certificate))
      return "infeasibility certificate of leaf " + std::to_string(lv.node) + " does not verify";
    for (const auto& g : lv.goals) {
      if (g.status != GoalStatus::Entailed) continue;
      if (!verify_combination(lv.leaf.system, g.row, *g.combination))
        return "Motzkin identity fails at leaf " + std::to_string(lv.node);
      if (g.proof) {
        auto vd = check(*g.proof, lv.leaf.theory.to_judgements());
        if (!vd.accepted) return "elaborated proof rejected: " + vd.reason;
        if (!(g.proof->conclusion() == g.goal.to_judgement())) return "elaborated proof has the wrong conclusion";
      }
    }
  }
  return "";
}

// --- elaboration ----------------------------------------------------------------------

Proof elaborate_proof(const LeafSystem& leaf, const NormalJudgement& goal, const Combination& c) {
  AffineConstraint row = affine_row(goal);
  if (!verify_combination(leaf.system, row, c)) throw std::invalid_argument("elaborate_proof: combination does not verify");
  ProofBuilder b;
  std::vector<std::string> nonneg(leaf.system.nonneg.begin(), leaf.system.nonneg.end());
  auto row_step = [&](std::size_t i) {
    if (i < leaf.rows.size()) return b.hyp(leaf.rows[i].to_judgement());
    // x >= 0 is x |- top
    return b.top({Formula::atom(nonneg.at(i - leaf.rows.size()))});
  };
  std::vector<std::pair<std::size_t, Rational>> used;
  for (const auto& [i, t] : c.multipliers)
    if (sgn(t) > 0) used.emplace_back(i, t);
  std::size_t acc;
  if (used.empty()) {
    acc = b.top({});
  } else if (used.size() == 1) {
    acc = b.scale(b.single(row_step(used[0].first)), used[0].second);
  } else {
    std::size_t x = row_step(used[0].first);
    std::size_t y = row_step(used[1].first);
    acc = b.combine(x, y, used[0].second, used[1].second);
    for (std::size_t k = 2; k < used.size(); ++k)
      acc = b.tensor_intro(acc, b.scale(b.single(row_step(used[k].first)), used[k].second));
  }
  Judgement target = goal.to_judgement();
  if (b.at(acc) == target) return b.take();
  std::vector<std::size_t> prem{acc};
  std::set<std::string> atoms;
  if (auto a = affine_form(b.at(acc))) {
    for (const auto& [p, k] : a->first.coeffs) atoms.insert(p);
    for (const auto& [p, k] : a->second.coeffs) atoms.insert(p);
  }
  for (const auto& p : goal.atoms()) atoms.insert(p);
  for (const auto& p : atoms)
    if (has(leaf.theory, NormalKind::Finitist, p)) prem.push_back(b.hyp(NormalJudgement::finitist(p).to_judgement()));
  b.admissible(target, "affine", prem);
  return b.take();
}

// --- inductive inferences ----------------------------------------------------------------

InferenceCheck check_inference_model(const Model& m, const HypStream& hyps, const Judgement& conclusion,
                                     std::size_t budget, bool check_monotone) {
  InferenceCheck r;
  std::optional<Judgement> prev;
  for (std::size_t i = 1; i <= budget; ++i) {
    Judgement h = hyps(i);
    if (check_monotone && prev) {
      // phi_i |- phi_{i-1} on the internalized forms
      Judgement step{{internalize(h).consequent}, internalize(*prev).consequent};
      if (!consequence({}, step).entailed)
        throw MonotonicityError("hypothesis " + std::to_string(i) + " does not entail hypothesis " +
                                std::to_string(i - 1));
    }
    if (!r.falsified && !satisfies(m, h)) r.falsified = i;
    prev = std::move(h);
  }
  r.conclusion_holds = satisfies(m, conclusion);
  r.verdict = (r.falsified || r.conclusion_holds) ? InferenceVerdict::Satisfies : InferenceVerdict::HypsHoldSoFar;
  return r;
}

}  // namespace llq
