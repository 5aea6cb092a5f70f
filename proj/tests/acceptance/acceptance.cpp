// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "gen.hpp"
#include "llq/decide.hpp"
#include "llq/normalize.hpp"
#include "llq/proofkit.hpp"
#include "llq/qalg.hpp"
#include "llq/semantics.hpp"

using namespace llq;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  std::vector<std::string> problems;

  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (problems.size() < 5) problems.push_back(what);
  }
};

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(LLQ_FIXTURES_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Independent arithmetic on [0, inf]: nullopt is inf.
using Q = std::optional<Rational>;

Q q_tsub(const Q& a, const Q& b) {
  if (!a) return b ? Q{} : Q{Rational(0)};  // inf - s = inf for finite s, inf - inf = 0
  if (!b) return Rational(0);
  return *a > *b ? Q{Rational(*a - *b)} : Q{Rational(0)};
}
Q q_add(const Q& a, const Q& b) { return a && b ? Q{Rational(*a + *b)} : Q{}; }
Q q_scale(const Rational& r, const Q& a) {
  if (sgn(r) == 0) return Rational(0);
  return a ? Q{Rational(r * *a)} : Q{};
}
ExtValue to_ext(const Q& q) { return q ? ExtValue(*q) : ExtValue::infinity(); }

// --- 1 ---------------------------------------------------------------------------
Outcome arithmetic_table() {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::vector<Q> vals{Rational(0), Rational(1, 3), Rational(1, 2), Rational(1), Rational(3), Rational(5),
                      Rational(7), Rational(22, 7), Q{}};
  std::size_t n = 0;
  for (const auto& a : vals)
    for (const auto& b : vals) {
      o.expect(tsub(to_ext(a), to_ext(b)) == to_ext(q_tsub(a, b)), "tsub " + to_string(to_ext(a)) + " " + to_string(to_ext(b)));
      o.expect(add(to_ext(a), to_ext(b)) == to_ext(q_add(a, b)), "add");
      n += 2;
    }
  for (const auto& r : {Rational(0), Rational(1, 2), Rational(2), Rational(3, 2)})
    for (const auto& a : vals) {
      o.expect(scale(r, to_ext(a)) == to_ext(q_scale(r, a)), "scale");
      ++n;
    }
  const ExtValue inf = ExtValue::infinity();
  // the named branch cases
  o.expect(tsub(ExtValue(5), ExtValue(3)) == ExtValue(2), "5 - 3");
  o.expect(tsub(ExtValue(3), ExtValue(5)).is_zero(), "3 - 5");
  o.expect(tsub(inf, inf).is_zero(), "inf - inf = 0");
  o.expect(tsub(inf, ExtValue(7)) == inf, "inf - 7 = inf");
  o.expect(tsub(ExtValue(7), inf).is_zero(), "7 - inf = 0");
  o.expect(scale(Rational(0), inf).is_zero(), "0 * inf = 0");
  o.expect(add(inf, ExtValue::zero()) == inf, "inf + 0");
  double s = seconds_since(t0);
  o.expect(s < 1.0, "runtime");
  o.detail = std::to_string(n + 7) + " cases against the reference table";
  return o;
}

// --- 2 ---------------------------------------------------------------------------
Outcome soundness() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  testgen::GenOptions g;
  g.atoms = {"p", "q", "r"};
  g.depth = 2;
  const auto& rules = primitive_rules();
  std::size_t instances = 0, premise_true = 0, violations = 0;
  std::map<RuleId, std::size_t> fired;
  const Profile profiles[] = {Profile::Mixed, Profile::Boundary, Profile::FiniteOnly};
  while (instances < 10000) {
    RuleId r = rules[instances % rules.size()];
    Inference inf = rule_instance(r, testgen::random_instantiation(rng, g));
    ++instances;
    for (int k = 0; k < 100; ++k) {
      Model m = sample_model(g.atoms, rng, profiles[k % 3]);
      if (!satisfies_all(m, inf.premises)) continue;
      ++premise_true;
      ++fired[r];
      if (!satisfies(m, inf.conclusion)) {
        ++violations;
        o.expect(false, rule_name(r) + ": " + print(inf.conclusion) + " in " + print_model(m));
      }
    }
  }
  std::size_t vacuous = 0;
  for (RuleId r : rules) {
    if (fired[r] > 0) continue;
    // never fired: only acceptable when the premises are unsatisfiable outright
    Inference inf = rule_instance(r, testgen::random_instantiation(rng, g));
    bool unsat = !sat(inf.premises).satisfiable;
    vacuous += unsat;
    o.expect(unsat, "rule " + rule_name(r) + " never had true premises");
  }
  o.detail = std::to_string(instances) + " instances x 100 models, " + std::to_string(premise_true) +
             " premise-true cases, " + std::to_string(violations) + " violations, " + std::to_string(vacuous) +
             " rule(s) with unsatisfiable premises";
  return o;
}

// --- 3 ---------------------------------------------------------------------------
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
  for (const char* j : js) s.insert(print(*classify(parse_judgement(j))));
  return s;
}

Outcome normalization() {
  Outcome o;
  NormalizeOptions structural;
  structural.structural = true;
  auto a = leaf_sets(normalize(parse_theory(slurp("disj_split.theory")), structural));
  o.expect(a == std::set<std::set<std::string>>{normal_set({"psi |- phi", "theta |- phi (x) rho"}),
                                                normal_set({"phi |- psi", "theta |- psi (x) rho"})},
           "disjunction split leaves");
  auto b = leaf_sets(normalize(parse_theory(slurp("limp_split.theory")), structural));
  o.expect(b == std::set<std::set<std::string>>{normal_set({"phi |- psi", "theta |- rho"}),
                                                normal_set({"|- !!psi", "psi |- phi", "theta (x) phi |- psi (x) rho"}),
                                                normal_set({"|- !!phi", "psi |- bot", "theta |- bot"}),
                                                normal_set({"phi |- bot", "psi |- bot", "theta |- rho"})},
           "implication split leaves");

  std::mt19937_64 rng(7);
  testgen::GenOptions g;
  g.atoms = {"p", "q", "r", "s"};
  std::size_t checks = 0, discrepancies = 0, max_leaves = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<Judgement> V;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < n; ++k) V.push_back(testgen::random_judgement(rng, g));
    auto ls = leaves(normalize(V));
    max_leaves = std::max(max_leaves, ls.size());
    for (int s = 0; s < 200; ++s) {
      Model m = sample_model(g.atoms, rng, static_cast<Profile>(s % 3));
      bool lhs = satisfies_all(m, V), rhs = false;
      for (const auto& l : ls) rhs = rhs || satisfies_all(m, l.to_judgements());
      ++checks;
      if (lhs != rhs) {
        ++discrepancies;
        o.expect(false, "set " + std::to_string(i) + " model " + print_model(m));
      }
    }
  }
  o.detail = "both worked trees reproduced; " + std::to_string(checks) + " model checks, " +
             std::to_string(discrepancies) + " discrepancies (max " + std::to_string(max_leaves) + " leaves)";
  return o;
}

// --- 4 ---------------------------------------------------------------------------
Outcome decidability() {
  Outcome o;
  auto one = parse_theory(slurp("one_or_not_one.theory"));
  auto r = sat(one);
  o.expect(!r.satisfiable, "sat({|- 1 \\/ !1}) must be unsatisfiable");
  o.expect(verify_sat(one, r).empty(), "certificates of {|- 1 \\/ !1}");

  std::mt19937_64 rng(99);
  testgen::GenOptions g;
  g.atoms = {"p", "q", "r"};
  std::size_t satisfiable = 0, unsat = 0, certs = 0;
  for (int i = 0; i < 400; ++i) {
    std::vector<Judgement> V;
    int n = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) V.push_back(testgen::random_judgement(rng, g));
    auto res = sat(V);
    if (res.satisfiable) {
      ++satisfiable;
      o.expect(satisfies_all(*res.witness, V), "witness re-verification");
      continue;
    }
    ++unsat;
    o.expect(res.evidence.size() == res.leaf_count, "one evidence entry per leaf");
    for (const auto& e : res.evidence) {
      if (e.inconsistent) continue;
      ++certs;
      o.expect(e.certificate && verify_infeasibility(e.system, *e.certificate), "certificate expansion");
    }
    for (int k = 0; k < 50; ++k)
      o.expect(!satisfies_all(sample_model(g.atoms, rng, static_cast<Profile>(k % 3)), V), "unsat set has a sampled model");
  }
  o.detail = "{|- 1 \\/ !1} unsatisfiable; " + std::to_string(satisfiable) + " witnesses and " + std::to_string(certs) +
             " certificates over " + std::to_string(unsat) + " unsatisfiable sets re-verified";
  return o;
}

// --- 5 and 7 --------------------------------------------------------------------------
struct CompletenessStats {
  std::size_t entailed = 0, refuted = 0, combinations = 0, proofs = 0, proofs_accepted = 0;
};

// sum t_i row_i + t0 against the goal, coefficient by coefficient
bool motzkin_identity(const LinSystem& s, const AffineConstraint& goal, const Combination& c) {
  std::map<std::string, Rational> coeffs;
  Rational constant = c.slack;
  if (sgn(c.slack) < 0) return false;
  for (const auto& [i, t] : c.multipliers) {
    if (sgn(t) < 0 || i >= s.row_count()) return false;
    AffineConstraint row = s.row(i);
    for (const auto& [v, a] : row.coeffs) coeffs[v] += t * a;
    constant += t * row.constant;
  }
  for (const auto& [v, a] : goal.coeffs) coeffs[v] -= a;
  constant -= goal.constant;
  for (const auto& [v, a] : coeffs)
    if (sgn(a) != 0) return false;
  return sgn(constant) == 0;
}

Outcome completeness(CompletenessStats& st, Outcome& proofs) {
  Outcome o;
  std::mt19937_64 rng(5);
  testgen::GenOptions g;
  g.atoms = {"p", "q", "r"};
  g.depth = 2;
  DecideOptions d;
  d.elaborate = true;
  for (int i = 0; i < 200; ++i) {
    std::vector<Judgement> S;
    int n = static_cast<int>(rng() % 3);
    for (int k = 0; k < n; ++k) S.push_back(testgen::random_judgement(rng, g));
    Judgement goal = testgen::random_judgement(rng, g);
    auto r = consequence(S, goal, d);
    if (!r.entailed) {
      ++st.refuted;
      o.expect(r.countermodel && satisfies_all(*r.countermodel, S) && !satisfies(*r.countermodel, goal),
               "countermodel for " + print(goal));
      continue;
    }
    ++st.entailed;
    for (int k = 0; k < 1000; ++k) {
      Model m = sample_model(g.atoms, rng, static_cast<Profile>(k % 3));
      if (satisfies_all(m, S) && !satisfies(m, goal))
        o.expect(false, "sampled model contradicts Entailed for " + print(goal) + ": " + print_model(m));
    }
    for (const auto& lv : r.leaves)
      for (const auto& ge : lv.goals) {
        if (!ge.combination) continue;
        ++st.combinations;
        o.expect(motzkin_identity(lv.leaf.system, ge.row, *ge.combination), "Motzkin identity");
        ++st.proofs;
        bool accepted = ge.proof && check(*ge.proof, lv.leaf.theory.to_judgements()).accepted &&
                        ge.proof->conclusion() == ge.goal.to_judgement();
        if (accepted) ++st.proofs_accepted;
        proofs.expect(accepted, "elaborated proof for " + print(ge.goal));
      }
  }
  o.detail = std::to_string(st.entailed) + " entailed (1000 samples each), " + std::to_string(st.refuted) +
             " refuted with verified countermodels, " + std::to_string(st.combinations) + " Motzkin identities";
  return o;
}

// --- 6 ---------------------------------------------------------------------------
Outcome counterexamples() {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  Formula phi = parse_formula("eta /\\ ((eta (x) rho) -o theta)");
  Formula psi = parse_formula("rho -o theta");
  o.expect(consequence({Judgement{{}, phi}}, Judgement{{}, psi}).entailed, "(a) {|- phi} entails |- psi");
  Judgement internal{{}, Formula::limp(phi, psi)};
  auto ref = consequence({}, internal);
  o.expect(!ref.entailed, "(a) |- phi -o psi refuted");
  Model m = parse_model(slurp("deduction.model"));
  o.expect(!satisfies(m, internal), "(a) the model eta=1/4, rho=0, theta=1 is a countermodel");

  std::mt19937_64 rng(13);
  Formula one_or = parse_formula("1 \\/ !1");
  for (unsigned n = 0; n <= 10; ++n)
    for (int k = 0; k < 100; ++k) {
      Model s = sample_model({"p", "q"}, rng, static_cast<Profile>(k % 3));
      o.expect(eval(s, Formula::neg(Formula::ntimes(n, one_or))) == ExtValue::infinity(), "(b) n-fold");
      o.expect(eval(s, Formula::neg(Formula::scale(Rational(static_cast<long>(n)), one_or))) == ExtValue::infinity(),
               "(b) scalar");
    }

  for (int k = 1; k <= 20; ++k) {
    std::vector<Judgement> S;
    for (int n = 1; n <= k; ++n)
      S.push_back(Judgement{{Formula::ntimes(static_cast<unsigned>(n + 1), Formula::atom("p"))},
                            Formula::ntimes(static_cast<unsigned>(n), Formula::atom("q"))});
    Judgement goal = parse_judgement("p |- q");
    auto r = consequence(S, goal);
    o.expect(!r.entailed && r.countermodel && satisfies_all(*r.countermodel, S) && !satisfies(*r.countermodel, goal),
             "(c) k=" + std::to_string(k) + " refuted with a countermodel");
    Model known;
    known.set("p", ExtValue(Rational(k) / Rational(k + 1)));
    known.set("q", ExtValue(1));
    o.expect(satisfies_all(known, S) && !satisfies(known, goal), "(c) m(p)=k/(k+1), m(q)=1 at k=" + std::to_string(k));
  }
  double s = seconds_since(t0);
  o.expect(s < 30.0, "runtime");
  std::ostringstream d;
  d.precision(2);
  d << std::fixed << "(a) (b) (c) k=1..20 reproduced in " << s << " s";
  o.detail = d.str();
  return o;
}

Outcome fixture_proof() {
  Outcome o;
  auto hyps = parse_theory(slurp("deduction_failure.hyps"));
  auto v = check(parse_proof(slurp("deduction_failure.proof")), hyps);
  o.expect(v.accepted, "deduction-failure fixture: " + v.reason);
  return o;
}

// --- 8 ---------------------------------------------------------------------------
Outcome quantitative_algebra() {
  Outcome o;
  QAlgInput in = parse_qalg(slurp("qalg_line.terms"));
  RuleSet rules = instantiate_rules(in.sig, in.terms, in.eps);
  RuleSet finite{rules.instances, {}};
  QReport good = check_rules(metric_model(in.points, parse_distances(slurp("qalg_line.dist"))), finite);
  o.expect(good.failures.empty(), "genuine metric has failing instances");
  for (QRule r : {QRule::REFL, QRule::SYMM, QRule::TRIANG, QRule::MAX, QRule::NEXP})
    o.expect(good.per_rule[r] > 0, "no " + to_string(r) + " instances");

  Model broken = metric_model(in.points, parse_distances(slurp("qalg_broken.dist")));
  QReport bad = check_rules(broken, finite);
  o.expect(!bad.failures.empty(), "stretched distance went unnoticed");
  std::set<std::pair<std::string, std::string>> pts;
  for (const auto& f : bad.failures) {
    o.expect(f.instance.rule == QRule::TRIANG, "non-triang failure " + describe(f.instance));
    o.expect(eval(broken, f.instance.conclusion.consequent) == ExtValue(4), "failure away from the stretched pair");
  }

  Term s = Term::var("s"), t = Term::var("t");
  Rational eps(1, 2);
  ContStream c{s, t, eps};
  Model at_eps;
  at_eps.set(eq_atom(s, t), ExtValue(eps));
  auto cr = check_inference_model(at_eps, c.hyps(), c.conclusion(), 10);
  o.expect(cr.verdict == InferenceVerdict::Satisfies && cr.conclusion_holds, "cont stream");

  o.detail = std::to_string(good.checked) + " instances pass; stretched d(a,c) gives " +
             std::to_string(bad.failures.size()) + " failures, all triang; cont Satisfies within budget 10";
  return o;
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.ok = false;
      o.problems.push_back(std::string("exception: ") + e.what());
    }
    all = all && o.ok;
    std::cout << "criterion " << n << " [" << (o.ok ? "PASS" : "FAIL") << "] " << name << ": " << o.detail << " ("
              << static_cast<long>(seconds_since(t0) * 1000) << " ms)\n";
    for (const auto& p : o.problems) std::cout << "    " << p << "\n";
    std::cout.flush();
  };
  report(1, "quantale arithmetic", arithmetic_table);
  report(2, "soundness of the rules", soundness);
  report(3, "normal representation", normalization);
  report(4, "decidability of satisfiability", decidability);
  CompletenessStats st;
  Outcome proofs;
  report(5, "completeness for finite theories", [&] { return completeness(st, proofs); });
  report(6, "counterexamples", counterexamples);
  report(7, "certificate to proof", [&] {
    Outcome o = fixture_proof();
    for (const auto& p : proofs.problems) o.expect(false, p);
    o.ok = o.ok && proofs.ok && st.proofs == st.combinations;
    o.detail = std::to_string(st.proofs_accepted) + "/" + std::to_string(st.proofs) +
               " elaborated proofs accepted; deduction-failure fixture " + (o.problems.empty() ? "accepted" : "rejected");
    return o;
  });
  report(8, "quantitative algebra", quantitative_algebra);
  return all ? 0 : 1;
}
