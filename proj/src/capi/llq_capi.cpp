#include "llq/llq.h"

#include <json.hpp>
#include <random>
#include <sstream>

#include "llq/decide.hpp"
#include "llq/normalize.hpp"
#include "llq/proofkit.hpp"
#include "llq/qalg.hpp"
#include "llq/semantics.hpp"
#include "llq/syntax.hpp"

using json = nlohmann::ordered_json;
using namespace llq;

struct llq_theory {
  std::vector<Judgement> judgements;
  Level level = Level::L1star;
};

struct llq_model {
  Model model;
};

struct llq_result {
  bool positive = false;
  std::string verdict, json_text, text;
};

namespace {

thread_local std::string last_error;
thread_local std::size_t last_line = 0, last_column = 0;

llq_status fail(llq_status s, std::string msg, std::size_t line = 0, std::size_t col = 0) {
  last_error = std::move(msg);
  last_line = line;
  last_column = col;
  return s;
}

// Runs f, mapping exceptions to status codes.
template <class F>
llq_status guarded(F&& f) {
  try {
    last_error.clear();
    last_line = last_column = 0;
    return f();
  } catch (const ParseError& e) {
    return fail(LLQ_ERR_PARSE, e.what(), e.line(), e.column());
  } catch (const ProofParseError& e) {
    return fail(LLQ_ERR_PARSE, e.what(), e.line());
  } catch (const LevelError& e) {
    return fail(LLQ_ERR_LEVEL, e.what());
  } catch (const MetricError& e) {
    return fail(LLQ_ERR_INVALID, e.what());
  } catch (const MonotonicityError& e) {
    return fail(LLQ_ERR_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(LLQ_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(LLQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LLQ_ERR_INTERNAL, "unknown error");
  }
}

llq_options defaults() {
  llq_options o;
  llq_options_init(&o);
  return o;
}

Level level_of_options(const llq_options& o) { return o.logic ? parse_level(o.logic) : Level::L1star; }

llq_status finish(llq_result** out, bool positive, std::string verdict, json j, std::string text) {
  auto* r = new llq_result;
  r->positive = positive;
  r->verdict = std::move(verdict);
  r->json_text = j.dump(2);
  r->text = std::move(text);
  *out = r;
  return LLQ_OK;
}

json model_json(const Model& m) {
  json j = json::object();
  for (const auto& [p, v] : m.assignment()) j[p] = to_string(v);
  return j;
}

json combination_json(const Combination& c) {
  json mult = json::object();
  for (const auto& [i, t] : c.multipliers) mult[std::to_string(i)] = to_string(t);
  return {{"multipliers", mult}, {"slack", to_string(c.slack)}};
}

json rows_json(const LinSystem& s) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.row_count(); ++i) rows.push_back(to_string(s.row(i)));
  return rows;
}

json theory_json(const NormalTheory& t) {
  json a = json::array();
  for (const auto& n : t.judgements) a.push_back(print(n));
  return a;
}

const char* leaf_status_name(LeafStatus s) {
  switch (s) {
    case LeafStatus::Inconsistent: return "inconsistent";
    case LeafStatus::Infeasible: return "infeasible";
    case LeafStatus::Holds: return "holds";
    case LeafStatus::Refuted: return "refuted";
  }
  return "?";
}

const char* goal_status_name(GoalStatus s) {
  switch (s) {
    case GoalStatus::Tautological: return "tautological";
    case GoalStatus::Assertive: return "assertive";
    case GoalStatus::Entailed: return "entailed";
    case GoalStatus::Failed: return "failed";
  }
  return "?";
}

std::string model_text(const Model& m) {
  std::string s;
  for (const auto& [p, v] : m.assignment()) s += "  " + p + " = " + to_string(v) + "\n";
  return s;
}

bool check_out(llq_result** out) { return out != nullptr; }

}  // namespace

extern "C" {

void llq_options_init(llq_options* o) {
  if (!o) return;
  o->logic = nullptr;
  o->seed = 0;
  o->samples = 0;
  o->jobs = 1;
  o->cont_budget = 10;
  o->structural = 0;
  o->proofs = 0;
}

const char* llq_version(void) { return "0.1.0"; }

const char* llq_last_error(void) { return last_error.c_str(); }
size_t llq_last_error_line(void) { return last_line; }
size_t llq_last_error_column(void) { return last_column; }

llq_status llq_theory_parse(const char* text, const llq_options* o, llq_theory** out) {
  if (!text || !out) return fail(LLQ_ERR_INVALID, "null argument");
  return guarded([&] {
    llq_options opts = o ? *o : defaults();
    auto t = std::make_unique<llq_theory>();
    t->level = level_of_options(opts);
    t->judgements = parse_theory(text);
    for (const auto& j : t->judgements) require_level(j, t->level);
    *out = t.release();
    return LLQ_OK;
  });
}

size_t llq_theory_size(const llq_theory* t) { return t ? t->judgements.size() : 0; }
void llq_theory_free(llq_theory* t) { delete t; }

llq_status llq_model_parse(const char* text, const char* default_value, llq_model** out) {
  if (!text || !out) return fail(LLQ_ERR_INVALID, "null argument");
  return guarded([&] {
    ExtValue d = default_value ? parse_extvalue(default_value) : ExtValue::zero();
    *out = new llq_model{parse_model(text, d)};
    return LLQ_OK;
  });
}

void llq_model_free(llq_model* m) { delete m; }

llq_status llq_eval(const llq_model* m, const char* formula, const llq_options* o, llq_result** out) {
  if (!m || !formula || !check_out(out)) return fail(LLQ_ERR_INVALID, "null argument");
  return guarded([&] {
    llq_options opts = o ? *o : defaults();
    Formula f = parse_formula(formula);
    require_level(Judgement{{}, f}, level_of_options(opts));
    std::string v = to_string(eval(m->model, f));
    json j{{"command", "eval"}, {"verdict", "Value"}, {"formula", print(f)}, {"value", v}};
    return finish(out, true, "Value", j, v + "\n");
  });
}

llq_status llq_normalize(const llq_theory* t, const llq_options* o, llq_result** out) {
  if (!t || !check_out(out)) return fail(LLQ_ERR_INVALID, "null argument");
  return guarded([&] {
    llq_options opts = o ? *o : defaults();
    NormalizeOptions no;
    no.level = t->level;
    no.structural = opts.structural != 0;
    BranchTree tree = normalize(t->judgements, no);
    json nodes = json::array();
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      const BranchNode& n = tree.nodes[id];
      json rw = json::array();
      for (const auto& r : n.rewrites) rw.push_back({{"rule", r.rule}, {"before", r.before}, {"after", r.after}});
      json node{{"id", id}, {"parent", n.parent}, {"rewrites", rw}};
      if (n.split) {
        node["split"] = {{"rule", n.split->kind == Split::Kind::Tot ? "tot" : "wem"},
                         {"pair", {print(n.split->first()), print(n.split->second())}},
                         {"children", {n.children[0], n.children[1]}}};
      }
      nodes.push_back(node);
    }
    json leaves = json::array();
    for (int id : tree.leaf_ids()) {
      const auto& th = tree.nodes[static_cast<std::size_t>(id)].theory;
      leaves.push_back({{"node", id}, {"inconsistent", th.inconsistent()}, {"judgements", theory_json(th)}});
    }
    json j{{"command", "normalize"},
           {"verdict", "Normalized"},
           {"structural", no.structural},
           {"nodes", nodes},
           {"leaves", leaves}};
    return finish(out, true, "Normalized", j, print_tree(tree));
  });
}

llq_status llq_sat(const llq_theory* t, const llq_options* o, llq_result** out) {
  if (!t || !check_out(out)) return fail(LLQ_ERR_INVALID, "null argument");
  return guarded([&] {
    llq_options opts = o ? *o : defaults();
    DecideOptions d;
    d.level = t->level;
    d.jobs = std::max(1u, opts.jobs);
    SatResult r = sat(t->judgements, d);
    if (auto err = verify_sat(t->judgements, r); !err.empty()) throw std::logic_error("sat: " + err);
    if (r.satisfiable) {
      json j{{"command", "sat"},
             {"verdict", "Satisfiable"},
             {"witness", model_json(*r.witness)},
             {"leaf", r.witness_node},
             {"leaf_count", r.leaf_count}};
      return finish(out, true, "Satisfiable", j, "Satisfiable\n" + model_text(*r.witness));
    }
    json leaves = json::array();
    std::string text = "Unsatisfiable\n";
    for (const auto& e : r.evidence) {
      json l{{"node", e.node}, {"inconsistent", e.inconsistent}};
      if (e.certificate) {
        l["certificate"] = combination_json(e.certificate->combination);
        l["rows"] = rows_json(e.system);
        text += "  leaf " + std::to_string(e.node) + ": infeasible\n";
      } else {
        text += "  leaf " + std::to_string(e.node) + ": inconsistent\n";
      }
      leaves.push_back(std::move(l));
    }
    json j{{"command", "sat"}, {"verdict", "Unsatisfiable"}, {"leaf_count", r.leaf_count}, {"leaves", leaves}};
    return finish(out, false, "Unsatisfiable", j, text);
  });
}

llq_status llq_entails(const llq_theory* t, const char* goal, const llq_options* o, llq_result** out) {
  if (!t || !goal || !check_out(out)) return fail(LLQ_ERR_INVALID, "null argument");
  return guarded([&] {
    llq_options opts = o ? *o : defaults();
    Judgement g = parse_judgement(goal);
    require_level(g, t->level);
    DecideOptions d;
    d.level = t->level;
    d.jobs = std::max(1u, opts.jobs);
    d.elaborate = opts.proofs != 0;
    ConsequenceResult r = consequence(t->judgements, g, d);
    if (auto err = verify_consequence(t->judgements, g, r); !err.empty()) throw std::logic_error("entails: " + err);

    json j{{"command", "entails"}, {"goal", print(g)}};
    std::string text;
    if (!r.entailed) {
      j["verdict"] = "Refuted";
      j["countermodel"] = model_json(*r.countermodel);
      j["leaf"] = r.countermodel_node;
      return finish(out, false, "Refuted", j, "Refuted\n" + model_text(*r.countermodel));
    }
    j["verdict"] = "Entailed";
    text = "Entailed\n";
    json leaves = json::array();
    for (const auto& lv : r.leaves) {
      json l{{"node", lv.node}, {"status", leaf_status_name(lv.status)}};
      text += "  leaf " + std::to_string(lv.node) + ": " + leaf_status_name(lv.status) + "\n";
      if (lv.certificate) {
        l["certificate"] = combination_json(lv.certificate->combination);
        l["rows"] = rows_json(lv.leaf.system);
      }
      if (lv.status == LeafStatus::Holds) {
        l["hypotheses"] = theory_json(lv.leaf.theory);
        l["rows"] = rows_json(lv.leaf.system);
        json goals = json::array();
        for (const auto& ge : lv.goals) {
          json gj{{"goal", print(ge.goal)}, {"status", goal_status_name(ge.status)}};
          if (ge.combination) gj["combination"] = combination_json(*ge.combination);
          if (ge.proof) gj["proof"] = print_proof(*ge.proof);
          goals.push_back(std::move(gj));
        }
        l["goals"] = goals;
      }
      leaves.push_back(std::move(l));
    }
    j["leaves"] = leaves;
    if (opts.samples > 0) {
      std::mt19937_64 rng(opts.seed);
      std::vector<std::string> props = atoms_of(t->judgements);
      std::vector<std::string> more = atoms_of({g});
      props.insert(props.end(), more.begin(), more.end());
      std::sort(props.begin(), props.end());
      props.erase(std::unique(props.begin(), props.end()), props.end());
      unsigned relevant = 0;
      for (unsigned k = 0; k < opts.samples; ++k) {
        Model m = sample_model(props, rng, k % 3 == 2 ? Profile::Boundary : Profile::Mixed);
        if (!satisfies_all(m, t->judgements)) continue;
        ++relevant;
        if (!satisfies(m, g)) throw std::logic_error("entails: sampled countermodel contradicts the verdict");
      }
      j["sampled"] = {{"seed", opts.seed}, {"models", opts.samples}, {"satisfying_hypotheses", relevant}};
    }
    return finish(out, true, "Entailed", j, text);
  });
}

llq_status llq_check_proof(const char* proof, const llq_theory* assumptions, const llq_options* o,
                           llq_result** out) {
  if (!proof || !check_out(out)) return fail(LLQ_ERR_INVALID, "null argument");
  (void)o;
  return guarded([&] {
    Proof p = parse_proof(proof);
    std::vector<Judgement> hyps;
    if (assumptions) hyps = assumptions->judgements;
    Verdict v = check(p, hyps);
    json j{{"command", "check-proof"}, {"verdict", v.accepted ? "Accepted" : "Rejected"}, {"steps", p.steps.size()}};
    std::string text;
    if (v.accepted) {
      j["conclusion"] = print(p.conclusion());
      text = "Accepted: " + print(p.conclusion()) + "\n";
    } else {
      j["reason"] = v.reason;
      if (v.step) j["step"] = *v.step + 1;
      text = "Rejected" + (v.step ? " at step " + std::to_string(*v.step + 1) : std::string()) + ": " + v.reason + "\n";
    }
    return finish(out, v.accepted, v.accepted ? "Accepted" : "Rejected", j, text);
  });
}

llq_status llq_qalg_check(const char* terms, const char* distances, const llq_options* o, llq_result** out) {
  if (!terms || !distances || !check_out(out)) return fail(LLQ_ERR_INVALID, "null argument");
  return guarded([&] {
    llq_options opts = o ? *o : defaults();
    QAlgInput in = parse_qalg(terms);
    RuleSet rules = instantiate_rules(in.sig, in.terms, in.eps);
    Model m = metric_model(in.points, parse_distances(distances));
    QReport rep = check_rules(m, rules, opts.cont_budget);
    bool ok = rep.ok();
    json per = json::object();
    for (const auto& [rule, n] : rep.per_rule) per[to_string(rule)] = n;
    json failures = json::array();
    std::string text = std::string(ok ? "Pass" : "Fail") + ": " + std::to_string(rep.checked) + " instances\n";
    for (const auto& f : rep.failures) {
      failures.push_back({{"rule", to_string(f.instance.rule)}, {"instance", describe(f.instance)}});
      text += "  " + describe(f.instance) + "\n";
    }
    std::size_t cont_ok = 0;
    json cont_open = json::array();
    for (const auto& c : rep.cont) {
      if (c.check.verdict == InferenceVerdict::Satisfies) {
        ++cont_ok;
      } else {
        cont_open.push_back(print(c.stream.conclusion()));
        text += "  cont: hypotheses hold so far, conclusion fails: " + print(c.stream.conclusion()) + "\n";
      }
    }
    text += "  cont: " + std::to_string(cont_ok) + "/" + std::to_string(rep.cont.size()) + " streams satisfied\n";
    json j{{"command", "qalg-check"},
           {"verdict", ok ? "Pass" : "Fail"},
           {"checked", rep.checked},
           {"per_rule", per},
           {"failures", failures},
           {"cont", {{"budget", opts.cont_budget}, {"streams", rep.cont.size()}, {"satisfied", cont_ok}, {"open", cont_open}}}};
    return finish(out, ok, ok ? "Pass" : "Fail", j, text);
  });
}

int llq_result_positive(const llq_result* r) { return r && r->positive ? 1 : 0; }
const char* llq_result_verdict(const llq_result* r) { return r ? r->verdict.c_str() : ""; }
const char* llq_result_json(const llq_result* r) { return r ? r->json_text.c_str() : ""; }
const char* llq_result_text(const llq_result* r) { return r ? r->text.c_str() : ""; }
void llq_result_free(llq_result* r) { delete r; }

}  // extern "C"
