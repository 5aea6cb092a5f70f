// llq command-line front end; every command goes through the C API.
// Exit status: 0 positive verdict, 1 negative verdict, 2 input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "llq/llq.h"

namespace {

struct InputError {
  std::string message;
};

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{"cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Global {
  std::string logic = "L1star";
  bool json = false;
  unsigned long long seed = 0;
  unsigned samples = 0;
  unsigned jobs = 1;
  unsigned cont_budget = 10;
};

int report_error(const Global& g, llq_status s, const std::string& where) {
  std::string msg = llq_last_error();
  if (!where.empty()) msg = where + ": " + msg;
  if (g.json) {
    nlohmann::ordered_json j{{"verdict", "Error"}, {"status", static_cast<int>(s)}, {"error", msg}};
    if (llq_last_error_line() > 0) j["line"] = llq_last_error_line();
    std::cout << j.dump(2) << "\n";
  }
  std::cerr << "llq: " << msg << "\n";
  return 2;
}

int emit(const Global& g, llq_result* r) {
  std::unique_ptr<llq_result, decltype(&llq_result_free)> owned(r, llq_result_free);
  std::cout << (g.json ? std::string(llq_result_json(r)) + "\n" : std::string(llq_result_text(r)));
  return llq_result_positive(r) ? 0 : 1;
}

using TheoryPtr = std::unique_ptr<llq_theory, decltype(&llq_theory_free)>;

std::optional<TheoryPtr> load_theory(const std::string& path, const llq_options& o, const Global& g, int& rc) {
  llq_theory* t = nullptr;
  std::string text = read_input(path);
  if (llq_status s = llq_theory_parse(text.c_str(), &o, &t); s != LLQ_OK) {
    rc = report_error(g, s, path);
    return std::nullopt;
  }
  return TheoryPtr(t, llq_theory_free);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning engine for the Lawvere quantale logics L, L1 and L1*"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--logic", g.logic, "Logic level")
      ->check(CLI::IsMember({"L", "L1", "L1star"}))
      ->capture_default_str();
  app.add_flag("--json", g.json, "Print the JSON result");
  app.add_option("--seed", g.seed, "Seed for sampled cross-checks")->capture_default_str();
  app.add_option("--samples", g.samples, "entails: sampled models checked against an Entailed verdict");
  app.add_option("--jobs", g.jobs, "Leaves decided in parallel")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--cont-budget", g.cont_budget, "qalg-check: prefix length of continuity streams")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string model_path, default_value = "0", formula;
  auto* eval = app.add_subcommand("eval", "Value of a formula in a model");
  eval->add_option("--model", model_path, "Model file (prop = value lines)")->required();
  eval->add_option("--default", default_value, "Value of unlisted propositions")->capture_default_str();
  eval->add_option("formula", formula, "Formula")->required();

  std::string theory_path;
  bool structural = false;
  auto* norm = app.add_subcommand("normalize", "Branching normal representation of a theory");
  norm->add_option("theory", theory_path, "Theory file, - for stdin")->required();
  norm->add_flag("--structural", structural, "Stop at normal theories, without finiteness splits");

  auto* satc = app.add_subcommand("sat", "Satisfiability with witness or certificates");
  satc->add_option("theory", theory_path, "Theory file, - for stdin")->required();

  std::string goal;
  bool proofs = false;
  auto* ent = app.add_subcommand("entails", "Semantic consequence with certificates or a countermodel");
  ent->add_option("theory", theory_path, "Theory file, - for stdin")->required();
  ent->add_option("goal", goal, "Goal judgement")->required();
  ent->add_flag("--proofs", proofs, "Include elaborated proofs of affine goals");

  std::string proof_path, assumptions_path;
  auto* chk = app.add_subcommand("check-proof", "Check a proof file");
  chk->add_option("proof", proof_path, "Proof file")->required();
  chk->add_option("assumptions", assumptions_path, "Assumption theory file");

  std::string terms_path, dist_path;
  auto* qa = app.add_subcommand("qalg-check", "Check quantitative algebra rules in a metric interpretation");
  qa->add_option("terms", terms_path, "Signature, terms, interpretation and eps universe")->required();
  qa->add_option("distances", dist_path, "Distance table")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  llq_options o;
  llq_options_init(&o);
  o.logic = g.logic.c_str();
  o.seed = g.seed;
  o.samples = g.samples;
  o.jobs = g.jobs;
  o.cont_budget = g.cont_budget;
  o.structural = structural ? 1 : 0;
  o.proofs = proofs ? 1 : 0;

  try {
    llq_result* r = nullptr;
    int rc = 2;
    if (*eval) {
      llq_model* m = nullptr;
      std::string text = read_input(model_path);
      if (llq_status s = llq_model_parse(text.c_str(), default_value.c_str(), &m); s != LLQ_OK)
        return report_error(g, s, model_path);
      std::unique_ptr<llq_model, decltype(&llq_model_free)> owned(m, llq_model_free);
      if (llq_status s = llq_eval(m, formula.c_str(), &o, &r); s != LLQ_OK) return report_error(g, s, "formula");
      return emit(g, r);
    }
    if (*norm || *satc || *ent) {
      auto t = load_theory(theory_path, o, g, rc);
      if (!t) return rc;
      llq_status s = *norm ? llq_normalize(t->get(), &o, &r)
                           : *satc ? llq_sat(t->get(), &o, &r) : llq_entails(t->get(), goal.c_str(), &o, &r);
      if (s != LLQ_OK) return report_error(g, s, *ent ? "goal" : "");
      return emit(g, r);
    }
    if (*chk) {
      std::string proof = read_input(proof_path);
      std::optional<TheoryPtr> hyps;
      if (!assumptions_path.empty()) {
        hyps = load_theory(assumptions_path, o, g, rc);
        if (!hyps) return rc;
      }
      if (llq_status s = llq_check_proof(proof.c_str(), hyps ? hyps->get() : nullptr, &o, &r); s != LLQ_OK)
        return report_error(g, s, proof_path);
      return emit(g, r);
    }
    if (*qa) {
      std::string terms = read_input(terms_path), dist = read_input(dist_path);
      if (llq_status s = llq_qalg_check(terms.c_str(), dist.c_str(), &o, &r); s != LLQ_OK)
        return report_error(g, s, "");
      return emit(g, r);
    }
  } catch (const InputError& e) {
    if (g.json) std::cout << nlohmann::ordered_json{{"verdict", "Error"}, {"status", LLQ_ERR_IO}, {"error", e.message}}.dump(2) << "\n";
    std::cerr << "llq: " << e.message << "\n";
    return 2;
  }
  return 2;
}
