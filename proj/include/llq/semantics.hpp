#pragma once

// Models m : Prop -> [0, inf], evaluation, judgement satisfaction and the
// correspondence between models and diagrammatic theories.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "llq/extval.hpp"
#include "llq/syntax.hpp"

namespace llq {

class Model {
 public:
  Model() = default;
  explicit Model(ExtValue default_value) : default_(std::move(default_value)) {}

  void set(const std::string& prop, ExtValue v) { values_[prop] = std::move(v); }
  [[nodiscard]] const ExtValue& get(const std::string& prop) const;
  [[nodiscard]] bool has(const std::string& prop) const { return values_.count(prop) != 0; }
  [[nodiscard]] const ExtValue& default_value() const { return default_; }
  void set_default(ExtValue v) { default_ = std::move(v); }
  [[nodiscard]] const std::map<std::string, ExtValue>& assignment() const { return values_; }

  friend bool operator==(const Model&, const Model&) = default;

 private:
  std::map<std::string, ExtValue> values_;
  ExtValue default_;
};

ExtValue eval(const Model& m, const Formula& f);
/// Sum of antecedent values >= consequent value.
bool satisfies(const Model& m, const Judgement& j);
bool satisfies_all(const Model& m, const std::vector<Judgement>& js);

// Diagrammatic axioms: p |- bot, or the pair eps |- p, p |- eps.
struct DiagramEntry {
  std::string prop;
  bool infinite = false;
  Rational eps;  // meaningful when !infinite

  friend bool operator==(const DiagramEntry&, const DiagramEntry&) = default;
};
using DiagramAxioms = std::vector<DiagramEntry>;  // sorted by prop

DiagramAxioms model_to_diagram(const Model& m, const std::vector<std::string>& props);
Model diagram_to_model(const DiagramAxioms& d);
std::vector<Judgement> diagram_judgements(const DiagramAxioms& d);

enum class Profile { Mixed, FiniteOnly, Boundary };
Profile parse_profile(std::string_view s);

struct SampleWeights {
  unsigned zero = 2, small = 5, large = 1, infinite = 2;
};

/// Deterministic for a given seed. Boundary draws only 0 and inf,
/// FiniteOnly never draws inf.
Model sample_model(const std::vector<std::string>& props, std::uint64_t seed, Profile profile = Profile::Mixed,
                   SampleWeights w = {});
Model sample_model(const std::vector<std::string>& props, std::mt19937_64& rng, Profile profile = Profile::Mixed,
                   SampleWeights w = {});

/// `ident = value` lines, `#` comments. Throws ParseError.
Model parse_model(std::string_view text, ExtValue default_value = ExtValue::zero());
std::string print_model(const Model& m);

}  // namespace llq
