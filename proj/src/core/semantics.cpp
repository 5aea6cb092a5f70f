#include "llq/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace llq {

const ExtValue& Model::get(const std::string& prop) const {
  auto it = values_.find(prop);
  return it == values_.end() ? default_ : it->second;
}

ExtValue eval(const Model& m, const Formula& f) {
  switch (f.kind()) {
    case Kind::Bot:
      return ExtValue::infinity();
    case Kind::Top:
      return ExtValue::zero();
    case Kind::One:
      return ExtValue(1);
    case Kind::Atom:
      return m.get(f.name());
    case Kind::Scale:
      return scale(f.coeff(), eval(m, f.body()));
    case Kind::And:
      return max(eval(m, f.left()), eval(m, f.right()));
    case Kind::Or:
      return min(eval(m, f.left()), eval(m, f.right()));
    case Kind::Tensor:
      return add(eval(m, f.left()), eval(m, f.right()));
    case Kind::Limp:
      return tsub(eval(m, f.right()), eval(m, f.left()));
  }
  return ExtValue::zero();
}

bool satisfies(const Model& m, const Judgement& j) {
  ExtValue lhs;
  for (const auto& a : j.antecedents) {
    lhs = add(lhs, eval(m, a));
    if (lhs.is_infinite()) return true;
  }
  return eval(m, j.consequent) <= lhs;
}

bool satisfies_all(const Model& m, const std::vector<Judgement>& js) {
  return std::all_of(js.begin(), js.end(), [&](const Judgement& j) { return satisfies(m, j); });
}

DiagramAxioms model_to_diagram(const Model& m, const std::vector<std::string>& props) {
  std::vector<std::string> ps = props;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  DiagramAxioms d;
  for (const auto& p : ps) {
    const ExtValue& v = m.get(p);
    if (v.is_infinite())
      d.push_back({p, true, Rational(0)});
    else
      d.push_back({p, false, v.finite()});
  }
  return d;
}

Model diagram_to_model(const DiagramAxioms& d) {
  Model m;
  for (const auto& e : d) m.set(e.prop, e.infinite ? ExtValue::infinity() : ExtValue(e.eps));
  return m;
}

std::vector<Judgement> diagram_judgements(const DiagramAxioms& d) {
  std::vector<Judgement> out;
  for (const auto& e : d) {
    Formula p = Formula::atom(e.prop);
    if (e.infinite) {
      out.push_back({{p}, Formula::bot()});
    } else {
      out.push_back({{Formula::constant(e.eps)}, p});
      out.push_back({{p}, Formula::constant(e.eps)});
    }
  }
  return out;
}

Profile parse_profile(std::string_view s) {
  if (s == "mixed") return Profile::Mixed;
  if (s == "finite-only") return Profile::FiniteOnly;
  if (s == "boundary") return Profile::Boundary;
  throw std::invalid_argument("unknown sampling profile '" + std::string(s) + "'");
}

Model sample_model(const std::vector<std::string>& props, std::mt19937_64& rng, Profile profile, SampleWeights w) {
  if (profile == Profile::FiniteOnly) w.infinite = 0;
  if (profile == Profile::Boundary) w.small = w.large = 0;
  if (w.zero + w.small + w.large + w.infinite == 0) w.zero = 1;
  std::discrete_distribution<int> pick({double(w.zero), double(w.small), double(w.large), double(w.infinite)});
  std::uniform_int_distribution<int> small_num(0, 12), small_den(1, 4), large_num(10, 1000);
  Model m;
  for (const auto& p : props) {
    switch (pick(rng)) {
      case 0:
        m.set(p, ExtValue::zero());
        break;
      case 1:
        m.set(p, ExtValue(Rational(small_num(rng), small_den(rng))));
        break;
      case 2:
        m.set(p, ExtValue(Rational(large_num(rng), small_den(rng))));
        break;
      default:
        m.set(p, ExtValue::infinity());
    }
  }
  return m;
}

Model sample_model(const std::vector<std::string>& props, std::uint64_t seed, Profile profile, SampleWeights w) {
  std::mt19937_64 rng(seed);
  return sample_model(props, rng, profile, w);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Model parse_model(std::string_view text, ExtValue default_value) {
  Model m(std::move(default_value));
  std::size_t start = 0, line_no = 1;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    line = trim(line.substr(0, line.find('#')));
    if (!line.empty()) {
      auto eq = line.find('=');
      auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError(msg, start, line_no, 1);
      };
      if (eq == std::string_view::npos) throw fail("expected 'name = value'");
      std::string_view name = trim(line.substr(0, eq));
      if (name.size() >= 2 && name.front() == '`' && name.back() == '`') name = name.substr(1, name.size() - 2);
      if (name.empty()) throw fail("missing proposition name");
      try {
        m.set(std::string(name), parse_extvalue(trim(line.substr(eq + 1))));
      } catch (const std::invalid_argument& e) {
        throw fail(e.what());
      }
    }
    start = end + 1;
    ++line_no;
  }
  return m;
}

std::string print_model(const Model& m) {
  std::ostringstream os;
  for (const auto& [p, v] : m.assignment()) {
    bool plain = !p.empty() && (std::isalpha(static_cast<unsigned char>(p[0])) || p[0] == '_') &&
                 std::all_of(p.begin(), p.end(), [](char c) {
                   return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
                 });
    os << (plain ? p : "`" + p + "`") << " = " << v << "\n";
  }
  return os.str();
}

}  // namespace llq
