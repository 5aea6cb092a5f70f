#include "llq/normalize.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace llq {

// --- normal judgements --------------------------------------------------------

std::string to_string(NormalKind k) {
  switch (k) {
    case NormalKind::Tautological:
      return "tautological";
    case NormalKind::Inconsistent:
      return "inconsistent";
    case NormalKind::AlethicZero:
      return "alethic-zero";
    case NormalKind::AlethicInfinite:
      return "alethic-infinite";
    case NormalKind::Finitist:
      return "finitist";
    case NormalKind::Affine:
      return "affine";
  }
  return "?";
}

namespace {

int cmp_side(const AffineSide& a, const AffineSide& b) {
  if (a.coeffs < b.coeffs) return -1;
  if (b.coeffs < a.coeffs) return 1;
  return cmp(a.constant, b.constant);
}

Formula scaled(const Rational& c, const Formula& f) {
  if (c == 1) return f;
  return Formula::scale(c, f);
}

Formula side_formula(const AffineSide& s) {
  std::vector<Formula> parts;
  for (const auto& [p, c] : s.coeffs) parts.push_back(scaled(c, Formula::atom(p)));
  if (sgn(s.constant) > 0) parts.push_back(scaled(s.constant, Formula::one()));
  return Formula::tensor_all(parts);
}

}  // namespace

bool operator<(const NormalJudgement& a, const NormalJudgement& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.prop != b.prop) return a.prop < b.prop;
  if (int c = cmp_side(a.lhs, b.lhs); c != 0) return c < 0;
  return cmp_side(a.rhs, b.rhs) < 0;
}

Judgement NormalJudgement::to_judgement() const {
  switch (kind) {
    case NormalKind::Tautological:
      return {{}, Formula::top()};
    case NormalKind::Inconsistent:
      return {{Formula::top()}, Formula::bot()};
    case NormalKind::AlethicZero:
      return {{Formula::top()}, Formula::atom(prop)};
    case NormalKind::AlethicInfinite:
      return {{Formula::atom(prop)}, Formula::bot()};
    case NormalKind::Finitist:
      return {{}, Formula::neg(Formula::neg(Formula::atom(prop)))};
    case NormalKind::Affine: {
      Judgement j;
      if (!lhs.coeffs.empty() || sgn(lhs.constant) > 0) j.antecedents.push_back(side_formula(lhs));
      j.consequent = side_formula(rhs);
      return j;
    }
  }
  return {};
}

std::vector<std::string> NormalJudgement::atoms() const {
  std::vector<std::string> out;
  if (!prop.empty()) out.push_back(prop);
  for (const auto& [p, c] : lhs.coeffs) out.push_back(p);
  for (const auto& [p, c] : rhs.coeffs) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string print(const NormalJudgement& n) { return print(n.to_judgement()); }

// --- flattening ------------------------------------------------------------

namespace {

Formula flat(const Formula& f, const Rational& r) {
  if (sgn(r) == 0) return Formula::top();
  switch (f.kind()) {
    case Kind::Top:
      return f;
    case Kind::Bot:
      return f;  // r*bot -o-o bot for r > 0
    case Kind::Atom:
    case Kind::One:
      return scaled(r, f);
    case Kind::Scale:
      return flat(f.body(), Rational(r * f.coeff()));
    case Kind::And:
      return Formula::conj(flat(f.left(), r), flat(f.right(), r));
    case Kind::Or:
      return Formula::disj(flat(f.left(), r), flat(f.right(), r));
    case Kind::Tensor:
      return Formula::tensor(flat(f.left(), r), flat(f.right(), r));
    case Kind::Limp:
      return Formula::limp(flat(f.left(), r), flat(f.right(), r));
  }
  return f;
}

}  // namespace

Formula flatten(const Formula& f) { return flat(f, Rational(1)); }

// --- terms and items ---------------------------------------------------------

namespace {

struct Term {
  Rational c;
  Formula f;
};

using Side = std::vector<Term>;

bool is_normal_term(const Formula& f) { return f.is(Kind::Atom) || f.is(Kind::One) || f.is(Kind::Bot); }

// Expands tensors and scalars, drops top and zero coefficients, merges
// repeated formulas, and collapses a side containing bot to bot alone.
Side flatten_side(const Side& in) {
  Side work;
  std::vector<Term> stack(in.rbegin(), in.rend());
  while (!stack.empty()) {
    Term t = std::move(stack.back());
    stack.pop_back();
    if (sgn(t.c) == 0) continue;
    switch (t.f.kind()) {
      case Kind::Top:
        break;
      case Kind::Tensor:
        stack.push_back({t.c, t.f.right()});
        stack.push_back({t.c, t.f.left()});
        break;
      case Kind::Scale:
        stack.push_back({Rational(t.c * t.f.coeff()), t.f.body()});
        break;
      default:
        work.push_back(std::move(t));
    }
  }
  Side out;
  for (auto& t : work) {
    if (t.f.is(Kind::Bot)) return Side{{Rational(1), Formula::bot()}};
    auto it = std::find_if(out.begin(), out.end(), [&](const Term& u) { return u.f == t.f; });
    if (it != out.end())
      it->c += t.c;
    else
      out.push_back(std::move(t));
  }
  return out;
}

bool has_bot(const Side& s) {
  return std::any_of(s.begin(), s.end(), [](const Term& t) { return t.f.is(Kind::Bot); });
}

bool same_side(const Side& a, const Side& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].c != b[i].c || !(a[i].f == b[i].f)) return false;
  return true;
}

Side side_of(const std::vector<Formula>& fs) {
  Side s;
  for (const auto& f : fs) s.push_back({Rational(1), f});
  return s;
}

// Affine reading of a side of normal terms; false if some term is not c*atom / c*1.
bool affine_side(const Side& s, AffineSide& out) {
  for (const auto& t : s) {
    if (t.f.is(Kind::Atom))
      out.coeffs[t.f.name()] += t.c;
    else if (t.f.is(Kind::One))
      out.constant += t.c;
    else
      return false;
  }
  return true;
}

// Classifies a flattened inequality L >= R whose terms are normal.
std::optional<NormalJudgement> classify_sides(const Side& L, const Side& R) {
  if (has_bot(L)) return NormalJudgement::tautological();
  if (R.empty()) return NormalJudgement::tautological();
  AffineSide l;
  if (!affine_side(L, l)) return std::nullopt;
  if (has_bot(R)) {
    if (l.coeffs.empty()) return NormalJudgement::inconsistent();
    if (l.coeffs.size() == 1) return NormalJudgement::alethic_infinite(l.coeffs.begin()->first);
    return std::nullopt;
  }
  AffineSide r;
  if (!affine_side(R, r)) return std::nullopt;
  if (l.coeffs.empty() && r.coeffs.empty())
    return l.constant >= r.constant ? NormalJudgement::tautological() : NormalJudgement::inconsistent();
  if (l.coeffs.empty() && sgn(l.constant) == 0) {
    if (sgn(r.constant) > 0) return NormalJudgement::inconsistent();
    if (r.coeffs.size() == 1 && r.coeffs.begin()->second == 1)
      return NormalJudgement::alethic_zero(r.coeffs.begin()->first);
  }
  return NormalJudgement::affine(std::move(l), std::move(r));
}

std::optional<std::string> double_negated_atom(const Formula& f) {
  if (f.is_negation() && f.left().is_negation() && f.left().left().is(Kind::Atom)) return f.left().left().name();
  return std::nullopt;
}

}  // namespace

std::optional<NormalJudgement> classify(const Judgement& j) {
  Side L = flatten_side(side_of(j.antecedents));
  Side R = flatten_side(side_of({j.consequent}));
  if (has_bot(L) || R.empty()) return NormalJudgement::tautological();
  if (L.empty() && R.size() == 1 && R[0].c == 1)
    if (auto p = double_negated_atom(R[0].f)) return NormalJudgement::finitist(*p);
  for (const auto& t : L)
    if (!is_normal_term(t.f)) return std::nullopt;
  for (const auto& t : R)
    if (!is_normal_term(t.f)) return std::nullopt;
  return classify_sides(L, R);
}

std::optional<std::pair<AffineSide, AffineSide>> affine_form(const Judgement& j) {
  Side L = flatten_side(side_of(j.antecedents));
  Side R = flatten_side(side_of({j.consequent}));
  AffineSide l, r;
  if (!affine_side(L, l) || !affine_side(R, r)) return std::nullopt;
  return std::make_pair(std::move(l), std::move(r));
}

NormalJudgement simplify_with_assertives(const NormalJudgement& a, const std::map<std::string, Assertive>& ctx) {
  if (a.kind != NormalKind::Affine) return a;
  auto status = [&](const std::string& p) -> std::optional<Assertive> {
    auto it = ctx.find(p);
    if (it == ctx.end()) return std::nullopt;
    return it->second;
  };
  AffineSide l, r;
  l.constant = a.lhs.constant;
  r.constant = a.rhs.constant;
  bool lhs_infinite = false, rhs_infinite = false, lhs_unknown = false;
  for (const auto& [p, c] : a.lhs.coeffs) {
    auto s = status(p);
    if (s == Assertive::Zero) continue;
    if (s == Assertive::Infinite) lhs_infinite = true;
    if (!s) lhs_unknown = true;
    l.coeffs[p] = c;
  }
  for (const auto& [p, c] : a.rhs.coeffs) {
    auto s = status(p);
    if (s == Assertive::Zero) continue;
    if (s == Assertive::Infinite) rhs_infinite = true;
    r.coeffs[p] = c;
  }
  if (lhs_infinite) return NormalJudgement::tautological();
  if (rhs_infinite) {
    if (lhs_unknown) throw std::invalid_argument("simplify_with_assertives: antecedent proposition without assertive");
    return NormalJudgement::inconsistent();
  }
  Side L, R;
  for (const auto& [p, c] : l.coeffs) L.push_back({c, Formula::atom(p)});
  if (sgn(l.constant) > 0) L.push_back({l.constant, Formula::one()});
  for (const auto& [p, c] : r.coeffs) R.push_back({c, Formula::atom(p)});
  if (sgn(r.constant) > 0) R.push_back({r.constant, Formula::one()});
  return *classify_sides(L, R);
}

bool NormalTheory::inconsistent() const {
  return std::any_of(judgements.begin(), judgements.end(),
                     [](const NormalJudgement& n) { return n.kind == NormalKind::Inconsistent; });
}

std::vector<Judgement> NormalTheory::to_judgements() const {
  std::vector<Judgement> out;
  for (const auto& n : judgements) out.push_back(n.to_judgement());
  return out;
}

NormalTheory make_theory(std::vector<NormalJudgement> js) {
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  return NormalTheory{std::move(js)};
}

std::vector<std::string> check_normal_theory(const NormalTheory& t, bool require_assertives) {
  std::vector<std::string> errors;
  std::map<std::string, int> assertives;
  std::set<std::string> alethic, mentioned;
  for (const auto& n : t.judgements) {
    if (n.is_assertive()) {
      ++assertives[n.prop];
      if (n.kind != NormalKind::Finitist) alethic.insert(n.prop);
    }
    if (n.kind == NormalKind::Affine) {
      for (const auto& [p, c] : n.lhs.coeffs) {
        mentioned.insert(p);
        if (sgn(c) <= 0) errors.push_back("non-positive coefficient for " + p);
      }
      for (const auto& [p, c] : n.rhs.coeffs) {
        mentioned.insert(p);
        if (sgn(c) <= 0) errors.push_back("non-positive coefficient for " + p);
      }
      if (sgn(n.lhs.constant) < 0 || sgn(n.rhs.constant) < 0) errors.push_back("negative constant");
    }
  }
  for (const auto& p : alethic) {
    if (mentioned.count(p)) errors.push_back("alethic proposition " + p + " occurs in an affine judgement");
    if (assertives[p] > 1) errors.push_back("alethic proposition " + p + " has several assertive judgements");
  }
  if (require_assertives) {
    for (const auto& p : mentioned)
      if (assertives[p] != 1) errors.push_back("proposition " + p + " lacks a unique assertive judgement");
    for (const auto& [p, k] : assertives)
      if (k != 1) errors.push_back("proposition " + p + " has " + std::to_string(k) + " assertive judgements");
  }
  return errors;
}

// --- splits --------------------------------------------------------------------

Judgement Split::first() const {
  if (kind == Kind::Tot) return {{a}, b};
  return {{a}, Formula::bot()};
}

Judgement Split::second() const {
  if (kind == Kind::Tot) return {{b}, a};
  return {{}, Formula::neg(Formula::neg(a))};
}

std::string Split::describe() const {
  return std::string(kind == Kind::Tot ? "tot" : "wem") + " (" + print(first()) + " | " + print(second()) + ")";
}

std::vector<int> BranchTree::leaf_ids() const {
  std::vector<int> out;
  // depth-first, first child before second
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    const auto& node = nodes[static_cast<std::size_t>(n)];
    if (node.is_leaf()) {
      out.push_back(n);
    } else {
      stack.push_back(node.children[1]);
      stack.push_back(node.children[0]);
    }
  }
  return out;
}

std::vector<NormalTheory> leaves(const BranchTree& t, bool satisfiable_only) {
  std::vector<NormalTheory> out;
  for (int id : t.leaf_ids()) {
    const auto& th = t.nodes[static_cast<std::size_t>(id)].theory;
    if (satisfiable_only && th.inconsistent()) continue;
    out.push_back(th);
  }
  return out;
}

// --- the normalization engine ----------------------------------------------------

namespace {

enum class Pin { Zero, Inf };

struct Item {
  bool fin = false;  // |- !!f
  Formula f;
  Side L, R;  // sum L >= sum R
  bool goal = false;
};

struct Facts {
  std::set<std::pair<Formula, Formula>> ge;  // m(a) >= m(b), i.e. a |- b
  std::set<Formula> inf, fin;
};

struct State {
  std::vector<Item> items;
  Facts facts;
  std::map<std::string, Pin> pins;
  std::set<std::string> fin_atoms;
  bool dead = false;
};

Formula term_formula(const Term& t) { return scaled(t.c, t.f); }

Judgement item_judgement(const Item& it) {
  if (it.fin) return {{}, Formula::neg(Formula::neg(it.f))};
  Judgement j;
  for (const auto& t : it.L) j.antecedents.push_back(term_formula(t));
  std::vector<Formula> rs;
  for (const auto& t : it.R) rs.push_back(term_formula(t));
  j.consequent = Formula::tensor_all(rs);
  return j;
}

std::string item_text(const Item& it) { return print(item_judgement(it)); }

void state_judgements(const State& s, std::vector<Judgement>& hyps, std::vector<Judgement>& goals) {
  hyps.clear();
  goals.clear();
  for (const auto& [p, pin] : s.pins)
    hyps.push_back(pin == Pin::Zero ? NormalJudgement::alethic_zero(p).to_judgement()
                                    : NormalJudgement::alethic_infinite(p).to_judgement());
  for (const auto& p : s.fin_atoms) hyps.push_back(NormalJudgement::finitist(p).to_judgement());
  for (const auto& it : s.items) (it.goal ? goals : hyps).push_back(item_judgement(it));
  if (s.dead) hyps.push_back(NormalJudgement::inconsistent().to_judgement());
}

std::size_t weight(const Formula& f) {
  switch (f.kind()) {
    case Kind::Atom:
      return 2;
    case Kind::Bot:
    case Kind::Top:
    case Kind::One:
      return 1;
    case Kind::Scale:
      return 1 + weight(f.body());
    default:
      return 1 + weight(f.left()) + weight(f.right());
  }
}

std::size_t weight(const Item& it) {
  if (it.fin) return 1 + weight(it.f);
  std::size_t w = 0;
  for (const auto& t : it.L) w += weight(t.f);
  for (const auto& t : it.R) w += weight(t.f);
  return w;
}

// Descending weights; lexicographic comparison is the multiset ordering.
std::vector<std::size_t> measure(const State& s) {
  std::vector<std::size_t> m;
  for (const auto& it : s.items) m.push_back(weight(it));
  std::sort(m.rbegin(), m.rend());
  return m;
}

struct SplitRequest {
  Split split;
  std::size_t item;  // index of the item that asked for it
};

class Engine {
 public:
  Engine(State& st, std::vector<Rewrite>& log, bool structural, bool check)
      : st_(st), log_(log), structural_(structural), check_(check) {}

  // Runs rewrites to a fixpoint; returns the split needed to go on, if any.
  std::optional<SplitRequest> run() {
    for (;;) {
      if (st_.dead) return std::nullopt;
      bool changed = false;
      std::optional<SplitRequest> pending;
      // rewrites take priority over splits
      for (std::size_t i = 0; i < st_.items.size(); ++i) {
        auto before = check_ ? measure(st_) : std::vector<std::size_t>{};
        Outcome o = process(i);
        if (o.split) {
          if (check_ && (weight(supplementary_item(o.split->split, true)) >= weight(st_.items[i]) ||
                         weight(supplementary_item(o.split->split, false)) >= weight(st_.items[i])))
            throw NormalizeError("termination check: supplementary judgement not smaller than " +
                                 item_text(st_.items[i]));
          if (!pending) pending = o.split;
          continue;
        }
        if (o.changed) {
          if (check_ && !st_.dead && !(measure(st_) < before))
            throw NormalizeError("termination check: measure did not decrease at rule " + log_.back().rule);
          changed = true;
          break;
        }
      }
      if (changed) continue;
      if (pending) return pending;
      if (!structural_) {
        if (auto p = unsaturated_atom()) return SplitRequest{Split{Split::Kind::Wem, Formula::atom(*p), {}}, 0};
      }
      return std::nullopt;
    }
  }

  static Item supplementary_item(const Split& s, bool first) {
    Item it;
    if (s.kind == Split::Kind::Tot) {
      it.L = {{Rational(1), first ? s.a : s.b}};
      it.R = {{Rational(1), first ? s.b : s.a}};
    } else if (first) {
      it.L = {{Rational(1), s.a}};
      it.R = {{Rational(1), Formula::bot()}};
    } else {
      it.fin = true;
      it.f = s.a;
    }
    return it;
  }

  static void apply_split(State& st, const Split& s, bool first) {
    st.items.push_back(supplementary_item(s, first));
    if (s.kind == Split::Kind::Tot)
      st.facts.ge.insert(first ? std::make_pair(s.a, s.b) : std::make_pair(s.b, s.a));
    else if (first)
      st.facts.inf.insert(s.a);
    else
      st.facts.fin.insert(s.a);
  }

 private:
  struct Outcome {
    bool changed = false;
    std::optional<SplitRequest> split;
  };

  bool known_fin(const Formula& f, bool use_fact = true) const {
    switch (f.kind()) {
      case Kind::Top:
      case Kind::One:
        return true;
      case Kind::Bot:
        return false;
      case Kind::Atom:
        if (st_.fin_atoms.count(f.name())) return true;
        break;
      case Kind::Scale:
        if (sgn(f.coeff()) == 0 || known_fin(f.body())) return true;
        break;
      case Kind::Tensor:
      case Kind::And:
        if (known_fin(f.left()) && known_fin(f.right())) return true;
        break;
      case Kind::Or:
        if (known_fin(f.left()) || known_fin(f.right())) return true;
        break;
      case Kind::Limp:
        if (known_fin(f.right()) || known_inf(f.left())) return true;
        break;
    }
    return use_fact && st_.facts.fin.count(f) != 0;
  }

  bool known_inf(const Formula& f) const {
    switch (f.kind()) {
      case Kind::Bot:
        return true;
      case Kind::Top:
      case Kind::One:
        return false;
      case Kind::Atom: {
        auto it = st_.pins.find(f.name());
        if (it != st_.pins.end()) return it->second == Pin::Inf;
        break;
      }
      case Kind::Scale:
        if (sgn(f.coeff()) > 0 && known_inf(f.body())) return true;
        break;
      case Kind::Tensor:
      case Kind::And:
        if (known_inf(f.left()) || known_inf(f.right())) return true;
        break;
      case Kind::Or:
        if (known_inf(f.left()) && known_inf(f.right())) return true;
        break;
      case Kind::Limp:
        if (known_inf(f.right()) && known_fin(f.left())) return true;
        break;
    }
    return st_.facts.inf.count(f) != 0;
  }

  bool known_ge(const Formula& a, const Formula& b) const {
    if (a == b || b.is(Kind::Top) || a.is(Kind::Bot)) return true;
    return st_.facts.ge.count({a, b}) != 0;
  }

  // Value-preserving simplification under the branch's pins and facts.
  Formula simplify(const Formula& f, bool use_facts) const {
    switch (f.kind()) {
      case Kind::Bot:
      case Kind::Top:
      case Kind::One:
        return f;
      case Kind::Atom: {
        auto it = st_.pins.find(f.name());
        if (it == st_.pins.end()) return f;
        return it->second == Pin::Inf ? Formula::bot() : Formula::top();
      }
      case Kind::Scale: {
        Formula b = simplify(f.body(), use_facts);
        const Rational& r = f.coeff();
        if (sgn(r) == 0 || b.is(Kind::Top)) return Formula::top();
        if (b.is(Kind::Bot)) return b;
        if (r == 1) return b;
        if (b.is(Kind::Scale)) return Formula::scale(Rational(r * b.coeff()), b.body());
        return Formula::scale(r, b);
      }
      default:
        break;
    }
    Formula a = simplify(f.left(), use_facts);
    Formula b = simplify(f.right(), use_facts);
    switch (f.kind()) {
      case Kind::Tensor:
        if (a.is(Kind::Bot) || b.is(Kind::Bot)) return Formula::bot();
        if (a.is(Kind::Top)) return b;
        if (b.is(Kind::Top)) return a;
        return Formula::tensor(a, b);
      case Kind::And:
        if (a.is(Kind::Bot) || b.is(Kind::Bot)) return Formula::bot();
        if (a.is(Kind::Top) || a == b) return b;
        if (b.is(Kind::Top)) return a;
        if (use_facts) {
          if (known_ge(a, b)) return a;
          if (known_ge(b, a)) return b;
        }
        return Formula::conj(a, b);
      case Kind::Or:
        if (a.is(Kind::Top) || b.is(Kind::Top)) return Formula::top();
        if (a.is(Kind::Bot) || a == b) return b;
        if (b.is(Kind::Bot)) return a;
        if (use_facts) {
          if (known_ge(a, b)) return b;
          if (known_ge(b, a)) return a;
        }
        return Formula::disj(a, b);
      case Kind::Limp:
        if (b.is(Kind::Top) || a.is(Kind::Bot) || a == b) return Formula::top();
        if (a.is(Kind::Top)) return b;
        if (use_facts) {
          if (known_inf(a) || known_ge(a, b)) return Formula::top();
          if (known_inf(b) && known_fin(a)) return Formula::bot();
        }
        return Formula::limp(a, b);
      default:
        return f;
    }
  }

  void note(const char* rule, const char* why, const Item& before, const std::vector<Item>& after) {
    Rewrite r{rule, why, item_text(before), {}};
    for (const auto& it : after) r.after.push_back(item_text(it));
    log_.push_back(std::move(r));
  }

  void replace(std::size_t i, std::vector<Item> repl, const char* rule, const char* why) {
    Item old = st_.items[i];
    note(rule, why, old, repl);
    st_.items.erase(st_.items.begin() + static_cast<long>(i));
    st_.items.insert(st_.items.begin() + static_cast<long>(i), repl.begin(), repl.end());
  }

  void kill(std::size_t i, const char* why) {
    note("inconsistent", why, st_.items[i], {});
    st_.dead = true;
  }

  void refresh_facts() {
    Facts nf;
    for (const auto& [a, b] : st_.facts.ge) nf.ge.insert({simplify(a, false), simplify(b, false)});
    for (const auto& f : st_.facts.inf) nf.inf.insert(simplify(f, false));
    for (const auto& f : st_.facts.fin) nf.fin.insert(simplify(f, false));
    st_.facts = std::move(nf);
  }

  bool pin(const std::string& p, Pin k) {
    auto it = st_.pins.find(p);
    if (it != st_.pins.end()) return it->second == k;
    if (k == Pin::Inf && st_.fin_atoms.count(p)) return false;
    st_.fin_atoms.erase(p);
    st_.pins[p] = k;
    refresh_facts();
    return true;
  }

  static Outcome changed() { return {true, std::nullopt}; }
  static Outcome split_on(Split s, std::size_t i) { return {false, SplitRequest{std::move(s), i}}; }
  static Split tot(Formula a, Formula b) { return Split{Split::Kind::Tot, std::move(a), std::move(b)}; }
  static Split wem(Formula a) { return Split{Split::Kind::Wem, std::move(a), {}}; }

  Outcome process(std::size_t i) {
    Item it = st_.items[i];
    if (it.fin) return process_fin(i, it);

    Item s = it;
    for (auto& t : s.L) t.f = simplify(t.f, true);
    for (auto& t : s.R) t.f = simplify(t.f, true);
    s.L = flatten_side(s.L);
    s.R = flatten_side(s.R);
    if (has_bot(s.L) || s.R.empty()) {
      replace(i, {}, "tautology", "bot / top");
      return changed();
    }
    if (!same_side(s.L, it.L) || !same_side(s.R, it.R)) {
      replace(i, {s}, "simplify", "unit and absorption laws, S2-S7, supplementary facts");
      return changed();
    }

    // structural rules on the first compound term, consequent side first
    for (int side = 0; side < 2; ++side) {
      Side& terms = side == 0 ? s.R : s.L;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const Term t = terms[k];
        const Formula& f = t.f;
        if (is_normal_term(f)) continue;
        if ((side == 0 && f.is(Kind::And)) || (side == 1 && f.is(Kind::Or))) {
          Item x = s, y = s;
          (side == 0 ? x.R : x.L)[k].f = f.left();
          (side == 0 ? y.R : y.L)[k].f = f.right();
          replace(i, {x, y}, side == 0 ? "and-right" : "or-left", side == 0 ? "and2, and3" : "or1, or3");
          return changed();
        }
        if (f.is(Kind::And) || f.is(Kind::Or)) return split_on(tot(f.left(), f.right()), i);
        // Limp(a, b) with value b -. a
        const Formula& a = f.left();
        const Formula& b = f.right();
        if (known_inf(b)) return split_on(wem(a), i);
        if (!known_ge(b, a)) return split_on(tot(a, b), i);
        if (!known_fin(b)) return split_on(wem(b), i);
        // b >= a, b finite: c*(a -o b) is c*b - c*a
        Item x = s;
        Side& same = side == 0 ? x.R : x.L;
        Side& other = side == 0 ? x.L : x.R;
        same[k].f = b;
        other.push_back({t.c, a});
        x.L = flatten_side(x.L);
        x.R = flatten_side(x.R);
        replace(i, {x}, side == 0 ? "limp-right" : "limp-left", "tensor2, limp1 / limp2 with the finite side premise");
        return changed();
      }
    }
    return classify_item(i, s);
  }

  Outcome classify_item(std::size_t i, Item s) {
    if (has_bot(s.R)) {
      // sum L is infinite
      Item x = s;
      x.L.erase(std::remove_if(x.L.begin(), x.L.end(),
                               [&](const Term& t) { return known_fin(t.f); }),
                x.L.end());
      if (x.L.size() != s.L.size()) {
        replace(i, {x}, "drop-finite", "finite terms cannot make a sum infinite");
        return changed();
      }
      if (s.L.empty()) {
        if (s.goal) return {};
        kill(i, "top |- bot");
        return changed();
      }
      if (s.L.size() > 1) return split_on(wem(s.L.front().f), i);
      if (s.goal) return {};
      if (!pin(s.L.front().f.name(), Pin::Inf)) {
        kill(i, "finite and infinite");
        return changed();
      }
      replace(i, {}, "alethic-infinite", "wem, substitution of bot");
      return changed();
    }
    auto n = classify_sides(s.L, s.R);
    if (!n) throw NormalizeError("internal: unclassifiable item " + item_text(s));
    switch (n->kind) {
      case NormalKind::Tautological:
        replace(i, {}, "tautology", "top / constants");
        return changed();
      case NormalKind::Inconsistent:
        if (s.goal) return {};
        kill(i, "constant inequality");
        return changed();
      default:
        break;
    }
    AffineSide l, r;
    affine_side(s.L, l);
    affine_side(s.R, r);
    if (!s.goal && l.coeffs.empty() && sgn(l.constant) == 0 && sgn(r.constant) == 0) {
      for (const auto& [p, c] : r.coeffs)
        if (!pin(p, Pin::Zero)) {
          kill(i, "zero and infinite");
          return changed();
        }
      replace(i, {}, "alethic-zero", "top |- p, substitution of top");
      return changed();
    }
    return {};
  }

  Outcome process_fin(std::size_t i, const Item& it) {
    Formula f = simplify(it.f, true);
    if (!(f == it.f)) {
      Item x = it;
      x.f = f;
      replace(i, {x}, "simplify", "unit and absorption laws, supplementary facts");
      return changed();
    }
    // the item's own fact does not count
    if (known_fin(f, false) && !(f.is(Kind::Atom) && !it.goal)) {
      replace(i, {}, "tautology", "known finite");
      return changed();
    }
    if (known_inf(f)) {
      if (it.goal) return {};
      kill(i, "finite and infinite");
      return changed();
    }
    auto fin_item = [&](const Formula& g) {
      Item x = it;
      x.f = g;
      return x;
    };
    switch (f.kind()) {
      case Kind::Atom:
        if (it.goal) return {};
        st_.fin_atoms.insert(f.name());
        replace(i, {}, "finitist", "|- !!p");
        return changed();
      case Kind::Scale:
        replace(i, {fin_item(f.body())}, "fin-scale", "S7");
        return changed();
      case Kind::Tensor:
      case Kind::And:
        replace(i, {fin_item(f.left()), fin_item(f.right())}, "fin-split", "finiteness of both parts");
        return changed();
      case Kind::Or:
        if (known_inf(f.left())) {
          replace(i, {fin_item(f.right())}, "fin-or", "or");
          return changed();
        }
        if (known_inf(f.right())) {
          replace(i, {fin_item(f.left())}, "fin-or", "or");
          return changed();
        }
        return split_on(wem(f.left()), i);
      case Kind::Limp:
        if (known_fin(f.left())) {
          replace(i, {fin_item(f.right())}, "fin-limp", "limp with finite antecedent");
          return changed();
        }
        return split_on(wem(f.left()), i);
      default:
        break;
    }
    throw NormalizeError("internal: unexpected finiteness item " + item_text(it));
  }

  std::optional<std::string> unsaturated_atom() const {
    std::vector<std::string> atoms;
    for (const auto& it : st_.items) {
      if (it.fin) {
        collect_atoms(it.f, atoms);
        continue;
      }
      for (const auto& t : it.L) collect_atoms(t.f, atoms);
      for (const auto& t : it.R) collect_atoms(t.f, atoms);
    }
    std::sort(atoms.begin(), atoms.end());
    for (const auto& p : atoms)
      if (!st_.fin_atoms.count(p) && !st_.pins.count(p)) return p;
    return std::nullopt;
  }

  State& st_;
  std::vector<Rewrite>& log_;
  bool structural_;
  bool check_;
};

std::optional<NormalJudgement> item_normal(const Item& it) {
  if (it.fin) {
    if (it.f.is(Kind::Atom)) return NormalJudgement::finitist(it.f.name());
    if (it.f.is(Kind::Bot)) return NormalJudgement::inconsistent();
    return std::nullopt;
  }
  return classify_sides(it.L, it.R);
}

void make_leaf(const State& st, BranchNode& node) {
  std::vector<NormalJudgement> hyps, goals;
  if (st.dead) {
    node.theory = make_theory({NormalJudgement::inconsistent()});
    return;
  }
  for (const auto& [p, pin] : st.pins)
    hyps.push_back(pin == Pin::Zero ? NormalJudgement::alethic_zero(p) : NormalJudgement::alethic_infinite(p));
  for (const auto& p : st.fin_atoms) hyps.push_back(NormalJudgement::finitist(p));
  for (const auto& it : st.items) {
    auto n = item_normal(it);
    if (!n) throw NormalizeError("internal: leaf judgement not normal: " + item_text(it));
    (it.goal ? goals : hyps).push_back(*n);
  }
  node.theory = make_theory(std::move(hyps));
  std::sort(goals.begin(), goals.end());
  goals.erase(std::unique(goals.begin(), goals.end()), goals.end());
  node.goals = std::move(goals);
}

BranchTree run_normalize(const std::vector<Judgement>& V, const std::vector<Judgement>& goals,
                         const NormalizeOptions& opts) {
  for (const auto& j : V) require_level(j, opts.level);
  for (const auto& j : goals) require_level(j, opts.level);

  BranchTree tree;
  tree.root = V;
  tree.root_goals = goals;

  State root;
  for (const auto& j : V) root.items.push_back(Item{false, {}, side_of(j.antecedents), side_of({j.consequent}), false});
  for (const auto& j : goals)
    root.items.push_back(Item{false, {}, side_of(j.antecedents), side_of({j.consequent}), true});

  struct Pending {
    int node;
    State st;
  };
  tree.nodes.emplace_back();
  tree.nodes[0].entry = V;
  tree.nodes[0].entry_goals = goals;
  std::vector<Pending> stack;
  stack.push_back({0, std::move(root)});
  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();
    std::vector<Rewrite> log;
    Engine eng(cur.st, log, opts.structural, opts.check_termination);
    auto req = eng.run();
    {
      BranchNode& node = tree.nodes[static_cast<std::size_t>(cur.node)];
      node.rewrites = std::move(log);
      state_judgements(cur.st, node.state, node.state_goals);
      if (!req) {
        make_leaf(cur.st, node);
        continue;
      }
      node.split = req->split;
    }
    if (tree.nodes.size() + 2 > opts.max_nodes) throw NormalizeError("normalization tree exceeds the node limit" + (std::getenv("LLQ_DEBUG") ? print_tree(tree) : std::string()));
    int kids[2];
    std::vector<Pending> children;
    for (int b = 0; b < 2; ++b) {
      State st = cur.st;
      Engine::apply_split(st, req->split, b == 0);
      BranchNode child;
      child.parent = cur.node;
      child.branch = b;
      state_judgements(st, child.entry, child.entry_goals);
      kids[b] = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(std::move(child));
      children.push_back({kids[b], std::move(st)});
    }
    tree.nodes[static_cast<std::size_t>(cur.node)].children[0] = kids[0];
    tree.nodes[static_cast<std::size_t>(cur.node)].children[1] = kids[1];
    stack.push_back(std::move(children[1]));
    stack.push_back(std::move(children[0]));
  }
  return tree;
}

}  // namespace

BranchTree normalize(const std::vector<Judgement>& V, const NormalizeOptions& opts) {
  return run_normalize(V, {}, opts);
}

BranchTree normalize_with_goal(const std::vector<Judgement>& S, const Judgement& goal, const NormalizeOptions& opts) {
  return run_normalize(S, {goal}, opts);
}

std::string print_tree(const BranchTree& t) {
  std::ostringstream os;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int leaf_no = 0;
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const auto& n = t.nodes[static_cast<std::size_t>(id)];
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    os << pad << "node " << id;
    if (n.parent >= 0) {
      const auto& par = t.nodes[static_cast<std::size_t>(n.parent)];
      os << " [" << print(n.branch == 0 ? par.split->first() : par.split->second()) << "]";
    }
    os << "\n";
    for (const auto& r : n.rewrites) {
      os << pad << "  rewrite " << r.rule << ": " << r.before << "  =>  ";
      if (r.after.empty()) os << "(removed)";
      for (std::size_t k = 0; k < r.after.size(); ++k) os << (k ? " ; " : "") << r.after[k];
      os << "\n";
    }
    if (n.is_leaf()) {
      os << pad << "  leaf " << leaf_no++ << (n.theory.inconsistent() ? " (inconsistent)" : "") << ":\n";
      for (const auto& j : n.theory.judgements) os << pad << "    " << print(j) << "\n";
      for (const auto& g : n.goals) os << pad << "    goal " << print(g) << "\n";
    } else {
      os << pad << "  split " << n.split->describe() << "\n";
      stack.push_back({n.children[1], depth + 1});
      stack.push_back({n.children[0], depth + 1});
    }
  }
  return os.str();
}

}  // namespace llq
