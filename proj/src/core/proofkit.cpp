#include "llq/proofkit.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "llq/normalize.hpp"

namespace llq {

namespace {

struct RuleInfo {
  RuleId id;
  const char* name;
  int arity;
};

const RuleInfo kRules[] = {
    {RuleId::HYP, "hyp", 0},       {RuleId::ID, "id", 0},         {RuleId::CUT, "cut", 2},
    {RuleId::WEAK, "weak", 1},     {RuleId::PERM, "perm", 1},     {RuleId::TOP, "top", 0},
    {RuleId::BOT, "bot", 0},       {RuleId::AND1, "and1", 1},     {RuleId::AND2, "and2", 2},
    {RuleId::AND3, "and3", 1},     {RuleId::OR1, "or1", 2},       {RuleId::OR2, "or2", 1},
    {RuleId::OR3, "or3", 1},       {RuleId::WEM, "wem", 0},       {RuleId::TOT, "tot", 0},
    {RuleId::TENS1a, "tens1a", 1}, {RuleId::TENS1b, "tens1b", 1}, {RuleId::TENS2a, "tens2a", 1},
    {RuleId::TENS2b, "tens2b", 1}, {RuleId::TENS3, "tens3", 1},   {RuleId::LIMP1, "limp1", 2},
    {RuleId::LIMP2, "limp2", 2},   {RuleId::LIMP3, "limp3", 2},   {RuleId::ONE, "one", 1},
    {RuleId::S1a, "s1a", 1},       {RuleId::S1b, "s1b", 1},       {RuleId::S2, "s2", 0},
    {RuleId::S3, "s3", 0},         {RuleId::S4, "s4", 0},         {RuleId::S5, "s5", 0},
    {RuleId::S6, "s6", 0},         {RuleId::S7, "s7", 0},         {RuleId::S8, "s8", 1},
    {RuleId::S9, "s9", 0},         {RuleId::S10, "s10", 0},       {RuleId::ADMISSIBLE, "admissible", -1},
};

const RuleInfo& info(RuleId r) {
  for (const auto& i : kRules)
    if (i.id == r) return i;
  throw std::logic_error("unknown rule");
}

using Fs = std::vector<Formula>;

Judgement jd(Fs ant, Formula c) { return Judgement{std::move(ant), std::move(c)}; }

Fs replaced(const Fs& xs, std::size_t k, const Fs& with) {
  Fs out(xs.begin(), xs.begin() + static_cast<long>(k));
  out.insert(out.end(), with.begin(), with.end());
  out.insert(out.end(), xs.begin() + static_cast<long>(k) + 1, xs.end());
  return out;
}

Fs removed(const Fs& xs, std::size_t k) { return replaced(xs, k, {}); }

bool is_biimp(const Formula& f, Formula& a, Formula& b) {
  if (!f.is(Kind::And) || !f.left().is(Kind::Limp) || !f.right().is(Kind::Limp)) return false;
  a = f.left().left();
  b = f.left().right();
  return f.right().left() == b && f.right().right() == a;
}

bool is_scale(const Formula& f, Rational& r, Formula& body) {
  if (!f.is(Kind::Scale)) return false;
  r = f.coeff();
  body = f.body();
  return true;
}

Formula op_apply(const std::string& op, Formula a, Formula b) {
  if (op == "and") return Formula::conj(std::move(a), std::move(b));
  if (op == "or") return Formula::disj(std::move(a), std::move(b));
  if (op == "tensor") return Formula::tensor(std::move(a), std::move(b));
  if (op == "limp") return Formula::limp(std::move(a), std::move(b));
  throw InstantiationError("unknown connective '" + op + "'");
}

std::string op_of(Kind k) {
  switch (k) {
    case Kind::And:
      return "and";
    case Kind::Or:
      return "or";
    case Kind::Tensor:
      return "tensor";
    case Kind::Limp:
      return "limp";
    default:
      return "";
  }
}

Rational tsub_q(const Rational& a, const Rational& b) { return a > b ? Rational(a - b) : Rational(0); }

// --- per-rule structural checks ---------------------------------------------

using Err = std::optional<std::string>;

Err fail(std::string s) { return s; }

Err check_primitive(RuleId rule, const std::vector<const Judgement*>& P, const Judgement& C) {
  const Fs& G = C.antecedents;
  const Formula& c = C.consequent;
  auto exists_k = [](std::size_t n, const std::function<bool(std::size_t)>& f) {
    for (std::size_t k = 0; k < n; ++k)
      if (f(k)) return true;
    return false;
  };
  switch (rule) {
    case RuleId::ID:
      if (G.size() == 1 && G[0] == c) return {};
      return fail("id needs phi |- phi");
    case RuleId::CUT: {
      const Judgement& a = *P[0];
      const Judgement& b = *P[1];
      if (!(b.consequent == c)) return fail("consequent differs from the second premise");
      bool ok = exists_k(b.antecedents.size(), [&](std::size_t k) {
        if (!(b.antecedents[k] == a.consequent)) return false;
        Fs want = a.antecedents;
        Fs rest = removed(b.antecedents, k);
        want.insert(want.end(), rest.begin(), rest.end());
        return want == G;
      });
      if (ok) return {};
      return fail("cut formula or context mismatch");
    }
    case RuleId::WEAK:
      if (P[0]->consequent == c && G.size() == P[0]->antecedents.size() + 1 &&
          exists_k(G.size(), [&](std::size_t k) { return removed(G, k) == P[0]->antecedents; }))
        return {};
      return fail("weak adds exactly one antecedent");
    case RuleId::PERM: {
      if (!(P[0]->consequent == c)) return fail("consequent changed");
      Fs a = P[0]->antecedents, b = G;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a == b) return {};
      return fail("antecedents are not a permutation");
    }
    case RuleId::TOP:
      if (c.is(Kind::Top)) return {};
      return fail("consequent must be top");
    case RuleId::BOT:
      if (G.size() == 1 && G[0].is(Kind::Bot)) return {};
      return fail("bot needs the single antecedent bot");
    case RuleId::AND1:
      if (P[0]->consequent == c && P[0]->antecedents.size() == G.size() &&
          exists_k(G.size(), [&](std::size_t k) {
            return G[k].is(Kind::And) && (P[0]->antecedents == replaced(G, k, {G[k].left()}) ||
                                          P[0]->antecedents == replaced(G, k, {G[k].right()}));
          }))
        return {};
      return fail("and1 pattern mismatch");
    case RuleId::AND2:
      if (P[0]->antecedents == G && P[1]->antecedents == G && c.is(Kind::And) && c.left() == P[0]->consequent &&
          c.right() == P[1]->consequent)
        return {};
      return fail("and2 pattern mismatch");
    case RuleId::AND3:
      if (P[0]->antecedents == G && P[0]->consequent.is(Kind::And) &&
          (P[0]->consequent.left() == c || P[0]->consequent.right() == c))
        return {};
      return fail("and3 pattern mismatch");
    case RuleId::OR1:
      if (P[0]->consequent == c && P[1]->consequent == c &&
          exists_k(G.size(), [&](std::size_t k) {
            if (!G[k].is(Kind::Or)) return false;
            Fs l = replaced(G, k, {G[k].left()}), r = replaced(G, k, {G[k].right()});
            return (P[0]->antecedents == l && P[1]->antecedents == r) ||
                   (P[0]->antecedents == r && P[1]->antecedents == l);
          }))
        return {};
      return fail("or1 pattern mismatch");
    case RuleId::OR2:
      if (P[0]->antecedents == G && c.is(Kind::Or) && (c.left() == P[0]->consequent || c.right() == P[0]->consequent))
        return {};
      return fail("or2 pattern mismatch");
    case RuleId::OR3: {
      const Fs& H = P[0]->antecedents;
      if (P[0]->consequent == c && H.size() == G.size() && exists_k(H.size(), [&](std::size_t k) {
            return H[k].is(Kind::Or) && (G == replaced(H, k, {H[k].left()}) || G == replaced(H, k, {H[k].right()}));
          }))
        return {};
      return fail("or3 pattern mismatch");
    }
    case RuleId::WEM:
      if (G.empty() && c.is(Kind::Or) && c.left().is_negation() && c.right().is_negation() &&
          c.right().left().is_negation() && c.right().left().left() == c.left().left())
        return {};
      return fail("wem needs |- !phi \\/ !!phi");
    case RuleId::TOT:
      if (G.empty() && c.is(Kind::Or) && c.left().is(Kind::Limp) && c.right().is(Kind::Limp) &&
          c.left().left() == c.right().right() && c.left().right() == c.right().left())
        return {};
      return fail("tot needs |- (phi -o psi) \\/ (psi -o phi)");
    case RuleId::TENS1a:
    case RuleId::TENS1b: {
      // split side: antecedents with phi, psi; joined side: with phi (x) psi
      const Fs& split = rule == RuleId::TENS1a ? P[0]->antecedents : G;
      const Fs& joined = rule == RuleId::TENS1a ? G : P[0]->antecedents;
      if (P[0]->consequent == c && exists_k(joined.size(), [&](std::size_t k) {
            return joined[k].is(Kind::Tensor) && split == replaced(joined, k, {joined[k].left(), joined[k].right()});
          }))
        return {};
      return fail("tens1 pattern mismatch");
    }
    case RuleId::TENS2a:
    case RuleId::TENS2b: {
      // upper: Gamma, phi (x) psi |- theta ; lower: Gamma, phi |- psi -o theta
      const Judgement& up = rule == RuleId::TENS2a ? *P[0] : C;
      const Judgement& low = rule == RuleId::TENS2a ? C : *P[0];
      if (!low.consequent.is(Kind::Limp) || !(low.consequent.right() == up.consequent))
        return fail("tens2 needs a consequent psi -o theta");
      const Formula& psi = low.consequent.left();
      bool ok = exists_k(low.antecedents.size(), [&](std::size_t k) {
        return up.antecedents == replaced(low.antecedents, k, {Formula::tensor(low.antecedents[k], psi)});
      });
      // phi absent: read as top, the unit of (x)
      ok = ok || exists_k(up.antecedents.size(), [&](std::size_t k) {
             return up.antecedents[k] == psi && removed(up.antecedents, k) == low.antecedents;
           });
      if (ok) return {};
      return fail("tens2 pattern mismatch");
    }
    case RuleId::TENS3: {
      const Judgement& a = *P[0];
      if (G.size() == 1 && a.antecedents.size() == 1 && a.antecedents[0] == Formula::tensor(G[0], G[0]) &&
          a.consequent == Formula::tensor(c, c))
        return {};
      return fail("tens3 needs phi (x) phi |- psi (x) psi");
    }
    case RuleId::LIMP1: {
      // Gamma, phi -o theta |- psi ; theta |- phi  /  Gamma, theta |- phi (x) psi
      const Judgement& a = *P[0];
      const Judgement& b = *P[1];
      if (!c.is(Kind::Tensor) || b.antecedents.size() != 1) return fail("limp1 pattern mismatch");
      const Formula& phi = c.left();
      const Formula& psi = c.right();
      const Formula& theta = b.antecedents[0];
      if (!(b.consequent == phi) || !(a.consequent == psi)) return fail("limp1 pattern mismatch");
      if (exists_k(G.size(), [&](std::size_t k) {
            return G[k] == theta && a.antecedents == replaced(G, k, {Formula::limp(phi, theta)});
          }))
        return {};
      return fail("limp1 context mismatch");
    }
    case RuleId::LIMP2:
    case RuleId::LIMP3: {
      // Gamma, theta |- phi (x) psi ; |- !!phi (or !!theta)  /  Gamma, phi -o theta |- psi
      const Judgement& a = *P[0];
      const Judgement& b = *P[1];
      if (!a.consequent.is(Kind::Tensor) || !(a.consequent.right() == c)) return fail("limp2/3 pattern mismatch");
      const Formula& phi = a.consequent.left();
      bool ok = exists_k(G.size(), [&](std::size_t k) {
        if (!G[k].is(Kind::Limp) || !(G[k].left() == phi)) return false;
        const Formula& theta = G[k].right();
        if (!(a.antecedents == replaced(G, k, {theta}))) return false;
        const Formula& fin = rule == RuleId::LIMP2 ? phi : theta;
        return b.antecedents.empty() && b.consequent == Formula::neg(Formula::neg(fin));
      });
      if (ok) return {};
      return fail(rule == RuleId::LIMP2 ? "limp2 needs Gamma, theta |- phi (x) psi and |- !!phi"
                                        : "limp3 needs Gamma, theta |- phi (x) psi and |- !!theta");
    }
    case RuleId::ONE:
      if (P[0]->antecedents.empty() &&
          P[0]->consequent == Formula::disj(Formula::one(), Formula::neg(Formula::one())) && G.empty() &&
          c.is(Kind::Bot))
        return {};
      return fail("one needs |- 1 \\/ !1 and concludes |- bot");
    case RuleId::S1a:
    case RuleId::S1b: {
      const Judgement& plain = rule == RuleId::S1a ? *P[0] : C;
      const Judgement& sc = rule == RuleId::S1a ? C : *P[0];
      Rational r1, r2;
      Formula a, b;
      if (plain.antecedents.size() != 1 || sc.antecedents.size() != 1 || !is_scale(sc.antecedents[0], r1, a) ||
          !is_scale(sc.consequent, r2, b))
        return fail("s1 needs phi |- psi and r*phi |- r*psi");
      if (r1 != r2 || sgn(r1) <= 0) return fail("s1 needs one scalar r > 0");
      if (a == plain.antecedents[0] && b == plain.consequent) return {};
      return fail("s1 pattern mismatch");
    }
    default:
      break;
  }

  // axioms of the form |- a o-o b
  Formula a, b, body, body2;
  Rational r, s;
  auto biimp = [&]() { return G.empty() && is_biimp(c, a, b); };
  switch (rule) {
    case RuleId::S2:
      if (biimp() && is_scale(a, r, body) && is_scale(body, s, body2) && b.is(Kind::Scale) && b.body() == body2 &&
          b.coeff() == r * s)
        return {};
      return fail("s2 needs |- r*(s*phi) o-o (rs)*phi");
    case RuleId::S3:
      if (biimp() && b.is(Kind::Scale) && b.coeff() == 1 && b.body() == a) return {};
      return fail("s3 needs |- phi o-o 1*phi");
    case RuleId::S4:
      if (biimp() && is_scale(a, r, body) && !op_of(body.kind()).empty() &&
          b == op_apply(op_of(body.kind()), Formula::scale(r, body.left()), Formula::scale(r, body.right())))
        return {};
      return fail("s4 needs |- r*(phi op psi) o-o r*phi op r*psi");
    case RuleId::S5:
      if (G.empty() && is_scale(c, r, body) && sgn(r) == 0) return {};
      return fail("s5 needs |- 0*phi");
    case RuleId::S6:
      if (biimp() && is_scale(a, r, body) && b.is(Kind::Tensor) && b.left().is(Kind::Scale) &&
          b.right().is(Kind::Scale) && b.left().body() == body && b.right().body() == body &&
          b.left().coeff() + b.right().coeff() == r)
        return {};
      return fail("s6 needs |- (r+s)*phi o-o r*phi (x) s*phi");
    case RuleId::S7:
      if (G.size() == 1 && is_scale(G[0], r, body) && body.is(Kind::Bot) && sgn(r) > 0 && c.is(Kind::Bot)) return {};
      return fail("s7 needs r*bot |- bot with r > 0");
    case RuleId::S8:
      if (biimp() && is_scale(a, r, body) && b.is(Kind::Limp) && b.left().is(Kind::Scale) &&
          b.right().is(Kind::Scale) && b.left().body() == body && b.right().body() == body &&
          r == tsub_q(b.right().coeff(), b.left().coeff()) && P[0]->antecedents.empty() &&
          P[0]->consequent == Formula::neg(Formula::neg(body)))
        return {};
      return fail("s8 needs |- !!phi and concludes |- (s -. r)*phi o-o (r*phi -o s*phi)");
    case RuleId::S9:
    case RuleId::S10: {
      Kind k = rule == RuleId::S9 ? Kind::And : Kind::Or;
      if (biimp() && a.is(k) && a.left().is(Kind::Scale) && a.right().is(Kind::Scale) &&
          a.left().body() == a.right().body() && is_scale(b, r, body) && body == a.left().body()) {
        const Rational& x = a.left().coeff();
        const Rational& y = a.right().coeff();
        Rational want = rule == RuleId::S9 ? (x > y ? x : y) : (x < y ? x : y);
        if (want == r) return {};
      }
      return fail(rule == RuleId::S9 ? "s9 needs |- r*phi /\\ s*phi o-o max(r,s)*phi"
                                     : "s10 needs |- r*phi \\/ s*phi o-o min(r,s)*phi");
    }
    default:
      break;
  }
  return fail("unknown rule");
}

// affine rearrangement: a |- b plus |- !!p premises, concluding c |- d with
// (c - d) - (a - b) a nonnegative constant; every atom whose coefficient
// changes on either side must have a finiteness premise.
Err check_affine(const std::vector<const Judgement*>& P, const Judgement& C) {
  if (P.empty()) return fail("affine needs a premise");
  auto src = affine_form(*P[0]);
  auto dst = affine_form(C);
  if (!src || !dst) return fail("affine premise and conclusion must be affine");
  std::set<std::string> finite;
  for (std::size_t i = 1; i < P.size(); ++i) {
    const Judgement& j = *P[i];
    if (!j.antecedents.empty() || !j.consequent.is_negation() || !j.consequent.left().is_negation() ||
        !j.consequent.left().left().is(Kind::Atom))
      return fail("affine side premises must be |- !!p");
    finite.insert(j.consequent.left().left().name());
  }
  std::set<std::string> atoms;
  for (const auto* side : {&src->first, &src->second, &dst->first, &dst->second})
    for (const auto& [p, c] : side->coeffs) atoms.insert(p);
  auto coeff = [](const AffineSide& s, const std::string& p) {
    auto it = s.coeffs.find(p);
    return it == s.coeffs.end() ? Rational(0) : it->second;
  };
  for (const auto& p : atoms) {
    Rational ds = coeff(src->first, p) - coeff(src->second, p);
    Rational dd = coeff(dst->first, p) - coeff(dst->second, p);
    if (ds != dd) return fail("coefficient of " + p + " differs");
    bool changed = coeff(src->first, p) != coeff(dst->first, p) || coeff(src->second, p) != coeff(dst->second, p);
    if (changed && !finite.count(p)) return fail("cancelling " + p + " needs |- !!" + p);
  }
  Rational ks = src->first.constant - src->second.constant;
  Rational kd = dst->first.constant - dst->second.constant;
  if (kd < ks) return fail("constant slack is negative");
  return {};
}

}  // namespace

const std::vector<RuleId>& primitive_rules() {
  static const std::vector<RuleId> rules = [] {
    std::vector<RuleId> v;
    for (const auto& i : kRules)
      if (i.id != RuleId::HYP && i.id != RuleId::ADMISSIBLE) v.push_back(i.id);
    return v;
  }();
  return rules;
}

std::string rule_name(RuleId r) { return info(r).name; }

std::optional<RuleId> parse_rule_name(std::string_view s) {
  if (s == "totality" || s == "affine") return RuleId::ADMISSIBLE;
  for (const auto& i : kRules)
    if (s == i.name) return i.id;
  return std::nullopt;
}

int rule_arity(RuleId r) { return info(r).arity; }

bool Instantiation::empty() const {
  return formulas.empty() && gamma.empty() && delta.empty() && scalars.empty() && op.empty() && !case1 && !case2;
}

const Formula& Instantiation::formula(const std::string& name) const {
  auto it = formulas.find(name);
  if (it == formulas.end()) throw InstantiationError("missing formula " + name);
  return it->second;
}

const Rational& Instantiation::scalar(const std::string& name) const {
  auto it = scalars.find(name);
  if (it == scalars.end()) throw InstantiationError("missing scalar " + name);
  if (sgn(it->second) < 0) throw InstantiationError("negative scalar " + name);
  return it->second;
}

Inference rule_instance(RuleId rule, const Instantiation& in) {
  auto F = [&](const char* n) { return in.formula(n); };
  auto R = [&](const char* n) { return in.scalar(n); };
  auto ctx = [](Fs g, std::initializer_list<Formula> more) {
    g.insert(g.end(), more.begin(), more.end());
    return g;
  };
  auto nn = [](const Formula& f) { return Formula::neg(Formula::neg(f)); };
  auto sc = [](const Rational& r, const Formula& f) { return Formula::scale(r, f); };
  const Fs& G = in.gamma;
  switch (rule) {
    case RuleId::ID:
      return {{}, jd({F("phi")}, F("phi"))};
    case RuleId::CUT: {
      Fs both = G;
      both.insert(both.end(), in.delta.begin(), in.delta.end());
      return {{jd(G, F("phi")), jd(ctx(in.delta, {F("phi")}), F("psi"))}, jd(both, F("psi"))};
    }
    case RuleId::WEAK:
      return {{jd(G, F("phi"))}, jd(ctx(G, {F("psi")}), F("phi"))};
    case RuleId::PERM: {
      Fs a = ctx(G, {F("phi"), F("psi")}), b = ctx(G, {F("psi"), F("phi")});
      a.insert(a.end(), in.delta.begin(), in.delta.end());
      b.insert(b.end(), in.delta.begin(), in.delta.end());
      return {{jd(a, F("theta"))}, jd(b, F("theta"))};
    }
    case RuleId::TOP:
      return {{}, jd(G, Formula::top())};
    case RuleId::BOT:
      return {{}, jd({Formula::bot()}, F("phi"))};
    case RuleId::AND1:
      return {{jd(ctx(G, {F("phi")}), F("theta"))}, jd(ctx(G, {Formula::conj(F("phi"), F("psi"))}), F("theta"))};
    case RuleId::AND2:
      return {{jd(G, F("phi")), jd(G, F("psi"))}, jd(G, Formula::conj(F("phi"), F("psi")))};
    case RuleId::AND3:
      return {{jd(G, Formula::conj(F("phi"), F("psi")))}, jd(G, F("psi"))};
    case RuleId::OR1:
      return {{jd(ctx(G, {F("phi")}), F("theta")), jd(ctx(G, {F("psi")}), F("theta"))},
              jd(ctx(G, {Formula::disj(F("phi"), F("psi"))}), F("theta"))};
    case RuleId::OR2:
      return {{jd(G, F("phi"))}, jd(G, Formula::disj(F("phi"), F("psi")))};
    case RuleId::OR3:
      return {{jd(ctx(G, {Formula::disj(F("phi"), F("psi"))}), F("theta"))}, jd(ctx(G, {F("psi")}), F("theta"))};
    case RuleId::WEM:
      return {{}, jd({}, Formula::disj(Formula::neg(F("phi")), nn(F("phi"))))};
    case RuleId::TOT:
      return {{}, jd({}, Formula::disj(Formula::limp(F("phi"), F("psi")), Formula::limp(F("psi"), F("phi"))))};
    case RuleId::TENS1a:
      return {{jd(ctx(G, {F("phi"), F("psi")}), F("theta"))}, jd(ctx(G, {Formula::tensor(F("phi"), F("psi"))}), F("theta"))};
    case RuleId::TENS1b:
      return {{jd(ctx(G, {Formula::tensor(F("phi"), F("psi"))}), F("theta"))}, jd(ctx(G, {F("phi"), F("psi")}), F("theta"))};
    case RuleId::TENS2a:
      return {{jd(ctx(G, {Formula::tensor(F("phi"), F("psi"))}), F("theta"))},
              jd(ctx(G, {F("phi")}), Formula::limp(F("psi"), F("theta")))};
    case RuleId::TENS2b:
      return {{jd(ctx(G, {F("phi")}), Formula::limp(F("psi"), F("theta")))},
              jd(ctx(G, {Formula::tensor(F("phi"), F("psi"))}), F("theta"))};
    case RuleId::TENS3:
      return {{jd({Formula::tensor(F("phi"), F("phi"))}, Formula::tensor(F("psi"), F("psi")))}, jd({F("phi")}, F("psi"))};
    case RuleId::LIMP1:
      return {{jd(ctx(G, {Formula::limp(F("phi"), F("theta"))}), F("psi")), jd({F("theta")}, F("phi"))},
              jd(ctx(G, {F("theta")}), Formula::tensor(F("phi"), F("psi")))};
    case RuleId::LIMP2:
    case RuleId::LIMP3:
      return {{jd(ctx(G, {F("theta")}), Formula::tensor(F("phi"), F("psi"))),
               jd({}, nn(rule == RuleId::LIMP2 ? F("phi") : F("theta")))},
              jd(ctx(G, {Formula::limp(F("phi"), F("theta"))}), F("psi"))};
    case RuleId::ONE:
      return {{jd({}, Formula::disj(Formula::one(), Formula::neg(Formula::one())))}, jd({}, Formula::bot())};
    case RuleId::S1a:
    case RuleId::S1b: {
      const Rational& r = R("r");
      if (sgn(r) <= 0) throw InstantiationError("s1 requires r > 0");
      Judgement plain = jd({F("phi")}, F("psi"));
      Judgement scaled = jd({sc(r, F("phi"))}, sc(r, F("psi")));
      if (rule == RuleId::S1a) return {{plain}, scaled};
      return {{scaled}, plain};
    }
    case RuleId::S2:
      return {{}, jd({}, Formula::biimp(sc(R("r"), sc(R("s"), F("phi"))), sc(Rational(R("r") * R("s")), F("phi"))))};
    case RuleId::S3:
      return {{}, jd({}, Formula::biimp(F("phi"), sc(Rational(1), F("phi"))))};
    case RuleId::S4: {
      const Rational& r = R("r");
      return {{},
              jd({}, Formula::biimp(sc(r, op_apply(in.op, F("phi"), F("psi"))),
                                    op_apply(in.op, sc(r, F("phi")), sc(r, F("psi")))))};
    }
    case RuleId::S5:
      return {{}, jd({}, sc(Rational(0), F("phi")))};
    case RuleId::S6:
      return {{},
              jd({}, Formula::biimp(sc(Rational(R("r") + R("s")), F("phi")),
                                    Formula::tensor(sc(R("r"), F("phi")), sc(R("s"), F("phi")))))};
    case RuleId::S7:
      if (sgn(R("r")) <= 0) throw InstantiationError("s7 requires r > 0");
      return {{}, jd({sc(R("r"), Formula::bot())}, Formula::bot())};
    case RuleId::S8:
      return {{jd({}, nn(F("phi")))},
              jd({}, Formula::biimp(sc(tsub_q(R("s"), R("r")), F("phi")),
                                    Formula::limp(sc(R("r"), F("phi")), sc(R("s"), F("phi")))))};
    case RuleId::S9:
    case RuleId::S10: {
      const Rational& r = R("r");
      const Rational& s = R("s");
      Rational m = rule == RuleId::S9 ? (r > s ? r : s) : (r < s ? r : s);
      Formula lat = rule == RuleId::S9 ? Formula::conj(sc(r, F("phi")), sc(s, F("phi")))
                                       : Formula::disj(sc(r, F("phi")), sc(s, F("phi")));
      return {{}, jd({}, Formula::biimp(lat, sc(m, F("phi"))))};
    }
    case RuleId::HYP:
    case RuleId::ADMISSIBLE:
      break;
  }
  throw InstantiationError("rule " + rule_name(rule) + " has no schema instance");
}

bool is_supplementary_pair(const Judgement& a, const Judgement& b) {
  if (!a.antecedents.empty() || !b.antecedents.empty()) return false;
  const Formula& x = a.consequent;
  const Formula& y = b.consequent;
  if (x.is(Kind::Limp) && y.is(Kind::Limp) && x.left() == y.right() && x.right() == y.left()) return true;
  return x.is_negation() && y == Formula::neg(x);
}

Verdict check(const Proof& p, const std::vector<Judgement>& assumptions) {
  if (p.steps.empty()) return {false, std::nullopt, "empty proof"};
  std::set<Judgement> assumed(assumptions.begin(), assumptions.end());
  std::vector<std::set<Judgement>> open(p.steps.size());
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& st = p.steps[i];
    auto reject = [&](const std::string& why) { return Verdict{false, i, why}; };
    std::vector<const Judgement*> prem;
    for (std::size_t k : st.premises) {
      if (k >= i) return reject("premise " + std::to_string(k + 1) + " is not an earlier step");
      prem.push_back(&p.steps[k].conclusion);
    }
    for (std::size_t k : st.premises) open[i].insert(open[k].begin(), open[k].end());
    if (st.rule == RuleId::HYP) {
      if (!st.premises.empty()) return reject("hyp takes no premises");
      if (!assumed.count(st.conclusion)) open[i].insert(st.conclusion);
      continue;
    }
    if (st.rule == RuleId::ADMISSIBLE) {
      if (st.admissible == "totality") {
        if (prem.size() != 2) return reject("totality takes two premises");
        if (!st.inst.case1 || !st.inst.case2) return reject("totality needs case1 and case2");
        if (!is_supplementary_pair(*st.inst.case1, *st.inst.case2)) return reject("cases are not a supplementary pair");
        if (!(*prem[0] == st.conclusion) || !(*prem[1] == st.conclusion))
          return reject("both cases must conclude the step's judgement");
        std::set<Judgement> o = open[st.premises[0]];
        o.erase(*st.inst.case1);
        std::set<Judgement> o2 = open[st.premises[1]];
        o2.erase(*st.inst.case2);
        o.insert(o2.begin(), o2.end());
        open[i] = std::move(o);
        continue;
      }
      if (st.admissible == "affine") {
        if (auto e = check_affine(prem, st.conclusion)) return reject(*e);
        continue;
      }
      return reject("unknown admissible rule '" + st.admissible + "'");
    }
    if (static_cast<int>(prem.size()) != rule_arity(st.rule))
      return reject(rule_name(st.rule) + " takes " + std::to_string(rule_arity(st.rule)) + " premises");
    if (auto e = check_primitive(st.rule, prem, st.conclusion)) return reject(*e);
    if (!st.inst.empty()) {
      Inference inf;
      try {
        inf = rule_instance(st.rule, st.inst);
      } catch (const std::exception& e) {
        return reject(std::string("instantiation: ") + e.what());
      }
      if (!(inf.conclusion == st.conclusion)) return reject("conclusion differs from the instantiated schema");
    }
  }
  if (!open.back().empty())
    return {false, p.steps.size() - 1, "depends on the undischarged assumption " + print(*open.back().begin())};
  return {true, std::nullopt, ""};
}

// --- builder -------------------------------------------------------------------

std::size_t ProofBuilder::add(Judgement j, RuleId r, std::vector<std::size_t> premises, Instantiation inst) {
  proof_.steps.push_back(Step{std::move(j), r, {}, std::move(premises), std::move(inst)});
  return proof_.steps.size() - 1;
}

std::size_t ProofBuilder::admissible(Judgement j, std::string name, std::vector<std::size_t> premises,
                                     Instantiation inst) {
  proof_.steps.push_back(Step{std::move(j), RuleId::ADMISSIBLE, std::move(name), std::move(premises), std::move(inst)});
  return proof_.steps.size() - 1;
}

std::size_t ProofBuilder::append(const Proof& other) {
  std::size_t base = proof_.steps.size();
  for (Step s : other.steps) {
    for (auto& k : s.premises) k += base;
    proof_.steps.push_back(std::move(s));
  }
  return proof_.steps.size() - 1;
}

std::size_t ProofBuilder::hyp(const Judgement& j) { return add(j, RuleId::HYP); }

std::size_t ProofBuilder::id(const Formula& f) { return add(jd({f}, f), RuleId::ID); }

std::size_t ProofBuilder::top(std::vector<Formula> ctx) { return add(jd(std::move(ctx), Formula::top()), RuleId::TOP); }

std::size_t ProofBuilder::weak(std::size_t i, const Formula& f) {
  Judgement j = at(i);
  j.antecedents.push_back(f);
  return add(std::move(j), RuleId::WEAK, {i});
}

std::size_t ProofBuilder::perm(std::size_t i, std::vector<Formula> order) {
  return add(jd(std::move(order), at(i).consequent), RuleId::PERM, {i});
}

std::size_t ProofBuilder::cut(std::size_t left, std::size_t right) {
  const Judgement& a = at(left);
  const Judgement& b = at(right);
  auto it = std::find(b.antecedents.begin(), b.antecedents.end(), a.consequent);
  if (it == b.antecedents.end()) throw std::invalid_argument("cut: formula not among the antecedents");
  Fs ant = a.antecedents;
  Fs rest = removed(b.antecedents, static_cast<std::size_t>(it - b.antecedents.begin()));
  ant.insert(ant.end(), rest.begin(), rest.end());
  return add(jd(std::move(ant), b.consequent), RuleId::CUT, {left, right});
}

std::size_t ProofBuilder::single(std::size_t i) {
  if (at(i).antecedents.empty()) return weak(i, Formula::top());
  while (at(i).antecedents.size() > 1) {
    const Fs& g = at(i).antecedents;
    Fs joined = replaced(removed(g, 1), 0, {Formula::tensor(g[0], g[1])});
    i = add(jd(std::move(joined), at(i).consequent), RuleId::TENS1a, {i});
  }
  return i;
}

std::size_t ProofBuilder::scale(std::size_t i, const Rational& r) {
  if (sgn(r) <= 0) throw std::invalid_argument("scale: r must be positive");
  const Judgement& j = at(i);
  if (j.antecedents.size() != 1) throw std::invalid_argument("scale: needs a single antecedent");
  return add(jd({Formula::scale(r, j.antecedents[0])}, Formula::scale(r, j.consequent)), RuleId::S1a, {i});
}

std::size_t ProofBuilder::tensor_intro(std::size_t i, std::size_t j) {
  if (at(i).antecedents.size() != 1 || at(j).antecedents.size() != 1)
    throw std::invalid_argument("tensor_intro: needs single antecedents");
  Formula a = at(i).antecedents[0], b = at(i).consequent;
  Formula c = at(j).antecedents[0], d = at(j).consequent;
  // c, b -o a |- d ; a |- b  ==>  c, a |- b (x) d
  std::size_t w = weak(j, Formula::limp(b, a));
  std::size_t l = add(jd({c, a}, Formula::tensor(b, d)), RuleId::LIMP1, {w, i});
  std::size_t p = perm(l, {a, c});
  return add(jd({Formula::tensor(a, c)}, Formula::tensor(b, d)), RuleId::TENS1a, {p});
}

std::size_t ProofBuilder::combine(std::size_t i, std::size_t j, const Rational& r, const Rational& s) {
  std::size_t a = scale(single(i), r);
  std::size_t b = scale(single(j), s);
  return tensor_intro(a, b);
}

Proof combine(const Proof& p1, const Proof& p2, const Rational& r, const Rational& s) {
  ProofBuilder b;
  std::size_t i = b.append(p1);
  std::size_t j = b.append(p2);
  b.combine(i, j, r, s);
  return b.take();
}

Proof by_cases(const Proof& p1, const Proof& p2, const Judgement& case1, const Judgement& case2) {
  if (!is_supplementary_pair(case1, case2)) throw std::invalid_argument("by_cases: not a supplementary pair");
  if (p1.steps.empty() || p2.steps.empty()) throw std::invalid_argument("by_cases: empty branch");
  if (!(p1.conclusion() == p2.conclusion())) throw std::invalid_argument("by_cases: branches conclude differently");
  ProofBuilder b;
  std::size_t i = b.append(p1);
  std::size_t j = b.append(p2);
  Instantiation inst;
  inst.case1 = case1;
  inst.case2 = case2;
  b.admissible(p1.conclusion(), "totality", {i, j}, std::move(inst));
  return b.take();
}

// --- text format ------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

Fs parse_list(const std::string& s) {
  if (trim(s).empty()) return {};
  // a list is the antecedent side of a judgement
  return parse_judgement(s + " |- top").antecedents;
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  bool quoted = false;
  std::string cur;
  for (char c : s) {
    if (c == '`') quoted = !quoted;
    if (!quoted && c == '(') ++depth;
    if (!quoted && c == ')') --depth;
    if (!quoted && depth == 0 && c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string print_list(const Fs& fs) {
  std::string out;
  for (std::size_t i = 0; i < fs.size(); ++i) out += (i ? ", " : "") + print(fs[i]);
  return out;
}

}  // namespace

Proof parse_proof(std::string_view text) {
  Proof p;
  std::map<long, std::size_t> index;  // step label -> position
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    // strip comments outside backquotes
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '`') quoted = !quoted;
      if (!quoted && line[k] == '#') {
        line.resize(k);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ProofParseError("expected 'n: judgement BY rule'", lineno);
    long label;
    try {
      std::size_t used = 0;
      label = std::stol(line.substr(0, colon), &used);
      if (trim(line.substr(0, colon)).size() != used) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ProofParseError("bad step number", lineno);
    }
    if (index.count(label)) throw ProofParseError("duplicate step number " + std::to_string(label), lineno);
    std::string rest = line.substr(colon + 1);
    auto by = rest.rfind(" BY ");
    if (by == std::string::npos) throw ProofParseError("missing BY", lineno);
    Step st;
    try {
      st.conclusion = parse_judgement(rest.substr(0, by));
    } catch (const ParseError& e) {
      throw ProofParseError(e.message(), lineno);
    }
    std::string tail = trim(rest.substr(by + 4));
    std::string inst_text;
    if (auto lb = tail.find('{'); lb != std::string::npos) {
      auto rb = tail.rfind('}');
      if (rb == std::string::npos || rb < lb) throw ProofParseError("unterminated instantiation", lineno);
      inst_text = tail.substr(lb + 1, rb - lb - 1);
      tail = trim(tail.substr(0, lb));
    }
    std::string prem_text;
    if (auto lb = tail.find('['); lb != std::string::npos) {
      auto rb = tail.find(']', lb);
      if (rb == std::string::npos) throw ProofParseError("unterminated premise list", lineno);
      prem_text = tail.substr(lb + 1, rb - lb - 1);
      tail = trim(tail.substr(0, lb));
    }
    auto rule = parse_rule_name(tail);
    if (!rule) throw ProofParseError("unknown rule '" + tail + "'", lineno);
    st.rule = *rule;
    if (st.rule == RuleId::ADMISSIBLE) st.admissible = tail;
    for (const auto& item : split_top(prem_text, ',')) {
      std::string t = trim(item);
      if (t.empty()) continue;
      long ref;
      try {
        ref = std::stol(t);
      } catch (const std::exception&) {
        throw ProofParseError("bad premise reference '" + t + "'", lineno);
      }
      auto it = index.find(ref);
      if (it == index.end()) throw ProofParseError("premise " + t + " is not an earlier step", lineno);
      st.premises.push_back(it->second);
    }
    try {
      for (const auto& item : split_top(inst_text, ';')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        auto eq = t.find(":=");
        if (eq == std::string::npos) throw ProofParseError("instantiation entries are 'name := value'", lineno);
        std::string name = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 2));
        if (name == "Gamma")
          st.inst.gamma = parse_list(value);
        else if (name == "Delta")
          st.inst.delta = parse_list(value);
        else if (name == "r" || name == "s")
          st.inst.scalars[name] = parse_rational(value);
        else if (name == "op")
          st.inst.op = value;
        else if (name == "case1")
          st.inst.case1 = parse_judgement(value);
        else if (name == "case2")
          st.inst.case2 = parse_judgement(value);
        else
          st.inst.formulas[name] = parse_formula(value);
      }
    } catch (const ParseError& e) {
      throw ProofParseError(e.message(), lineno);
    } catch (const std::invalid_argument& e) {
      throw ProofParseError(e.what(), lineno);
    }
    index[label] = p.steps.size();
    p.steps.push_back(std::move(st));
  }
  return p;
}

std::string print_proof(const Proof& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& st = p.steps[i];
    os << i + 1 << ": " << print(st.conclusion) << " BY "
       << (st.rule == RuleId::ADMISSIBLE ? st.admissible : rule_name(st.rule));
    if (!st.premises.empty()) {
      os << " [";
      for (std::size_t k = 0; k < st.premises.size(); ++k) os << (k ? ", " : "") << st.premises[k] + 1;
      os << "]";
    }
    const Instantiation& in = st.inst;
    if (!in.empty()) {
      std::vector<std::string> parts;
      for (const auto& [n, f] : in.formulas) parts.push_back(n + " := " + print(f));
      if (!in.gamma.empty()) parts.push_back("Gamma := " + print_list(in.gamma));
      if (!in.delta.empty()) parts.push_back("Delta := " + print_list(in.delta));
      for (const auto& [n, r] : in.scalars) parts.push_back(n + " := " + to_string(r));
      if (!in.op.empty()) parts.push_back("op := " + in.op);
      if (in.case1) parts.push_back("case1 := " + print(*in.case1));
      if (in.case2) parts.push_back("case2 := " + print(*in.case2));
      os << " {";
      for (std::size_t k = 0; k < parts.size(); ++k) os << (k ? "; " : "") << parts[k];
      os << "}";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace llq
