#include "llq/qalg.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace llq {

bool operator<(const Term& a, const Term& b) {
  if (a.head != b.head) return a.head < b.head;
  if (a.variable != b.variable) return a.variable;
  return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

std::string print(const Term& t) {
  if (t.args.empty()) return t.head;
  std::string s = t.head + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? ", " : "") + print(t.args[i]);
  return s + ")";
}

namespace {

struct TermParser {
  std::string_view src;
  const Signature& sig;
  std::size_t pos = 0;

  void skip() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " in term '" + std::string(src) + "'", pos, 1, pos + 1);
  }
  std::string ident() {
    skip();
    std::size_t a = pos;
    while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' || src[pos] == '\''))
      ++pos;
    if (a == pos) fail("expected identifier");
    return std::string(src.substr(a, pos - a));
  }
  Term term() {
    std::string h = ident();
    skip();
    auto it = sig.ops.find(h);
    if (it == sig.ops.end()) {
      if (pos < src.size() && src[pos] == '(') fail("'" + h + "' is not an operation");
      return Term::var(h);
    }
    std::vector<Term> args;
    if (it->second > 0) {
      if (pos >= src.size() || src[pos] != '(') fail("expected '(' after " + h);
      ++pos;
      for (unsigned i = 0; i < it->second; ++i) {
        if (i) {
          skip();
          if (pos >= src.size() || src[pos] != ',') fail(h + " expects " + std::to_string(it->second) + " arguments");
          ++pos;
        }
        args.push_back(term());
      }
      skip();
      if (pos >= src.size() || src[pos] != ')') fail("expected ')'");
      ++pos;
    } else if (pos < src.size() && src[pos] == '(') {
      ++pos;
      skip();
      if (pos >= src.size() || src[pos] != ')') fail(h + " takes no arguments");
      ++pos;
    }
    return Term::app(h, std::move(args));
  }
};

Formula eps_formula(const Rational& e) { return Formula::constant(e); }

Judgement bound(const Rational& e, const Term& s, const Term& t) { return Judgement{{eps_formula(e)}, eq_formula(s, t)}; }

// Cartesian power of the universe, n-fold.
void tuples(const std::vector<Term>& u, unsigned n, std::vector<Term>& cur, const std::function<void()>& f) {
  if (cur.size() == n) {
    f();
    return;
  }
  for (const auto& t : u) {
    cur.push_back(t);
    tuples(u, n, cur, f);
    cur.pop_back();
  }
}

}  // namespace

Term parse_term(std::string_view text, const Signature& sig) {
  TermParser p{text, sig};
  Term t = p.term();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

std::string eq_atom(const Term& s, const Term& t) { return print(s) + "=" + print(t); }
Formula eq_formula(const Term& s, const Term& t) { return Formula::atom(eq_atom(s, t)); }

std::string to_string(QRule r) {
  switch (r) {
    case QRule::REFL: return "refl";
    case QRule::SYMM: return "symm";
    case QRule::TRIANG: return "triang";
    case QRule::MAX: return "max";
    case QRule::NEXP: return "nexp";
  }
  return "?";
}

std::string describe(const QInstance& q) {
  std::string s = to_string(q.rule) + ": ";
  for (std::size_t i = 0; i < q.premises.size(); ++i) s += (i ? " ; " : "") + print(q.premises[i]);
  return s + (q.premises.empty() ? "" : " ") + "=> " + print(q.conclusion);
}

HypStream ContStream::hyps() const {
  return [s = s, t = t, e = eps](std::size_t i) {
    return bound(e + Rational(1, static_cast<long>(i)), s, t);
  };
}

Judgement ContStream::conclusion() const { return bound(eps, s, t); }

RuleSet instantiate_rules(const Signature& sig, const std::vector<Term>& terms, const std::vector<Rational>& eps) {
  RuleSet rs;
  std::set<Term> universe(terms.begin(), terms.end());
  std::vector<Term> u(universe.begin(), universe.end());
  std::set<Rational> es(eps.begin(), eps.end());
  for (const auto& t : u) rs.instances.push_back({QRule::REFL, {}, Judgement{{}, eq_formula(t, t)}});
  for (const auto& s : u)
    for (const auto& t : u)
      for (const auto& e : es) {
        rs.instances.push_back({QRule::SYMM, {bound(e, s, t)}, bound(e, t, s)});
        for (const auto& e2 : es)
          if (sgn(e2) > 0)
            rs.instances.push_back(
                {QRule::MAX, {bound(e, s, t)}, Judgement{{Formula::tensor(eps_formula(e), eps_formula(e2))}, eq_formula(s, t)}});
        rs.cont.push_back(ContStream{s, t, e});
      }
  for (const auto& t : u)
    for (const auto& m : u)
      for (const auto& s : u)
        for (const auto& e : es)
          for (const auto& e2 : es)
            rs.instances.push_back({QRule::TRIANG,
                                    {bound(e, t, m), bound(e2, m, s)},
                                    Judgement{{Formula::tensor(eps_formula(e), eps_formula(e2))}, eq_formula(t, s)}});
  for (const auto& [op, n] : sig.ops) {
    if (n == 0) continue;
    std::vector<Term> lhs, rhs;
    tuples(u, n, lhs, [&] {
      Term fl = Term::app(op, lhs);
      if (!universe.count(fl)) return;
      tuples(u, n, rhs, [&] {
        Term fr = Term::app(op, rhs);
        if (!universe.count(fr)) return;
        for (const auto& e : es) {
          QInstance q{QRule::NEXP, {}, bound(e, fl, fr)};
          for (unsigned i = 0; i < n; ++i) q.premises.push_back(bound(e, lhs[i], rhs[i]));
          rs.instances.push_back(std::move(q));
        }
      });
    });
  }
  return rs;
}

DistanceTable parse_distances(std::string_view text) {
  DistanceTable explicit_;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string a, b, v, extra;
    if (!(ls >> a)) continue;
    if (!(ls >> b >> v) || (ls >> extra))
      throw ParseError("expected 'point point distance'", 0, lineno, 1);
    explicit_[{a, b}] = parse_extvalue(v);
  }
  DistanceTable d = explicit_;
  for (const auto& [k, v] : explicit_) d.emplace(std::pair{k.second, k.first}, v);
  return d;
}

Model metric_model(const std::map<Term, std::string>& points, const DistanceTable& d, bool require_metric) {
  std::set<std::string> used;
  for (const auto& [t, p] : points) used.insert(p);
  auto dist = [&](const std::string& a, const std::string& b) -> ExtValue {
    auto it = d.find({a, b});
    if (it != d.end()) return it->second;
    if (a == b) return ExtValue::zero();
    throw MetricError("no distance between " + a + " and " + b);
  };
  if (require_metric)
    for (const auto& a : used)
      for (const auto& b : used) {
        if (a == b && !dist(a, a).is_zero()) throw MetricError("d(" + a + ", " + a + ") is not 0");
        if (!(dist(a, b) == dist(b, a))) throw MetricError("d(" + a + ", " + b + ") != d(" + b + ", " + a + ")");
      }
  Model m;
  for (const auto& [s, ps] : points)
    for (const auto& [t, pt] : points) m.set(eq_atom(s, t), dist(ps, pt));
  return m;
}

bool QReport::ok() const {
  if (!failures.empty()) return false;
  for (const auto& c : cont)
    if (c.check.verdict != InferenceVerdict::Satisfies) return false;
  return true;
}

QReport check_rules(const Model& m, const RuleSet& rules, std::size_t cont_budget) {
  QReport r;
  for (const auto& q : rules.instances) {
    ++r.checked;
    ++r.per_rule[q.rule];
    if (satisfies_all(m, q.premises) && !satisfies(m, q.conclusion))
      r.failures.push_back({q, "premises hold, conclusion fails"});
  }
  for (const auto& c : rules.cont)
    r.cont.push_back({c, check_inference_model(m, c.hyps(), c.conclusion(), cont_budget)});
  return r;
}

QAlgInput parse_qalg(std::string_view text) {
  QAlgInput in;
  std::map<std::string, Term> named;
  std::set<Term> seen;
  std::istringstream src{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto add_term = [&](const Term& t) {
    if (seen.insert(t).second) in.terms.push_back(t);
  };
  auto term_of = [&](const std::string& s) {
    std::string k = s;
    while (!k.empty() && std::isspace(static_cast<unsigned char>(k.back()))) k.pop_back();
    while (!k.empty() && std::isspace(static_cast<unsigned char>(k.front()))) k.erase(k.begin());
    if (auto it = named.find(k); it != named.end()) return it->second;
    return parse_term(k, in.sig);
  };
  while (std::getline(src, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    std::string rest;
    std::getline(ls, rest);
    auto fail = [&](const std::string& msg) -> void { throw ParseError(msg, 0, lineno, 1); };
    try {
      if (kw == "op") {
        auto slash = rest.find('/');
        if (slash == std::string::npos) fail("expected 'op name/arity'");
        std::string name = rest.substr(0, slash);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        in.sig.ops[name] = static_cast<unsigned>(std::stoul(rest.substr(slash + 1)));
      } else if (kw == "term") {
        auto eq = rest.find('=');
        if (eq == std::string::npos) fail("expected 'term name = term'");
        std::string name = rest.substr(0, eq);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        Term t = term_of(rest.substr(eq + 1));
        named[name] = t;
        add_term(t);
      } else if (kw == "interp") {
        auto sp = rest.find_last_not_of(" \t");
        auto start = rest.find_last_of(" \t", sp);
        if (sp == std::string::npos || start == std::string::npos) fail("expected 'interp term point'");
        Term t = term_of(rest.substr(0, start));
        in.points[t] = rest.substr(start + 1, sp - start);
        add_term(t);
      } else if (kw == "eps") {
        std::istringstream es(rest);
        std::string e;
        while (es >> e) in.eps.push_back(parse_rational(e));
      } else {
        fail("unknown directive '" + kw + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(e.message(), 0, lineno, e.column());
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed " + kw + " line", 0, lineno, 1);
    }
  }
  for (const auto& t : in.terms)
    if (!in.points.count(t)) throw ParseError("term " + print(t) + " has no interpretation", 0, lineno, 1);
  return in;
}

}  // namespace llq
