#include "llq/linarith.hpp"

#include <algorithm>
#include <sstream>

namespace llq {

void AffineConstraint::canonicalize() {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    it->second.canonicalize();
    if (sgn(it->second) == 0)
      it = coeffs.erase(it);
    else
      ++it;
  }
  constant.canonicalize();
}

Rational AffineConstraint::value(const Point& x) const {
  Rational v = constant;
  for (const auto& [name, c] : coeffs) {
    auto it = x.find(name);
    if (it != x.end()) v += c * it->second;
  }
  return v;
}

bool AffineConstraint::holds(const Point& x) const {
  int s = sgn(value(x));
  return rel == Rel::GT ? s > 0 : s >= 0;
}

std::string to_string(const AffineConstraint& c) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, k] : c.coeffs) {
    if (first)
      os << (sgn(k) < 0 ? "-" : "");
    else
      os << (sgn(k) < 0 ? " - " : " + ");
    os << to_string(Rational(abs(k))) << "*" << name;
    first = false;
  }
  if (first)
    os << to_string(c.constant);
  else if (sgn(c.constant) != 0)
    os << (sgn(c.constant) < 0 ? " - " : " + ") << to_string(Rational(abs(c.constant)));
  os << (c.rel == Rel::GT ? " > 0" : " >= 0");
  return os.str();
}

AffineConstraint LinSystem::row(std::size_t i) const {
  if (i < constraints.size()) return constraints[i];
  std::size_t k = i - constraints.size();
  if (k >= nonneg.size()) throw std::out_of_range("LinSystem::row index " + std::to_string(i));
  auto it = nonneg.begin();
  std::advance(it, static_cast<long>(k));
  AffineConstraint c;
  c.coeffs[*it] = 1;
  return c;
}

std::set<std::string> LinSystem::variables() const {
  std::set<std::string> vs = nonneg;
  for (const auto& c : constraints)
    for (const auto& [name, k] : c.coeffs)
      if (sgn(k) != 0) vs.insert(name);
  return vs;
}

bool LinSystem::holds(const Point& x) const {
  for (std::size_t i = 0; i < row_count(); ++i)
    if (!row(i).holds(x)) return false;
  return true;
}

std::string to_string(const LinSystem& s) {
  std::string out;
  for (std::size_t i = 0; i < s.row_count(); ++i) out += to_string(s.row(i)) + "\n";
  return out;
}

AffineConstraint expand(const LinSystem& s, const Combination& c) {
  AffineConstraint out;
  for (const auto& [i, t] : c.multipliers) {
    if (sgn(t) == 0) continue;
    AffineConstraint r = s.row(i);
    for (const auto& [name, k] : r.coeffs) out.coeffs[name] += t * k;
    out.constant += t * r.constant;
    if (r.rel == Rel::GT) out.rel = Rel::GT;
  }
  out.canonicalize();
  return out;
}

namespace {

using Prov = std::map<std::size_t, Rational>;

struct Row {
  std::map<std::string, Rational> a;
  Rational d;
  bool strict = false;
  Prov prov;
};

void scale_row(Row& r, const Rational& k) {
  for (auto& [n, c] : r.a) c *= k;
  r.d *= k;
  for (auto& [i, t] : r.prov) t *= k;
}

// Leading coefficient of magnitude 1, so parallel rows compare equal.
void normalize(Row& r) {
  for (auto it = r.a.begin(); it != r.a.end();) {
    if (sgn(it->second) == 0)
      it = r.a.erase(it);
    else
      ++it;
  }
  if (r.a.empty()) return;
  Rational lead = abs(r.a.begin()->second);
  if (lead != 1) scale_row(r, Rational(1 / lead));
}

Row combine(const Row& p, const Rational& lp, const Row& n, const Rational& ln) {
  Row out;
  for (const auto& [name, c] : p.a) out.a[name] += lp * c;
  for (const auto& [name, c] : n.a) out.a[name] += ln * c;
  out.d = lp * p.d + ln * n.d;
  out.strict = p.strict || n.strict;
  for (const auto& [i, t] : p.prov) out.prov[i] += lp * t;
  for (const auto& [i, t] : n.prov) out.prov[i] += ln * t;
  normalize(out);
  return out;
}

bool stronger_or_equal(const Row& x, const Row& y) {
  // same coefficients: smaller constant is tighter
  int c = cmp(x.d, y.d);
  if (c != 0) return c < 0;
  return x.strict || !y.strict;
}

// Drop duplicates and rows dominated by a parallel row, and trivially
// true constant rows. Order of the survivors is deterministic.
std::vector<Row> prune(std::vector<Row> rows) {
  std::map<std::map<std::string, Rational>, std::size_t> best;
  std::vector<Row> out;
  for (auto& r : rows) {
    if (r.a.empty() && (sgn(r.d) > 0 || (sgn(r.d) == 0 && !r.strict))) continue;
    auto it = best.find(r.a);
    if (it == best.end()) {
      best.emplace(r.a, out.size());
      out.push_back(std::move(r));
    } else if (!stronger_or_equal(out[it->second], r)) {
      out[it->second] = std::move(r);
    }
  }
  return out;
}

std::vector<Row> eliminate(const std::vector<Row>& rows, const std::string& v) {
  std::vector<const Row*> pos, neg;
  std::vector<Row> out;
  for (const auto& r : rows) {
    auto it = r.a.find(v);
    if (it == r.a.end())
      out.push_back(r);
    else if (sgn(it->second) > 0)
      pos.push_back(&r);
    else
      neg.push_back(&r);
  }
  for (const Row* p : pos)
    for (const Row* n : neg) {
      Rational lp = -n->a.at(v);
      Rational ln = p->a.at(v);
      Row c = combine(*p, lp, *n, ln);
      c.a.erase(v);
      out.push_back(std::move(c));
    }
  return prune(std::move(out));
}

std::optional<std::string> pick_variable(const std::vector<Row>& rows) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : rows)
    for (const auto& [name, c] : r.a) (sgn(c) > 0 ? counts[name].first : counts[name].second)++;
  std::optional<std::string> best;
  std::size_t best_cost = 0;
  for (const auto& [name, pn] : counts) {
    std::size_t cost = pn.first * pn.second;
    if (!best || cost < best_cost) {
      best = name;
      best_cost = cost;
    }
  }
  return best;
}

std::vector<Row> materialize(const LinSystem& s) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < s.row_count(); ++i) {
    AffineConstraint c = s.row(i);
    Row r;
    r.a = c.coeffs;
    r.d = c.constant;
    r.strict = c.rel == Rel::GT;
    r.prov[i] = 1;
    normalize(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

bool contradictory(const Row& r) { return r.a.empty() && (sgn(r.d) < 0 || (sgn(r.d) == 0 && r.strict)); }

InfeasibilityCertificate certificate_from(const Row& r) {
  InfeasibilityCertificate cert;
  for (const auto& [i, t] : r.prov)
    if (sgn(t) != 0) cert.combination.multipliers[i] = t;
  cert.combination.slack = -r.d;
  return cert;
}

Rational choose_value(const std::vector<Row>& rows, const std::string& v, const Point& fixed) {
  std::optional<Rational> lo, hi;
  bool lo_strict = false, hi_strict = false;
  for (const auto& r : rows) {
    auto it = r.a.find(v);
    if (it == r.a.end()) continue;
    Rational rest = r.d;
    for (const auto& [name, c] : r.a)
      if (name != v) {
        auto f = fixed.find(name);
        if (f != fixed.end()) rest += c * f->second;
      }
    Rational bound = -rest / it->second;
    if (sgn(it->second) > 0) {
      if (!lo || bound > *lo || (bound == *lo && r.strict)) {
        lo_strict = (lo && bound == *lo) ? (lo_strict || r.strict) : r.strict;
        lo = bound;
      }
    } else {
      if (!hi || bound < *hi || (bound == *hi && r.strict)) {
        hi_strict = (hi && bound == *hi) ? (hi_strict || r.strict) : r.strict;
        hi = bound;
      }
    }
  }
  auto ok = [&](const Rational& x) {
    if (lo && (x < *lo || (lo_strict && x == *lo))) return false;
    if (hi && (x > *hi || (hi_strict && x == *hi))) return false;
    return true;
  };
  const Rational zero(0);
  if (ok(zero)) return zero;
  if (lo && !lo_strict && ok(*lo)) return *lo;
  if (hi && !hi_strict && ok(*hi)) return *hi;
  if (lo && hi) return Rational((*lo + *hi) / 2);
  if (lo) return Rational(*lo + 1);
  if (hi) return Rational(*hi - 1);
  return zero;
}

}  // namespace

EliminationResult fm_eliminate(const LinSystem& s, const std::string& v) {
  std::vector<Row> rows;
  const std::size_t n = s.constraints.size();
  for (std::size_t i = 0; i < n; ++i) {
    Row r;
    r.a = s.constraints[i].coeffs;
    r.d = s.constraints[i].constant;
    r.strict = s.constraints[i].rel == Rel::GT;
    r.prov[i] = 1;
    normalize(r);
    rows.push_back(std::move(r));
  }
  if (auto it = s.nonneg.find(v); it != s.nonneg.end()) {
    Row r;
    r.a[v] = 1;
    r.prov[n + static_cast<std::size_t>(std::distance(s.nonneg.begin(), it))] = 1;
    rows.push_back(std::move(r));
  }
  EliminationResult res;
  for (auto& r : eliminate(prune(std::move(rows)), v)) {
    AffineConstraint c;
    c.coeffs = r.a;
    c.constant = r.d;
    c.rel = r.strict ? Rel::GT : Rel::GEQ;
    c.canonicalize();
    res.system.constraints.push_back(std::move(c));
    res.provenance.push_back(std::move(r.prov));
  }
  res.system.nonneg = s.nonneg;
  res.system.nonneg.erase(v);
  return res;
}

bool verify_infeasibility(const LinSystem& s, const InfeasibilityCertificate& cert) {
  const Combination& c = cert.combination;
  if (sgn(c.slack) < 0) return false;
  for (const auto& [i, t] : c.multipliers)
    if (i >= s.row_count() || sgn(t) < 0) return false;
  AffineConstraint e = expand(s, c);
  if (!e.coeffs.empty()) return false;
  if (e.constant + c.slack != 0) return false;
  return sgn(c.slack) > 0 || e.rel == Rel::GT;
}

FeasibilityResult feasible(const LinSystem& s) {
  std::vector<Row> rows = prune(materialize(s));
  std::vector<std::pair<std::string, std::vector<Row>>> stages;
  for (;;) {
    for (const auto& r : rows)
      if (contradictory(r)) {
        InfeasibilityCertificate cert = certificate_from(r);
        if (!verify_infeasibility(s, cert)) throw std::logic_error("linarith: certificate failed re-verification");
        return cert;
      }
    auto v = pick_variable(rows);
    if (!v) break;
    std::vector<Row> next = eliminate(rows, *v);
    stages.emplace_back(*v, std::move(rows));
    rows = std::move(next);
  }
  Point x;
  for (const auto& name : s.variables()) x[name] = 0;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) x[it->first] = choose_value(it->second, it->first, x);
  if (!s.holds(x)) throw std::logic_error("linarith: back-substituted point violates the system");
  return x;
}

bool verify_combination(const LinSystem& hyps, const AffineConstraint& goal, const Combination& c) {
  if (sgn(c.slack) < 0) return false;
  for (const auto& [i, t] : c.multipliers)
    if (i >= hyps.row_count() || sgn(t) < 0) return false;
  AffineConstraint e = expand(hyps, c);
  AffineConstraint g = goal;
  g.canonicalize();
  return e.coeffs == g.coeffs && e.constant + c.slack == g.constant;
}

EntailResult entails(const LinSystem& hyps, const AffineConstraint& goal) {
  LinSystem sys = hyps;
  const std::size_t n = hyps.constraints.size();
  AffineConstraint neg;
  for (const auto& [name, k] : goal.coeffs) neg.coeffs[name] = -k;
  neg.constant = -goal.constant;
  neg.rel = Rel::GT;
  neg.canonicalize();
  sys.constraints.push_back(neg);

  FeasibilityResult fr = feasible(sys);
  if (auto* p = std::get_if<Point>(&fr)) return Countermodel{*p};

  const Combination& raw = std::get<InfeasibilityCertificate>(fr).combination;
  Rational mu = 0;
  Combination rest;
  for (const auto& [i, t] : raw.multipliers) {
    if (i == n)
      mu = t;
    else
      rest.multipliers[i < n ? i : i - 1] = t;
  }
  rest.slack = raw.slack;
  if (sgn(mu) == 0) {
    InfeasibilityCertificate cert{rest};
    if (!verify_infeasibility(hyps, cert)) throw std::logic_error("linarith: hypothesis certificate failed");
    return HypsInfeasible{cert};
  }
  Combination out;
  for (const auto& [i, t] : rest.multipliers) out.multipliers[i] = t / mu;
  out.slack = rest.slack / mu;
  if (!verify_combination(hyps, goal, out)) throw std::logic_error("linarith: combination failed re-verification");
  return Entailed{out};
}

}  // namespace llq
