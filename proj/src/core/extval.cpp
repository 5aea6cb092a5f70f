#include "llq/extval.hpp"

#include <cctype>
#include <ostream>

namespace llq {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : s.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

ExtValue::ExtValue(long v) : q_(v) {
  if (v < 0) throw std::invalid_argument("negative quantale value");
}

ExtValue::ExtValue(Rational q) : q_(std::move(q)) {
  q_.canonicalize();
  if (sgn(q_) < 0) throw std::invalid_argument("negative quantale value " + llq::to_string(q_));
}

ExtValue ExtValue::infinity() {
  ExtValue v;
  v.inf_ = true;
  return v;
}

const Rational& ExtValue::finite() const {
  if (inf_) throw std::logic_error("ExtValue::finite() on infinity");
  return q_;
}

bool operator==(const ExtValue& a, const ExtValue& b) {
  if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
  return a.q_ == b.q_;
}

std::strong_ordering operator<=>(const ExtValue& a, const ExtValue& b) {
  if (a.inf_ || b.inf_) return a.inf_ <=> b.inf_;
  int c = cmp(a.q_, b.q_);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

ExtValue parse_extvalue(std::string_view text) {
  if (text == "inf") return ExtValue::infinity();
  Rational q = parse_rational(text);
  if (sgn(q) < 0) throw std::invalid_argument("negative value '" + std::string(text) + "'");
  return ExtValue(q);
}

std::string to_string(const ExtValue& v) {
  return v.is_infinite() ? std::string("inf") : to_string(v.finite());
}

std::ostream& operator<<(std::ostream& os, const ExtValue& v) { return os << to_string(v); }

ExtValue add(const ExtValue& a, const ExtValue& b) {
  if (a.is_infinite() || b.is_infinite()) return ExtValue::infinity();
  return ExtValue(Rational(a.finite() + b.finite()));
}

ExtValue tsub(const ExtValue& a, const ExtValue& b) {
  if (a <= b) return ExtValue::zero();
  if (a.is_infinite()) return ExtValue::infinity();
  return ExtValue(Rational(a.finite() - b.finite()));
}

ExtValue scale(const Rational& r, const ExtValue& a) {
  if (sgn(r) < 0) throw std::invalid_argument("negative scalar " + to_string(r));
  if (sgn(r) == 0) return ExtValue::zero();
  if (a.is_infinite()) return ExtValue::infinity();
  return ExtValue(Rational(r * a.finite()));
}

ExtValue min(const ExtValue& a, const ExtValue& b) { return a <= b ? a : b; }
ExtValue max(const ExtValue& a, const ExtValue& b) { return a <= b ? b : a; }
bool leq(const ExtValue& a, const ExtValue& b) { return a <= b; }

}  // namespace llq
