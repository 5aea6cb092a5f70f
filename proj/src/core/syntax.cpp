#include "llq/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace llq {

struct Formula::Node {
  Kind kind = Kind::Top;
  std::string name;
  Rational coeff;
  // null for leaves
  Formula a{std::shared_ptr<const Node>()};
  Formula b{std::shared_ptr<const Node>()};
  std::size_t size = 1;
};

struct Formula::Access {
  static std::shared_ptr<const Node> leaf(Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
  }
  static Formula binary(Kind k, Formula a, Formula b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->size = 1 + a.size() + b.size();
    n->a = std::move(a);
    n->b = std::move(b);
    return Formula(std::shared_ptr<const Node>(std::move(n)));
  }
};

Formula::Formula() : node_(Formula::top().node_) {}
Formula::Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Formula Formula::bot() {
  static const auto n = Access::leaf(Kind::Bot);
  return Formula(n);
}
Formula Formula::top() {
  static const auto n = Access::leaf(Kind::Top);
  return Formula(n);
}
Formula Formula::one() {
  static const auto n = Access::leaf(Kind::One);
  return Formula(n);
}

Formula Formula::atom(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty proposition name");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->name = std::move(name);
  return Formula(n);
}

Formula Formula::conj(Formula a, Formula b) { return Access::binary(Kind::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return Access::binary(Kind::Or, std::move(a), std::move(b)); }
Formula Formula::tensor(Formula a, Formula b) {
  return Access::binary(Kind::Tensor, std::move(a), std::move(b));
}
Formula Formula::limp(Formula a, Formula b) { return Access::binary(Kind::Limp, std::move(a), std::move(b)); }

Formula Formula::scale(Rational r, Formula body) {
  r.canonicalize();
  if (sgn(r) < 0) throw std::invalid_argument("negative scalar " + to_string(r));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->coeff = std::move(r);
  n->size = 1 + body.size();
  n->a = std::move(body);
  return Formula(n);
}

Formula Formula::neg(Formula a) { return limp(std::move(a), bot()); }
Formula Formula::biimp(Formula a, Formula b) { return conj(limp(a, b), limp(b, a)); }

Formula Formula::ntimes(unsigned n, Formula a) {
  if (n == 0) return top();
  Formula acc = a;
  for (unsigned i = 1; i < n; ++i) acc = tensor(a, acc);
  return acc;
}

Formula Formula::constant(Rational r) { return scale(std::move(r), one()); }

Formula Formula::tensor_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return top();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = tensor(acc, parts[i]);
  return acc;
}

Kind Formula::kind() const { return node_->kind; }

const std::string& Formula::name() const {
  if (node_->kind != Kind::Atom) throw std::logic_error("Formula::name on non-atom");
  return node_->name;
}
const Rational& Formula::coeff() const {
  if (node_->kind != Kind::Scale) throw std::logic_error("Formula::coeff on non-scale");
  return node_->coeff;
}
const Formula& Formula::left() const {
  switch (node_->kind) {
    case Kind::And:
    case Kind::Or:
    case Kind::Tensor:
    case Kind::Limp:
    case Kind::Scale:
      return node_->a;
    default:
      throw std::logic_error("Formula::left on a leaf");
  }
}
const Formula& Formula::right() const {
  switch (node_->kind) {
    case Kind::And:
    case Kind::Or:
    case Kind::Tensor:
    case Kind::Limp:
      return node_->b;
    default:
      throw std::logic_error("Formula::right on a non-binary node");
  }
}

bool Formula::is_negation() const { return kind() == Kind::Limp && right().is(Kind::Bot); }
std::size_t Formula::size() const { return node_->size; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  switch (x.kind) {
    case Kind::Bot:
    case Kind::Top:
    case Kind::One:
      return std::strong_ordering::equal;
    case Kind::Atom:
      return x.name <=> y.name;
    case Kind::Scale: {
      int c = cmp(x.coeff, y.coeff);
      if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
      return x.a <=> y.a;
    }
    default:
      if (auto c = x.a <=> y.a; c != 0) return c;
      return x.b <=> y.b;
  }
}

std::strong_ordering operator<=>(const Judgement& a, const Judgement& b) {
  if (auto c = std::lexicographical_compare_three_way(a.antecedents.begin(), a.antecedents.end(),
                                                      b.antecedents.begin(), b.antecedents.end());
      c != 0)
    return c;
  return a.consequent <=> b.consequent;
}

// --- levels ------------------------------------------------------------------

std::string to_string(Level l) {
  switch (l) {
    case Level::L:
      return "L";
    case Level::L1:
      return "L1";
    case Level::L1star:
      return "L1star";
  }
  return "?";
}

Level parse_level(std::string_view s) {
  if (s == "L") return Level::L;
  if (s == "L1") return Level::L1;
  if (s == "L1star" || s == "L1*") return Level::L1star;
  throw std::invalid_argument("unknown logic level '" + std::string(s) + "'");
}

Level level_of(const Formula& f) {
  switch (f.kind()) {
    case Kind::Bot:
    case Kind::Top:
    case Kind::Atom:
      return Level::L;
    case Kind::One:
      return Level::L1;
    case Kind::Scale: {
      // n*1 with n natural is the numeral sugar of L1.
      if (f.body().is(Kind::One) && f.coeff().get_den() == 1) return Level::L1;
      return Level::L1star;
    }
    default:
      return std::max(level_of(f.left()), level_of(f.right()));
  }
}

Level level_of(const Judgement& j) {
  Level l = level_of(j.consequent);
  for (const auto& a : j.antecedents) l = std::max(l, level_of(a));
  return l;
}

void require_level(const Judgement& j, Level level) {
  if (level_of(j) > level)
    throw LevelError("judgement '" + print(j) + "' needs logic " + to_string(level_of(j)) +
                     " but " + to_string(level) + " was requested");
}

// --- lexer -------------------------------------------------------------------

ParseError::ParseError(const std::string& msg, std::size_t offset, std::size_t line, std::size_t column)
    : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      msg_(msg),
      offset_(offset),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, Bot, Top, Inf, Tensor, Limp, Biimp, And, Or, Bang, Star, LParen, RParen, Comma, Turnstile, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", pos_});
        return out;
      }
      out.push_back(next());
    }
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw error(src_, msg, at); }

  static ParseError error(std::string_view src, const std::string& msg, std::size_t at) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < src.size(); ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return ParseError(msg, at, line, col);
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  Token next() {
    const std::size_t at = pos_;
    auto take = [&](Tok k, std::size_t n) {
      pos_ += n;
      return Token{k, std::string(src_.substr(at, n)), at};
    };
    if (starts("(x)")) return take(Tok::Tensor, 3);
    if (starts("-o")) return take(Tok::Limp, 2);
    if (starts("o-o")) return take(Tok::Biimp, 3);
    if (starts("/\\")) return take(Tok::And, 2);
    if (starts("\\/")) return take(Tok::Or, 2);
    if (starts("|-")) return take(Tok::Turnstile, 2);
    char c = src_[pos_];
    switch (c) {
      case '!':
        return take(Tok::Bang, 1);
      case '*':
        return take(Tok::Star, 1);
      case '(':
        return take(Tok::LParen, 1);
      case ')':
        return take(Tok::RParen, 1);
      case ',':
        return take(Tok::Comma, 1);
      default:
        break;
    }
    if (c == '`') {
      auto end = src_.find('`', pos_ + 1);
      if (end == std::string_view::npos || src_.substr(pos_ + 1, end - pos_ - 1).find('\n') != std::string_view::npos)
        fail("unterminated quoted identifier", at);
      std::string name(src_.substr(pos_ + 1, end - pos_ - 1));
      if (name.empty()) fail("empty quoted identifier", at);
      pos_ = end + 1;
      return Token{Tok::Ident, name, at};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t e = pos_;
      while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
      // p/q, but not the start of `/\`
      if (e + 1 < src_.size() && src_[e] == '/' && std::isdigit(static_cast<unsigned char>(src_[e + 1]))) {
        ++e;
        while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
      }
      return take(Tok::Number, e - pos_);
    }
    if (c == '-') fail("negative numbers are not allowed", at);
    if (ident_start(c)) {
      std::size_t e = pos_;
      while (e < src_.size() && ident_char(src_[e])) ++e;
      std::string_view word = src_.substr(pos_, e - pos_);
      Tok k = Tok::Ident;
      if (word == "bot") k = Tok::Bot;
      else if (word == "top") k = Tok::Top;
      else if (word == "inf") k = Tok::Inf;
      return take(k, e - pos_);
    }
    fail(std::string("unexpected character '") + c + "'", at);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(Lexer(src).run()) {}

  Formula formula() { return limp(); }

  Judgement judgement() {
    Judgement j;
    if (peek().kind != Tok::Turnstile) {
      j.antecedents.push_back(formula());
      while (peek().kind == Tok::Comma) {
        advance();
        j.antecedents.push_back(formula());
      }
    }
    expect(Tok::Turnstile, "'|-'");
    j.consequent = formula();
    return j;
  }

  void finish() {
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& advance() { return toks_[i_++]; }
  [[noreturn]] void fail(const std::string& msg) const { throw Lexer::error(src_, msg, peek().offset); }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    advance();
  }

  Formula limp() {
    Formula lhs = lattice();
    if (peek().kind == Tok::Limp) {
      advance();
      return Formula::limp(lhs, limp());
    }
    if (peek().kind == Tok::Biimp) {
      advance();
      return Formula::biimp(lhs, limp());
    }
    return lhs;
  }

  Formula lattice() {
    Formula acc = tens();
    for (;;) {
      if (peek().kind == Tok::And) {
        advance();
        acc = Formula::conj(acc, tens());
      } else if (peek().kind == Tok::Or) {
        advance();
        acc = Formula::disj(acc, tens());
      } else {
        return acc;
      }
    }
  }

  Formula tens() {
    Formula acc = unary();
    while (peek().kind == Tok::Tensor) {
      advance();
      acc = Formula::tensor(acc, unary());
    }
    return acc;
  }

  Formula unary() {
    const Token& t = peek();
    if (t.kind == Tok::Bang) {
      advance();
      return Formula::neg(unary());
    }
    if (t.kind == Tok::Inf) fail("infinite scalar or constant 'inf' is not a formula");
    if (t.kind == Tok::Number && toks_[i_ + 1].kind == Tok::Star) {
      Rational r = parse_rational(advance().text);
      advance();  // '*'
      return Formula::scale(r, unary());
    }
    // (r)*a
    if (t.kind == Tok::LParen && toks_[i_ + 1].kind == Tok::Number && toks_[i_ + 2].kind == Tok::RParen &&
        toks_[i_ + 3].kind == Tok::Star) {
      advance();
      Rational r = parse_rational(advance().text);
      advance();
      advance();
      return Formula::scale(r, unary());
    }
    return atom();
  }

  Formula atom() {
    const Token t = advance();
    switch (t.kind) {
      case Tok::Bot:
        return Formula::bot();
      case Tok::Top:
        return Formula::top();
      case Tok::Ident:
        return Formula::atom(t.text);
      case Tok::Number:
        if (t.text == "1") return Formula::one();
        return Formula::constant(parse_rational(t.text));
      case Tok::LParen: {
        Formula f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        --i_;
        fail(t.kind == Tok::End ? std::string("unexpected end of input") : "unexpected '" + t.text + "'");
    }
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text) {
  Parser p(text);
  Formula f = p.formula();
  p.finish();
  return f;
}

Judgement parse_judgement(std::string_view text) {
  Parser p(text);
  Judgement j = p.judgement();
  p.finish();
  return j;
}

std::vector<Judgement> parse_theory(std::string_view text) {
  std::vector<Judgement> out;
  std::size_t start = 0, line_no = 1;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    auto hash = line.find('#');
    std::string_view body = line.substr(0, hash);
    if (body.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(parse_judgement(line));
      } catch (const ParseError& e) {
        throw ParseError(e.message(), start + e.offset(),
                         line_no, e.column());
      }
    }
    start = end + 1;
    ++line_no;
  }
  return out;
}

// --- printer -----------------------------------------------------------------

namespace {

enum Prec { kLimp = 1, kLattice = 2, kTensor = 3, kUnary = 4, kAtom = 5 };

bool plain_identifier(const std::string& s) {
  if (s.empty() || !ident_start(s[0])) return false;
  if (s == "bot" || s == "top" || s == "inf") return false;
  for (char c : s)
    if (!ident_char(c)) return false;
  return true;
}

std::string print_at(const Formula& f, int ctx);

std::string wrap(std::string s, int own, int ctx) { return own < ctx ? "(" + s + ")" : s; }

bool is_biimp(const Formula& f) {
  if (!f.is(Kind::And) || !f.left().is(Kind::Limp) || !f.right().is(Kind::Limp)) return false;
  return f.left().left() == f.right().right() && f.left().right() == f.right().left();
}

std::string print_at(const Formula& f, int ctx) {
  switch (f.kind()) {
    case Kind::Bot:
      return "bot";
    case Kind::Top:
      return "top";
    case Kind::One:
      return "1";
    case Kind::Atom:
      return plain_identifier(f.name()) ? f.name() : "`" + f.name() + "`";
    case Kind::Scale:
      return wrap(to_string(f.coeff()) + "*" + print_at(f.body(), kUnary), kUnary, ctx);
    case Kind::Limp:
      if (f.is_negation()) return wrap("!" + print_at(f.left(), kUnary), kUnary, ctx);
      return wrap(print_at(f.left(), kLattice) + " -o " + print_at(f.right(), kLimp), kLimp, ctx);
    case Kind::And:
      if (is_biimp(f))
        return wrap(print_at(f.left().left(), kLattice) + " o-o " + print_at(f.left().right(), kLimp), kLimp, ctx);
      return wrap(print_at(f.left(), kLattice) + " /\\ " + print_at(f.right(), kTensor), kLattice, ctx);
    case Kind::Or:
      return wrap(print_at(f.left(), kLattice) + " \\/ " + print_at(f.right(), kTensor), kLattice, ctx);
    case Kind::Tensor:
      return wrap(print_at(f.left(), kTensor) + " (x) " + print_at(f.right(), kUnary), kTensor, ctx);
  }
  return "?";
}

}  // namespace

std::string print(const Formula& f) { return print_at(f, kLimp); }

std::string print(const Judgement& j) {
  std::string s;
  for (std::size_t i = 0; i < j.antecedents.size(); ++i) {
    if (i) s += ", ";
    s += print(j.antecedents[i]);
  }
  s += s.empty() ? "|- " : " |- ";
  return s + print(j.consequent);
}

void collect_atoms(const Formula& f, std::vector<std::string>& out) {
  switch (f.kind()) {
    case Kind::Atom:
      out.push_back(f.name());
      break;
    case Kind::Bot:
    case Kind::Top:
    case Kind::One:
      break;
    case Kind::Scale:
      collect_atoms(f.body(), out);
      break;
    default:
      collect_atoms(f.left(), out);
      collect_atoms(f.right(), out);
  }
}

std::vector<std::string> atoms_of(const std::vector<Judgement>& js) {
  std::vector<std::string> out;
  for (const auto& j : js) {
    for (const auto& a : j.antecedents) collect_atoms(a, out);
    collect_atoms(j.consequent, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Judgement internalize(const Judgement& j) {
  return Judgement{{}, Formula::limp(Formula::tensor_all(j.antecedents), j.consequent)};
}

}  // namespace llq
