#include "oscdecay/funcspec.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace oscdecay {

namespace {

// ---------------------------------------------------------------------------
// Polynomial expressions

template <class C>
using TermMap = std::map<Monomial, C>;

struct ExprCursor {
  std::string_view s;
  std::size_t pos = 0;
  int line0 = 1;  // position of the expression in the enclosing document
  int col0 = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line0, col0 + static_cast<int>(pos));
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  // The UTF-8 minus sign U+2212 is accepted as '-'.
  bool at_minus() {
    skip_ws();
    if (pos < s.size() && s[pos] == '-') return true;
    return s.substr(pos, 3) == "\xE2\x88\x92";
  }
  void eat_minus() { pos += (s[pos] == '-') ? 1 : 3; }
  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
};

std::int64_t parse_int(ExprCursor& cur) {
  cur.skip_ws();
  std::size_t start = cur.pos;
  while (cur.pos < cur.s.size() && std::isdigit(static_cast<unsigned char>(cur.s[cur.pos]))) ++cur.pos;
  if (start == cur.pos) cur.fail("expected integer");
  if (cur.pos - start > 15) cur.fail("integer too large");
  return std::stoll(std::string(cur.s.substr(start, cur.pos - start)));
}

// Decimal literal, converted exactly to a rational.
Rational decimal_to_rational(std::string_view lit, const ExprCursor& cur) {
  std::string mant;
  std::int64_t exp10 = 0;
  std::size_t i = 0;
  bool dot = false;
  for (; i < lit.size(); ++i) {
    char c = lit[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mant += c;
      if (dot) --exp10;
    } else if (c == '.') {
      dot = true;
    } else {
      break;
    }
  }
  if (i < lit.size()) {
    std::string_view ex = lit.substr(i + 1);
    if (ex.size() > 6) cur.fail("exponent too large: " + std::string(lit));
    exp10 += std::stoll(std::string(ex));
  }
  while (mant.size() > 1 && mant.front() == '0') mant.erase(mant.begin());
  while (exp10 < 0 && mant.size() > 1 && mant.back() == '0') {
    mant.pop_back();
    ++exp10;
  }
  if (mant.size() > 17 || exp10 > 17 || exp10 < -17) cur.fail("coefficient not exactly representable: " + std::string(lit));
  std::int64_t num = std::stoll(mant);
  std::int64_t p = 1;
  for (std::int64_t k = 0; k < (exp10 < 0 ? -exp10 : exp10); ++k) p *= 10;
  if (exp10 >= 0) {
    if (num != 0 && p > std::numeric_limits<std::int64_t>::max() / num) cur.fail("coefficient too large");
    return Rational(num * p);
  }
  return Rational(num, p);
}

template <class C>
C number_from(std::string_view lit, const ExprCursor& cur) {
  if constexpr (std::is_same_v<C, Rational>) {
    return decimal_to_rational(lit, cur);
  } else {
    return std::strtod(std::string(lit).c_str(), nullptr);
  }
}

template <class C>
bool is_zero_coef(const C& c) {
  return c == C(0);
}

template <class C>
TermMap<C> tm_mul(const TermMap<C>& a, const TermMap<C>& b) {
  TermMap<C> r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Monomial m{ma.ex + mb.ex, ma.ey + mb.ey};
      r[m] += ca * cb;
      if (is_zero_coef(r[m])) r.erase(m);
    }
  return r;
}

template <class C>
void tm_add(TermMap<C>& a, const TermMap<C>& b, int sign) {
  for (const auto& [m, c] : b) {
    a[m] += sign > 0 ? c : C(0) - c;
    if (is_zero_coef(a[m])) a.erase(m);
  }
}

template <class C>
class PolyParser {
 public:
  PolyParser(ExprCursor& cur, bool allow_x, bool allow_y) : cur_(cur), allow_x_(allow_x), allow_y_(allow_y) {}

  TermMap<C> parse_top() {
    if (cur_.done()) cur_.fail("empty polynomial");
    TermMap<C> acc;
    std::vector<Monomial> bare;  // single-monomial summands, for duplicate detection
    int sign = 1;
    if (cur_.at_minus()) {
      cur_.eat_minus();
      sign = -1;
    } else {
      cur_.eat('+');
    }
    while (true) {
      TermMap<C> t = term();
      if (t.size() == 1) {
        const Monomial& m = t.begin()->first;
        for (const auto& b : bare)
          if (b == m) throw SemanticError("duplicate monomial " + mono_name(m));
        bare.push_back(m);
      }
      tm_add(acc, t, sign);
      if (cur_.at_minus()) {
        cur_.eat_minus();
        sign = -1;
      } else if (cur_.eat('+')) {
        sign = 1;
      } else {
        break;
      }
    }
    if (!cur_.done()) cur_.fail("unexpected character");
    return acc;
  }

 private:
  static std::string mono_name(const Monomial& m) {
    return "x^" + to_string(m.ex) + "*y^" + to_string(m.ey);
  }

  TermMap<C> expr() {
    TermMap<C> acc;
    int sign = 1;
    if (cur_.at_minus()) {
      cur_.eat_minus();
      sign = -1;
    } else {
      cur_.eat('+');
    }
    while (true) {
      tm_add(acc, term(), sign);
      if (cur_.at_minus()) {
        cur_.eat_minus();
        sign = -1;
      } else if (cur_.eat('+')) {
        sign = 1;
      } else {
        break;
      }
    }
    return acc;
  }

  bool starts_factor() {
    cur_.skip_ws();
    if (cur_.pos >= cur_.s.size()) return false;
    char c = cur_.s[cur_.pos];
    return c == '(' || c == 'x' || c == 'y' || std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  TermMap<C> term() {
    TermMap<C> acc = unary();
    while (true) {
      if (cur_.eat('*')) {
        acc = tm_mul(acc, unary());
      } else if (cur_.eat('/')) {
        TermMap<C> d = unary();
        if (d.size() != 1 || d.begin()->first != Monomial{}) cur_.fail("division by a non-constant");
        C inv = C(1) / d.begin()->second;
        for (auto& [m, c] : acc) c *= inv;
      } else if (starts_factor()) {
        acc = tm_mul(acc, unary());
      } else {
        break;
      }
    }
    return acc;
  }

  TermMap<C> unary() {
    if (cur_.at_minus()) {
      cur_.eat_minus();
      TermMap<C> t = unary();
      for (auto& [m, c] : t) c = C(0) - c;
      return t;
    }
    if (cur_.eat('+')) return unary();
    return power();
  }

  Rational exponent() {
    if (cur_.eat('(')) {
      std::int64_t p = parse_int(cur_);
      std::int64_t q = 1;
      if (cur_.eat('/')) q = parse_int(cur_);
      if (q == 0) cur_.fail("zero denominator in exponent");
      if (!cur_.eat(')')) cur_.fail("expected ')' in exponent");
      return Rational(p, q);
    }
    return Rational(parse_int(cur_));
  }

  TermMap<C> power() {
    TermMap<C> base = atom();
    if (!cur_.eat('^')) return base;
    Rational e = exponent();
    if (base.size() == 1 && base.begin()->second == C(1)) {
      Monomial m = base.begin()->first;
      return TermMap<C>{{Monomial{m.ex * e, m.ey * e}, C(1)}};
    }
    if (is_integer(e)) {
      if (e.numerator() > 64) cur_.fail("exponent too large");
      TermMap<C> r{{Monomial{}, C(1)}};
      for (std::int64_t k = 0; k < e.numerator(); ++k) r = tm_mul(r, base);
      return r;
    }
    if (base.size() != 1 || base.begin()->second != C(1)) cur_.fail("fractional power of a non-monomial");
    Monomial m = base.begin()->first;
    return TermMap<C>{{Monomial{m.ex * e, m.ey * e}, C(1)}};
  }

  TermMap<C> atom() {
    cur_.skip_ws();
    if (cur_.pos >= cur_.s.size()) cur_.fail("unexpected end of polynomial");
    char c = cur_.s[cur_.pos];
    if (c == '(') {
      ++cur_.pos;
      TermMap<C> e = expr();
      if (!cur_.eat(')')) cur_.fail("expected ')'");
      return e;
    }
    if (c == 'x' || c == 'y') {
      if ((c == 'x' && !allow_x_) || (c == 'y' && !allow_y_)) cur_.fail(std::string("variable '") + c + "' not allowed here");
      ++cur_.pos;
      return TermMap<C>{{c == 'x' ? Monomial{1, 0} : Monomial{0, 1}, C(1)}};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = cur_.pos;
      while (cur_.pos < cur_.s.size() &&
             (std::isdigit(static_cast<unsigned char>(cur_.s[cur_.pos])) || cur_.s[cur_.pos] == '.'))
        ++cur_.pos;
      if (cur_.pos < cur_.s.size() && (cur_.s[cur_.pos] == 'e' || cur_.s[cur_.pos] == 'E')) {
        std::size_t save = cur_.pos;
        ++cur_.pos;
        if (cur_.pos < cur_.s.size() && (cur_.s[cur_.pos] == '-' || cur_.s[cur_.pos] == '+')) ++cur_.pos;
        if (cur_.pos < cur_.s.size() && std::isdigit(static_cast<unsigned char>(cur_.s[cur_.pos]))) {
          while (cur_.pos < cur_.s.size() && std::isdigit(static_cast<unsigned char>(cur_.s[cur_.pos]))) ++cur_.pos;
        } else {
          cur_.pos = save;
        }
      }
      std::string_view lit = cur_.s.substr(start, cur_.pos - start);
      if (lit == ".") cur_.fail("malformed number");
      C v = number_from<C>(lit, cur_);
      TermMap<C> r;
      if (!is_zero_coef(v)) r[Monomial{}] = v;
      return r;
    }
    cur_.fail(std::string("unexpected character '") + c + "'");
  }

  ExprCursor& cur_;
  bool allow_x_;
  bool allow_y_;
};

BivariatePoly parse_poly_at(std::string_view text, int line, int col) {
  ExprCursor cur{text, 0, line, col};
  PolyParser<Rational> p(cur, true, true);
  TermMap<Rational> m = p.parse_top();
  for (const auto& [mono, c] : m)
    if (mono.ex < 0 || mono.ey < 0) throw SemanticError("negative exponent");
  return BivariatePoly::from_map(m);
}

CurveSpec parse_curve_at(std::string_view text, int line, int col) {
  ExprCursor cur{text, 0, line, col};
  cur.skip_ws();
  if (cur.pos >= text.size()) cur.fail("empty curve");
  char lhs = text[cur.pos];
  if (lhs != 'x' && lhs != 'y') cur.fail("curve must start with 'y =' or 'x ='");
  ++cur.pos;
  if (!cur.eat('=')) cur.fail("expected '='");
  std::size_t comma = text.find(',', cur.pos);
  if (comma == std::string_view::npos) cur.fail("expected ', x > 0' style half selector");
  ExprCursor sub{text.substr(0, comma), cur.pos, line, col};
  PolyParser<double> pp(sub, lhs == 'y', lhs == 'x');
  TermMap<double> hm = pp.parse_top();
  cur.pos = comma + 1;
  cur.skip_ws();
  char var = cur.pos < text.size() ? text[cur.pos] : '\0';
  char other = lhs == 'y' ? 'x' : 'y';
  if (var != other) cur.fail(std::string("expected half selector on '") + other + "'");
  ++cur.pos;
  int half = 0;
  if (cur.eat('>'))
    half = +1;
  else if (cur.eat('<'))
    half = -1;
  else
    cur.fail("expected '>' or '<'");
  if (parse_int(cur) != 0) cur.fail("half selector must compare with 0");
  if (!cur.done()) cur.fail("unexpected trailing text in curve");

  CurveSpec c;
  c.axis = lhs == 'y' ? CurveSpec::Axis::YofX : CurveSpec::Axis::XofY;
  c.half = half;
  Rational top{1};
  for (const auto& [mono, coef] : hm) {
    Rational q = lhs == 'y' ? mono.ex : mono.ey;
    if (q < 1) throw SemanticError("boundary curve needs h(0) = 0 with exponents >= 1: " + std::string(text));
    c.h.terms.push_back({q, coef});
    top = std::max(top, q);
  }
  c.h.truncation_order = top;
  c.h.normalize();
  return c;
}

// ---------------------------------------------------------------------------
// Document tokenizer

enum class Tok { Ident, Number, String, LBrace, RBrace, LParen, RParen, Eq, Comma, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    skip();
    Token t{Tok::End, "", line_, col_};
    if (pos_ >= s_.size()) return t;
    char c = s_[pos_];
    auto single = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance();
      return t;
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '=': return single(Tok::Eq);
      case ',': return single(Tok::Comma);
      default: break;
    }
    if (c == '"') {
      advance();
      t.kind = Tok::String;
      t.line = line_;
      t.col = col_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\n') throw ParseError("unterminated string", line_, col_);
        t.text += s_[pos_];
        advance();
      }
      if (pos_ >= s_.size()) throw ParseError("unterminated string", t.line, t.col);
      advance();
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::Ident;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        t.text += s_[pos_];
        advance();
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      t.kind = Tok::Number;
      while (pos_ < s_.size()) {
        char d = s_[pos_];
        bool exp_sign = (d == '-' || d == '+') && !t.text.empty() && (t.text.back() == 'e' || t.text.back() == 'E');
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' || exp_sign ||
            (t.text.empty() && (d == '-' || d == '+'))) {
          t.text += d;
          advance();
        } else {
          break;
        }
      }
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  MultiplierSpec parse() {
    MultiplierSpec spec;
    bool have_region = false;
    bool have_amp = false;
    bool have_base = false;
    while (tok_.kind != Tok::End) {
      Token kw = expect(Tok::Ident, "block keyword");
      if (kw.text == "factor") {
        spec.factors.push_back(factor_block());
      } else if (kw.text == "region") {
        if (have_region) fail(kw, "duplicate region block");
        spec.region = region_block();
        have_region = true;
      } else if (kw.text == "amplitude") {
        if (have_amp) fail(kw, "duplicate amplitude block");
        spec.amplitude = amplitude_block();
        have_amp = true;
      } else if (kw.text == "base") {
        if (have_base) fail(kw, "duplicate base");
        expect(Tok::Eq, "'='");
        expect(Tok::LParen, "'('");
        spec.x0 = number();
        expect(Tok::Comma, "','");
        spec.y0 = number();
        expect(Tok::RParen, "')'");
        have_base = true;
      } else {
        fail(kw, "unknown block '" + kw.text + "'");
      }
    }
    if (!have_region) throw ParseError("missing region block", tok_.line, tok_.col);
    validate_region(spec.region);
    return spec;
  }

 private:
  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.col); }

  Token expect(Tok k, const char* what) {
    if (tok_.kind != k) fail(tok_, std::string("expected ") + what);
    Token t = tok_;
    tok_ = lex_.next();
    return t;
  }

  void skip_comma() {
    if (tok_.kind == Tok::Comma) tok_ = lex_.next();
  }

  double number() {
    Token t = expect(Tok::Number, "number");
    char* end = nullptr;
    double v = std::strtod(t.text.c_str(), &end);
    if (end == t.text.c_str() || *end != '\0' || !std::isfinite(v)) fail(t, "malformed number '" + t.text + "'");
    return v;
  }

  Token key() { return expect(Tok::Ident, "field name"); }

  Factor factor_block() {
    expect(Tok::LBrace, "'{'");
    std::optional<BivariatePoly> poly;
    std::optional<double> gamma;
    while (tok_.kind != Tok::RBrace) {
      Token k = key();
      expect(Tok::Eq, "'='");
      if (k.text == "poly") {
        Token s = expect(Tok::String, "quoted polynomial");
        poly = parse_poly_at(s.text, s.line, s.col);
        if (poly->is_zero()) throw SemanticError("zero polynomial factor");
      } else if (k.text == "gamma") {
        gamma = number();
      } else {
        fail(k, "unknown factor field '" + k.text + "'");
      }
      skip_comma();
    }
    Token close = expect(Tok::RBrace, "'}'");
    if (!poly) fail(close, "factor without poly");
    if (!gamma) fail(close, "factor without gamma");
    return Factor{*poly, *gamma};
  }

  SectorRegion sector_block() {
    expect(Tok::LBrace, "'{'");
    std::optional<CurveSpec> lower, upper;
    bool inside = true;
    while (tok_.kind != Tok::RBrace) {
      Token k = key();
      expect(Tok::Eq, "'='");
      if (k.text == "lower" || k.text == "upper") {
        Token s = expect(Tok::String, "quoted curve");
        (k.text == "lower" ? lower : upper) = parse_curve_at(s.text, s.line, s.col);
      } else if (k.text == "side") {
        Token v = expect(Tok::Ident, "'in' or 'out'");
        if (v.text == "in")
          inside = true;
        else if (v.text == "out")
          inside = false;
        else
          fail(v, "side must be 'in' or 'out'");
      } else {
        fail(k, "unknown sector field '" + k.text + "'");
      }
      skip_comma();
    }
    Token close = expect(Tok::RBrace, "'}'");
    if (!lower || !upper) fail(close, "sector needs lower and upper curves");
    return SectorRegion{*lower, *upper, inside};
  }

  RegionE region_block() {
    expect(Tok::LBrace, "'{'");
    std::optional<double> disk, radius;
    std::vector<SectorRegion> sectors;
    while (tok_.kind != Tok::RBrace) {
      Token k = key();
      if (k.text == "sector") {
        sectors.push_back(sector_block());
      } else if (k.text == "disk" || k.text == "radius") {
        expect(Tok::Eq, "'='");
        (k.text == "disk" ? disk : radius) = number();
      } else {
        fail(k, "unknown region field '" + k.text + "'");
      }
      skip_comma();
    }
    Token close = expect(Tok::RBrace, "'}'");
    RegionE r;
    if (disk) {
      if (!sectors.empty() || radius) fail(close, "disk region cannot have sectors");
      r.kind = DiskRegion{*disk};
    } else {
      if (sectors.empty()) fail(close, "region needs 'disk = R' or sector blocks");
      if (!radius) fail(close, "sector region needs 'radius = R'");
      r.kind = SectorsRegion{std::move(sectors), *radius};
    }
    return r;
  }

  Amplitude amplitude_block() {
    expect(Tok::LBrace, "'{'");
    Amplitude a = ConstantAmplitude{};
    while (tok_.kind != Tok::RBrace) {
      Token k = key();
      expect(Tok::Eq, "'='");
      double v = number();
      if (!(v > 0)) throw SemanticError("bump radius must be positive");
      if (k.text == "bump")
        a = BumpAmplitude{v};
      else if (k.text == "product_bump")
        a = ProductBumpAmplitude{v};
      else
        fail(k, "unknown amplitude field '" + k.text + "'");
      skip_comma();
    }
    expect(Tok::RBrace, "'}'");
    return a;
  }

  Lexer lex_;
  Token tok_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

BivariatePoly parse_poly(std::string_view text) {
  BivariatePoly p = parse_poly_at(text, 1, 1);
  if (p.is_zero()) throw SemanticError("zero polynomial");
  return p;
}

CurveSpec parse_curve(std::string_view text) { return parse_curve_at(text, 1, 1); }

MultiplierSpec parse_spec(std::string_view text) { return SpecParser(text).parse(); }

std::string serialize(const MultiplierSpec& spec) {
  std::ostringstream os;
  for (const auto& f : spec.factors)
    os << "factor { poly = \"" << f.f.to_string() << "\", gamma = " << fmt(f.gamma) << " }\n";
  if (auto d = std::get_if<DiskRegion>(&spec.region.kind)) {
    os << "region { disk = " << fmt(d->radius) << " }\n";
  } else {
    const auto& s = std::get<SectorsRegion>(spec.region.kind);
    os << "region {\n";
    for (const auto& sec : s.sectors)
      os << "  sector { lower = \"" << sec.lower.to_string() << "\", upper = \"" << sec.upper.to_string()
         << "\", side = " << (sec.inside ? "in" : "out") << " }\n";
    os << "  radius = " << fmt(s.radius) << "\n}\n";
  }
  if (auto b = std::get_if<BumpAmplitude>(&spec.amplitude)) os << "amplitude { bump = " << fmt(b->r0) << " }\n";
  if (auto b = std::get_if<ProductBumpAmplitude>(&spec.amplitude))
    os << "amplitude { product_bump = " << fmt(b->r0) << " }\n";
  if (spec.x0 != 0.0 || spec.y0 != 0.0) os << "base = (" << fmt(spec.x0) << ", " << fmt(spec.y0) << ")\n";
  return os.str();
}

}  // namespace oscdecay
