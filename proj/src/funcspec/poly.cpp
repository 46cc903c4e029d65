#include "oscdecay/funcspec.hpp"
#include "oscdecay/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace oscdecay {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

std::int64_t floor_of(const Rational& q) {
  std::int64_t n = q.numerator();
  std::int64_t d = q.denominator();
  std::int64_t f = n / d;
  if ((n % d != 0) && (n < 0)) --f;
  return f;
}

std::int64_t ceil_of(const Rational& q) { return -floor_of(-q); }

double rpow(double base, const Rational& q) {
  if (q == 0) return 1.0;
  if (is_integer(q)) {
    std::int64_t n = q.numerator();
    double r = 1.0;
    double b = base;
    bool neg = n < 0;
    std::uint64_t e = static_cast<std::uint64_t>(neg ? -n : n);
    while (e) {
      if (e & 1u) r *= b;
      b *= b;
      e >>= 1u;
    }
    return neg ? 1.0 / r : r;
  }
  return std::pow(std::fabs(base), to_double(q));
}

RealPoly RealPoly::constant(double c) {
  RealPoly p;
  p.add_term({0, 0}, c);
  return p;
}

RealPoly RealPoly::monomial(double c, Rational ex, Rational ey) {
  RealPoly p;
  p.add_term({ex, ey}, c);
  return p;
}

void RealPoly::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double RealPoly::eval(double x, double y) const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += c * rpow(x, m.ex) * rpow(y, m.ey);
  return s;
}

RealPoly RealPoly::operator+(const RealPoly& o) const {
  RealPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

RealPoly RealPoly::operator-(const RealPoly& o) const { return *this + o * -1.0; }

RealPoly RealPoly::operator*(const RealPoly& o) const {
  RealPoly r;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term({ma.ex + mb.ex, ma.ey + mb.ey}, ca * cb);
  return r;
}

RealPoly RealPoly::operator*(double s) const {
  RealPoly r;
  if (s == 0.0) return r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
  return r;
}

RealPoly RealPoly::pow(unsigned n) const {
  RealPoly r = constant(1.0);
  RealPoly b = *this;
  while (n) {
    if (n & 1u) r = r * b;
    n >>= 1u;
    if (n) b = b * b;
  }
  return r;
}

RealPoly RealPoly::cleaned(double rel_tol) const {
  double mx = 0.0;
  for (const auto& [m, c] : terms_) mx = std::max(mx, std::fabs(c));
  RealPoly r;
  for (const auto& [m, c] : terms_)
    if (std::fabs(c) > rel_tol * mx) r.terms_.emplace(m, c);
  return r;
}

Rational RealPoly::order() const {
  Rational best = terms_.begin()->first.total();
  for (const auto& [m, c] : terms_) best = std::min(best, m.total());
  return best;
}

Rational RealPoly::degree() const {
  Rational best = terms_.begin()->first.total();
  for (const auto& [m, c] : terms_) best = std::max(best, m.total());
  return best;
}

RealPoly RealPoly::leading_form() const {
  RealPoly r;
  if (terms_.empty()) return r;
  Rational o = order();
  for (const auto& [m, c] : terms_)
    if (m.total() == o) r.terms_.emplace(m, c);
  return r;
}

std::int64_t RealPoly::ramification() const {
  std::int64_t n = 1;
  for (const auto& [m, c] : terms_) {
    n = std::lcm(n, m.ex.denominator());
    n = std::lcm(n, m.ey.denominator());
  }
  return n;
}

bool RealPoly::integer_in_y() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return is_integer(t.first.ey); });
}

bool RealPoly::integer_in_x() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return is_integer(t.first.ex); });
}

RealPoly RealPoly::derivative(unsigned l, unsigned m) const {
  RealPoly r;
  for (const auto& [mono, c] : terms_) {
    double coef = c;
    Rational ex = mono.ex;
    Rational ey = mono.ey;
    for (unsigned k = 0; k < l && coef != 0.0; ++k) {
      coef *= to_double(ex);
      ex -= 1;
    }
    for (unsigned k = 0; k < m && coef != 0.0; ++k) {
      coef *= to_double(ey);
      ey -= 1;
    }
    if (coef != 0.0) r.add_term({ex, ey}, coef);
  }
  return r;
}

std::vector<Monomial> RealPoly::support() const {
  std::vector<Monomial> s;
  s.reserve(terms_.size());
  for (const auto& [m, c] : terms_) s.push_back(m);
  return s;
}

RealPoly RealPoly::swapped() const {
  RealPoly r;
  for (const auto& [m, c] : terms_) r.add_term({m.ey, m.ex}, c);
  return r;
}

RealPoly RealPoly::reflected(int sx, int sy) const {
  RealPoly r;
  for (const auto& [m, c] : terms_) {
    double s = 1.0;
    if (sx < 0 && is_integer(m.ex) && (m.ex.numerator() % 2 != 0)) s = -s;
    if (sy < 0 && is_integer(m.ey) && (m.ey.numerator() % 2 != 0)) s = -s;
    r.add_term(m, c * s);
  }
  return r;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_power(char var, const Rational& q) {
  if (q == 0) return "";
  std::string s(1, var);
  if (q == 1) return s;
  if (is_integer(q)) return s + "^" + std::to_string(q.numerator());
  return s + "^(" + to_string(q) + ")";
}

}  // namespace

std::string RealPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::string mono = fmt_power('x', m.ex);
    std::string ypart = fmt_power('y', m.ey);
    if (!mono.empty() && !ypart.empty()) mono += "*";
    mono += ypart;
    double a = std::fabs(c);
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    if (mono.empty() || a != 1.0) {
      os << fmt_double(a);
      if (!mono.empty()) os << "*";
    }
    os << mono;
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

std::int64_t BivariatePoly::ramification() const {
  std::int64_t n = 1;
  for (const auto& t : terms) n = std::lcm(n, std::lcm(t.i.denominator(), t.j.denominator()));
  return n;
}

RealPoly BivariatePoly::to_real() const {
  RealPoly p;
  for (const auto& t : terms) p.add_term({t.i, t.j}, to_double(t.c));
  return p;
}

BivariatePoly BivariatePoly::from_map(const std::map<Monomial, Rational>& m) {
  BivariatePoly p;
  for (const auto& [mono, c] : m)
    if (c != 0) p.terms.push_back({mono.ex, mono.ey, c});
  return p;
}

std::string BivariatePoly::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms) {
    std::string mono = fmt_power('x', t.i);
    std::string ypart = fmt_power('y', t.j);
    if (!mono.empty() && !ypart.empty()) mono += "*";
    mono += ypart;
    Rational a = t.c < 0 ? -t.c : t.c;
    os << (first ? (t.c < 0 ? "-" : "") : (t.c < 0 ? " - " : " + "));
    if (mono.empty() || a != 1) {
      if (is_integer(a))
        os << a.numerator();
      else
        os << "(" << a.numerator() << "/" << a.denominator() << ")";
      if (!mono.empty()) os << "*";
    }
    os << mono;
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

double FractionalSeries::eval(double x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.c * rpow(x, t.q);
  return s;
}

double FractionalSeries::derivative(double x, unsigned order) const {
  double s = 0.0;
  for (const auto& t : terms) {
    double coef = t.c;
    Rational q = t.q;
    for (unsigned k = 0; k < order; ++k) {
      coef *= to_double(q);
      q -= 1;
    }
    if (coef != 0.0) s += coef * rpow(x, q);
  }
  return s;
}

void FractionalSeries::normalize() {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.q < b.q; });
  std::vector<Term> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().q == t.q)
      merged.back().c += t.c;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.c == 0.0; });
  terms = std::move(merged);
  ramification = 1;
  for (const auto& t : terms) ramification = std::lcm(ramification, t.q.denominator());
}

FractionalSeries FractionalSeries::plus(const FractionalSeries& o) const {
  FractionalSeries r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  r.truncation_order = std::max(truncation_order, o.truncation_order);
  r.normalize();
  return r;
}

FractionalSeries FractionalSeries::scaled(double s) const {
  FractionalSeries r = *this;
  for (auto& t : r.terms) t.c *= s;
  r.normalize();
  return r;
}

std::string FractionalSeries::to_string(char var) const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms) {
    double a = std::fabs(t.c);
    os << (first ? (t.c < 0 ? "-" : "") : (t.c < 0 ? " - " : " + "));
    if (a != 1.0) os << fmt_double(a) << "*";
    os << fmt_power(var, t.q);
    first = false;
  }
  return os.str();
}

}  // namespace oscdecay
