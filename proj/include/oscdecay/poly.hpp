#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

// boost::rational's mixed (rational, integer) equality recurses forever under
// C++20 reversed-operator rules; exact non-template overloads found by ADL win.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, int b) { return a.denominator() == 1 && a.numerator() == b; }
inline bool operator==(const rational<std::int64_t>& a, long b) { return a.denominator() == 1 && a.numerator() == b; }
inline bool operator==(int b, const rational<std::int64_t>& a) { return a == b; }
inline bool operator==(long b, const rational<std::int64_t>& a) { return a == b; }
inline bool operator!=(const rational<std::int64_t>& a, int b) { return !(a == b); }
inline bool operator!=(const rational<std::int64_t>& a, long b) { return !(a == b); }
inline bool operator!=(int b, const rational<std::int64_t>& a) { return !(a == b); }
inline bool operator!=(long b, const rational<std::int64_t>& a) { return !(a == b); }
}  // namespace boost

namespace oscdecay {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

std::string to_string(const Rational& q);

inline bool is_integer(const Rational& q) { return q.denominator() == 1; }

// ceil/floor for rationals with positive denominator.
std::int64_t floor_of(const Rational& q);
std::int64_t ceil_of(const Rational& q);

/// Exponent pair of a monomial x^ex y^ey. Ordered by (ex, ey).
struct Monomial {
  Rational ex{0};
  Rational ey{0};

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.ex != b.ex) return a.ex < b.ex;
    return a.ey < b.ey;
  }
  Rational total() const { return ex + ey; }
};

/// x^q evaluated with the convention used throughout: integer powers keep
/// the sign of the base, fractional powers act on |base|.
double rpow(double base, const Rational& q);

/// Real-coefficient polynomial in two variables with nonnegative rational
/// exponents. This is the working representation for the resolution
/// machinery; exact coefficients live in BivariatePoly.
class RealPoly {
 public:
  RealPoly() = default;
  static RealPoly constant(double c);
  static RealPoly monomial(double c, Rational ex, Rational ey);
  static RealPoly x() { return monomial(1.0, 1, 0); }
  static RealPoly y() { return monomial(1.0, 0, 1); }

  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, double c);

  double eval(double x, double y) const;

  RealPoly operator+(const RealPoly& o) const;
  RealPoly operator-(const RealPoly& o) const;
  RealPoly operator*(const RealPoly& o) const;
  RealPoly operator*(double s) const;
  RealPoly pow(unsigned n) const;

  /// Drops coefficients with |c| <= rel_tol * max|c|.
  RealPoly cleaned(double rel_tol = 1e-12) const;

  /// Lowest total degree among the terms (requires nonzero).
  Rational order() const;
  /// Sum of the terms of lowest total degree.
  RealPoly leading_form() const;
  /// Largest total degree.
  Rational degree() const;
  /// Common denominator of all exponents.
  std::int64_t ramification() const;
  bool integer_in_y() const;
  bool integer_in_x() const;

  /// d^l/dx^l d^m/dy^m, valid on x > 0, y > 0 (or integer exponents).
  RealPoly derivative(unsigned l, unsigned m) const;

  /// Coefficient list of the y-slice at x-weight: used by Newton polygons.
  std::vector<Monomial> support() const;

  /// Swap the two variables.
  RealPoly swapped() const;
  /// p(sx * x, sy * y) for sx, sy in {+1, -1}; fractional exponents see |.|.
  RealPoly reflected(int sx, int sy) const;

  std::string to_string() const;

 private:
  std::map<Monomial, double> terms_;
};

}  // namespace oscdecay
