#pragma once

#include "oscdecay/poly.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace oscdecay {

/// Raised for malformed spec text. Carries 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Well-formed text describing an invalid multiplier.
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact polynomial with rational exponents and rational coefficients.
struct BivariatePoly {
  struct Term {
    Rational i{0};
    Rational j{0};
    Rational c{0};
    friend bool operator==(const Term&, const Term&) = default;
  };
  std::vector<Term> terms;  // sorted by (i, j), no duplicates, c != 0

  friend bool operator==(const BivariatePoly&, const BivariatePoly&) = default;

  bool is_zero() const { return terms.empty(); }
  std::int64_t ramification() const;
  RealPoly to_real() const;
  double eval(double x, double y) const { return to_real().eval(x, y); }
  std::string to_string() const;

  static BivariatePoly from_map(const std::map<Monomial, Rational>& m);
};

/// Truncated Puiseux-type series k(x) = sum c x^q, q >= 1, evaluated for x >= 0.
struct FractionalSeries {
  struct Term {
    Rational q{1};
    double c{0.0};
    friend bool operator==(const Term&, const Term&) = default;
  };
  std::int64_t ramification{1};
  std::vector<Term> terms;  // strictly increasing q
  Rational truncation_order{0};

  friend bool operator==(const FractionalSeries&, const FractionalSeries&) = default;

  bool is_zero() const { return terms.empty(); }
  double eval(double x) const;
  double derivative(double x, unsigned order = 1) const;
  /// Leading (lowest-order) term; requires nonzero.
  const Term& leading() const { return terms.front(); }
  FractionalSeries plus(const FractionalSeries& o) const;
  FractionalSeries scaled(double s) const;
  std::string to_string(char var = 'x') const;
  /// Recomputes the ramification from the exponents.
  void normalize();
};

/// Half of a graph through the origin: y = h(|x|) on the side sign(x) = half
/// (axis YofX), or x = h(|y|) on the side sign(y) = half (axis XofY).
struct CurveSpec {
  enum class Axis { YofX, XofY };
  Axis axis{Axis::YofX};
  int half{+1};
  FractionalSeries h;

  friend bool operator==(const CurveSpec&, const CurveSpec&) = default;

  /// Point on the curve at graph parameter s >= 0.
  std::pair<double, double> point(double s) const;
  /// Polar angle in [0, 2pi) of the unique crossing with the circle |p| = rho.
  double crossing_angle(double rho) const;
  /// Tangent angle at the origin, in [0, 2pi).
  double tangent_angle() const;
  /// Exact polynomial B with B = 0 on the curve, oriented as graph_var - h.
  RealPoly boundary_poly() const;
  std::string to_string() const;
};

struct SectorRegion {
  CurveSpec lower;
  CurveSpec upper;
  bool inside{true};  // true: counterclockwise arc from lower to upper
  friend bool operator==(const SectorRegion&, const SectorRegion&) = default;
};

struct DiskRegion {
  double radius{1.0};
  friend bool operator==(const DiskRegion&, const DiskRegion&) = default;
};

struct SectorsRegion {
  std::vector<SectorRegion> sectors;
  double radius{1.0};
  friend bool operator==(const SectorsRegion&, const SectorsRegion&) = default;
};

struct RegionE {
  std::variant<DiskRegion, SectorsRegion> kind{DiskRegion{}};
  friend bool operator==(const RegionE&, const RegionE&) = default;

  double radius() const;
  bool contains(double x, double y) const;
  std::vector<CurveSpec> curves() const;
};

struct ConstantAmplitude {
  friend bool operator==(const ConstantAmplitude&, const ConstantAmplitude&) = default;
};
/// exp(1 - 1/(1 - |p|^2/r0^2)) inside |p| < r0.
struct BumpAmplitude {
  double r0{1.0};
  friend bool operator==(const BumpAmplitude&, const BumpAmplitude&) = default;
};
/// b(x) b(y) with the one-dimensional bump of half-width r0.
struct ProductBumpAmplitude {
  double r0{1.0};
  friend bool operator==(const ProductBumpAmplitude&, const ProductBumpAmplitude&) = default;
};
using Amplitude = std::variant<ConstantAmplitude, BumpAmplitude, ProductBumpAmplitude>;

double bump1d(double s, double r0);
double amplitude_value(const Amplitude& a, double x, double y);
/// Radius beyond which the amplitude vanishes (infinity for constants).
double amplitude_support(const Amplitude& a);

struct Factor {
  BivariatePoly f;
  double gamma{1.0};
  friend bool operator==(const Factor&, const Factor&) = default;
};

struct MultiplierSpec {
  std::vector<Factor> factors;
  RegionE region;
  Amplitude amplitude{ConstantAmplitude{}};
  double x0{0.0};
  double y0{0.0};
  friend bool operator==(const MultiplierSpec&, const MultiplierSpec&) = default;

  /// Largest radius carrying mass: region radius capped by the amplitude support.
  double support_radius() const;
};

/// Growth law r^power |ln r|^logpower.
struct ExponentPair {
  double power{0.0};
  int logpower{0};
  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;
};

struct Direction {
  double theta{0.0};  // [0, pi)

  static Direction from_angle(double angle);
  double vx() const { return std::cos(theta); }
  double vy() const { return std::sin(theta); }
  // v_perp = (sin, -cos)
  double px() const { return std::sin(theta); }
  double py() const { return -std::cos(theta); }
};

/// Parses a polynomial expression in x and y (e.g. "y^2 - x^(3/2)").
BivariatePoly parse_poly(std::string_view text);
/// Parses a boundary curve, e.g. "y = 2*x^2, x > 0".
CurveSpec parse_curve(std::string_view text);

MultiplierSpec parse_spec(std::string_view text);
std::string serialize(const MultiplierSpec& spec);

/// Checks that sector boundary curves stay disjoint at sampled radii.
void validate_region(const RegionE& region);

}  // namespace oscdecay
