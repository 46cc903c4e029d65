#pragma once

#include "oscdecay/funcspec.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscdecay {

/// Branch expansion or sliver construction could not complete.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NewtonPolygon {
  struct Vertex {
    Rational i{0};
    Rational j{0};
    friend bool operator==(const Vertex&, const Vertex&) = default;
  };
  struct Edge {
    Rational slope;    // negative
    std::size_t from;  // vertex indices, from < to
    std::size_t to;
    /// Balancing exponent: the edge dominates where y ~ x^q.
    Rational q() const { return Rational(-1) / slope; }
  };
  std::vector<Vertex> vertices;  // increasing i, decreasing j
  std::vector<Edge> edges;
};

NewtonPolygon newton_polygon(const RealPoly& f);
NewtonPolygon newton_polygon(const BivariatePoly& f);

BivariatePoly leading_form(const BivariatePoly& f);

/// Zero lines of all leading forms plus boundary tangents, as angles in [0, pi).
std::vector<Direction> root_directions(const MultiplierSpec& spec);

/// Weighted initial part of f along y ~ x^q: weight w = min(i + q j) and the
/// coefficients of the terms attaining it, keyed by the y exponent.
struct EdgePoly {
  Rational weight{0};
  std::map<Rational, double> coef;  // j -> c
  double eval(double c) const;
  double deriv(double c) const;
  Rational low() const { return coef.begin()->first; }
  Rational high() const { return coef.rbegin()->first; }
};
EdgePoly edge_poly(const RealPoly& f, const Rational& q);

/// A real root with its multiplicity.
struct RealRoot {
  double value;
  int multiplicity;
};
/// Real roots of sum c_k t^k (dense, degree = size-1).
std::vector<RealRoot> real_roots(const std::vector<double>& coeffs);

/// f(x, k(x) + sign*y) expanded; f must be integer in y.
RealPoly compose_shift(const RealPoly& f, const FractionalSeries& k, int sign);

/// Real branches y = k(x), x > 0, with leading exponent >= 1, truncated at `order`.
std::vector<FractionalSeries> puiseux_branches(const BivariatePoly& f, const Rational& order);
std::vector<FractionalSeries> puiseux_branches(const RealPoly& f, const Rational& order);

/// Monomial model d x^alpha y^beta of one factor on one sliver.
struct FactorMonomial {
  double d{1.0};
  Rational alpha{0};
  int beta{0};
};

/// Chart of the eight-triangle splitting. Local coordinates (X, Y) with
/// X > 0, 0 < Y < b X map to the plane by x = sx*X, y = sy*Y (or swapped).
struct Chart {
  int code{0};  // 0..7
  bool swap{false};
  int sx{1};
  int sy{1};
  double b{1.0};
  std::pair<double, double> to_plane(double X, double Y) const;
  std::pair<double, double> from_plane(double x, double y) const;
  RealPoly pull_back(const RealPoly& p) const;
};

/// Chart table for split lines of slopes m > 0 and mp < 0.
std::vector<Chart> make_charts(double m, double mp);

struct Sliver {
  int id{0};
  Chart chart;
  FractionalSeries shift;  // k
  int sign{1};             // Y_chart = k(X) + sign * Y
  FractionalSeries lower;  // g (may be zero)
  FractionalSeries upper;  // G
  double x_max{0.0};
  std::vector<FactorMonomial> per_factor;
  bool in_region{true};
  std::string kind;  // "vertex" or "band"

  /// Plane point of local (X, Y).
  std::pair<double, double> to_plane(double X, double Y) const;
  /// Local coordinates of a plane point; false when it lies outside the sliver.
  bool locate(double x, double y, double& X, double& Y) const;
  /// Exponent M of G and m of g (infinity when g = 0).
  double upper_exponent() const;
  double lower_exponent() const;
};

struct SampleGrid {
  int nx{8};
  double x_span{1e-3};  // X from x_max * x_span to x_max, log spaced
  std::vector<double> y_fractions{1e-3, 1e-2, 0.1, 0.3, 0.6, 0.9, 0.999};
  std::string describe() const;
};

struct MonomialCertificate {
  int sliver_id{0};
  int factor_id{0};
  double eta_target{0.0};
  double max_observed_ratio_error{0.0};
  int l_cap{0};
  int m_cap{0};
  std::string grid;
  bool passes() const { return max_observed_ratio_error < eta_target; }
};

/// Evaluates the monomial model of factor `factor_id` on a grid inside the
/// sliver. Explicit points outside the sliver raise std::invalid_argument.
MonomialCertificate monomialize_check(const Sliver& s, int factor_id, const BivariatePoly& f, double eta,
                                      const SampleGrid& grid, int deriv_cap = 4);
MonomialCertificate monomialize_check_points(const Sliver& s, int factor_id, const BivariatePoly& f, double eta,
                                             const std::vector<std::pair<double, double>>& points,
                                             int deriv_cap = 4);

struct Resolution {
  std::vector<Sliver> slivers;
  std::vector<MonomialCertificate> certificates;
  double split_m{1.0};
  double split_mp{-1.0};
  double x_max{0.0};
  double eta{0.3};
  /// Area of the eight truncated triangles 0 < X < x_max, 0 < Y < b X.
  double covered_area() const;
};

struct ResolveOptions {
  double eta{0.3};
  int deriv_cap{4};
  Rational truncation{0};  // 0: 2 * max total degree + 4
  SampleGrid grid{};
};

Resolution resolve(const MultiplierSpec& spec, const ResolveOptions& opt = {});
std::vector<Sliver> sliver_decomposition(const MultiplierSpec& spec, double eta, int deriv_cap = 4);

/// Area of the sliver computed in local coordinates.
double sliver_area_local(const Sliver& s);
/// Area of the sliver's image in the plane, by the boundary integral.
double sliver_area_plane(const Sliver& s);

/// Power and log power of the sliver integral of prod |f_i|^(p gamma_i) over
/// {0 < X < r}: the integral behaves like r^power |ln r|^logpower.
struct SliverMass {
  bool finite{true};
  ExponentPair law{};
  std::string reason;
};
SliverMass sliver_mass(const Sliver& s, const std::vector<double>& gammas);

struct IntegrabilityReport {
  bool integrable{true};
  std::string diagnostic;
  /// Mass law predicted from the slivers inside E.
  ExponentPair mass_law{};
};

IntegrabilityReport integrability_check(const MultiplierSpec& spec);
/// Same criterion applied to g^p.
IntegrabilityReport lp_check(const MultiplierSpec& spec, double p);

}  // namespace oscdecay
