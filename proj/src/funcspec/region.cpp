#include "oscdecay/funcspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oscdecay {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

}  // namespace

std::pair<double, double> CurveSpec::point(double s) const {
  double hv = h.eval(s);
  if (axis == Axis::YofX) return {half * s, hv};
  return {hv, half * s};
}

double CurveSpec::crossing_angle(double rho) const {
  // |point(s)| is increasing in s near the origin; bisect on s in (0, rho].
  double lo = 0.0;
  double hi = rho;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * rho; ++it) {
    double mid = 0.5 * (lo + hi);
    auto [px, py] = point(mid);
    if (px * px + py * py < rho * rho)
      lo = mid;
    else
      hi = mid;
  }
  auto [px, py] = point(0.5 * (lo + hi));
  return wrap_angle(std::atan2(py, px));
}

double CurveSpec::tangent_angle() const {
  double slope = 0.0;
  if (!h.is_zero() && h.leading().q == 1) slope = h.leading().c;
  double dx = 1.0, dy = slope;
  if (axis == Axis::YofX) return wrap_angle(std::atan2(dy, half * dx));
  return wrap_angle(std::atan2(half * dx, dy));
}

RealPoly CurveSpec::boundary_poly() const {
  // graph variable minus h(other variable); exponents of h act on |.|.
  RealPoly p;
  if (axis == Axis::YofX) {
    p.add_term({0, 1}, 1.0);
    for (const auto& t : h.terms) p.add_term({t.q, 0}, -t.c * (half < 0 && is_integer(t.q) && t.q.numerator() % 2 ? -1.0 : 1.0));
  } else {
    p.add_term({1, 0}, 1.0);
    for (const auto& t : h.terms) p.add_term({0, t.q}, -t.c * (half < 0 && is_integer(t.q) && t.q.numerator() % 2 ? -1.0 : 1.0));
  }
  return p;
}

std::string CurveSpec::to_string() const {
  if (axis == Axis::YofX)
    return "y = " + h.to_string('x') + ", x " + (half > 0 ? "> 0" : "< 0");
  return "x = " + h.to_string('y') + ", y " + (half > 0 ? "> 0" : "< 0");
}

double RegionE::radius() const {
  if (auto d = std::get_if<DiskRegion>(&kind)) return d->radius;
  return std::get<SectorsRegion>(kind).radius;
}

std::vector<CurveSpec> RegionE::curves() const {
  std::vector<CurveSpec> out;
  if (auto s = std::get_if<SectorsRegion>(&kind))
    for (const auto& sec : s->sectors) {
      out.push_back(sec.lower);
      out.push_back(sec.upper);
    }
  return out;
}

bool RegionE::contains(double x, double y) const {
  double r2 = x * x + y * y;
  double R = radius();
  if (r2 >= R * R) return false;
  if (std::holds_alternative<DiskRegion>(kind)) return true;
  if (r2 == 0.0) return false;
  double rho = std::sqrt(r2);
  double th = wrap_angle(std::atan2(y, x));
  for (const auto& sec : std::get<SectorsRegion>(kind).sectors) {
    double a = sec.lower.crossing_angle(rho);
    double b = sec.upper.crossing_angle(rho);
    double span = wrap_angle(b - a);
    double off = wrap_angle(th - a);
    bool in_arc = off > 0.0 && off < span;
    if (in_arc == sec.inside) return true;
  }
  return false;
}

void validate_region(const RegionE& region) {
  auto* s = std::get_if<SectorsRegion>(&region.kind);
  if (!s) {
    if (!(region.radius() > 0)) throw SemanticError("disk radius must be positive");
    return;
  }
  if (!(s->radius > 0)) throw SemanticError("region radius must be positive");
  if (s->sectors.empty()) throw SemanticError("sector region without sectors");
  auto curves = region.curves();
  for (const auto& c : curves) {
    for (const auto& t : c.h.terms)
      if (t.q < 1) throw SemanticError("boundary curve exponent below 1: " + c.to_string());
  }
  // Pairwise angular separation must be positive and the cyclic order fixed.
  constexpr int kSamples = 24;
  std::vector<std::vector<double>> ang(curves.size());
  for (int k = 1; k <= kSamples; ++k) {
    double rho = s->radius * std::pow(0.5, (kSamples - k) * 0.75);
    for (std::size_t i = 0; i < curves.size(); ++i) ang[i].push_back(curves[i].crossing_angle(rho));
  }
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      if (curves[i] == curves[j]) continue;  // shared boundaries of adjacent sectors
      int sign0 = 0;
      for (int k = 0; k < kSamples; ++k) {
        double d = wrap_angle(ang[j][k] - ang[i][k]);
        if (d < 1e-12 || kTwoPi - d < 1e-12)
          throw SemanticError("boundary curves intersect: " + curves[i].to_string() + " and " + curves[j].to_string());
        int sign = d < std::numbers::pi ? 1 : -1;
        if (k == 0) sign0 = sign;
        else if (sign != sign0 && std::min(d, kTwoPi - d) < 0.5)
          throw SemanticError("boundary curves cross: " + curves[i].to_string() + " and " + curves[j].to_string());
      }
    }
}

double bump1d(double s, double r0) {
  double u = s / r0;
  double u2 = u * u;
  if (u2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u2));
}

double amplitude_value(const Amplitude& a, double x, double y) {
  return std::visit(
      [&](const auto& amp) -> double {
        using T = std::decay_t<decltype(amp)>;
        if constexpr (std::is_same_v<T, ConstantAmplitude>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, BumpAmplitude>) {
          return bump1d(std::sqrt(x * x + y * y), amp.r0);
        } else {
          return bump1d(x, amp.r0) * bump1d(y, amp.r0);
        }
      },
      a);
}

double amplitude_support(const Amplitude& a) {
  if (auto b = std::get_if<BumpAmplitude>(&a)) return b->r0;
  if (auto b = std::get_if<ProductBumpAmplitude>(&a)) return b->r0 * std::numbers::sqrt2;
  return std::numeric_limits<double>::infinity();
}

double MultiplierSpec::support_radius() const {
  return std::min(region.radius(), amplitude_support(amplitude));
}

Direction Direction::from_angle(double angle) {
  double a = std::fmod(angle, std::numbers::pi);
  if (a < 0) a += std::numbers::pi;
  return Direction{a};
}

}  // namespace oscdecay
