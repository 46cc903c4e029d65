#include "oscdecay/newton.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace oscdecay {

SliverMass sliver_mass(const Sliver& s, const std::vector<double>& gammas) {
  double A = 0.0, B = 0.0;
  for (std::size_t i = 0; i < s.per_factor.size() && i < gammas.size(); ++i) {
    A += gammas[i] * to_double(s.per_factor[i].alpha);
    B += gammas[i] * s.per_factor[i].beta;
  }
  constexpr double tol = 1e-12;
  SliverMass out;
  double M = s.upper_exponent();
  bool has_lower = !s.lower.is_zero();
  double e;
  int logs = 0;
  if (B > -1.0 + tol) {
    e = A + M * (B + 1.0);
  } else if (!has_lower) {
    out.finite = false;
    out.reason = "inner integral of y^" + std::to_string(B) + " diverges at y = 0";
    return out;
  } else if (B >= -1.0 - tol) {
    e = A;
    logs = 1;
  } else {
    e = A + s.lower_exponent() * (B + 1.0);
  }
  if (e <= -1.0 + tol) {
    out.finite = false;
    out.reason = "outer integral of x^" + std::to_string(e) + " diverges at x = 0";
    return out;
  }
  out.law = ExponentPair{e + 1.0, logs};
  return out;
}

namespace {

IntegrabilityReport check_with(const MultiplierSpec& spec, double p) {
  IntegrabilityReport rep;
  std::vector<double> gammas;
  for (const auto& f : spec.factors) gammas.push_back(f.gamma * p);

  Resolution res = resolve(spec);
  bool first = true;
  for (const auto& s : res.slivers) {
    if (!s.in_region) continue;
    SliverMass sm = sliver_mass(s, gammas);
    if (!sm.finite) {
      std::ostringstream os;
      os << "sliver " << s.id << " (chart " << s.chart.code << ", " << s.kind << ", shift "
         << s.shift.to_string() << "): " << sm.reason;
      rep.integrable = false;
      rep.diagnostic = os.str();
      return rep;
    }
    if (first || sm.law.power < rep.mass_law.power - 1e-9) {
      rep.mass_law = sm.law;
      first = false;
    } else if (std::fabs(sm.law.power - rep.mass_law.power) <= 1e-9) {
      rep.mass_law.logpower = std::max(rep.mass_law.logpower, sm.law.logpower);
    }
  }

  // Away from the origin only zero sets of strongly singular factors matter.
  double R = spec.support_radius();
  double r0 = std::min(res.x_max, R) * 0.5;
  constexpr int nr = 160, nt = 720;
  for (std::size_t i = 0; i < spec.factors.size(); ++i) {
    if (gammas[i] > -1.0) continue;
    RealPoly f = spec.factors[i].f.to_real();
    for (int ir = 0; ir < nr; ++ir) {
      double r = r0 + (R - r0) * (ir + 0.5) / nr;
      double prev = 0.0;
      bool prev_in = false;
      for (int it = 0; it <= nt; ++it) {
        double th = 2.0 * std::numbers::pi * it / nt;
        double x = r * std::cos(th), y = r * std::sin(th);
        bool in = spec.region.contains(x, y) && amplitude_value(spec.amplitude, x, y) > 0.0;
        double v = f.eval(x, y);
        if (in && (v == 0.0 || (prev_in && v * prev < 0.0))) {
          std::ostringstream os;
          os << "factor " << i << " vanishes near (" << x << ", " << y << ") away from the origin with exponent "
             << gammas[i];
          rep.integrable = false;
          rep.diagnostic = os.str();
          return rep;
        }
        prev = v;
        prev_in = in;
      }
    }
  }
  std::ostringstream os;
  os << "integrable; mass law r^" << rep.mass_law.power << " |ln r|^" << rep.mass_law.logpower;
  rep.diagnostic = os.str();
  return rep;
}

}  // namespace

IntegrabilityReport integrability_check(const MultiplierSpec& spec) { return check_with(spec, 1.0); }

IntegrabilityReport lp_check(const MultiplierSpec& spec, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  return check_with(spec, p);
}

}  // namespace oscdecay
