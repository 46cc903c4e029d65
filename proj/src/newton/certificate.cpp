#include "oscdecay/newton.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oscdecay {

std::string SampleGrid::describe() const {
  std::ostringstream os;
  os << nx << " log-spaced X in [" << x_span << "*x_max, x_max] x " << y_fractions.size()
     << " fractions of (g, G)";
  return os.str();
}

namespace {

double falling(double a, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= a - k;
  return r;
}

}  // namespace

MonomialCertificate monomialize_check_points(const Sliver& s, int factor_id, const BivariatePoly& f, double eta,
                                             const std::vector<std::pair<double, double>>& points, int deriv_cap) {
  if (factor_id < 0 || static_cast<std::size_t>(factor_id) >= s.per_factor.size())
    throw std::invalid_argument("factor index out of range");
  for (const auto& [X, Y] : points)
    if (!(X > 0.0 && X <= s.x_max && Y > s.lower.eval(X) && Y < s.upper.eval(X)))
      throw std::invalid_argument("grid point outside sliver: X=" + std::to_string(X) + " Y=" + std::to_string(Y) +
                                  " g=" + std::to_string(s.lower.eval(X)) + " G=" + std::to_string(s.upper.eval(X)) +
                                  " x_max=" + std::to_string(s.x_max));

  const FactorMonomial& fm = s.per_factor[static_cast<std::size_t>(factor_id)];
  double alpha = to_double(fm.alpha);
  MonomialCertificate cert;
  cert.sliver_id = s.id;
  cert.factor_id = factor_id;
  cert.eta_target = eta;

  RealPoly Q;
  bool symbolic = true;
  try {
    Q = compose_shift(s.chart.pull_back(f.to_real()), s.shift, s.sign);
  } catch (const ResolutionError&) {
    symbolic = false;
  }
  if (symbolic) {
    cert.l_cap = std::min(static_cast<int>(std::ceil(alpha - 1e-12)), deriv_cap);
    cert.m_cap = std::min(fm.beta, deriv_cap);
  }

  double worst = 0.0;
  if (fm.d == 0.0) worst = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= cert.l_cap && worst < std::numeric_limits<double>::infinity(); ++l)
    for (int m = 0; m <= cert.m_cap; ++m) {
      RealPoly D = symbolic ? Q.derivative(static_cast<unsigned>(l), static_cast<unsigned>(m)) : RealPoly{};
      double model_coef = fm.d * falling(alpha, l) * falling(fm.beta, m);
      for (const auto& [X, Y] : points) {
        double scale = std::fabs(fm.d) * std::pow(X, alpha - l) * std::pow(Y, fm.beta - m);
        double val;
        if (symbolic) {
          val = D.eval(X, Y);
        } else {
          auto [x, y] = s.to_plane(X, Y);
          val = f.eval(x, y);
        }
        double model = model_coef * std::pow(X, alpha - l) * std::pow(Y, fm.beta - m);
        double e = std::fabs(val - model) / scale;
        if (!std::isfinite(e)) e = std::numeric_limits<double>::infinity();
        worst = std::max(worst, e);
      }
    }
  cert.max_observed_ratio_error = worst;
  return cert;
}

MonomialCertificate monomialize_check(const Sliver& s, int factor_id, const BivariatePoly& f, double eta,
                                      const SampleGrid& grid, int deriv_cap) {
  std::vector<std::pair<double, double>> pts;
  for (int ix = 0; ix < grid.nx; ++ix) {
    double X = s.x_max * std::pow(grid.x_span, static_cast<double>(ix) / std::max(1, grid.nx - 1));
    double g = s.lower.eval(X), G = s.upper.eval(X);
    for (double fr : grid.y_fractions) pts.emplace_back(X, g + fr * (G - g));
  }
  MonomialCertificate c = monomialize_check_points(s, factor_id, f, eta, pts, deriv_cap);
  c.grid = grid.describe();
  return c;
}

}  // namespace oscdecay
