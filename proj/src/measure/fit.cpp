#include "oscdecay/measure.hpp"

#include <algorithm>
#include <cmath>

namespace oscdecay {

double FitResult::model(double r) const {
  return constant * std::pow(r, exponents.power) * std::pow(std::fabs(std::log(r)), exponents.logpower);
}

FitResult fit_exponents(const std::vector<std::pair<double, double>>& samples, const FitOptions& opt) {
  if (samples.size() < 8) throw FitError("need at least 8 samples, got " + std::to_string(samples.size()));
  auto pts = samples;
  for (const auto& [r, v] : pts) {
    if (!(r > 0.0) || r == 1.0 || !std::isfinite(r)) throw FitError("sample radius must be positive and not 1");
    if (!(v > 0.0) || !std::isfinite(v)) throw FitError("sample values must be positive and finite");
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (pts.front().first == pts.back().first) throw FitError("degenerate samples: all radii equal");

  FitResult best;
  bool have = false;
  for (int b = 0; b <= opt.max_log; ++b) {
    // least squares for ln v - b ln|ln r| = ln c + a ln r
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(pts.size());
    for (const auto& [r, v] : pts) {
      double X = std::log(r);
      double Y = std::log(v) - b * std::log(std::fabs(std::log(r)));
      sx += X;
      sy += Y;
      sxx += X * X;
      sxy += X * Y;
    }
    double den = n * sxx - sx * sx;
    double a = (n * sxy - sx * sy) / den;
    double lc = (sy - a * sx) / n;
    FitResult f;
    f.exponents = ExponentPair{a, b};
    f.constant = std::exp(lc);
    f.window = {pts.back().first, pts.front().first};
    f.samples = pts;
    for (const auto& [r, v] : pts) f.residual = std::max(f.residual, std::fabs(f.model(r) / v - 1.0));
    if (!have || f.residual <= (1.0 - opt.log_gain) * best.residual) {
      best = f;
      have = true;
    }
  }
  return best;
}

}  // namespace oscdecay
