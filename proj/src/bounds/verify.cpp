#include "oscdecay/bounds.hpp"
#include "oscdecay/newton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace oscdecay {

namespace {

double envelope_at(const ExponentPair& e, double rho) {
  return std::pow(2.0 + rho, -e.power) * std::pow(std::log(2.0 + rho), e.logpower);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

double log_slope(int b, double a, double c) {
  if (b == 0 || !(c > a)) return 0.0;
  double la = std::log(2.0 + a), lc = std::log(2.0 + c);
  return b * (std::log(lc) - std::log(la)) / (lc - la);
}

VerifyReport verify_bounds(const MultiplierSpec& spec, const Scope& scope, const std::optional<DecayEstimate>& envelope,
                           const VerifyOptions& opt) {
  VerifyReport rep;
  rep.estimate = envelope ? *envelope : predicted_estimate(spec, scope, opt.estimate);
  const ExponentPair env = rep.estimate.exponents;
  const double rmin = opt.decay.rho_min, rmax = opt.decay.rho_max;
  rep.required_power = env.power - log_slope(env.logpower, rmin, rmax) - opt.power_slack;

  std::vector<DecayPath> paths;
  std::vector<double> thetas;
  if (scope.kind == Scope::Kind::Ray) {
    paths.push_back(RayPath{scope.dir});
  } else if (scope.kind == Scope::Kind::Strip) {
    paths.push_back(StripPath{scope.dir, scope.H});
  } else {
    std::vector<Direction> dirs = exceptional_directions(root_directions(spec));
    int n = std::max(opt.estimate.coarse_scan, 1);
    for (int k = 0; k < n; ++k) {
      Direction v = Direction::from_angle((k + 0.5) * std::numbers::pi / n);
      bool seen = false;
      for (const auto& d : dirs) seen = seen || same_direction(d, v, 1e-3);
      if (!seen) dirs.push_back(v);
    }
    for (const auto& d : dirs) paths.push_back(RayPath{d});
  }

  bool any_fail = false, any_open = false;
  for (const auto& path : paths) {
    double theta = std::visit([](const auto& p) { return p.dir.theta; }, path);
    DirectionReport d;
    d.theta = theta;
    DecayResult r = decay_fit(spec, path, opt.decay);
    for (const auto& s : r.samples) {
      double e = envelope_at(env, s.rho);
      rep.rows.push_back({theta, s.rho, s.abs_value, e});
      d.constant = std::max(d.constant, s.abs_value / e);
    }
    d.fitted_power = r.fit.exponents.power;
    d.fitted_logpower = r.fit.exponents.logpower;
    d.effective_power = d.fitted_power - log_slope(d.fitted_logpower, rmin, rmax);
    // a sample grid dominated by quadrature error cannot decide either way
    bool open = r.inconclusive || 2 * r.noisy > static_cast<int>(r.samples.size());
    if (d.constant > opt.max_constant || (!open && d.effective_power < rep.required_power))
      d.verdict = Verdict::Fail;
    else if (open)
      d.verdict = Verdict::Inconclusive;
    any_fail = any_fail || d.verdict == Verdict::Fail;
    any_open = any_open || d.verdict == Verdict::Inconclusive;
    rep.constant = std::max(rep.constant, d.constant);
    rep.directions.push_back(d);
  }
  rep.verdict = any_fail ? Verdict::Fail : any_open ? Verdict::Inconclusive : Verdict::Pass;
  return rep;
}

std::string VerifyReport::summary() const {
  std::ostringstream os;
  os.precision(6);
  const char* scope_name = estimate.scope.kind == Scope::Kind::Ray     ? "ray"
                           : estimate.scope.kind == Scope::Kind::Strip ? "strip"
                                                                       : "overall";
  os << to_string(verdict) << ": " << scope_name << " envelope (2+rho)^-" << estimate.exponents.power << " ln(2+rho)^"
     << estimate.exponents.logpower << " [" << to_string(estimate.source) << (estimate.sharp ? ", sharp" : "")
     << "]\n";
  os << "  constant C = " << constant << ", required effective power >= " << required_power << "\n";
  for (const auto& d : directions)
    os << "  theta " << d.theta << ": " << to_string(d.verdict) << ", C " << d.constant << ", fitted power "
       << d.fitted_power << " log " << d.fitted_logpower << " (effective " << d.effective_power << ")\n";
  return os.str();
}

}  // namespace oscdecay
