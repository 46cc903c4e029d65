#include "oscdecay/bounds.hpp"
#include "oscdecay/newton.hpp"

#include "parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace oscdecay {

namespace {

constexpr double kPi = std::numbers::pi;
// fitted exponents within this band of 1/2 count as 1/2
constexpr double kHalfBand = 0.01;

bool slower(const ExponentPair& a, const ExponentPair& b) {
  return a.power < b.power || (a.power == b.power && a.logpower > b.logpower);
}

const DirectionalInput* find_exceptional(const EstimateInputs& in, const Direction& v) {
  for (const auto& e : in.exceptional)
    if (same_direction(e.v, v)) return &e;
  return nullptr;
}

bool is_exceptional(const EstimateInputs& in, const Direction& v) {
  for (const auto& l : in.lines)
    if (same_direction(Direction::from_angle(l.theta + 0.5 * kPi), v)) return true;
  return false;
}

DecayEstimate along(const EstimateInputs& in, const Scope& scope) {
  const ExponentPair mass = *in.mass;
  DecayEstimate out{scope, {0.5, 2}, false, EstimateSource::HalfPower};
  const DirectionalInput* ex = nullptr;
  if (is_exceptional(in, scope.dir)) {
    ex = find_exceptional(in, scope.dir);
    if (!ex) throw BoundsError("missing delta_v for an exceptional direction");
  }
  if (mass.power < 0.5 - kHalfBand) {
    if (ex)
      out = {scope, ex->law, in.amplitude_positive, EstimateSource::Exceptional};
    else
      out = {scope, mass, in.amplitude_positive, EstimateSource::Generic};
    return out;
  }
  if (!ex) return out;
  if (ex->law.power < 0.5 - kHalfBand)
    out = {scope, ex->law, in.amplitude_positive, EstimateSource::Exceptional};
  else if (ex->law.power <= 0.5 + kHalfBand)
    out = {scope, {0.5, ex->law.logpower + 1}, false, EstimateSource::Threshold};
  return out;
}

}  // namespace

const char* to_string(EstimateSource s) {
  switch (s) {
    case EstimateSource::Generic: return "generic-direction";
    case EstimateSource::Exceptional: return "exceptional-direction";
    case EstimateSource::Threshold: return "threshold-direction";
    case EstimateSource::HalfPower: return "half-power";
    case EstimateSource::Slowest: return "slowest-direction";
    case EstimateSource::Holder: return "holder";
  }
  return "?";
}

bool same_direction(const Direction& a, const Direction& b, double tol) {
  double d = std::fabs(a.theta - b.theta);
  return std::min(d, kPi - d) <= tol;
}

std::vector<Direction> exceptional_directions(const std::vector<Direction>& lines) {
  std::vector<Direction> out;
  for (const auto& l : lines) {
    Direction v = Direction::from_angle(l.theta + 0.5 * kPi);
    bool seen = false;
    for (const auto& o : out) seen = seen || same_direction(o, v);
    if (!seen) out.push_back(v);
  }
  return out;
}

EstimateInputs gather_inputs(const MultiplierSpec& spec, const EstimateOptions& opt) {
  EstimateInputs in;
  in.mass = disk_fit(spec, opt.exponents).exponents;
  in.lines = root_directions(spec);
  in.amplitude_positive = amplitude_value(spec.amplitude, 0.0, 0.0) > 0.0;

  std::vector<Direction> dirs = exceptional_directions(in.lines);
  std::size_t n_ex = dirs.size();
  for (int k = 0; k < opt.coarse_scan; ++k) {
    Direction v = Direction::from_angle((k + 0.5) * kPi / opt.coarse_scan);
    bool skip = false;
    for (std::size_t i = 0; i < n_ex; ++i) skip = skip || same_direction(dirs[i], v, 1e-3);
    if (!skip) dirs.push_back(v);
  }
  std::vector<ExponentPair> laws(dirs.size());
  detail::run_indexed(dirs.size(), opt.jobs,
                      [&](std::size_t i) { laws[i] = directional_exponent(spec, dirs[i], opt.exponents); });
  for (std::size_t i = 0; i < dirs.size(); ++i)
    (i < n_ex ? in.exceptional : in.scan).push_back({dirs[i], laws[i]});
  return in;
}

DecayEstimate predicted_estimate(const EstimateInputs& in, const Scope& scope) {
  if (!in.mass) throw BoundsError("missing mass exponents");
  if (scope.kind != Scope::Kind::Overall) return along(in, scope);

  for (const auto& v : exceptional_directions(in.lines))
    if (!find_exceptional(in, v)) throw BoundsError("missing delta_v for an exceptional direction");
  const ExponentPair mass = *in.mass;
  DecayEstimate out{scope, {0.5, 2}, false, EstimateSource::HalfPower};
  if (mass.power < 0.5 - kHalfBand) {
    ExponentPair worst = mass;
    for (const auto& e : in.exceptional)
      if (slower(e.law, worst)) worst = e.law;
    return {scope, worst, in.amplitude_positive, EstimateSource::Slowest};
  }
  bool any = false;
  ExponentPair worst{std::numeric_limits<double>::infinity(), 0};
  for (const auto& e : in.exceptional)
    if (e.law.power < 0.5 - kHalfBand && slower(e.law, worst)) {
      worst = e.law;
      any = true;
    }
  if (any) out = {scope, worst, in.amplitude_positive, EstimateSource::Slowest};
  return out;
}

DecayEstimate predicted_estimate(const MultiplierSpec& spec, const Scope& scope, const EstimateOptions& opt) {
  EstimateOptions o = opt;
  // a single direction only needs its own exponent
  if (scope.kind != Scope::Kind::Overall) o.coarse_scan = 0;
  return predicted_estimate(gather_inputs(spec, o), scope);
}

DecayEstimate holder_estimate(const MultiplierSpec& spec, double p) {
  if (!(p > 1.0)) throw BoundsError("holder_estimate needs p > 1");
  DecayEstimate out{Scope::overall(), {}, false, EstimateSource::Holder};
  if (std::isinf(p)) {
    // g is bounded near the origin exactly when its mass law is the area law
    auto r = integrability_check(spec);
    if (!r.integrable || r.mass_law.power < 2.0 - 1e-9 || r.mass_law.logpower > 0)
      throw BoundsError("g is not bounded near the origin");
    out.exponents = {1.0, 1};
    return out;
  }
  auto r = lp_check(spec, p);
  if (!r.integrable) throw BoundsError("g is not in L^" + std::to_string(p) + ": " + r.diagnostic);
  out.exponents = {1.0 - 1.0 / p, 0};
  return out;
}

}  // namespace oscdecay
