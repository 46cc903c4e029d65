#pragma once

#include "oscdecay/funcspec.hpp"
#include "oscdecay/measure.hpp"
#include "oscdecay/oscillate.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscdecay {

class BoundsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where an estimate holds: along a ray, on a strip around a line of frequencies, or everywhere.
struct Scope {
  enum class Kind { Ray, Strip, Overall };
  Kind kind{Kind::Overall};
  Direction dir{};
  double H{1.0};

  static Scope ray(Direction v) { return {Kind::Ray, v, 0.0}; }
  static Scope strip(Direction v, double H) { return {Kind::Strip, v, H}; }
  static Scope overall() { return {}; }
};

enum class EstimateSource {
  Generic,          // direction not perpendicular to any l_i, small mass exponent: (eps, d)
  Exceptional,      // perpendicular direction with delta_v < 1/2: (delta_v, e_v)
  Threshold,        // delta_v = 1/2: one extra log
  HalfPower,        // (1/2, 2) fallback, on its own or for the remaining directions
  Slowest,          // overall: slowest directional estimate
  Holder,           // L^p bound (1/p', 0) or (1, 1)
};

const char* to_string(EstimateSource s);

/// |K| <= C (2 + rho)^(-power) (ln(2 + rho))^logpower on the scope.
struct DecayEstimate {
  Scope scope;
  ExponentPair exponents;
  bool sharp{false};
  EstimateSource source{EstimateSource::HalfPower};
};

struct DirectionalInput {
  Direction v;
  ExponentPair law;
};

/// Measured ingredients of the case logic.
struct EstimateInputs {
  std::optional<ExponentPair> mass;           // (eps, d)
  std::vector<Direction> lines;               // l_i
  std::vector<DirectionalInput> exceptional;  // (delta_v, e_v) for the v perpendicular to some l_i
  std::vector<DirectionalInput> scan;         // coarse check of the remaining directions
  bool amplitude_positive{true};              // alpha > 0 at the origin, needed for sharpness
};

struct EstimateOptions {
  ExponentOptions exponents{};
  int coarse_scan{32};
  int jobs{1};
};

/// Perpendicular directions of the lines, deduplicated.
std::vector<Direction> exceptional_directions(const std::vector<Direction>& lines);
bool same_direction(const Direction& a, const Direction& b, double tol = 1e-6);

EstimateInputs gather_inputs(const MultiplierSpec& spec, const EstimateOptions& opt = {});

DecayEstimate predicted_estimate(const EstimateInputs& in, const Scope& scope);
DecayEstimate predicted_estimate(const MultiplierSpec& spec, const Scope& scope, const EstimateOptions& opt = {});

/// Bound from g in L^p; p = infinity gives (1, 1). Throws BoundsError when g is not in L^p.
DecayEstimate holder_estimate(const MultiplierSpec& spec, double p);

struct ProbeOptions {
  double tol{1e-9};  // section profile accuracy
  int jobs{1};
};

struct ProbeResult {
  std::vector<std::pair<double, double>> values;  // (L, I_L)
  double growth{0.0};                             // max |I_L| / |I_L(smallest L)|
  double slope{0.0};                              // least squares d ln|I_L| / d ln L
};

/// Transform of the probe profile: 1 on [-1, 1], 0 outside [-2, 2], smooth and nonnegative.
double probe_window(double kappa);
/// The profile itself, (1 / pi) int_0^2 window(k) cos(k s) dk.
double probe_profile(double s);

/// I_L = int K(s v) psi(s / L) |s|^(delta - 1 - eta) ds, computed on the spatial side.
ProbeResult sharpness_probe(const MultiplierSpec& spec, const Direction& v, double delta, double eta,
                            const std::vector<double>& L_list, const ProbeOptions& opt = {});

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct VerifyOptions {
  DecayOptions decay{};
  EstimateOptions estimate{};
  double max_constant{1e6};
  double power_slack{0.05};
};

struct VerifyRow {
  double theta{0.0};
  double rho{0.0};
  double measured{0.0};
  double envelope{0.0};
};

struct DirectionReport {
  double theta{0.0};
  double constant{0.0};
  double fitted_power{0.0};
  int fitted_logpower{0};
  double effective_power{0.0};  // fitted power minus log slope over the window
  Verdict verdict{Verdict::Pass};
};

struct VerifyReport {
  DecayEstimate estimate;
  Verdict verdict{Verdict::Pass};
  double constant{0.0};
  double required_power{0.0};  // envelope power minus log slope and slack
  std::vector<DirectionReport> directions;
  std::vector<VerifyRow> rows;

  std::string summary() const;
};

/// Checks measured |K| against the envelope, predicted_estimate when none is given.
VerifyReport verify_bounds(const MultiplierSpec& spec, const Scope& scope,
                           const std::optional<DecayEstimate>& envelope = std::nullopt, const VerifyOptions& opt = {});

/// Local log-log slope of (ln x)^b averaged over [a, c].
double log_slope(int b, double a, double c);

}  // namespace oscdecay
