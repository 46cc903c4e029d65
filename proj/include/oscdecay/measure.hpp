#pragma once

#include "oscdecay/funcspec.hpp"

#include <utility>
#include <vector>

namespace oscdecay {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model c r^a |ln r|^b fitted on a window of (r, value) samples.
struct FitResult {
  ExponentPair exponents;
  double constant{0.0};
  std::pair<double, double> window{0.0, 0.0};
  double residual{0.0};
  std::vector<std::pair<double, double>> samples;

  double model(double r) const;
};

/// Value with the disagreement between two refinement levels.
struct Quantity {
  double value{0.0};
  double est_error{0.0};
  bool converged{true};
};

struct MassOptions {
  bool amplitude_weighted{false};
  int jobs{1};
  int refine{0};         // base refinement level; the estimate compares refine and refine + 1
  double cutoff{0.0};    // drop an inner neighbourhood of this size instead of adding the analytic tails
};

/// g at a point; +infinity on the zero set of a negatively powered factor.
double g_eval(const MultiplierSpec& spec, double x, double y);

double disk_mass(const MultiplierSpec& spec, double r, double tol);
Quantity disk_mass_q(const MultiplierSpec& spec, double r, double tol, const MassOptions& opt = {});

/// Mass of {|p.v| < r, |p.v_perp| < c}.
double strip_mass(const MultiplierSpec& spec, const Direction& v, double r, double c, double tol);
Quantity strip_mass_q(const MultiplierSpec& spec, const Direction& v, double r, double c, double tol,
                      const MassOptions& opt = {});

/// Mass radius used for default strip lengths: half of it is the strip half-length.
double working_radius(const MultiplierSpec& spec);

struct FitOptions {
  double log_gain{0.25};  // a log power must cut the max residual by this fraction
  int max_log{2};
};

FitResult fit_exponents(const std::vector<std::pair<double, double>>& samples, const FitOptions& opt = {});

struct ExponentOptions {
  double rmin{1e-5};
  double rmax{1e-2};
  int samples{16};
  double c{0.0};  // 0: half the working radius
  double tol{1e-6};
  double residual_limit{0.05};
  int jobs{1};
};

/// Geometric sample radii from rmax down to rmin.
std::vector<double> geometric_radii(double rmin, double rmax, int n);

FitResult directional_fit(const MultiplierSpec& spec, const Direction& v, const ExponentOptions& opt = {});
ExponentPair directional_exponent(const MultiplierSpec& spec, const Direction& v, const ExponentOptions& opt = {});
FitResult disk_fit(const MultiplierSpec& spec, const ExponentOptions& opt = {});

}  // namespace oscdecay
