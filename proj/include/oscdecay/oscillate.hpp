#pragma once

#include "oscdecay/funcspec.hpp"
#include "oscdecay/measure.hpp"
#include "oscdecay/planar.hpp"

#include <complex>
#include <functional>
#include <variant>
#include <vector>

namespace oscdecay {

struct KernelSample {
  double t{0.0};
  double u{0.0};
  std::complex<double> value;
  double est_error{0.0};
  bool converged{true};
};

struct KernelOptions {
  int jobs{1};
  int refine{0};
};

/// K(t, u) = int amplitude * g * exp(i (t x + u y)), including the base-point phase.
KernelSample kernel_eval(const MultiplierSpec& spec, double t, double u, double tol, const KernelOptions& opt = {});

/// Safe van der Corput constants: 3 for k = 1, 8 for k = 2, 5 * 2^(k-1) - 2 beyond.
double vdc_constant(int k);

struct VdcAmplitude {
  double end_value{1.0};   // |phi(b)|
  double variation{0.0};   // int |phi'|
};

/// c_k A^(-1/k) (|phi(b)| + int |phi'|). k = 1 requires a monotone phase derivative.
double vdc_reference(int k, double A, double a, double b, const VdcAmplitude& amp, bool monotone_derivative = false);

/// int_a^b phi(x) exp(i h(x)) dx by adaptive Gauss-Legendre on pieces of bounded phase change.
std::complex<double> phase_integral(const std::function<double(double)>& h, const std::function<double(double)>& phi,
                                    double a, double b, double tol = 1e-12);

struct RayPath {
  Direction dir;
};
struct StripPath {
  Direction dir;
  double H{1.0};
};
using DecayPath = std::variant<RayPath, StripPath>;

struct DecayOptions {
  double rho_min{1e2};
  double rho_max{1e4};
  int samples{16};
  int subsamples{16};  // points per envelope window [rho, rho + pi / R]
  int offsets{5};      // strip offsets
  double tol{1e-10};   // relative accuracy of the section profiles
  int jobs{1};
};

struct DecaySample {
  double rho{0.0};
  double offset{0.0};
  double abs_value{0.0};
  double est_error{0.0};
};

struct DecayResult {
  FitResult fit;
  std::vector<DecaySample> samples;                 // per rho, the window maximum
  std::vector<std::pair<double, double>> envelope;  // (rho, running maximum from the right)
  bool inconclusive{false};
  int noisy{0};
};

/// |K| sampled along the path and an envelope law c rho^(-a) (ln rho)^b fitted on the running maxima.
DecayResult decay_fit(const MultiplierSpec& spec, const DecayPath& path, const DecayOptions& opt = {});

/// Evaluator reusing section profiles across frequencies on one line through the origin.
class LineKernel {
 public:
  LineKernel(const MultiplierSpec& spec, double theta, double offset, double tol, int jobs = 1);
  /// K at the frequency rho v + offset v_rot, v = (cos theta, sin theta), v_rot = (-sin theta, cos theta).
  KernelSample at(double rho) const;
  const SectionProfile& profile() const { return fine_; }

 private:
  double theta_, offset_;
  double x0_, y0_;
  SectionProfile coarse_, fine_;
};

}  // namespace oscdecay
