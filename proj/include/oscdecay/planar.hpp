#pragma once

#include "oscdecay/funcspec.hpp"

#include <complex>
#include <vector>

namespace oscdecay {

/// Orthonormal frame: points are s*a + w*b, s the outer (section) variable, w the inner one.
struct Frame {
  double ax{1.0}, ay{0.0};
  double bx{0.0}, by{1.0};

  static Frame along(double theta);
  double x(double s, double w) const { return s * ax + w * bx; }
  double y(double s, double w) const { return s * ay + w * by; }
};

/// Restriction of the integration domain beyond region and amplitude support.
struct Window {
  enum class Kind { None, Disk, Strip };
  Kind kind{Kind::None};
  double r{0.0};  // disk radius, or strip half-width |s| < r
  double c{0.0};  // strip half-length |w| < c
};

struct ProfileOptions {
  double tol{1e-8};
  int refine{0};
  bool weighted{true};      // multiply by the amplitude
  double inner_freq{0.0};   // phase exp(i inner_freq w) inside each section
  Window window;
  double cutoff{0.0};       // > 0: drop |s| < cutoff and near-root pieces of that size, no analytic tails
  int jobs{1};
};

/// Piecewise Legendre model of the section integral F(s) = int g(s, w) exp(i nu w) dw.
class SectionProfile {
 public:
  struct Piece {
    double a, b;
    std::vector<std::complex<double>> coef;
  };
  struct Tail {
    double at;
    std::complex<double> value;
  };

  std::vector<Piece> pieces;
  std::vector<Tail> tails;
  int order{16};
  double abs_mass{0.0};
  double error{0.0};
  bool finite{true};
  bool converged{true};

  /// int F(s) exp(i tau s) ds
  std::complex<double> transform(double tau) const;
};

SectionProfile build_profile(const MultiplierSpec& spec, const Frame& frame, const ProfileOptions& opt);

/// One evaluation of the section integral, exposed for tests.
std::complex<double> section_value(const MultiplierSpec& spec, const Frame& frame, const ProfileOptions& opt, double s);

}  // namespace oscdecay
