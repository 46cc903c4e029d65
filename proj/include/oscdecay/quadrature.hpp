#pragma once

#include <complex>
#include <vector>

namespace oscdecay {

/// Gauss-Legendre rule on [-1, 1] together with the projection onto Legendre coefficients:
/// coef_k = sum_j proj[k*n + j] f(x_j) is exact for polynomials of degree < n.
struct GaussRule {
  int n{0};
  std::vector<double> x, w;
  std::vector<double> proj;
};

const GaussRule& gauss_legendre(int n);

/// j_0(w) .. j_kmax(w) for w >= 0.
void spherical_bessel(int kmax, double w, double* out);

/// Integral over [a, b] of the Legendre expansion `coef` (in the variable mapped to [-1, 1])
/// times exp(i tau s).
std::complex<double> filon_piece(double a, double b, const std::complex<double>* coef, int n, double tau);

/// Complex roots of sum_k c[k] z^k, polished by Newton steps on the original coefficients.
std::vector<std::complex<double>> poly_roots(const std::vector<double>& c);

}  // namespace oscdecay
