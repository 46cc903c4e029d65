#pragma once

#include "oscdecay/bounds.hpp"
#include "oscdecay/funcspec.hpp"
#include "oscdecay/oscillate.hpp"
#include "oscdecay/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numbers>

// 1D transform of |x|^-0.8 bump(x / 0.5), with x = w^5 removing the singularity
inline double sep_slice(double t) {
  auto f = [t](double w) {
    double x = std::pow(w, 5.0);
    return 10.0 * oscdecay::bump1d(x, 0.5) * std::cos(t * x);
  };
  double top = std::pow(0.5, 0.2);
  double total = 0.0;
  constexpr int kCuts = 64;
  for (int i = 0; i < kCuts; ++i)
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, top * i / kCuts, top * (i + 1) / kCuts,
                                                                           12, 1e-14);
  return total;
}

// int_0^1 exp(i lam x^2 / 2) dx on pieces between zeros of the phase
inline std::complex<double> fresnel(double lam) {
  auto re = [lam](double x) { return std::cos(0.5 * lam * x * x); };
  auto im = [lam](double x) { return std::sin(0.5 * lam * x * x); };
  std::complex<double> total = 0.0;
  double a = 0.0;
  for (int k = 1; a < 1.0; ++k) {
    double b = std::min(1.0, std::sqrt(2.0 * std::numbers::pi * k / lam));
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    total += std::complex<double>(GK::integrate(re, a, b, 10, 1e-15), GK::integrate(im, a, b, 10, 1e-15));
    a = b;
  }
  return total;
}

// I_L straight from its definition: 2 Re int_0^(200 L) K(s v) psi(s / L) s^(beta - 1) ds
inline double brute_probe(const oscdecay::LineKernel& k, double L, double beta) {
  const oscdecay::GaussRule& g = oscdecay::gauss_legendre(12);
  double acc = 0.0;
  constexpr int kHead = 8;
  for (int c = 0; c < kHead; ++c)
    for (int j = 0; j < g.n; ++j) {
      auto jj = static_cast<std::size_t>(j);
      double x = (c + 0.5 + 0.5 * g.x[jj]) / kHead;
      double s = std::pow(x, 1.0 / beta);  // removes s^(beta - 1)
      acc += g.w[jj] * 0.5 / kHead * k.at(s).value.real() * oscdecay::probe_profile(s / L) / beta;
    }
  for (double a = 1.0; a < 200.0 * L; a += 1.0)
    for (int j = 0; j < g.n; ++j) {
      auto jj = static_cast<std::size_t>(j);
      double s = a + 0.5 + 0.5 * g.x[jj];
      acc += 0.5 * g.w[jj] * k.at(s).value.real() * oscdecay::probe_profile(s / L) * std::pow(s, beta - 1.0);
    }
  return 2.0 * acc;
}
