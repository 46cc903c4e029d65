#include "oscdecay/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace oscdecay {

namespace {

GaussRule make_rule(int n) {
  GaussRule r;
  r.n = n;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    r.x[static_cast<std::size_t>(n - 1 - i)] = z;
    r.w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  r.proj.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int j = 0; j < n; ++j) {
    double xj = r.x[static_cast<std::size_t>(j)];
    double p0 = 1.0, p1 = xj;
    for (int k = 0; k < n; ++k) {
      double pk;
      if (k == 0) {
        pk = 1.0;
      } else if (k == 1) {
        pk = xj;
      } else {
        pk = ((2.0 * k - 1.0) * xj * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      r.proj[static_cast<std::size_t>(k * n + j)] = 0.5 * (2.0 * k + 1.0) * r.w[static_cast<std::size_t>(j)] * pk;
    }
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  constexpr int kMax = 64;
  if (n < 1 || n > kMax) throw std::invalid_argument("Gauss-Legendre order out of range");
  static std::array<GaussRule, kMax + 1> rules;
  static std::array<std::once_flag, kMax + 1> flags;
  std::call_once(flags[static_cast<std::size_t>(n)], [n] { rules[static_cast<std::size_t>(n)] = make_rule(n); });
  return rules[static_cast<std::size_t>(n)];
}

void spherical_bessel(int kmax, double w, double* out) {
  if (w == 0.0) {
    out[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) out[k] = 0.0;
    return;
  }
  if (w < 1e-3) {
    double t = 1.0;
    for (int k = 0; k <= kmax; ++k) {
      if (k > 0) t *= w / (2.0 * k + 1.0);
      out[k] = t * (1.0 - w * w / (2.0 * (2.0 * k + 3.0)));
    }
    return;
  }
  double s = std::sin(w), c = std::cos(w);
  double j0 = s / w, j1 = s / (w * w) - c / w;
  if (w > kmax) {
    out[0] = j0;
    if (kmax >= 1) out[1] = j1;
    for (int k = 1; k < kmax; ++k) out[k + 1] = (2.0 * k + 1.0) / w * out[k] - out[k - 1];
    return;
  }
  // Miller's downward recurrence
  int N = kmax + 24 + static_cast<int>(w);
  double jp = 0.0, jc = 1e-200;
  std::vector<double> tmp(static_cast<std::size_t>(kmax + 1));
  for (int k = N; k >= 1; --k) {
    double jm = (2.0 * k + 1.0) / w * jc - jp;
    jp = jc;
    jc = jm;
    if (k - 1 <= kmax) tmp[static_cast<std::size_t>(k - 1)] = jc;
    if (std::fabs(jc) > 1e200) {
      jc *= 1e-200;
      jp *= 1e-200;
      for (auto& v : tmp) v *= 1e-200;
    }
  }
  double t1 = kmax >= 1 ? tmp[1] : jp;
  double scale = std::fabs(j0) > std::fabs(j1) ? j0 / tmp[0] : j1 / t1;
  for (int k = 0; k <= kmax; ++k) out[k] = tmp[static_cast<std::size_t>(k)] * scale;
}

std::complex<double> filon_piece(double a, double b, const std::complex<double>* coef, int n, double tau) {
  double h = b - a;
  if (tau == 0.0) return h * coef[0];
  double m = 0.5 * (a + b);
  double om = 0.5 * tau * h;
  double aw = std::fabs(om);
  constexpr int kBuf = 64;
  double j[kBuf + 1];
  spherical_bessel(n - 1, aw, j);
  static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::complex<double> acc = 0.0;
  for (int k = 0; k < n; ++k) {
    double jk = j[k];
    if (om < 0.0 && (k & 1)) jk = -jk;
    acc += coef[k] * ipow[k & 3] * (2.0 * jk);
  }
  return 0.5 * h * std::polar(1.0, tau * m) * acc;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& c_in) {
  std::vector<double> c = c_in;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<std::complex<double>> roots;
  if (c.size() <= 1) return roots;
  std::size_t z0 = 0;
  while (c[z0] == 0.0) ++z0;
  for (std::size_t k = 0; k < z0; ++k) roots.emplace_back(0.0, 0.0);
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(z0));
  int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return roots;
  if (n == 1) {
    roots.emplace_back(-c[0] / c[1], 0.0);
    return roots;
  }
  if (n == 2) {
    double A = c[2], B = c[1], C = c[0];
    double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      roots.emplace_back(q / A, 0.0);
      roots.emplace_back(C / q, 0.0);
    } else {
      double re = -B / (2.0 * A), im = std::sqrt(-disc) / (2.0 * std::fabs(A));
      roots.emplace_back(re, im);
      roots.emplace_back(re, -im);
    }
    return roots;
  }
  // scale so the roots have geometric mean one
  double sigma = std::pow(std::fabs(c[0] / c[static_cast<std::size_t>(n)]), 1.0 / n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) M(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i)
    M(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)] * std::pow(sigma, i - n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  auto horner = [&](std::complex<double> z, std::complex<double>& d) {
    std::complex<double> p = c[static_cast<std::size_t>(n)];
    d = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      d = d * z + p;
      p = p * z + c[static_cast<std::size_t>(k)];
    }
    return p;
  };
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = es.eigenvalues()[i] * sigma;
    for (int it = 0; it < 4; ++it) {
      std::complex<double> d;
      std::complex<double> p = horner(z, d);
      if (d == 0.0) break;
      std::complex<double> zn = z - p / d;
      std::complex<double> dn;
      if (std::abs(horner(zn, dn)) >= std::abs(p)) break;
      z = zn;
    }
    if (std::fabs(z.imag()) <= 1e-14 * std::abs(z)) z = {z.real(), 0.0};
    roots.push_back(z);
  }
  return roots;
}

}  // namespace oscdecay
