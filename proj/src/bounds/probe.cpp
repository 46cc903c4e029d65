#include "oscdecay/bounds.hpp"
#include "oscdecay/planar.hpp"
#include "oscdecay/quadrature.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oscdecay {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kNodes = 16;
constexpr double kGrade = 0.15;

// distribution of X1 + X2 for independent X_i with bump density on [-1/4, 1/4], tabulated
// with its density for cubic Hermite interpolation
class BumpCdf {
 public:
  BumpCdf() {
    const GaussRule& g = gauss_legendre(8);
    std::vector<double> B(kGrid + 1, 0.0);
    double hb = 0.5 / kGrid;
    for (int i = 0; i < kGrid; ++i) {
      double lo = -0.25 + i * hb, acc = 0.0;
      for (int j = 0; j < g.n; ++j) acc += g.w[static_cast<std::size_t>(j)] * bump1d(lo + 0.5 * hb * (1.0 + g.x[static_cast<std::size_t>(j)]), 0.25);
      B[static_cast<std::size_t>(i + 1)] = B[static_cast<std::size_t>(i)] + 0.5 * hb * acc;
    }
    double mass = B.back();
    auto single = [&](double z) {
      if (z <= -0.25) return 0.0;
      if (z >= 0.25) return 1.0;
      int i = std::min(kGrid - 1, static_cast<int>((z + 0.25) / hb));
      double lo = -0.25 + i * hb, len = z - lo, acc = 0.0;
      for (int j = 0; j < g.n; ++j) acc += g.w[static_cast<std::size_t>(j)] * bump1d(lo + 0.5 * len * (1.0 + g.x[static_cast<std::size_t>(j)]), 0.25);
      return (B[static_cast<std::size_t>(i)] + 0.5 * len * acc) / mass;
    };
    const GaussRule& q = gauss_legendre(20);
    constexpr int kCuts = 8;
    cdf_.resize(kGrid + 1);
    pdf_.resize(kGrid + 1);
    h_ = 1.0 / kGrid;
    for (int i = 0; i <= kGrid; ++i) {
      double z = -0.5 + i * h_;
      double lo = std::max(-0.25, z - 0.25), hi = std::min(0.25, z + 0.25);
      double c = 0.0, d = 0.0;
      if (hi > lo) {
        double w = (hi - lo) / kCuts;
        for (int k = 0; k < kCuts; ++k)
          for (int j = 0; j < q.n; ++j) {
            double y = lo + (k + 0.5) * w + 0.5 * w * q.x[static_cast<std::size_t>(j)];
            double by = 0.5 * w * q.w[static_cast<std::size_t>(j)] * bump1d(y, 0.25);
            c += by * single(z - y);
            d += by * bump1d(z - y, 0.25);
          }
      }
      // CDF part: y below lo has B(z - y) = 1
      cdf_[static_cast<std::size_t>(i)] = (c + mass * single(lo)) / mass;
      pdf_[static_cast<std::size_t>(i)] = d / (mass * mass);
    }
  }

  double operator()(double z) const {
    if (z <= -0.5) return 0.0;
    if (z >= 0.5) return 1.0;
    int i = std::min(kGrid - 1, static_cast<int>((z + 0.5) / h_));
    double t = (z + 0.5 - i * h_) / h_;
    auto ii = static_cast<std::size_t>(i);
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * cdf_[ii] + (t3 - 2 * t2 + t) * h_ * pdf_[ii] + (-2 * t3 + 3 * t2) * cdf_[ii + 1] +
           (t3 - t2) * h_ * pdf_[ii + 1];
  }

 private:
  static constexpr int kGrid = 4096;
  double h_;
  std::vector<double> cdf_, pdf_;
};

const BumpCdf& cdf() {
  static const BumpCdf c;
  return c;
}

double legendre_sum(const std::vector<std::complex<double>>& coef, double t) {
  double p0 = 1.0, p1 = t, acc = coef[0].real();
  if (coef.size() > 1) acc += coef[1].real() * t;
  for (std::size_t k = 2; k < coef.size(); ++k) {
    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / static_cast<double>(k);
    acc += coef[k].real() * p2;
    p0 = p1;
    p1 = p2;
  }
  return acc;
}

// G(t) = int F(s) |s - t|^(-beta) ds for the real part of a section profile
class WeaklySingular {
 public:
  WeaklySingular(const SectionProfile& prof, double beta) : prof_(prof), beta_(beta), rule_(gauss_legendre(kNodes)) {
    for (const auto& p : prof.pieces) {
      std::vector<double> v(kNodes);
      for (int j = 0; j < kNodes; ++j) v[static_cast<std::size_t>(j)] = legendre_sum(p.coef, rule_.x[static_cast<std::size_t>(j)]);
      nodes_.push_back(std::move(v));
    }
  }

  double operator()(double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < prof_.pieces.size(); ++i) {
      const auto& p = prof_.pieces[i];
      double h = p.b - p.a;
      double d = t < p.a ? p.a - t : t > p.b ? t - p.b : 0.0;
      if (d >= 0.5 * h) {
        for (int j = 0; j < kNodes; ++j) {
          auto jj = static_cast<std::size_t>(j);
          double s = 0.5 * (p.a + p.b) + 0.5 * h * rule_.x[jj];
          acc += 0.5 * h * rule_.w[jj] * nodes_[i][jj] * std::pow(std::fabs(s - t), -beta_);
        }
        continue;
      }
      auto F = [&](double s) { return legendre_sum(p.coef, (2.0 * s - p.a - p.b) / h); };
      if (t > p.a && t < p.b) {
        acc += toward(F, t, p.b - t, 0.0, h);
        acc += toward(F, t, p.a - t, 0.0, h);
      } else if (t <= p.a) {
        acc += toward(F, p.a, h, p.a - t, h);
      } else {
        acc += toward(F, p.b, -h, t - p.b, h);
      }
    }
    for (const auto& tl : prof_.tails) {
      double d = std::fabs(tl.at - t);
      if (d > 0.0) acc += tl.value.real() * std::pow(d, -beta_);
    }
    return acc;
  }

 private:
  // int over [e, e + len] of F(s) |s - t|^(-beta), the point t at distance gap behind e
  template <class Fn>
  double toward(const Fn& F, double e, double len, double gap, double h) const {
    double sign = len < 0.0 ? -1.0 : 1.0;
    double far = std::fabs(len), acc = 0.0;
    auto piece = [&](double u0, double u1) {
      double m = 0.5 * (u0 + u1), r = 0.5 * (u1 - u0), sum = 0.0;
      for (int j = 0; j < kNodes; ++j) {
        auto jj = static_cast<std::size_t>(j);
        double u = m + r * rule_.x[jj];
        sum += rule_.w[jj] * F(e + sign * u) * std::pow(u + gap, -beta_);
      }
      return r * sum;
    };
    double floor = gap > 0.0 ? 2.0 * gap : 1e-14 * h;
    while (far > floor) {
      double near = far * kGrade;
      acc += piece(near, far);
      far = near;
    }
    if (gap > 0.0)
      acc += piece(0.0, far);
    else
      acc += F(e) * std::pow(far, 1.0 - beta_) / (1.0 - beta_);
    return acc;
  }

  const SectionProfile& prof_;
  double beta_;
  const GaussRule& rule_;
  std::vector<std::vector<double>> nodes_;
};

// int_a^b f, graded toward both ends, for integrands with integrable end singularities
template <class Fn>
double graded_both(const Fn& f, double a, double b) {
  const GaussRule& g = gauss_legendre(kNodes);
  auto piece = [&](double u0, double u1) {
    double m = 0.5 * (u0 + u1), r = 0.5 * (u1 - u0), sum = 0.0;
    for (int j = 0; j < kNodes; ++j) sum += g.w[static_cast<std::size_t>(j)] * f(m + r * g.x[static_cast<std::size_t>(j)]);
    return r * sum;
  };
  double half = 0.5 * (b - a), acc = 0.0;
  for (double sign : {-1.0, 1.0}) {
    double e = sign < 0.0 ? a : b;
    double far = half;
    while (far > 1e-12 * half) {
      double near = far * kGrade;
      double u0 = e - sign * far, u1 = e - sign * near;
      acc += piece(std::min(u0, u1), std::max(u0, u1));
      far = near;
    }
  }
  return acc;
}

}  // namespace

double probe_window(double kappa) {
  double k = std::fabs(kappa);
  if (k <= 1.0) return 1.0;
  if (k >= 2.0) return 0.0;
  return 1.0 - cdf()(k - 1.5);
}

double probe_profile(double s) {
  double head = s == 0.0 ? 1.0 : std::sin(s) / s;
  int cuts = 4 + static_cast<int>(std::fabs(s));
  const GaussRule& g = gauss_legendre(20);
  double h = 1.0 / cuts, acc = 0.0;
  for (int c = 0; c < cuts; ++c) {
    double m = 1.0 + (c + 0.5) * h;
    for (int j = 0; j < g.n; ++j) {
      double k = m + 0.5 * h * g.x[static_cast<std::size_t>(j)];
      acc += 0.5 * h * g.w[static_cast<std::size_t>(j)] * probe_window(k) * std::cos(k * s);
    }
  }
  return (head + acc) / kPi;
}

ProbeResult sharpness_probe(const MultiplierSpec& spec, const Direction& v, double delta, double eta,
                            const std::vector<double>& L_list, const ProbeOptions& opt) {
  ProbeResult out;
  if (L_list.empty()) return out;
  if (!(eta > 0.0 && eta < delta)) throw BoundsError("sharpness_probe needs 0 < eta < delta");
  double beta = delta - eta;
  if (!(beta < 1.0)) throw BoundsError("sharpness_probe needs delta - eta < 1");
  for (double L : L_list)
    if (!(L > 0.0)) throw BoundsError("probe scales must be positive");

  ProfileOptions po;
  po.tol = opt.tol;
  po.refine = 1;
  po.jobs = opt.jobs;
  SectionProfile prof = build_profile(spec, Frame::along(v.theta), po);
  if (!prof.finite) throw BoundsError("section profile is not integrable along this direction");
  double sigma0 = spec.x0 * v.vx() + spec.y0 * v.vy();
  WeaklySingular G(prof, beta);
  double c_beta = 2.0 * std::tgamma(beta) * std::cos(0.5 * kPi * beta);

  out.values.resize(L_list.size());
  detail::run_indexed(L_list.size(), opt.jobs, [&](std::size_t i) {
    double L = L_list[i];
    // kappa / L runs over the profile coordinate; singular points of G sit at L (at + sigma0)
    std::vector<double> cuts{-2.0, -1.0, 0.0, 1.0, 2.0};
    for (const auto& t : prof.tails) {
      double k = L * (t.at + sigma0);
      if (std::fabs(k) < 2.0) cuts.push_back(k);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto f = [&](double k) { return probe_window(k) * G(k / L - sigma0); };
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
      if (cuts[c + 1] > cuts[c]) acc += graded_both(f, cuts[c], cuts[c + 1]);
    out.values[i] = {L, c_beta / (2.0 * kPi) * acc};
  });

  std::sort(out.values.begin(), out.values.end());
  double base = std::fabs(out.values.front().second), top = base;
  for (const auto& [L, I] : out.values) top = std::max(top, std::fabs(I));
  out.growth = base > 0.0 ? top / base : 0.0;
  if (out.values.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(out.values.size());
    for (const auto& [L, I] : out.values) {
      double x = std::log(L), y = std::log(std::max(std::fabs(I), 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double den = n * sxx - sx * sx;
    out.slope = den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  }
  return out;
}

}  // namespace oscdecay
