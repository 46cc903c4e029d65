#include "oscdecay/measure.hpp"

#include "oscdecay/planar.hpp"

#include <cmath>
#include <limits>
#include <thread>

namespace oscdecay {

double g_eval(const MultiplierSpec& spec, double x, double y) {
  for (const auto& f : spec.factors)
    if (f.gamma < 0.0 && f.f.eval(x, y) == 0.0) return std::numeric_limits<double>::infinity();
  if (!spec.region.contains(x, y)) return 0.0;
  double v = 1.0;
  for (const auto& f : spec.factors) {
    if (f.gamma == 0.0) continue;
    double m = std::fabs(f.f.eval(x, y));
    if (m == 0.0) {
      if (f.gamma < 0.0) return std::numeric_limits<double>::infinity();
      return 0.0;
    }
    v *= std::pow(m, f.gamma);
  }
  return v;
}

namespace {

Quantity two_level(const MultiplierSpec& spec, const Frame& frame, ProfileOptions po, double tol, int refine) {
  po.tol = 0.1 * tol;
  po.refine = refine;
  SectionProfile p0 = build_profile(spec, frame, po);
  po.refine = refine + 1;
  SectionProfile p1 = build_profile(spec, frame, po);
  Quantity q;
  if (!p0.finite || !p1.finite) {
    q.value = std::numeric_limits<double>::infinity();
    q.est_error = std::numeric_limits<double>::infinity();
    q.converged = false;
    return q;
  }
  double v0 = p0.transform(0.0).real(), v1 = p1.transform(0.0).real();
  q.value = v1;
  q.est_error = std::fabs(v1 - v0);
  q.converged = p1.converged && q.est_error <= tol * std::fabs(v1);
  return q;
}

}  // namespace

Quantity disk_mass_q(const MultiplierSpec& spec, double r, double tol, const MassOptions& opt) {
  if (!(r > 0.0)) throw std::invalid_argument("disk radius must be positive");
  ProfileOptions po;
  po.weighted = opt.amplitude_weighted;
  po.window = Window{Window::Kind::Disk, r, 0.0};
  po.cutoff = opt.cutoff;
  po.jobs = opt.jobs;
  return two_level(spec, Frame::along(0.0), po, tol, opt.refine);
}

double disk_mass(const MultiplierSpec& spec, double r, double tol) { return disk_mass_q(spec, r, tol).value; }

Quantity strip_mass_q(const MultiplierSpec& spec, const Direction& v, double r, double c, double tol,
                      const MassOptions& opt) {
  if (!(r > 0.0) || !(c > 0.0)) throw std::invalid_argument("strip dimensions must be positive");
  ProfileOptions po;
  po.weighted = opt.amplitude_weighted;
  po.window = Window{Window::Kind::Strip, r, c};
  po.cutoff = opt.cutoff;
  po.jobs = opt.jobs;
  return two_level(spec, Frame::along(v.theta), po, tol, opt.refine);
}

double strip_mass(const MultiplierSpec& spec, const Direction& v, double r, double c, double tol) {
  return strip_mass_q(spec, v, r, c, tol).value;
}

double working_radius(const MultiplierSpec& spec) { return spec.region.radius(); }

std::vector<double> geometric_radii(double rmin, double rmax, int n) {
  if (!(rmin > 0.0) || !(rmax > rmin) || n < 2) throw std::invalid_argument("bad sample window");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = rmax * std::pow(rmin / rmax, static_cast<double>(i) / (n - 1));
  return r;
}

namespace {

template <class Fn>
std::vector<std::pair<double, double>> sample(const std::vector<double>& radii, int jobs, const Fn& fn) {
  std::vector<std::pair<double, double>> out(radii.size());
  auto work = [&](std::size_t i) { out[i] = {radii[i], fn(radii[i])}; };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < radii.size(); ++i) work(i);
  } else {
    std::vector<std::thread> th;
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(jobs), radii.size());
    for (std::size_t t = 0; t < nt; ++t)
      th.emplace_back([&, t] {
        for (std::size_t i = t; i < radii.size(); i += nt) work(i);
      });
    for (auto& x : th) x.join();
  }
  return out;
}

FitResult fit_with_fallback(const std::vector<std::pair<double, double>>& pts, double limit) {
  FitResult f = fit_exponents(pts);
  if (f.residual <= limit || pts.size() < 16) return f;
  // pre-asymptotic curvature: keep the half of the window closest to the origin
  std::vector<std::pair<double, double>> inner(pts.begin() + static_cast<std::ptrdiff_t>(pts.size() / 2), pts.end());
  FitResult g = fit_exponents(inner);
  return g.residual < f.residual ? g : f;
}

}  // namespace

FitResult directional_fit(const MultiplierSpec& spec, const Direction& v, const ExponentOptions& opt) {
  double c = opt.c > 0.0 ? opt.c : 0.5 * working_radius(spec);
  if (opt.rmax >= c) throw std::invalid_argument("strip width must stay below the strip length");
  auto radii = geometric_radii(opt.rmin, opt.rmax, opt.samples);
  auto pts = sample(radii, opt.jobs, [&](double r) { return strip_mass(spec, v, r, c, opt.tol); });
  return fit_with_fallback(pts, opt.residual_limit);
}

ExponentPair directional_exponent(const MultiplierSpec& spec, const Direction& v, const ExponentOptions& opt) {
  return directional_fit(spec, v, opt).exponents;
}

FitResult disk_fit(const MultiplierSpec& spec, const ExponentOptions& opt) {
  auto radii = geometric_radii(opt.rmin, opt.rmax, opt.samples);
  auto pts = sample(radii, opt.jobs, [&](double r) { return disk_mass(spec, r, opt.tol); });
  return fit_with_fallback(pts, opt.residual_limit);
}

}  // namespace oscdecay
