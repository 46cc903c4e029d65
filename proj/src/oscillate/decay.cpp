#include "oscdecay/oscillate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace oscdecay {

DecayResult decay_fit(const MultiplierSpec& spec, const DecayPath& path, const DecayOptions& opt) {
  if (!(opt.rho_min > 0.0) || !(opt.rho_max > opt.rho_min)) throw std::invalid_argument("bad frequency range");
  double theta = 0.0;
  std::vector<double> offsets{0.0};
  if (auto r = std::get_if<RayPath>(&path)) {
    theta = r->dir.theta;
  } else {
    const auto& s = std::get<StripPath>(path);
    theta = s.dir.theta;
    offsets.clear();
    int n = std::max(1, opt.offsets);
    for (int j = 0; j < n; ++j) offsets.push_back(n == 1 ? 0.0 : s.H * (2.0 * j / (n - 1) - 1.0));
  }
  std::vector<LineKernel> kernels;
  for (double o : offsets) kernels.emplace_back(spec, theta, o, opt.tol, opt.jobs);

  double R = spec.support_radius();
  double window = std::numbers::pi / R;
  std::vector<double> rhos = geometric_radii(opt.rho_min, opt.rho_max, opt.samples);
  std::reverse(rhos.begin(), rhos.end());

  DecayResult out;
  out.samples.resize(rhos.size());
  auto work = [&](std::size_t i) {
    DecaySample best;
    best.rho = rhos[i];
    best.abs_value = -1.0;
    int m = std::max(1, opt.subsamples);
    for (int j = 0; j < m; ++j) {
      double rho = rhos[i] + window * j / m;
      for (std::size_t k = 0; k < kernels.size(); ++k) {
        KernelSample ks = kernels[k].at(rho);
        double a = std::abs(ks.value);
        if (a > best.abs_value) best = DecaySample{rho, offsets[k], a, ks.est_error};
      }
    }
    out.samples[i] = best;
  };
  if (opt.jobs <= 1) {
    for (std::size_t i = 0; i < rhos.size(); ++i) work(i);
  } else {
    std::vector<std::thread> th;
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(opt.jobs), rhos.size());
    for (std::size_t t = 0; t < nt; ++t)
      th.emplace_back([&, t] {
        for (std::size_t i = t; i < rhos.size(); i += nt) work(i);
      });
    for (auto& x : th) x.join();
  }

  double run = 0.0;
  out.envelope.resize(rhos.size());
  for (std::size_t i = rhos.size(); i-- > 0;) {
    run = std::max(run, out.samples[i].abs_value);
    out.envelope[i] = {rhos[i], run};
  }
  for (const auto& s : out.samples)
    if (!(s.est_error < 0.5 * s.abs_value)) ++out.noisy;
  out.inconclusive = out.noisy == static_cast<int>(out.samples.size());

  std::vector<std::pair<double, double>> pts;
  for (const auto& [rho, env] : out.envelope)
    if (env > 0.0) pts.emplace_back(1.0 / rho, env);
  if (pts.size() >= 8) {
    out.fit = fit_exponents(pts);
  } else {
    out.inconclusive = true;
  }
  return out;
}

}  // namespace oscdecay
