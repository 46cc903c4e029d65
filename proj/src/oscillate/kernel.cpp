#include "oscdecay/oscillate.hpp"

#include <cmath>
#include <limits>

namespace oscdecay {

LineKernel::LineKernel(const MultiplierSpec& spec, double theta, double offset, double tol, int jobs)
    : theta_(theta), offset_(offset), x0_(spec.x0), y0_(spec.y0) {
  ProfileOptions po;
  po.tol = tol;
  po.weighted = true;
  po.inner_freq = offset;
  po.jobs = jobs;
  Frame f = Frame::along(theta);
  po.refine = 0;
  coarse_ = build_profile(spec, f, po);
  po.refine = 1;
  fine_ = build_profile(spec, f, po);
}

KernelSample LineKernel::at(double rho) const {
  KernelSample k;
  double c = std::cos(theta_), s = std::sin(theta_);
  k.t = rho * c - offset_ * s;
  k.u = rho * s + offset_ * c;
  std::complex<double> v0 = coarse_.transform(rho), v1 = fine_.transform(rho);
  std::complex<double> base = std::polar(1.0, k.t * x0_ + k.u * y0_);
  k.value = v1 * base;
  k.est_error = std::abs(v1 - v0);
  k.converged = coarse_.finite && fine_.finite && fine_.converged;
  if (!k.converged && !(coarse_.finite && fine_.finite)) k.est_error = std::numeric_limits<double>::infinity();
  return k;
}

KernelSample kernel_eval(const MultiplierSpec& spec, double t, double u, double tol, const KernelOptions& opt) {
  double rho = std::hypot(t, u);
  double theta = rho > 0.0 ? std::atan2(u, t) : 0.0;
  double ptol = 1e-2 * tol / (1 << (2 * opt.refine));
  LineKernel lk(spec, theta, 0.0, ptol, opt.jobs);
  KernelSample k = lk.at(rho);
  k.t = t;
  k.u = u;
  k.converged = k.converged && k.est_error <= tol * (1.0 + std::abs(k.value));
  return k;
}

}  // namespace oscdecay
