#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "oscdecay/oscillate.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace oscdecay;

namespace {

const double kPi = std::numbers::pi;
using cd = std::complex<double>;

}  // namespace

TEST_SUITE("oscillate") {
  TEST_CASE("disk indicator matches the Bessel form") {
    auto d = fixture("disk.spec");
    for (double rho : {5.0, 10.0, 20.0, 50.0, 100.0}) {
      auto k = kernel_eval(d, rho, 0.0, 1e-8);
      double oracle = 2.0 * kPi * std::cyl_bessel_j(1.0, rho) / rho;
      CHECK(std::abs(k.value - oracle) <= 1e-8 * (1.0 + std::abs(oracle)));
      CHECK(k.est_error <= 1e-8 * (1.0 + std::abs(k.value)));
      CHECK(k.converged);
    }
    // rotation invariance
    auto k = kernel_eval(d, 6.0, 8.0, 1e-8);
    CHECK(std::abs(k.value - 2.0 * kPi * std::cyl_bessel_j(1.0, 10.0) / 10.0) <= 1e-8);
  }

  TEST_CASE("separable kernel factors into 1D transforms") {
    auto s = fixture("sep.spec");
    for (auto [t, u] : {std::pair{3.0, 0.0}, {10.0, 7.0}, {-20.0, 40.0}, {0.0, 100.0}}) {
      auto k = kernel_eval(s, t, u, 1e-8);
      double oracle = sep_slice(t) * sep_slice(u);
      CHECK(std::abs(k.value - oracle) <= 1e-7 * (1.0 + std::abs(oracle)));
      CHECK(std::fabs(k.value.imag()) <= 1e-7 * (1.0 + std::abs(oracle)));
    }
  }

  TEST_CASE("zero frequency equals the weighted mass") {
    for (const char* name : {"disk.spec", "sep.spec", "wedge_inv_y.spec", "horn112.spec"}) {
      auto spec = fixture(name);
      auto k = kernel_eval(spec, 0.0, 0.0, 1e-8);
      MassOptions mo;
      mo.amplitude_weighted = true;
      auto m = disk_mass_q(spec, spec.region.radius(), 1e-8, mo);
      CHECK_MESSAGE(std::abs(k.value - m.value) <= 1e-8 * (1.0 + m.value) + k.est_error + m.est_error, name);
    }
  }

  TEST_CASE("Hermitian symmetry for real multipliers") {
    for (const char* name : {"wedge_inv_y.spec", "horn112.spec", "abs_x.spec"}) {
      auto spec = fixture(name);
      for (auto [t, u] : {std::pair{7.0, -3.0}, {30.0, 45.0}, {-200.0, 10.0}}) {
        auto a = kernel_eval(spec, t, u, 1e-8);
        auto b = kernel_eval(spec, -t, -u, 1e-8);
        CHECK_MESSAGE(std::abs(a.value - std::conj(b.value)) <= 2.0 * (a.est_error + b.est_error) + 1e-12, name);
      }
    }
  }

  TEST_CASE("base point contributes a pure phase") {
    auto a = parse_spec("region { disk = 1 }");
    auto b = parse_spec("region { disk = 1 } base = (0.3, -0.7)");
    double t = 4.0, u = 9.0;
    auto ka = kernel_eval(a, t, u, 1e-8), kb = kernel_eval(b, t, u, 1e-8);
    CHECK(std::abs(kb.value - ka.value * std::polar(1.0, 0.3 * t - 0.7 * u)) <= 1e-9);
  }

  TEST_CASE("van der Corput for the quadratic phase") {
    for (double lam : {10.0, 1e2, 1e3, 1e4}) {
      auto h = [lam](double x) { return 0.5 * lam * x * x; };
      auto one = [](double) { return 1.0; };
      cd measured = phase_integral(h, one, 0.0, 1.0, 1e-13);
      CHECK(std::abs(measured - fresnel(lam)) <= 1e-10);
      double bound = vdc_reference(2, lam, 0.0, 1.0, VdcAmplitude{1.0, 0.0});
      CHECK(bound == doctest::Approx(8.0 / std::sqrt(lam)));
      CHECK(std::abs(measured) <= bound);
    }
  }

  TEST_CASE("van der Corput for a linear phase") {
    for (double lam : {3.0, 40.0, 500.0}) {
      auto h = [lam](double x) { return lam * x; };
      auto one = [](double) { return 1.0; };
      cd measured = phase_integral(h, one, 0.0, 1.0, 1e-13);
      cd exact = (std::polar(1.0, lam) - 1.0) / cd(0.0, lam);
      CHECK(std::abs(measured - exact) <= 1e-11);
      CHECK(std::abs(measured) <= 2.0 / lam + 1e-14);
      CHECK(2.0 / lam <= vdc_reference(1, lam, 0.0, 1.0, VdcAmplitude{1.0, 0.0}, true));
    }
    CHECK_THROWS(vdc_reference(1, 1.0, 0.0, 1.0, VdcAmplitude{}));
    CHECK(vdc_reference(2, 5.0, 0.0, 1.0, VdcAmplitude{0.0, 0.0}) == 0.0);
    CHECK(vdc_constant(1) == 3.0);
    CHECK(vdc_constant(2) == 8.0);
  }

  TEST_CASE("decay envelopes") {
    DecayOptions o;
    auto disk = decay_fit(fixture("disk.spec"), RayPath{Direction::from_angle(0.3)}, o);
    CHECK(std::fabs(disk.fit.exponents.power - 1.5) <= 0.08);
    CHECK_FALSE(disk.inconclusive);

    auto bump = decay_fit(parse_spec("region { disk = 1 } amplitude { product_bump = 0.5 }"),
                          RayPath{Direction::from_angle(0.0)}, o);
    CHECK((bump.inconclusive || bump.fit.exponents.power > 3.0));

    auto s = fixture("sep.spec");
    auto ax = decay_fit(s, RayPath{Direction::from_angle(0.0)}, o);
    CHECK(std::fabs(ax.fit.exponents.power - 0.2) <= 0.05);
    auto di = decay_fit(s, RayPath{Direction::from_angle(kPi / 4)}, o);
    CHECK(std::fabs(di.fit.exponents.power - 0.4) <= 0.05);

    auto strip = decay_fit(fixture("disk.spec"), StripPath{Direction::from_angle(0.0), 2.0}, o);
    CHECK(std::fabs(strip.fit.exponents.power - 1.5) <= 0.1);
    CHECK(strip.samples.size() == static_cast<std::size_t>(o.samples));
  }

  TEST_CASE("horn example decays near the 1/2 + eta law") {
    auto r = decay_fit(fixture("horn112.spec"), RayPath{Direction::from_angle(kPi / 2)});
    CHECK(std::fabs(r.fit.exponents.power - 0.6) <= 0.05);
    CHECK(r.noisy == 0);
  }

  TEST_CASE("decay samples are deterministic across job counts") {
    DecayOptions a, b;
    a.samples = b.samples = 8;
    b.jobs = 4;
    auto s = fixture("wedge_inv_y.spec");
    auto ra = decay_fit(s, RayPath{Direction::from_angle(1.0)}, a);
    auto rb = decay_fit(s, RayPath{Direction::from_angle(1.0)}, b);
    REQUIRE(ra.samples.size() == rb.samples.size());
    for (std::size_t i = 0; i < ra.samples.size(); ++i) CHECK(ra.samples[i].abs_value == rb.samples[i].abs_value);
  }
}
