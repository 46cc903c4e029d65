#include "doctest.h"
#include "support.hpp"

#include "oscdecay/measure.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace oscdecay;

namespace {

const double kPi = std::numbers::pi;

// int over {x^2 < y < min(x, sqrt(r^2 - x^2))} of dy / y, one variable left
double wedge_oracle(double r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [r](double x) {
    if (!(x > 0.0)) return 0.0;
    double up = std::min(x, std::sqrt(std::max(0.0, r * r - x * x)));
    return up > x * x ? std::log(up) - 2.0 * std::log(x) : 0.0;
  };
  double knee = r / std::numbers::sqrt2;
  double top = std::sqrt((std::sqrt(1.0 + 4.0 * r * r) - 1.0) / 2.0);  // x^2 = sqrt(r^2 - x^2)
  return ts.integrate(f, 0.0, knee) + ts.integrate(f, knee, top);
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("g_eval point values") {
    CHECK(g_eval(fixture("abs_x.spec"), -0.3, 0.1) == doctest::Approx(0.3));
    auto w = fixture("wedge_inv_y.spec");
    CHECK(g_eval(w, 0.5, 0.1) == 0.0);
    CHECK(g_eval(w, 0.3, 0.2) == doctest::Approx(5.0));
    CHECK(std::isinf(g_eval(fixture("horn112.spec"), 0.5, 0.25)));
  }

  TEST_CASE("disk masses against closed forms") {
    double r = 0.3;
    CHECK(disk_mass(fixture("unit.spec"), r, 1e-10) == doctest::Approx(kPi * r * r).epsilon(1e-9));
    CHECK(disk_mass(fixture("abs_x.spec"), r, 1e-10) == doctest::Approx(4.0 / 3.0 * r * r * r).epsilon(1e-9));
    // separable: 4 B(0.1, 0.1) r^0.4 / 0.4 quarter-plane polar integral
    double beta = std::tgamma(0.1) * std::tgamma(0.1) / std::tgamma(0.2);
    double r2 = 0.01;
    CHECK(disk_mass(fixture("sep.spec"), r2, 1e-10) ==
          doctest::Approx(2.0 * beta / 0.4 * std::pow(r2, 0.4)).epsilon(1e-7));
  }

  TEST_CASE("log-singular wedge mass matches the iterated oracle") {
    auto w = fixture("wedge_inv_y.spec");
    for (double r : {1e-4, 1e-3, 1e-2, 0.1}) {
      double m = disk_mass(w, r, 1e-10);
      CHECK(m == doctest::Approx(wedge_oracle(r)).epsilon(1e-7));
      double box = r * (1.0 + std::log(1.0 / r));
      CHECK(m / box > 0.5);
      CHECK(m / box < 2.0);
    }
  }

  TEST_CASE("strip masses") {
    auto u = fixture("unit.spec");
    Direction e1 = Direction::from_angle(0.0);
    CHECK(strip_mass(u, e1, 1e-3, 0.3, 1e-10) == doctest::Approx(4e-3 * 0.3).epsilon(1e-9));
    auto s = fixture("sep.spec");
    for (double r : {1e-5, 1e-3, 1e-2}) {
      double exact = (2.0 * std::pow(r, 0.2) / 0.2) * (2.0 * std::pow(0.5, 0.2) / 0.2);
      CHECK(strip_mass(s, e1, r, 0.5, 1e-10) == doctest::Approx(exact).epsilon(1e-7));
    }
  }

  TEST_CASE("strips dominate disks and masses grow with r and c") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    for (const char* name : {"unit.spec", "abs_x.spec", "sep.spec", "wedge_inv_y.spec", "horn112.spec"}) {
      auto spec = fixture(name);
      double c = 0.5 * working_radius(spec);
      for (int k = 0; k < 3; ++k) {
        Direction v = Direction::from_angle(ang(rng));
        double prev = 0.0;
        for (double r : {1e-4, 1e-3, 1e-2}) {
          double d = disk_mass(spec, r, 1e-8);
          double st = strip_mass(spec, v, r, c, 1e-8);
          CHECK_MESSAGE(st >= d * (1.0 - 1e-8), name);
          CHECK(st >= prev);
          CHECK(strip_mass(spec, v, r, 0.5 * c, 1e-8) <= st * (1.0 + 1e-8));
          prev = st;
        }
      }
    }
  }

  TEST_CASE("refinement levels agree") {
    for (const char* name : {"sep.spec", "wedge_inv_y.spec", "horn112.spec"}) {
      auto q = disk_mass_q(fixture(name), 1e-2, 1e-8);
      CHECK(q.converged);
      CHECK(q.est_error <= 2e-8 * q.value);
    }
  }

  TEST_CASE("parallel and serial agree") {
    auto s = fixture("sep.spec");
    MassOptions serial, par;
    par.jobs = 4;
    auto a = strip_mass_q(s, Direction::from_angle(kPi / 4), 1e-3, 0.5, 1e-8, serial);
    auto b = strip_mass_q(s, Direction::from_angle(kPi / 4), 1e-3, 0.5, 1e-8, par);
    CHECK(std::fabs(a.value - b.value) <= 2e-8 * a.value);
  }

  TEST_CASE("fit_exponents on exact models") {
    auto radii = geometric_radii(1e-5, 1e-2, 16);
    auto sample = [&](auto f) {
      std::vector<std::pair<double, double>> s;
      for (double r : radii) s.push_back({r, f(r)});
      return s;
    };
    auto a = fit_exponents(sample([](double r) { return r * r; }));
    CHECK(a.exponents.power == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(a.exponents.logpower == 0);
    CHECK(a.residual < 1e-9);
    auto b = fit_exponents(sample([](double r) { return r * std::log(1.0 / r); }));
    CHECK(b.exponents.power == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.exponents.logpower == 1);
    auto c = fit_exponents(sample([](double r) { return 3.0 * std::pow(r, 0.4); }));
    CHECK(c.exponents.power == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(c.constant == doctest::Approx(3.0).epsilon(1e-9));
    auto d = fit_exponents(sample([](double r) { return r * r * std::pow(std::log(1.0 / r), 2); }));
    CHECK(d.exponents.logpower == 2);
  }

  TEST_CASE("fit_exponents rejects degenerate samples") {
    std::vector<std::pair<double, double>> same(10, {1e-3, 1.0});
    CHECK_THROWS_AS(fit_exponents(same), FitError);
    auto neg = same;
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = {std::pow(0.5, i + 1.0), -1.0};
    CHECK_THROWS_AS(fit_exponents(neg), FitError);
    std::vector<std::pair<double, double>> few{{0.1, 1.0}, {0.01, 0.1}};
    CHECK_THROWS_AS(fit_exponents(few), FitError);
  }

  TEST_CASE("bracketing over the fit window") {
    for (const char* name : {"unit.spec", "abs_x.spec", "wedge_inv_y.spec"}) {
      auto f = disk_fit(fixture(name));
      double lo = 1e300, hi = 0.0;
      for (auto [r, v] : f.samples) {
        double q = v / f.model(r);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
      CHECK_MESSAGE(hi / lo <= 10.0, name);
    }
  }

  TEST_CASE("mass exponents") {
    auto u = disk_fit(fixture("unit.spec"));
    CHECK(u.exponents.power == doctest::Approx(2.0).epsilon(0.01));
    CHECK(u.exponents.logpower == 0);
    auto x = disk_fit(fixture("abs_x.spec"));
    CHECK(x.exponents.power == doctest::Approx(3.0).epsilon(0.05 / 3));
    CHECK(x.exponents.logpower == 0);
    auto w = disk_fit(fixture("wedge_inv_y.spec"));
    CHECK(std::fabs(w.exponents.power - 1.0) <= 0.05);
    CHECK(w.exponents.logpower == 1);
  }

  TEST_CASE("directional exponents") {
    auto s = fixture("sep.spec");
    auto ax = directional_exponent(s, Direction::from_angle(0.0));
    CHECK(std::fabs(ax.power - 0.2) <= 0.03);
    CHECK(ax.logpower == 0);
    auto ay = directional_exponent(s, Direction::from_angle(kPi / 2));
    CHECK(std::fabs(ay.power - 0.2) <= 0.03);
    auto di = directional_exponent(s, Direction::from_angle(kPi / 4));
    CHECK(std::fabs(di.power - 0.4) <= 0.03);
    CHECK(di.logpower == 0);
    auto u = directional_exponent(fixture("unit.spec"), Direction::from_angle(1.0));
    CHECK(std::fabs(u.power - 1.0) <= 0.02);
    CHECK(u.logpower == 0);
    // domination carries over to the fitted exponents
    auto eps = disk_fit(s).exponents.power;
    CHECK(di.power <= eps + 0.05);
  }
}
