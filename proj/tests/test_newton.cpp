#include "doctest.h"
#include "support.hpp"

#include "oscdecay/newton.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace oscdecay;

namespace {

using V = NewtonPolygon::Vertex;

MultiplierSpec disk_spec(const std::string& poly, double gamma, double R = 0.5) {
  return parse_spec("factor { poly = \"" + poly + "\", gamma = " + std::to_string(gamma) + " } region { disk = " +
                    std::to_string(R) + " }");
}

// Points of the covered square that fall in exactly one sliver.
double partition_defect(const Resolution& res, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  auto charts = make_charts(res.split_m, res.split_mp);
  double bmax = 1.0;
  for (const auto& c : charts) bmax = std::max(bmax, c.b);
  double L = res.x_max * bmax;
  std::uniform_real_distribution<double> u(-L, L);
  int bad = 0, inside = 0;
  for (int k = 0; k < samples; ++k) {
    double x = u(rng), y = u(rng);
    bool covered = false;
    for (const auto& c : charts) {
      auto [X, Y] = c.from_plane(x, y);
      if (X > 0 && X < res.x_max && Y > 0 && Y < c.b * X) covered = true;
    }
    int hits = 0;
    for (const auto& s : res.slivers) {
      double X, Y;
      if (s.locate(x, y, X, Y)) ++hits;
    }
    if (covered) ++inside;
    if (hits != (covered ? 1 : 0)) ++bad;
  }
  return inside ? static_cast<double>(bad) / inside : 1.0;
}

}  // namespace

TEST_SUITE("newton") {
  TEST_CASE("newton polygon examples") {
    auto p = newton_polygon(parse_poly("y^2 - x^3"));
    REQUIRE(p.vertices.size() == 2);
    CHECK(p.vertices[0] == V{0, 2});
    CHECK(p.vertices[1] == V{3, 0});
    REQUIRE(p.edges.size() == 1);
    CHECK(p.edges[0].slope == Rational(-2, 3));

    auto q = newton_polygon(parse_poly("x"));
    REQUIRE(q.vertices.size() == 1);
    CHECK(q.edges.empty());

    auto r = newton_polygon(parse_poly("x^2*y + x*y^3 + x^5"));
    REQUIRE(r.vertices.size() == 3);
    CHECK(r.vertices[0] == V{1, 3});
    CHECK(r.vertices[1] == V{2, 1});
    CHECK(r.vertices[2] == V{5, 0});
  }

  TEST_CASE("newton polygon against brute-force supporting lines") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      std::map<Monomial, Rational> m;
      int n = 1 + static_cast<int>(rng() % 7);
      for (int k = 0; k < n; ++k) m[Monomial{Rational(rng() % 7), Rational(rng() % 7)}] = Rational(1);
      auto f = BivariatePoly::from_map(m);
      auto poly = newton_polygon(f);
      // every vertex is the unique minimiser of i + s j for some s > 0, and every point lies above each edge
      for (const auto& e : poly.edges) {
        Rational q = e.q();
        Rational w = poly.vertices[e.from].i + q * poly.vertices[e.from].j;
        CHECK(poly.vertices[e.to].i + q * poly.vertices[e.to].j == w);
        for (const auto& t : f.terms) CHECK(t.i + q * t.j >= w);
      }
      for (std::size_t k = 0; k + 1 < poly.vertices.size(); ++k) {
        CHECK(poly.vertices[k].i < poly.vertices[k + 1].i);
        CHECK(poly.vertices[k].j > poly.vertices[k + 1].j);
      }
      for (std::size_t k = 0; k + 1 < poly.edges.size(); ++k) CHECK(poly.edges[k].q() < poly.edges[k + 1].q());
    }
  }

  TEST_CASE("leading forms") {
    CHECK(leading_form(parse_poly("y^2 - x^3")) == parse_poly("y^2"));
    CHECK(leading_form(parse_poly("x + y + x^2")) == parse_poly("x + y"));
    CHECK(leading_form(parse_poly("7 + x")) == parse_poly("7"));
  }

  TEST_CASE("root directions") {
    auto d1 = root_directions(disk_spec("x", 1.0));
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].theta == doctest::Approx(std::numbers::pi / 2));
    auto d2 = root_directions(disk_spec("y^2 - x^3", 0.25));
    REQUIRE(d2.size() == 1);
    CHECK(d2[0].theta == doctest::Approx(0.0));
    CHECK(root_directions(disk_spec("x^2 + y^2", 1.0)).empty());
    CHECK(root_directions(disk_spec("7 + x", 1.0)).empty());
    auto d3 = root_directions(disk_spec("(y - x)*(y + 2*x)", 1.0));
    REQUIRE(d3.size() == 2);
    CHECK(d3[0].theta == doctest::Approx(std::numbers::pi / 4));
    CHECK(d3[1].theta == doctest::Approx(std::atan2(-2.0, 1.0) + std::numbers::pi));
    auto d4 = root_directions(fixture("horn112.spec"));
    REQUIRE(d4.size() == 2);  // x = 0 from x, and y = 0 from y - x^2 and both curves
  }

  TEST_CASE("real roots with multiplicity") {
    auto r = real_roots({-2.0, 5.0, -4.0, 1.0});  // (t-1)^2 (t-2)
    REQUIRE(r.size() == 2);
    CHECK(r[0].value == doctest::Approx(1.0));
    CHECK(r[0].multiplicity == 2);
    CHECK(r[1].value == doctest::Approx(2.0));
    CHECK(real_roots({1.0, 0.0, 1.0}).empty());
  }

  TEST_CASE("puiseux examples") {
    auto b1 = puiseux_branches(parse_poly("y - x^2"), Rational(8));
    REQUIRE(b1.size() == 1);
    REQUIRE(b1[0].terms.size() == 1);
    CHECK(b1[0].terms[0].q == 2);
    CHECK(b1[0].terms[0].c == doctest::Approx(1.0));

    auto b2 = puiseux_branches(parse_poly("y^2 - x^3"), Rational(8));
    REQUIRE(b2.size() == 2);
    CHECK(b2[0].leading().q == Rational(3, 2));
    CHECK(b2[0].leading().c == doctest::Approx(-1.0));
    CHECK(b2[1].leading().c == doctest::Approx(1.0));

    auto b3 = puiseux_branches(parse_poly("(y - x)*(y - 2*x)"), Rational(8));
    REQUIRE(b3.size() == 2);
    CHECK(b3[0].leading().c == doctest::Approx(1.0));
    CHECK(b3[1].leading().c == doctest::Approx(2.0));

    CHECK(puiseux_branches(parse_poly("y^2 + x^2"), Rational(8)).empty());
  }

  TEST_CASE("puiseux residuals vanish to high order") {
    for (const char* p : {"y - x^2 + y^2", "y^2 - x^3 - x^4", "(y - x)*(y - 2*x) + x^5", "y^3 - x^4*y + x^7",
                          "(y - x^2)^2 - x^5"}) {
      RealPoly f = parse_poly(p).to_real();
      auto branches = puiseux_branches(f, Rational(8));
      CHECK_MESSAGE(!branches.empty(), p);
      for (const auto& k : branches) {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
          double x = 0.05 * std::pow(10.0, -2.0 * i / 19.0);
          double y = k.eval(x);
          // residual relative to the size of the terms that cancel
          double scale = 0.0;
          for (const auto& [m, c] : f.terms()) scale = std::max(scale, std::fabs(c * rpow(x, m.ex) * rpow(y, m.ey)));
          double res = std::fabs(f.eval(x, y));
          worst = std::max(worst, res / (scale * std::pow(x, 2.0)));
        }
        CHECK_MESSAGE(worst < 1e-2, p << " branch " << k.to_string());
      }
    }
  }

  TEST_CASE("xy is already monomial in every chart") {
    auto res = resolve(fixture("xy.spec"));
    CHECK(res.slivers.size() == 8);
    for (const auto& s : res.slivers) {
      CHECK(s.shift.is_zero());
      CHECK(std::fabs(s.per_factor[0].d) == doctest::Approx(1.0));
      CHECK(s.per_factor[0].alpha == 1);
      CHECK(s.per_factor[0].beta == 1);
    }
  }

  TEST_CASE("cusp branch shift") {
    auto res = resolve(fixture("cusp.spec"));
    bool found = false;
    for (const auto& s : res.slivers) {
      if (s.chart.code != 0 || s.shift.is_zero() || s.kind != "vertex" || !s.lower.is_zero()) continue;
      if (s.shift.leading().q == Rational(3, 2) && std::fabs(s.shift.leading().c - 1.0) < 1e-12) {
        found = true;
        CHECK(s.per_factor[0].beta == 1);
        CHECK(s.per_factor[0].alpha == Rational(3, 2));
        CHECK(std::fabs(s.per_factor[0].d) == doctest::Approx(2.0));
      }
    }
    CHECK(found);
  }

  TEST_CASE("horn example monomialises y - x^2 to y") {
    auto spec = fixture("horn112.spec");
    auto res = resolve(spec);
    bool found = false;
    double in_area = 0.0;
    for (const auto& s : res.slivers) {
      if (s.in_region) in_area += sliver_area_local(s);
      if (s.chart.code == 0 && s.sign == 1 && s.kind == "vertex" && s.lower.is_zero() && s.shift.terms.size() == 1 &&
          s.shift.leading().q == 2 && s.shift.leading().c == 1.0) {
        found = true;
        CHECK(s.per_factor[1].alpha == 0);
        CHECK(s.per_factor[1].beta == 1);
        CHECK(s.per_factor[1].d == doctest::Approx(1.0));
      }
    }
    CHECK(found);
    double a = res.x_max;
    CHECK(in_area == doctest::Approx(a * a * a / 3.0).epsilon(1e-6));
  }

  TEST_CASE("certificates, coverage and area preservation") {
    for (const char* name : {"xy.spec", "cusp.spec", "lines.spec", "horn112.spec"}) {
      auto spec = fixture(name);
      auto res = resolve(spec);
      for (const auto& c : res.certificates) CHECK_MESSAGE(c.passes(), name << " sliver " << c.sliver_id);
      double sum = 0.0;
      for (const auto& s : res.slivers) {
        double loc = sliver_area_local(s);
        sum += loc;
        CHECK(sliver_area_plane(s) == doctest::Approx(loc).epsilon(1e-8));
      }
      CHECK_MESSAGE(std::fabs(sum / res.covered_area() - 1.0) < 0.01, name);
      CHECK_MESSAGE(partition_defect(res, 4000, 5) < 0.01, name);
    }
  }

  TEST_CASE("vertex slivers agree with the polygon of the shifted factor") {
    auto spec = fixture("cusp.spec");
    auto res = resolve(spec);
    for (const auto& s : res.slivers) {
      if (s.kind != "vertex") continue;
      RealPoly Q = compose_shift(s.chart.pull_back(spec.factors[0].f.to_real()), s.shift, s.sign).cleaned();
      double M = s.upper_exponent();
      double m = s.lower.is_zero() ? M + 1.0 : s.lower_exponent();
      Rational sm = Rational(static_cast<std::int64_t>(std::lround((M + m) * 500)), 1000);
      Rational best_w;
      Monomial best;
      bool first = true;
      for (const auto& [mono, c] : Q.terms()) {
        Rational w = mono.ex + sm * mono.ey;
        if (first || w < best_w) {
          best_w = w;
          best = mono;
          first = false;
        }
      }
      CHECK(best.ex == s.per_factor[0].alpha);
      CHECK(best.ey == s.per_factor[0].beta);
    }
  }

  TEST_CASE("monomialize_check examples") {
    auto spec = fixture("abs_x.spec");
    auto res = resolve(spec);
    const Sliver* s0 = nullptr;
    for (const auto& s : res.slivers)
      if (s.chart.code == 0) s0 = &s;
    REQUIRE(s0 != nullptr);
    auto c = monomialize_check(*s0, 0, spec.factors[0].f, 0.3, SampleGrid{});
    CHECK(c.max_observed_ratio_error == doctest::Approx(0.0));

    auto cusp = fixture("cusp.spec");
    auto rc = resolve(cusp);
    for (const auto& s : rc.slivers) {
      auto cc = monomialize_check(s, 0, cusp.factors[0].f, 0.3, SampleGrid{});
      CHECK(cc.max_observed_ratio_error < 0.3);
    }
    const Sliver& s = rc.slivers.front();
    double X = 0.5 * s.x_max;
    CHECK_THROWS_AS(
        monomialize_check_points(s, 0, cusp.factors[0].f, 0.3, {{X, s.upper.eval(X) * 1.5}}),
        std::invalid_argument);
  }

  TEST_CASE("integrability examples") {
    CHECK(integrability_check(fixture("sep.spec")).integrable);
    auto bad = integrability_check(disk_spec("x", -2.0));
    CHECK_FALSE(bad.integrable);
    CHECK(bad.diagnostic.find("sliver") != std::string::npos);
    auto horn = integrability_check(fixture("wedge_inv_y.spec"));
    CHECK(horn.integrable);
    CHECK(horn.mass_law.power == doctest::Approx(1.0));
    CHECK(horn.mass_law.logpower == 1);
    auto sep = integrability_check(fixture("sep.spec"));
    CHECK(sep.mass_law.power == doctest::Approx(0.4));
    CHECK(sep.mass_law.logpower == 0);
    CHECK(integrability_check(fixture("horn112.spec")).mass_law.power == doctest::Approx(1.2));
    CHECK_FALSE(integrability_check(disk_spec("x - 0.3", -1.0)).integrable);
    CHECK(lp_check(fixture("sep.spec"), 1.2).integrable);
    CHECK_FALSE(lp_check(fixture("sep.spec"), 2.0).integrable);
  }
}
