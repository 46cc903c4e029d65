#include "doctest.h"
#include "support.hpp"

#include <random>

using namespace oscdecay;

TEST_SUITE("funcspec") {
  TEST_CASE("single factor on a disk") {
    auto s = parse_spec(R"(factor { poly = "y^2 - x^3", gamma = 0.25 } region { disk = 0.5 })");
    REQUIRE(s.factors.size() == 1);
    CHECK(s.factors[0].gamma == 0.25);
    CHECK(std::holds_alternative<DiskRegion>(s.region.kind));
    CHECK(s.region.radius() == 0.5);
    CHECK(s.factors[0].f.terms.size() == 2);
  }

  TEST_CASE("empty polynomial is a syntax error") {
    CHECK_THROWS_AS(parse_spec(R"(factor { poly = "", gamma = 1 } region { disk = 1 })"), ParseError);
  }

  TEST_CASE("horn example parses with two factors and one sector") {
    auto s = fixture("horn112.spec");
    REQUIRE(s.factors.size() == 2);
    CHECK(s.factors[1].gamma == doctest::Approx(-0.9));
    CHECK(s.factors[1].f == parse_poly("y - x^2"));
    auto& sec = std::get<SectorsRegion>(s.region.kind);
    REQUIRE(sec.sectors.size() == 1);
    CHECK(sec.sectors[0].lower.h.leading().q == 2);
    CHECK(sec.sectors[0].upper.h.leading().c == 2.0);
    CHECK(s.region.contains(0.1, 0.015));
    CHECK_FALSE(s.region.contains(0.1, 0.005));
    CHECK_FALSE(s.region.contains(0.1, 0.025));
    CHECK_FALSE(s.region.contains(-0.1, 0.015));
  }

  TEST_CASE("parse errors carry line and column") {
    try {
      parse_spec("region { disk = 1 }\nfactor { poly = \"x +* y\", gamma = 1 }");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() > 17);
    }
  }

  TEST_CASE("semantic errors") {
    CHECK_THROWS_AS(parse_poly("x + y + x"), SemanticError);
    CHECK_THROWS_AS(parse_poly("x - x"), SemanticError);
    CHECK_THROWS_AS(parse_spec(R"(factor { poly = "x - x", gamma = 1 } region { disk = 1 })"), SemanticError);
    // boundary curves that cross inside the disk
    CHECK_THROWS_AS(parse_spec(R"(region { sector { lower = "y = x^2, x > 0", upper = "y = x^2 + 3*x^3, x > 0" }
                                    sector { lower = "y = 2*x^2, x > 0", upper = "y = x, x > 0" } radius = 0.5 })"),
                    SemanticError);
  }

  TEST_CASE("polynomial syntax") {
    auto p = parse_poly("(x + y)^2 - 2*x*y");
    CHECK(p == parse_poly("x^2 + y^2"));
    auto q = parse_poly("x^(3/2)*y \xE2\x88\x92 0.5*y^2");
    REQUIRE(q.terms.size() == 2);
    CHECK(q.ramification() == 2);
    CHECK(q.eval(4.0, 1.0) == doctest::Approx(7.5));
    CHECK(parse_poly("(1/3)*x") == parse_poly("x/3"));
    CHECK_THROWS_AS(parse_poly("(x + y)^(1/2)"), ParseError);
  }

  TEST_CASE("curves") {
    auto c = parse_curve("x = y^(3/2), y < 0");
    CHECK(c.axis == CurveSpec::Axis::XofY);
    CHECK(c.half == -1);
    auto [px, py] = c.point(4.0);
    CHECK(px == doctest::Approx(8.0));
    CHECK(py == doctest::Approx(-4.0));
    CHECK(c.boundary_poly().eval(px, py) == doctest::Approx(0.0));
    CHECK_THROWS_AS(parse_curve("y = 1 + x, x > 0"), SemanticError);
    CHECK_THROWS_AS(parse_curve("y = x^2"), ParseError);
  }

  TEST_CASE("round trip on the shipped fixtures") {
    for (const char* name : {"disk.spec", "unit.spec", "abs_x.spec", "wedge_inv_y.spec", "sep.spec",
                             "horn112.spec", "xy.spec", "cusp.spec", "lines.spec"}) {
      auto s = fixture(name);
      CHECK_MESSAGE(parse_spec(serialize(s)) == s, name);
    }
  }

  TEST_CASE("round trip on random specs") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> e(0, 4), c(-9, 9), nt(1, 4), den(1, 3);
    std::uniform_real_distribution<double> g(-0.95, 2.0), rad(0.1, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      MultiplierSpec s;
      int nf = 1 + trial % 3;
      for (int k = 0; k < nf; ++k) {
        std::map<Monomial, Rational> m;
        int n = nt(rng);
        for (int t = 0; t < n; ++t) {
          int cc = c(rng);
          if (cc == 0) cc = 1;
          m[Monomial{Rational(e(rng), den(rng)), Rational(e(rng))}] = Rational(cc, den(rng));
        }
        s.factors.push_back(Factor{BivariatePoly::from_map(m), g(rng)});
      }
      if (trial % 2) {
        s.region.kind = DiskRegion{rad(rng)};
      } else {
        SectorsRegion sr;
        sr.radius = 0.3;
        sr.sectors.push_back({parse_curve("y = 0.5*x^2, x > 0"), parse_curve("y = 1.25*x + 3*x^(5/2), x > 0"),
                              trial % 4 == 0});
        s.region.kind = sr;
      }
      if (trial % 3 == 1) s.amplitude = BumpAmplitude{rad(rng)};
      if (trial % 3 == 2) s.amplitude = ProductBumpAmplitude{rad(rng)};
      if (trial % 5 == 0) {
        s.x0 = g(rng);
        s.y0 = g(rng);
      }
      std::string text = serialize(s);
      CHECK_MESSAGE(parse_spec(text) == s, text);
    }
  }

  TEST_CASE("fuzzed input never escapes as anything but a spec error") {
    std::mt19937 rng(11);
    const std::string alphabet = "factor{poly=\"x^y()+-*/,0123456789.e}region disk sector lower upper radius#\n ";
    std::string seed = fixture_text("horn112.spec");
    for (int trial = 0; trial < 3000; ++trial) {
      std::string t;
      if (trial % 2) {
        int n = static_cast<int>(rng() % 80);
        for (int k = 0; k < n; ++k) t += alphabet[rng() % alphabet.size()];
      } else {
        t = seed;
        int edits = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < edits; ++k) {
          std::size_t pos = rng() % t.size();
          t[pos] = static_cast<char>(rng() % 256);
        }
      }
      try {
        parse_spec(t);
      } catch (const ParseError&) {
      } catch (const SemanticError&) {
      }
    }
    CHECK(true);
  }

  TEST_CASE("direction vectors") {
    Direction d = Direction::from_angle(4.0);
    CHECK(d.theta >= 0.0);
    CHECK(d.theta < std::numbers::pi);
    CHECK(d.vx() * d.px() + d.vy() * d.py() == doctest::Approx(0.0));
    CHECK(d.vx() * d.vx() + d.vy() * d.vy() == doctest::Approx(1.0));
  }
}
