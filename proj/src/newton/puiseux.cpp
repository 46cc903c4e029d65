#include "oscdecay/newton.hpp"

#include <algorithm>
#include <cmath>

namespace oscdecay {

namespace {

bool vanishes_on_axis(const RealPoly& p) {
  for (const auto& [m, c] : p.terms())
    if (m.ey == 0) return false;
  return true;
}

std::vector<double> dense_edge(const EdgePoly& e) {
  Rational lo = e.low();
  std::vector<double> coeffs;
  for (const auto& [j, v] : e.coef) {
    Rational k = j - lo;
    if (!is_integer(k)) throw ResolutionError("edge polynomial with fractional powers of y");
    std::size_t idx = static_cast<std::size_t>(k.numerator());
    if (coeffs.size() <= idx) coeffs.resize(idx + 1, 0.0);
    coeffs[idx] += v;
  }
  return coeffs;
}

bool same_series(const FractionalSeries& a, const FractionalSeries& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t k = 0; k < a.terms.size(); ++k) {
    if (a.terms[k].q != b.terms[k].q) return false;
    if (std::fabs(a.terms[k].c - b.terms[k].c) > 1e-9 * (1.0 + std::fabs(a.terms[k].c))) return false;
  }
  return true;
}

struct Expander {
  Rational order;
  int max_depth;
  std::vector<FractionalSeries> out;

  void record(FractionalSeries s) {
    if (s.terms.empty()) return;
    s.truncation_order = order;
    s.normalize();
    for (const auto& b : out)
      if (same_series(b, s)) return;
    out.push_back(std::move(s));
  }

  void expand(const RealPoly& P0, const FractionalSeries& acc, const Rational& q_prev, int depth) {
    RealPoly P = P0.cleaned();
    if (P.is_zero()) return;
    if (!acc.terms.empty() && vanishes_on_axis(P)) record(acc);
    if (depth > max_depth) {
      record(acc);
      return;
    }
    NewtonPolygon poly = newton_polygon(P);
    bool beyond = false;
    for (const auto& e : poly.edges) {
      Rational q = e.q();
      if (acc.terms.empty() ? q < 1 : q <= q_prev) continue;
      if (q > order) {
        beyond = true;
        continue;
      }
      EdgePoly ep = edge_poly(P, q);
      for (const auto& r : real_roots(dense_edge(ep))) {
        if (r.value == 0.0) continue;
        FractionalSeries step;
        step.terms.push_back({q, r.value});
        FractionalSeries next = acc.plus(step);
        expand(compose_shift(P, step, +1), next, q, depth + 1);
      }
    }
    if (!acc.terms.empty() && beyond && !vanishes_on_axis(P)) record(acc);
  }
};

}  // namespace

std::vector<FractionalSeries> puiseux_branches(const RealPoly& f, const Rational& order) {
  if (f.is_zero()) throw ResolutionError("zero polynomial has no branches");
  if (order < 1) throw ResolutionError("truncation order must be at least 1");
  int deg = static_cast<int>(std::ceil(to_double(f.degree())));
  Expander ex{order, 2 * deg + 4, {}};
  ex.expand(f, FractionalSeries{}, Rational(0), 0);
  std::sort(ex.out.begin(), ex.out.end(), [](const FractionalSeries& a, const FractionalSeries& b) {
    if (a.leading().q != b.leading().q) return a.leading().q < b.leading().q;
    return a.leading().c < b.leading().c;
  });
  return ex.out;
}

std::vector<FractionalSeries> puiseux_branches(const BivariatePoly& f, const Rational& order) {
  return puiseux_branches(f.to_real(), order);
}

}  // namespace oscdecay
