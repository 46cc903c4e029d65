#include "oscdecay/newton.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace oscdecay {

namespace {

using V = NewtonPolygon::Vertex;

// z-component of (b - a) x (c - a)
Rational cross(const V& a, const V& b, const V& c) {
  return (b.i - a.i) * (c.j - a.j) - (b.j - a.j) * (c.i - a.i);
}

NewtonPolygon hull_of(std::vector<V> pts) {
  std::sort(pts.begin(), pts.end(), [](const V& a, const V& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  // keep the lowest j per i
  std::vector<V> low;
  for (const auto& p : pts)
    if (low.empty() || low.back().i != p.i) low.push_back(p);

  std::vector<V> chain;
  for (const auto& p : low) {
    while (chain.size() >= 2 && cross(chain[chain.size() - 2], chain.back(), p) <= 0) chain.pop_back();
    chain.push_back(p);
  }
  // cut at the first vertex of minimal j
  std::size_t cut = 0;
  for (std::size_t k = 1; k < chain.size(); ++k)
    if (chain[k].j < chain[cut].j) cut = k;
  chain.resize(cut + 1);

  NewtonPolygon poly;
  poly.vertices = chain;
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    Rational slope = (chain[k + 1].j - chain[k].j) / (chain[k + 1].i - chain[k].i);
    poly.edges.push_back({slope, k, k + 1});
  }
  return poly;
}

double wrap_pi(double a) {
  a = std::fmod(a, std::numbers::pi);
  if (a < 0) a += std::numbers::pi;
  if (std::numbers::pi - a < 1e-12) a = 0.0;
  return a;
}

// Roots of F(sx, c) in c of sign sc (c = sc * s^N, s > 0); F homogeneous.
void ray_roots(const RealPoly& F, int sx, int sc, std::vector<double>& angles) {
  std::int64_t N = F.ramification();
  std::map<std::int64_t, double> dense;
  for (const auto& [m, c] : F.terms()) {
    double v = c;
    if (sx < 0 && is_integer(m.ex) && m.ex.numerator() % 2) v = -v;
    if (sc < 0 && is_integer(m.ey) && m.ey.numerator() % 2) v = -v;
    dense[(m.ey * N).numerator()] += v;
  }
  std::int64_t deg = dense.rbegin()->first;
  std::vector<double> coeffs(static_cast<std::size_t>(deg + 1), 0.0);
  for (const auto& [k, v] : dense) coeffs[static_cast<std::size_t>(k)] = v;
  for (const auto& r : real_roots(coeffs)) {
    if (r.value <= 0) continue;
    double c = sc * std::pow(r.value, static_cast<double>(N));
    angles.push_back(wrap_pi(std::atan2(c, static_cast<double>(sx))));
  }
}

}  // namespace

NewtonPolygon newton_polygon(const RealPoly& f) {
  std::vector<V> pts;
  for (const auto& [m, c] : f.terms()) pts.push_back({m.ex, m.ey});
  return hull_of(std::move(pts));
}

NewtonPolygon newton_polygon(const BivariatePoly& f) {
  std::vector<V> pts;
  for (const auto& t : f.terms) pts.push_back({t.i, t.j});
  return hull_of(std::move(pts));
}

BivariatePoly leading_form(const BivariatePoly& f) {
  BivariatePoly r;
  if (f.terms.empty()) return r;
  Rational o = f.terms.front().i + f.terms.front().j;
  for (const auto& t : f.terms) o = std::min(o, t.i + t.j);
  for (const auto& t : f.terms)
    if (t.i + t.j == o) r.terms.push_back(t);
  return r;
}

std::vector<Direction> root_directions(const MultiplierSpec& spec) {
  std::vector<double> angles;
  for (const auto& fac : spec.factors) {
    BivariatePoly L = leading_form(fac.f);
    if (L.terms.empty() || L.terms.front().i + L.terms.front().j == 0) continue;
    RealPoly F = L.to_real();
    bool has_pure_y = false;
    for (const auto& t : L.terms)
      if (t.i == 0) has_pure_y = true;
    if (!has_pure_y) angles.push_back(std::numbers::pi / 2);
    for (int sx : {1, -1})
      for (int sc : {1, -1}) ray_roots(F, sx, sc, angles);
    // c = 0 lies on neither half of the search
    bool has_pure_x = false;
    for (const auto& t : L.terms)
      if (t.j == 0) has_pure_x = true;
    if (!has_pure_x) angles.push_back(0.0);
  }
  for (const auto& c : spec.region.curves()) angles.push_back(wrap_pi(c.tangent_angle()));

  std::sort(angles.begin(), angles.end());
  std::vector<Direction> out;
  for (double a : angles) {
    if (!out.empty() && std::fabs(a - out.back().theta) < 1e-9) continue;
    out.push_back(Direction{a});
  }
  if (out.size() > 1 && std::numbers::pi - out.back().theta + out.front().theta < 1e-9) out.pop_back();
  return out;
}

double EdgePoly::eval(double c) const {
  double s = 0.0;
  for (const auto& [j, v] : coef) s += v * rpow(c, j);
  return s;
}

double EdgePoly::deriv(double c) const {
  double s = 0.0;
  for (const auto& [j, v] : coef)
    if (j != 0) s += v * to_double(j) * rpow(c, j - 1);
  return s;
}

EdgePoly edge_poly(const RealPoly& f, const Rational& q) {
  EdgePoly e;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    Rational w = m.ex + q * m.ey;
    if (first || w < e.weight) {
      e.weight = w;
      first = false;
    }
  }
  for (const auto& [m, c] : f.terms())
    if (m.ex + q * m.ey == e.weight) e.coef[m.ey] += c;
  return e;
}

std::vector<RealRoot> real_roots(const std::vector<double>& coeffs_in) {
  std::vector<double> c = coeffs_in;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<RealRoot> out;
  if (c.size() <= 1) return out;
  int zero_mult = 0;
  while (c[static_cast<std::size_t>(zero_mult)] == 0.0) ++zero_mult;
  if (zero_mult) {
    out.push_back({0.0, zero_mult});
    c.erase(c.begin(), c.begin() + zero_mult);
  }
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return out;

  auto horner = [&](const std::vector<double>& p, double x) {
    double s = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
    return s;
  };

  std::vector<std::complex<double>> z;
  if (n == 1) {
    z.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    for (int k = 0; k < n; ++k) comp(k, n - 1) = -c[static_cast<std::size_t>(k)] / c[static_cast<std::size_t>(n)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int k = 0; k < n; ++k) z.push_back(es.eigenvalues()[k]);
  }

  // Single-linkage clustering: multiple roots come back split by ~eps^(1/mult).
  std::vector<int> label(z.size(), -1);
  int nl = 0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    if (label[a] >= 0) continue;
    label[a] = nl;
    std::vector<std::size_t> stack{a};
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < z.size(); ++b)
        if (label[b] < 0 && std::abs(z[b] - z[u]) < 1e-5 * (1.0 + std::abs(z[u]))) {
          label[b] = nl;
          stack.push_back(b);
        }
    }
    ++nl;
  }
  for (int l = 0; l < nl; ++l) {
    std::complex<double> mean = 0.0;
    int mult = 0;
    for (std::size_t a = 0; a < z.size(); ++a)
      if (label[a] == l) {
        mean += z[a];
        ++mult;
      }
    mean /= static_cast<double>(mult);
    if (std::fabs(mean.imag()) > 1e-7 * (1.0 + std::fabs(mean.real()))) continue;
    // polish on the (mult-1)-th derivative, where the root is simple
    std::vector<double> d = c;
    for (int k = 0; k < mult - 1; ++k) {
      std::vector<double> nd(d.size() - 1);
      for (std::size_t i = 1; i < d.size(); ++i) nd[i - 1] = d[i] * static_cast<double>(i);
      d = nd;
    }
    std::vector<double> dd(d.size() > 1 ? d.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < d.size(); ++i) dd[i - 1] = d[i] * static_cast<double>(i);
    double x = mean.real();
    for (int it = 0; it < 8; ++it) {
      double den = horner(dd, x);
      if (den == 0.0) break;
      double step = horner(d, x) / den;
      if (!std::isfinite(step) || std::fabs(step) > 1e-3 * (1.0 + std::fabs(x))) break;
      x -= step;
    }
    out.push_back({x, mult});
  }
  std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
  return out;
}

RealPoly compose_shift(const RealPoly& f, const FractionalSeries& k, int sign) {
  RealPoly K;
  for (const auto& t : k.terms) K.add_term({t.q, 0}, t.c);
  RealPoly Ys = RealPoly::monomial(static_cast<double>(sign), 0, 1);
  RealPoly base = K + Ys;
  std::map<std::int64_t, RealPoly> powers;
  RealPoly out;
  for (const auto& [m, c] : f.terms()) {
    if (!is_integer(m.ey)) throw ResolutionError("cannot shift a polynomial with fractional powers of the graph variable");
    std::int64_t b = m.ey.numerator();
    auto it = powers.find(b);
    if (it == powers.end()) it = powers.emplace(b, base.pow(static_cast<unsigned>(b))).first;
    out = out + it->second * RealPoly::monomial(c, m.ex, 0);
  }
  return out;
}

}  // namespace oscdecay
