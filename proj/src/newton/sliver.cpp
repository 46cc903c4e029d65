#include "oscdecay/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oscdecay {

// ---------------------------------------------------------------------------
// Charts

std::pair<double, double> Chart::to_plane(double X, double Y) const {
  if (swap) return {sx * Y, sy * X};
  return {sx * X, sy * Y};
}

std::pair<double, double> Chart::from_plane(double x, double y) const {
  if (swap) return {sy * y, sx * x};
  return {sx * x, sy * y};
}

RealPoly Chart::pull_back(const RealPoly& p) const {
  RealPoly r = p.reflected(sx, sy);
  return swap ? r.swapped() : r;
}

std::vector<Chart> make_charts(double m, double mp) {
  double am = std::fabs(mp);
  return {
      Chart{0, false, 1, 1, m},         Chart{1, true, 1, 1, 1.0 / m},   Chart{2, true, -1, 1, 1.0 / am},
      Chart{3, false, -1, 1, am},       Chart{4, false, -1, -1, m},      Chart{5, true, -1, -1, 1.0 / m},
      Chart{6, true, 1, -1, 1.0 / am},  Chart{7, false, 1, -1, am},
  };
}

// ---------------------------------------------------------------------------
// Sliver geometry

std::pair<double, double> Sliver::to_plane(double X, double Y) const {
  return chart.to_plane(X, shift.eval(X) + sign * Y);
}

bool Sliver::locate(double x, double y, double& X, double& Y) const {
  auto [Xc, Yc] = chart.from_plane(x, y);
  if (!(Xc > 0.0 && Xc < x_max)) return false;
  X = Xc;
  Y = sign * (Yc - shift.eval(Xc));
  return Y > lower.eval(Xc) && Y < upper.eval(Xc);
}

double Sliver::upper_exponent() const { return to_double(upper.leading().q); }

double Sliver::lower_exponent() const {
  if (lower.is_zero()) return std::numeric_limits<double>::infinity();
  return to_double(lower.leading().q);
}

double sliver_area_local(const Sliver& s) {
  double a = s.x_max;
  double area = 0.0;
  for (const auto& t : s.upper.terms) area += t.c * std::pow(a, to_double(t.q) + 1.0) / (to_double(t.q) + 1.0);
  for (const auto& t : s.lower.terms) area -= t.c * std::pow(a, to_double(t.q) + 1.0) / (to_double(t.q) + 1.0);
  return area;
}

namespace {

constexpr double kGL10x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                              0.9739065285171717};
constexpr double kGL10w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863955358436, 0.1494513491505806,
                              0.0666713443086881};

// Integral of (x dy - y dx) along X -> (X, k(X) + sign * h(X)) mapped to the plane.
double green_piece(const Sliver& s, const FractionalSeries& h, double X0, double X1) {
  double mid = 0.5 * (X0 + X1);
  double half = 0.5 * (X1 - X0);
  double sum = 0.0;
  for (int k = 0; k < 5; ++k)
    for (int sg : {-1, 1}) {
      double X = mid + sg * half * kGL10x[k];
      double Yc = s.shift.eval(X) + s.sign * h.eval(X);
      double dYc = s.shift.derivative(X) + s.sign * h.derivative(X);
      auto [x, y] = s.chart.to_plane(X, Yc);
      auto [x1, y1] = s.chart.to_plane(X + 1.0, Yc + dYc);  // linear map: image of the tangent
      double dx = x1 - x, dy = y1 - y;
      sum += kGL10w[k] * half * (x * dy - y * dx);
    }
  return sum;
}

double green_curve(const Sliver& s, const FractionalSeries& h) {
  double sum = 0.0;
  double hi = s.x_max;
  for (int k = 0; k < 60; ++k) {
    double lo = hi * 0.5;
    sum += green_piece(s, h, lo, hi);
    hi = lo;
  }
  return sum;
}

}  // namespace

double sliver_area_plane(const Sliver& s) {
  // bottom (0 -> a), right side, top (a -> 0)
  double a = s.x_max;
  double bottom = green_curve(s, s.lower);
  double top = -green_curve(s, s.upper);
  double side = 0.0;
  {
    double g = s.lower.eval(a), G = s.upper.eval(a);
    double mid = 0.5 * (g + G), half = 0.5 * (G - g);
    for (int k = 0; k < 5; ++k)
      for (int sg : {-1, 1}) {
        double Y = mid + sg * half * kGL10x[k];
        auto [x, y] = s.to_plane(a, Y);
        auto [x1, y1] = s.to_plane(a, Y + 1.0);
        side += kGL10w[k] * half * (x * (y1 - y) - y * (x1 - x));
      }
  }
  return 0.5 * std::fabs(bottom + side + top);
}

double Resolution::covered_area() const {
  double sum = 0.0;
  for (const auto& c : make_charts(split_m, split_mp)) sum += 0.5 * c.b * x_max * x_max;
  return sum;
}

// ---------------------------------------------------------------------------
// Zone recursion

namespace {

struct ZonePoly {
  RealPoly Q;
  bool frozen{false};
  FactorMonomial data;
  int factor{-1};  // -1 for boundary polynomials
};

struct Zone {
  FractionalSeries K;
  int sign{1};
  Rational M{1};
  double H{1.0};
  std::vector<ZonePoly> polys;
  int depth{0};
};

FractionalSeries monomial_series(double c, const Rational& q) {
  FractionalSeries s;
  if (c != 0.0) s.terms.push_back({q, c});
  s.truncation_order = q;
  s.normalize();
  return s;
}

// Term minimising i + s j.
FactorMonomial vertex_at(const RealPoly& P, const Rational& s) {
  FactorMonomial best;
  bool first = true;
  Rational bw;
  for (const auto& [m, c] : P.terms()) {
    Rational w = m.ex + s * m.ey;
    if (first || w < bw) {
      bw = w;
      first = false;
      if (!is_integer(m.ey)) throw ResolutionError("dominant monomial with fractional power of the graph variable");
      best = FactorMonomial{c, m.ex, static_cast<int>(m.ey.numerator())};
    }
  }
  return best;
}

std::vector<double> dense_edge(const EdgePoly& e) {
  Rational lo = e.low();
  std::vector<double> coeffs;
  for (const auto& [j, v] : e.coef) {
    Rational k = j - lo;
    if (!is_integer(k)) throw ResolutionError("edge polynomial with fractional powers of the graph variable");
    std::size_t idx = static_cast<std::size_t>(k.numerator());
    if (coeffs.size() <= idx) coeffs.resize(idx + 1, 0.0);
    coeffs[idx] += v;
  }
  return coeffs;
}

class Builder {
 public:
  Builder(const Chart& chart, Rational trunc, double tau_dom, double tau_piece, int nfactors, int deriv_cap)
      : chart_(chart), trunc_(trunc), tau_dom_(tau_dom), tau_piece_(tau_piece), nfactors_(nfactors),
        deriv_cap_(deriv_cap) {}

  std::vector<Sliver> out;

  void process(Zone z) {
    if (z.depth > 24) throw ResolutionError("sliver recursion too deep");
    freeze(z);

    std::vector<Rational> crit;
    for (const auto& zp : z.polys) {
      if (zp.frozen) continue;
      for (const auto& e : newton_polygon(zp.Q).edges) {
        Rational q = e.q();
        if (q >= z.M && q <= trunc_ && std::find(crit.begin(), crit.end(), q) == crit.end()) crit.push_back(q);
      }
    }
    std::sort(crit.begin(), crit.end());

    double upper_c = z.H;
    Rational upper_q = z.M;
    for (const auto& q : crit) {
      auto [A, B] = dominance(z, q);
      if (q == z.M) {
        if (A >= z.H) continue;
        band(z, q, A, z.H);
      } else if (A >= B) {
        // both neighbouring vertices dominate on a common range: no band
        double c = std::sqrt(A * B);
        emit_vertex(z, c, q, upper_c, upper_q, (upper_q + q) / 2);
        A = c;
      } else {
        emit_vertex(z, B, q, upper_c, upper_q, (upper_q + q) / 2);
        band(z, q, A, B);
      }
      upper_c = A;
      upper_q = q;
    }
    // bottom zone: vertices just past the last critical exponent
    Rational next = upper_q + 1;
    for (const auto& zp : z.polys) {
      if (zp.frozen) continue;
      for (const auto& e : newton_polygon(zp.Q).edges)
        if (e.q() > upper_q) next = std::min(next, e.q());
    }
    emit_vertex(z, 0.0, upper_q, upper_c, upper_q, (upper_q + next) / 2);
  }

 private:
  void freeze(Zone& z) {
    for (auto& zp : z.polys) {
      if (zp.frozen) continue;
      zp.Q = zp.Q.cleaned();
      bool relevant = false;
      for (const auto& e : newton_polygon(zp.Q).edges)
        if (e.q() >= z.M) relevant = true;
      if (relevant) continue;
      NewtonPolygon np = newton_polygon(zp.Q);
      const auto& last = np.vertices.back();
      if (last.j != 0) continue;
      double c = 0.0;
      for (const auto& [m, v] : zp.Q.terms())
        if (m.ex == last.i && m.ey == 0) c = v;
      zp.frozen = true;
      zp.data = FactorMonomial{c, last.i, 0};
    }
  }

  std::pair<double, double> dominance(const Zone& z, const Rational& q) const {
    double A = std::numeric_limits<double>::infinity();
    double B = 0.0;
    for (const auto& zp : z.polys) {
      if (zp.frozen) continue;
      EdgePoly ep = edge_poly(zp.Q, q);
      if (ep.coef.size() < 2) continue;
      double n = static_cast<double>(ep.coef.size() - 1);
      double e_lo = std::fabs(ep.coef.begin()->second);
      double e_hi = std::fabs(ep.coef.rbegin()->second);
      for (const auto& [j, v] : ep.coef) {
        if (j != ep.low())
          A = std::min(A, std::pow(tau_dom_ * e_lo / (n * std::fabs(v)), 1.0 / to_double(j - ep.low())));
        if (j != ep.high())
          B = std::max(B, std::pow(n * std::fabs(v) / (tau_dom_ * e_hi), 1.0 / to_double(ep.high() - j)));
      }
    }
    return {A, B};
  }

  Sliver base_sliver(const Zone& z, const std::string& kind) const {
    Sliver s;
    s.chart = chart_;
    s.shift = z.K;
    s.sign = z.sign;
    s.kind = kind;
    s.per_factor.resize(static_cast<std::size_t>(nfactors_));
    return s;
  }

  void emit_vertex(const Zone& z, double lower_c, const Rational& lower_q, double upper_c, const Rational& upper_q,
                   const Rational& s_mid) {
    Sliver s = base_sliver(z, "vertex");
    s.upper = monomial_series(upper_c, upper_q);
    if (lower_c > 0.0) s.lower = monomial_series(lower_c, lower_q);
    s.lower.truncation_order = lower_q;
    for (const auto& zp : z.polys) {
      if (zp.factor < 0) continue;
      s.per_factor[static_cast<std::size_t>(zp.factor)] = zp.frozen ? zp.data : vertex_at(zp.Q, s_mid);
    }
    out.push_back(std::move(s));
  }

  void band(const Zone& z, const Rational& q, double lo, double hi) {
    // positive real roots of every edge polynomial, merged across polynomials
    std::vector<double> roots;
    for (const auto& zp : z.polys) {
      if (zp.frozen) continue;
      EdgePoly ep = edge_poly(zp.Q, q);
      if (ep.coef.size() < 2) continue;
      for (const auto& r : real_roots(dense_edge(ep)))
        if (r.value > lo && r.value < hi) roots.push_back(r.value);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> merged;
    for (double r : roots)
      if (merged.empty() || r - merged.back() > 1e-9 * (1.0 + std::fabs(r))) merged.push_back(r);

    if (merged.empty()) {
      pieces(z, q, lo, hi);
      return;
    }
    for (std::size_t i = 0; i < merged.size(); ++i) {
      double r = merged[i];
      double left = i == 0 ? lo : 0.5 * (merged[i - 1] + r);
      double right = i + 1 == merged.size() ? hi : 0.5 * (r + merged[i + 1]);
      for (int sigma : {-1, 1}) {
        double extent = sigma < 0 ? r - left : right - r;
        if (extent <= 0.0) continue;
        Zone child;
        FractionalSeries step = monomial_series(r, q);
        child.K = z.K.plus(step.scaled(z.sign));
        child.sign = z.sign * sigma;
        child.M = q;
        child.H = extent;
        child.depth = z.depth + 1;
        for (const auto& zp : z.polys) {
          ZonePoly c = zp;
          if (!zp.frozen) c.Q = compose_shift(zp.Q, step, sigma).cleaned();
          child.polys.push_back(std::move(c));
        }
        process(std::move(child));
      }
    }
  }

  double piece_error(const Zone& z, const Rational& q, double ca, double cb) const {
    double err = 0.0;
    for (const auto& zp : z.polys) {
      if (zp.frozen || zp.factor < 0) continue;
      EdgePoly ep = edge_poly(zp.Q, q);
      double ea = ep.eval(ca);
      if (ea == 0.0) return std::numeric_limits<double>::infinity();
      double alpha = to_double(ep.weight);
      int lcap = alpha > 0 ? std::min(static_cast<int>(std::ceil(alpha - 1e-12)), deriv_cap_) : 0;
      for (int k = 1; k <= 12; ++k) {
        double c = ca + (cb - ca) * k / 12.0;
        double e = std::fabs(ep.eval(c) / ea - 1.0);
        if (lcap > 0) e += lcap * to_double(q) * (c - ca) * std::fabs(ep.deriv(c)) / (alpha * std::fabs(ea));
        err = std::max(err, e);
      }
    }
    return err;
  }

  void pieces(const Zone& z, const Rational& q, double lo, double hi) {
    double ca = lo;
    int guard = 0;
    while (ca < hi) {
      if (++guard > 4000) throw ResolutionError("band subdivision did not terminate");
      double cb = hi;
      if (piece_error(z, q, ca, cb) > tau_piece_) {
        double good = ca, bad = hi;
        for (int it = 0; it < 40; ++it) {
          double mid = 0.5 * (good + bad);
          if (piece_error(z, q, ca, mid) <= tau_piece_)
            good = mid;
          else
            bad = mid;
        }
        cb = std::max(good, ca + 1e-6 * (hi - lo));
      }
      Sliver s = base_sliver(z, "band");
      s.shift = z.K.plus(monomial_series(ca * z.sign, q));
      s.upper = monomial_series(cb - ca, q);
      for (const auto& zp : z.polys) {
        if (zp.factor < 0) continue;
        FactorMonomial fm;
        if (zp.frozen) {
          fm = zp.data;
        } else {
          EdgePoly ep = edge_poly(zp.Q, q);
          fm = FactorMonomial{ep.eval(ca), ep.weight, 0};
        }
        s.per_factor[static_cast<std::size_t>(zp.factor)] = fm;
      }
      out.push_back(std::move(s));
      ca = cb;
    }
  }

  Chart chart_;
  Rational trunc_;
  double tau_dom_;
  double tau_piece_;
  int nfactors_;
  int deriv_cap_;
};

double angle_gap(double a, double b) {
  double d = std::fmod(std::fabs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

// Split slopes avoiding every exceptional line.
std::pair<double, double> choose_splits(const MultiplierSpec& spec) {
  auto dirs = root_directions(spec);
  const double cands[] = {1.0, 1.5, 2.0 / 3.0, 2.0, 0.5, 3.0, 1.0 / 3.0, 2.5, 0.4};
  auto pick = [&](int sgn) {
    for (double c : cands) {
      double th = std::atan2(sgn * c, 1.0);
      bool ok = true;
      for (const auto& d : dirs)
        if (angle_gap(th, d.theta) < 0.05) ok = false;
      if (ok) return sgn * c;
    }
    throw ResolutionError("no admissible splitting line");
  };
  return {pick(1), pick(-1)};
}

Rational default_truncation(const MultiplierSpec& spec) {
  double deg = 1.0;
  for (const auto& f : spec.factors)
    if (!f.f.is_zero()) deg = std::max(deg, to_double(f.f.to_real().degree()));
  for (const auto& c : spec.region.curves()) deg = std::max(deg, to_double(c.boundary_poly().degree()));
  return Rational(2 * static_cast<std::int64_t>(std::ceil(deg)) + 4);
}

bool sliver_in_region(const Sliver& s, const RegionE& region) {
  int in = 0, total = 0;
  for (double fx : {0.3, 0.6, 0.9})
    for (double fy : {0.25, 0.5, 0.75}) {
      double X = s.x_max * fx;
      double g = s.lower.eval(X), G = s.upper.eval(X);
      auto [x, y] = s.to_plane(X, g + fy * (G - g));
      in += region.contains(x, y) ? 1 : 0;
      ++total;
    }
  return 2 * in > total;
}

// Boundary polynomials keep one sign on the sliver sample grid.
bool boundaries_sign_constant(const Sliver& s, const std::vector<RealPoly>& bps, double a, const SampleGrid& grid) {
  for (const auto& B : bps) {
    int sgn = 0;
    for (int ix = 0; ix < grid.nx; ++ix) {
      double X = a * std::pow(grid.x_span, static_cast<double>(ix) / (grid.nx - 1));
      double g = s.lower.eval(X), G = s.upper.eval(X);
      if (!(G > g)) return false;
      for (double f : grid.y_fractions) {
        auto [x, y] = s.to_plane(X, g + f * (G - g));
        double v = B.eval(x, y);
        int sv = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (sv == 0) continue;
        if (sgn == 0) sgn = sv;
        if (sv != sgn) return false;
      }
    }
  }
  return true;
}

}  // namespace

Resolution resolve(const MultiplierSpec& spec, const ResolveOptions& opt) {
  if (!(opt.eta > 0.0 && opt.eta < 1.0)) throw ResolutionError("eta must lie in (0, 1)");
  RealPoly product = RealPoly::constant(1.0);
  for (const auto& f : spec.factors) product = product * f.f.to_real();
  if (product.is_zero()) throw ResolutionError("product of the factors vanishes identically");

  Resolution res;
  res.eta = opt.eta;
  std::tie(res.split_m, res.split_mp) = choose_splits(spec);
  Rational trunc = opt.truncation > 0 ? opt.truncation : default_truncation(spec);
  auto charts = make_charts(res.split_m, res.split_mp);
  std::vector<RealPoly> bps;
  for (const auto& c : spec.region.curves()) bps.push_back(c.boundary_poly());

  double bmax = 0.0;
  for (const auto& c : charts) bmax = std::max(bmax, c.b);
  double a0 = spec.support_radius() / std::sqrt(1.0 + bmax * bmax);
  a0 = std::min(a0, 0.5);

  double tau = 0.5 * opt.eta;
  double worst = 0.0;
  for (int round = 0; round < 5; ++round, tau *= 0.5) {
    std::vector<Sliver> all;
    for (const auto& ch : charts) {
      Builder b(ch, trunc, tau, tau, static_cast<int>(spec.factors.size()), opt.deriv_cap);
      Zone z;
      z.M = 1;
      z.H = ch.b;
      for (std::size_t i = 0; i < spec.factors.size(); ++i)
        z.polys.push_back(ZonePoly{ch.pull_back(spec.factors[i].f.to_real()), false, {}, static_cast<int>(i)});
      for (const auto& B : bps) z.polys.push_back(ZonePoly{ch.pull_back(B), false, {}, -1});
      b.process(std::move(z));
      for (auto& s : b.out) all.push_back(std::move(s));
    }

    // largest dyadic radius at which every certificate passes
    double amin = a0;
    bool ok = true;
    worst = 0.0;
    for (auto& s : all) {
      bool passed = false;
      double a = a0;
      double best_err = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 40 && !passed; ++k, a *= 0.5) {
        s.x_max = a;
        if (!(s.lower.eval(a) < s.upper.eval(a))) continue;
        if (!boundaries_sign_constant(s, bps, a, opt.grid)) continue;
        double e = 0.0;
        for (std::size_t i = 0; i < spec.factors.size(); ++i)
          e = std::max(e, monomialize_check(s, static_cast<int>(i), spec.factors[i].f, opt.eta, opt.grid,
                                            opt.deriv_cap)
                              .max_observed_ratio_error);
        best_err = std::min(best_err, e);
        if (e < opt.eta) passed = true;
      }
      if (!passed) {
        ok = false;
        worst = std::max(worst, best_err);
        break;
      }
      amin = std::min(amin, a * 2.0);
    }
    if (!ok) continue;

    res.x_max = amin;
    int id = 0;
    for (auto& s : all) {
      s.id = id++;
      s.x_max = amin;
      s.in_region = sliver_in_region(s, spec.region);
      for (std::size_t i = 0; i < spec.factors.size(); ++i)
        res.certificates.push_back(
            monomialize_check(s, static_cast<int>(i), spec.factors[i].f, opt.eta, opt.grid, opt.deriv_cap));
    }
    res.slivers = std::move(all);
    return res;
  }
  throw ResolutionError("eta = " + std::to_string(opt.eta) +
                        " unattainable at this truncation; smallest achieved ratio error " + std::to_string(worst));
}

std::vector<Sliver> sliver_decomposition(const MultiplierSpec& spec, double eta, int deriv_cap) {
  ResolveOptions opt;
  opt.eta = eta;
  opt.deriv_cap = deriv_cap;
  return resolve(spec, opt).slivers;
}

}  // namespace oscdecay
