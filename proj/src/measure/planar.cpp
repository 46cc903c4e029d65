#include "oscdecay/planar.hpp"

#include "oscdecay/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

namespace oscdecay {

Frame Frame::along(double theta) {
  Frame f;
  f.ax = std::cos(theta);
  f.ay = std::sin(theta);
  f.bx = -f.ay;
  f.by = f.ax;
  // exact axes keep the singular lines exact
  for (double* v : {&f.ax, &f.ay, &f.bx, &f.by})
    if (std::fabs(*v) < 1e-15) *v = 0.0;
  return f;
}

std::complex<double> SectionProfile::transform(double tau) const {
  std::complex<double> acc = 0.0;
  for (const auto& p : pieces) acc += filon_piece(p.a, p.b, p.coef.data(), order, tau);
  for (const auto& t : tails) acc += t.value * std::polar(1.0, tau * t.at);
  return acc;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_nonneg_integer(double e) { return e >= -1e-12 && std::fabs(e - std::round(e)) < 1e-12; }

// f(x0 + bx w, y0 + by w) as a polynomial in w; false when some exponent is fractional
bool restrict_poly(const RealPoly& f, double x0, double y0, double bx, double by, std::vector<double>& out) {
  int dx = 0, dy = 0;
  for (const auto& [m, c] : f.terms()) {
    if (!is_integer(m.ex) || !is_integer(m.ey) || m.ex < 0 || m.ey < 0) return false;
    dx = std::max(dx, static_cast<int>(m.ex.numerator()));
    dy = std::max(dy, static_cast<int>(m.ey.numerator()));
  }
  auto powers = [](double a, double b, int n) {
    std::vector<std::vector<double>> p(static_cast<std::size_t>(n + 1));
    p[0] = {1.0};
    for (int i = 1; i <= n; ++i) {
      const auto& q = p[static_cast<std::size_t>(i - 1)];
      std::vector<double> r(q.size() + 1, 0.0);
      for (std::size_t k = 0; k < q.size(); ++k) {
        r[k] += a * q[k];
        r[k + 1] += b * q[k];
      }
      p[static_cast<std::size_t>(i)] = std::move(r);
    }
    return p;
  };
  auto px = powers(x0, bx, dx), py = powers(y0, by, dy);
  auto ax = powers(std::fabs(x0), std::fabs(bx), dx), ay = powers(std::fabs(y0), std::fabs(by), dy);
  std::size_t deg = static_cast<std::size_t>(dx + dy);
  out.assign(deg + 1, 0.0);
  std::vector<double> mag(deg + 1, 0.0);
  for (const auto& [m, c] : f.terms()) {
    const auto& u = px[static_cast<std::size_t>(m.ex.numerator())];
    const auto& v = py[static_cast<std::size_t>(m.ey.numerator())];
    const auto& ua = ax[static_cast<std::size_t>(m.ex.numerator())];
    const auto& va = ay[static_cast<std::size_t>(m.ey.numerator())];
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) {
        out[i + j] += c * u[i] * v[j];
        mag[i + j] += std::fabs(c) * ua[i] * va[j];
      }
  }
  for (std::size_t k = 0; k <= deg; ++k)
    if (std::fabs(out[k]) <= 64.0 * std::numeric_limits<double>::epsilon() * mag[k]) out[k] = 0.0;
  return true;
}

struct Break {
  double w;
  double expo;
  int src;      // factor index, 100 + boundary index, 200+ for domain limits, 1000 + factor for near-real pairs
  double near;  // distance to the closest singular point elsewhere
  std::vector<double> own{};  // singular roots located at this breakpoint
};

struct FactorLine {
  double gamma;
  bool exact;
  double lead;
  std::vector<double> re, im;
  const RealPoly* f;
};

class LineEvaluator {
 public:
  LineEvaluator(const MultiplierSpec& spec, const Frame& frame, const ProfileOptions& opt)
      : spec_(spec), frame_(frame), opt_(opt) {
    for (const auto& fac : spec.factors) {
      if (fac.gamma == 0.0) continue;
      factors_.push_back(fac.f.to_real());
      gammas_.push_back(fac.gamma);
    }
    for (const auto& c : spec.region.curves()) boundaries_.push_back(c.boundary_poly());
    sigma_ = std::pow(0.2, 1.0 / (1 << opt.refine));
    tol_ = std::max(1e-14, opt.tol * 1e-2 / (1 << (2 * opt.refine)));
    rule_ = &gauss_legendre(opt.refine > 0 ? 16 : 12);
  }

  double outer_extent() const {
    double S = opt_.weighted ? spec_.support_radius() : spec_.region.radius();
    if (opt_.window.kind != Window::Kind::None) S = std::min(S, opt_.window.r);
    return S;
  }

  struct Layout {
    double lo, hi;
    int lo_src, hi_src;
    std::vector<FactorLine> fl;
    std::vector<Break> pts;
  };

  // Breakpoints of the line s = anchor + offset; the split keeps R^2 - s^2 exact near s = +-R.
  bool layout(double anchor, double offset, Layout& L) const {
    double s = anchor + offset;
    if (!domain(anchor, offset, L.lo, L.hi, L.lo_src, L.hi_src)) return false;
    double lo = L.lo, hi = L.hi;
    std::vector<Break> br;
    std::vector<double> sing;  // singular points of the integrand, inside or not
    double scale = hi - lo;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      FactorLine F{gammas_[i], false, 0.0, {}, {}, &factors_[i]};
      bool integral_power = is_nonneg_integer(gammas_[i]);
      int src = static_cast<int>(i);
      std::vector<double> coef;
      if (restrict_poly(factors_[i], frame_.x(s, 0.0), frame_.y(s, 0.0), frame_.bx, frame_.by, coef)) {
        F.exact = true;
        while (!coef.empty() && coef.back() == 0.0) coef.pop_back();
        F.lead = coef.empty() ? 0.0 : coef.back();
        for (const auto& z : poly_roots(coef)) {
          F.re.push_back(z.real());
          F.im.push_back(z.imag());
          if (!integral_power) sing.push_back(z.imag() == 0.0 ? z.real() : std::numeric_limits<double>::quiet_NaN());
          if (z.real() <= lo || z.real() >= hi) continue;
          if (z.imag() == 0.0)
            br.push_back({z.real(), gammas_[i], src, kInf, {z.real()}});
          else if (std::fabs(z.imag()) < scale)
            br.push_back({z.real(), 0.0, src + 1000, kInf});
        }
      } else {
        for (double r : sampled_roots(factors_[i], s, lo, hi)) {
          br.push_back({r, gammas_[i], src, kInf, {r}});
          if (!integral_power) sing.push_back(r);
        }
      }
      L.fl.push_back(std::move(F));
    }
    for (std::size_t j = 0; j < boundaries_.size(); ++j) {
      int src = 100 + static_cast<int>(j);
      std::vector<double> coef;
      if (restrict_poly(boundaries_[j], frame_.x(s, 0.0), frame_.y(s, 0.0), frame_.bx, frame_.by, coef)) {
        for (const auto& z : poly_roots(coef))
          if (z.imag() == 0.0 && z.real() > lo && z.real() < hi) br.push_back({z.real(), 0.0, src, kInf});
      } else {
        for (double r : sampled_roots(boundaries_[j], s, lo, hi)) br.push_back({r, 0.0, src, kInf});
      }
    }
    br.push_back({lo, 0.0, L.lo_src, kInf});
    br.push_back({hi, 0.0, L.hi_src, kInf});
    std::sort(br.begin(), br.end(), [](const Break& a, const Break& b) { return a.w < b.w || (a.w == b.w && a.src < b.src); });
    L.pts.clear();
    for (const auto& b : br) {
      // coincident roots merge unless that would fake a non-integrable point (a near-tangent line)
      Break* last = L.pts.empty() ? nullptr : &L.pts.back();
      bool close = last && std::fabs(b.w - last->w) <= 1e-13 * std::max(std::fabs(b.w), std::fabs(last->w));
      if (close && b.w != last->w && b.expo + last->expo <= -1.0 && (b.expo == 0.0 || last->expo == 0.0)) {
        // a singular root just outside a domain end: keep the end, the root only counts as nearby
        if (last->expo != 0.0) *last = b;
      } else if (close && (b.expo == 0.0 || last->expo == 0.0 || b.expo + last->expo > -1.0)) {
        last->expo += b.expo;
        last->own.insert(last->own.end(), b.own.begin(), b.own.end());
      } else
        L.pts.push_back(b);
    }
    // distance to the nearest singular point not located at the breakpoint itself
    for (auto& p : L.pts) {
      for (const auto& F : L.fl) {
        if (!F.exact || is_nonneg_integer(F.gamma)) continue;
        for (std::size_t k = 0; k < F.re.size(); ++k) {
          if (F.im[k] == 0.0 && std::find(p.own.begin(), p.own.end(), F.re[k]) != p.own.end()) continue;
          double d = F.im[k] == 0.0 ? std::fabs(F.re[k] - p.w) : std::hypot(F.re[k] - p.w, F.im[k]);
          p.near = std::min(p.near, d);
        }
      }
      for (double z : sing)
        if (std::isfinite(z) && std::find(p.own.begin(), p.own.end(), z) == p.own.end())
          p.near = std::min(p.near, std::fabs(z - p.w));
    }
    return true;
  }

  std::vector<int> signature(double s) const {
    Layout L;
    std::vector<int> sig;
    if (!layout(0.0, s, L)) return sig;
    for (std::size_t k = 0; k + 1 < L.pts.size(); ++k) {
      double m = 0.5 * (L.pts[k].w + L.pts[k + 1].w);
      sig.push_back(L.pts[k].src);
      sig.push_back(spec_.region.contains(frame_.x(s, m), frame_.y(s, m)) ? -1 : -2);
    }
    sig.push_back(L.pts.back().src);
    return sig;
  }

  /// Interior s where the breakpoint pattern of the line changes.
  std::vector<double> events(double S) const {
    std::vector<double> grid;
    constexpr int n = 1024;
    for (int i = 1; i < n; ++i) grid.push_back(-S + 2.0 * S * i / n);
    for (int k = 1; k <= 48; ++k) {
      grid.push_back(S * std::ldexp(1.0, -k));
      grid.push_back(-S * std::ldexp(1.0, -k));
    }
    std::sort(grid.begin(), grid.end());
    std::vector<double> out;
    std::vector<int> prev = signature(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      std::vector<int> cur = signature(grid[i]);
      if (cur != prev && grid[i - 1] != 0.0 && grid[i] != 0.0 && (grid[i - 1] > 0.0) == (grid[i] > 0.0)) {
        double a = grid[i - 1], b = grid[i];
        for (int it = 0; it < 80 && b - a > 1e-15 * S; ++it) {
          double m = 0.5 * (a + b);
          if (signature(m) == prev)
            a = m;
          else
            b = m;
        }
        out.push_back(0.5 * (a + b));
      }
      prev = std::move(cur);
    }
    return out;
  }

  std::complex<double> operator()(double anchor, double offset, bool& finite) const {
    double s = anchor + offset;
    Layout L;
    if (!layout(anchor, offset, L)) return 0.0;
    const auto& fl = L.fl;
    const auto& pts = L.pts;

    auto eval = [&](double e, double d) -> std::complex<double> {
      double w = e + d;
      double x = frame_.x(s, w), y = frame_.y(s, w);
      double v = opt_.weighted ? amplitude_value(spec_.amplitude, x, y) : 1.0;
      if (v == 0.0) return 0.0;
      for (const auto& F : fl) {
        double m;
        if (F.exact) {
          m = std::fabs(F.lead);
          for (std::size_t k = 0; k < F.re.size(); ++k) {
            double dr = (e - F.re[k]) + d;
            m *= F.im[k] == 0.0 ? std::fabs(dr) : std::sqrt(dr * dr + F.im[k] * F.im[k]);
          }
        } else {
          m = std::fabs(F.f->eval(x, y));
        }
        if (m == 0.0) {
          if (F.gamma < 0.0) return kInf;
          return 0.0;
        }
        if (F.gamma != 1.0) m = std::pow(m, F.gamma);
        v *= m;
      }
      if (opt_.inner_freq != 0.0) return std::polar(v, opt_.inner_freq * w);
      return v;
    };

    std::vector<char> inside(pts.size(), 0);
    double line_scale = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      double a = pts[k].w, b = pts[k + 1].w;
      if (!(b > a)) continue;
      double m = 0.5 * (a + b);
      if (!spec_.region.contains(frame_.x(s, m), frame_.y(s, m))) continue;
      inside[k] = 1;
      double c = std::abs(rule_on(eval, a, 0.0, b - a));
      if (std::isfinite(c)) line_scale = std::max(line_scale, c);
    }
    const double abs_floor = tol_ * line_scale;

    std::complex<double> total = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      if (!inside[k]) continue;
      double a = pts[k].w, b = pts[k + 1].w;
      double len = b - a;
      // 0: smooth end, 1: singular end, 2: singular point just beyond the end
      auto kind = [&](const Break& p) {
        if (!is_nonneg_integer(p.expo)) return 1;
        if (p.near < 0.05 * len) return 2;
        return 0;
      };
      int ka = kind(pts[k]), kb = kind(pts[k + 1]);
      auto toward = [&](double e, double l, const Break& p, int kd) {
        if (kd == 1) return graded(eval, e, l, p.expo, abs_floor, finite, 0.0, p.near);
        return graded(eval, e, l, 0.0, abs_floor, finite, 1e-3 * p.near);
      };
      if (ka && kb) {
        total += toward(a, 0.5 * len, pts[k], ka);
        total += toward(b, -0.5 * len, pts[k + 1], kb);
      } else if (ka) {
        total += toward(a, len, pts[k], ka);
      } else if (kb) {
        total += toward(b, -len, pts[k + 1], kb);
      } else {
        total += adaptive(eval, a, 0.0, len, abs_floor);
      }
    }
    if (!std::isfinite(total.real()) || !std::isfinite(total.imag())) finite = false;
    return total;
  }

 private:
  bool domain(double anchor, double offset, double& lo, double& hi, int& lo_src, int& hi_src) const {
    double s = anchor + offset;
    lo = -kInf;
    hi = kInf;
    lo_src = hi_src = -1;
    bool empty = false;
    auto lower = [&](double v, int src) {
      if (v > lo) {
        lo = v;
        lo_src = src;
      }
    };
    auto upper = [&](double v, int src) {
      if (v < hi) {
        hi = v;
        hi_src = src;
      }
    };
    auto circle = [&](double R, int src) {
      double q = ((R - anchor) - offset) * ((R + anchor) + offset);
      if (q <= 0.0) {
        empty = true;
        return;
      }
      double h = std::sqrt(q);
      lower(-h, src);
      upper(h, src);
    };
    auto slab = [&](double a, double b, double r0, int src) {  // |s a + w b| < r0
      if (std::fabs(b) < 1e-300) {
        if (std::fabs(s * a) >= r0) empty = true;
        return;
      }
      double w1 = (-r0 - s * a) / b, w2 = (r0 - s * a) / b;
      lower(std::min(w1, w2), src);
      upper(std::max(w1, w2), src);
    };
    circle(spec_.region.radius(), 200);
    if (opt_.weighted) {
      if (auto b = std::get_if<BumpAmplitude>(&spec_.amplitude)) circle(b->r0, 201);
      if (auto b = std::get_if<ProductBumpAmplitude>(&spec_.amplitude)) {
        slab(frame_.ax, frame_.bx, b->r0, 202);
        slab(frame_.ay, frame_.by, b->r0, 203);
      }
    }
    if (opt_.window.kind == Window::Kind::Disk) circle(opt_.window.r, 204);
    if (opt_.window.kind == Window::Kind::Strip) {
      if (std::fabs(s) >= opt_.window.r) return false;
      lower(-opt_.window.c, 205);
      upper(opt_.window.c, 205);
    }
    return !empty && hi > lo;
  }

  std::vector<double> sampled_roots(const RealPoly& f, double s, double lo, double hi) const {
    constexpr int n = 512;
    std::vector<double> out;
    auto val = [&](double w) { return f.eval(frame_.x(s, w), frame_.y(s, w)); };
    double wp = lo, fp = val(lo);
    for (int i = 1; i <= n; ++i) {
      double w = lo + (hi - lo) * i / n;
      double fw = val(w);
      if (fp * fw < 0.0) {
        double a = wp, b = w, fa = fp;
        for (int it = 0; it < 200 && b - a > 0.0; ++it) {
          double m = 0.5 * (a + b);
          if (m <= a || m >= b) break;
          double fm = val(m);
          if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        out.push_back(0.5 * (a + b));
      } else if (fw == 0.0 && i < n) {
        out.push_back(w);
      }
      wp = w;
      fp = fw;
    }
    return out;
  }

  template <class F>
  std::complex<double> rule_on(const F& eval, double e, double d0, double d1) const {
    const GaussRule& g = *rule_;
    double c = 0.5 * (d0 + d1), h = 0.5 * (d1 - d0);
    std::complex<double> acc = 0.0;
    for (int j = 0; j < g.n; ++j) acc += g.w[static_cast<std::size_t>(j)] * eval(e, c + h * g.x[static_cast<std::size_t>(j)]);
    return acc * std::fabs(h);
  }

  // offsets d in (0, len) from anchor e (len may be negative)
  template <class F>
  std::complex<double> adaptive(const F& eval, double e, double d0, double d1, double abs_floor) const {
    struct Item {
      double a, b;
      std::complex<double> whole;
      int depth;
    };
    std::complex<double> whole = rule_on(eval, e, d0, d1);
    double floor = std::max(tol_ * std::abs(whole), abs_floor) + 1e-300;
    int budget = 4000;
    double span = std::fabs(d1 - d0);
    std::vector<Item> stack{{d0, d1, whole, 0}};
    std::complex<double> total = 0.0;
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      double m = 0.5 * (it.a + it.b);
      std::complex<double> l = rule_on(eval, e, it.a, m), r = rule_on(eval, e, m, it.b);
      double diff = std::abs(l + r - it.whole);
      double allow = std::max(tol_ * std::abs(l + r), floor * std::fabs(it.b - it.a) / span);
      if (diff <= allow || it.depth >= 30 || --budget <= 0 || !std::isfinite(diff)) {
        total += l + r;
      } else {
        stack.push_back({it.a, m, l, it.depth + 1});
        stack.push_back({m, it.b, r, it.depth + 1});
      }
    }
    return total;
  }

  // geometric grading toward a singular anchor, analytic tail for the local power law
  template <class F>
  std::complex<double> graded(const F& eval, double e, double len, double expo, double abs_floor, bool& finite,
                              double stop, double reach = kInf) const {
    std::complex<double> total = 0.0;
    double far = len, near = len * sigma_;
    total += adaptive(eval, e, near, far, abs_floor);
    // the tail is a pure power law times the cofactor at the end point; its relative error is
    // about (floor / l)^(expo + 2) with l the distance to the next feature
    double l = std::min(std::fabs(len), reach);
    double floor_len = stop > 0.0          ? stop
                       : opt_.cutoff > 0.0 ? opt_.cutoff
                                           : l * std::pow(1e-2 * tol_, 1.0 / std::max(expo + 2.0, 1.0));
    std::complex<double> last = 0.0;
    while (std::fabs(near) > floor_len) {
      far = near;
      near = far * sigma_;
      last = rule_on(eval, e, near, far);
      total += last;
    }
    if (std::fabs(near) > 0.0 && stop > 0.0) total += adaptive(eval, e, 0.0, near, abs_floor);
    if (stop > 0.0 || opt_.cutoff > 0.0) return total;
    if (expo <= -1.0 + 1e-12) {
      finite = false;
      return kInf;
    }
    double q = std::pow(sigma_, expo + 1.0);
    total += last * (q / (1.0 - q));
    return total;
  }

  const MultiplierSpec& spec_;
  Frame frame_;
  ProfileOptions opt_;
  std::vector<RealPoly> factors_;
  std::vector<double> gammas_;
  std::vector<RealPoly> boundaries_;
  double sigma_;
  double tol_;
  const GaussRule* rule_;
};

template <class Fn>
void parallel_for(std::size_t n, int jobs, const Fn& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> th;
  for (std::size_t t = 0; t < nt; ++t)
    th.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) fn(i);
    });
  for (auto& x : th) x.join();
}

}  // namespace

std::complex<double> section_value(const MultiplierSpec& spec, const Frame& frame, const ProfileOptions& opt,
                                   double s) {
  LineEvaluator ev(spec, frame, opt);
  bool finite = true;
  auto v = ev(0.0, s, finite);
  return finite ? v : std::complex<double>(kInf, 0.0);
}

SectionProfile build_profile(const MultiplierSpec& spec, const Frame& frame, const ProfileOptions& opt) {
  LineEvaluator ev(spec, frame, opt);
  SectionProfile prof;
  prof.order = 16;
  const GaussRule& g = gauss_legendre(prof.order);
  const int n = g.n;
  double S = ev.outer_extent();
  if (!(S > 0.0)) return prof;

  // anchored pieces: s = anchor + offset, offsets in (d0, d1)
  struct Cand {
    double anchor, d0, d1;
    int depth;
    int chain;  // graded chain id, -1 otherwise
    int rank;   // position along the chain (larger = closer to the anchor)
  };
  double sigma = std::pow(0.35, 1.0 / (1 << opt.refine));
  std::vector<Cand> work;
  double tol = opt.tol / (1 << (2 * opt.refine));
  int chains = 0;
  auto add_chain = [&](double anchor, double len) {
    int id = chains++;
    double far = len, near = len * sigma;
    int rank = 0;
    double floor_len =
        opt.cutoff > 0.0 ? opt.cutoff : std::max({1e-14 * S, 1e-2 * tol * S, 1e-12 * std::fabs(anchor)});
    work.push_back({anchor, near, far, 0, -1, 0});
    while (std::fabs(near) > floor_len) {
      far = near;
      near = far * sigma;
      work.push_back({anchor, near, far, 0, id, ++rank});
    }
  };
  std::vector<double> anchors{-S, 0.0, S};
  for (double e : ev.events(S))
    if (std::fabs(e) > 1e-9 * S && S - std::fabs(e) > 1e-9 * S) anchors.push_back(e);
  std::sort(anchors.begin(), anchors.end());
  for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
    double p = anchors[i], q = anchors[i + 1];
    add_chain(p, 0.5 * (q - p));
    add_chain(q, -0.5 * (q - p));
  }

  std::vector<Cand> done;
  std::vector<std::vector<std::complex<double>>> done_vals;
  double mass_est = -1.0;
  bool finite = true;
  for (int round = 0; !work.empty(); ++round) {
    std::vector<std::complex<double>> vals(work.size() * static_cast<std::size_t>(n));
    std::vector<char> fin(work.size(), 1);
    parallel_for(work.size(), opt.jobs, [&](std::size_t i) {
      const Cand& c = work[i];
      double m = 0.5 * (c.d0 + c.d1), h = 0.5 * (c.d1 - c.d0);
      bool f = true;
      for (int j = 0; j < n; ++j)
        vals[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
            ev(c.anchor, m + h * g.x[static_cast<std::size_t>(j)], f);
      fin[i] = f;
    });
    for (char f : fin)
      if (!f) finite = false;
    if (mass_est < 0.0) {
      mass_est = 0.0;
      for (std::size_t i = 0; i < work.size(); ++i) {
        double h = 0.5 * std::fabs(work[i].d1 - work[i].d0);
        for (int j = 0; j < n; ++j)
          mass_est += h * g.w[static_cast<std::size_t>(j)] * std::abs(vals[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]);
      }
    }
    std::vector<Cand> next;
    for (std::size_t i = 0; i < work.size(); ++i) {
      const Cand& c = work[i];
      std::vector<std::complex<double>> v(vals.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(n)),
                                          vals.begin() + static_cast<std::ptrdiff_t>((i + 1) * static_cast<std::size_t>(n)));
      double h = std::fabs(c.d1 - c.d0);
      double pabs = 0.0;
      for (int j = 0; j < n; ++j) pabs += 0.5 * h * g.w[static_cast<std::size_t>(j)] * std::abs(v[static_cast<std::size_t>(j)]);
      std::complex<double> cn1 = 0.0, cn2 = 0.0;
      for (int j = 0; j < n; ++j) {
        cn1 += g.proj[static_cast<std::size_t>((n - 1) * n + j)] * v[static_cast<std::size_t>(j)];
        cn2 += g.proj[static_cast<std::size_t>((n - 2) * n + j)] * v[static_cast<std::size_t>(j)];
      }
      double err = h * (std::abs(cn1) + std::abs(cn2));
      // the absolute share absorbs rounding noise in F next to kinks of the section geometry
      double allow = tol * std::max({pabs, mass_est * h / (2.0 * S), 1e-3 * mass_est});
      // pieces at the rounding scale of s carry only noise
      bool ok = err <= allow || !std::isfinite(err) || h <= 1e-12 * std::fabs(c.anchor + c.d1);
      if (!ok && c.depth >= 40) {
        ok = true;
        prof.converged = false;
      }
      if (ok) {
        prof.error += std::isfinite(err) ? err : 0.0;
        done.push_back(c);
        done_vals.push_back(std::move(v));
      } else {
        double m = 0.5 * (c.d0 + c.d1);
        next.push_back({c.anchor, c.d0, m, c.depth + 1, c.chain, c.rank});
        next.push_back({c.anchor, m, c.d1, c.depth + 1, c.chain, c.rank});
      }
    }
    work = std::move(next);
  }

  // assemble pieces in increasing s and build the tails
  struct Assembled {
    double a, b;
    std::vector<std::complex<double>> coef;
    std::complex<double> integral;
    const Cand* cand;
  };
  std::vector<Assembled> parts;
  for (std::size_t i = 0; i < done.size(); ++i) {
    const Cand& c = done[i];
    double a = c.anchor + std::min(c.d0, c.d1), b = c.anchor + std::max(c.d0, c.d1);
    std::vector<std::complex<double>> coef(static_cast<std::size_t>(n), 0.0);
    // node order flips when offsets run backwards
    bool flip = c.d1 < c.d0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        std::size_t jj = static_cast<std::size_t>(flip ? n - 1 - j : j);
        coef[static_cast<std::size_t>(k)] += g.proj[static_cast<std::size_t>(k * n) + jj] * done_vals[i][static_cast<std::size_t>(j)];
      }
    for (auto& v : coef)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        v = 0.0;
        finite = false;
      }
    parts.push_back({a, b, coef, (b - a) * coef[0], &c});
  }
  std::sort(parts.begin(), parts.end(), [](const Assembled& x, const Assembled& y) { return x.a < y.a; });
  prof.abs_mass = 0.0;
  for (const auto& p : parts) {
    prof.pieces.push_back({p.a, p.b, p.coef});
    prof.abs_mass += std::abs(p.integral);
  }

  if (opt.cutoff <= 0.0) {
    // per chain: the two graded pieces nearest the anchor give the local power law
    std::vector<std::map<int, std::complex<double>>> by_rank(static_cast<std::size_t>(chains));
    std::vector<double> anchor_of(static_cast<std::size_t>(chains), 0.0);
    for (const auto& p : parts) {
      if (p.cand->chain < 0 || p.cand->rank == 0) continue;
      by_rank[static_cast<std::size_t>(p.cand->chain)][p.cand->rank] += p.integral;
      anchor_of[static_cast<std::size_t>(p.cand->chain)] = p.cand->anchor;
    }
    for (int id = 0; id < chains; ++id) {
      const auto& m = by_rank[static_cast<std::size_t>(id)];
      if (m.size() < 2) continue;
      auto last = std::prev(m.end()), before = std::prev(last);
      if (before->first + 1 != last->first || std::abs(before->second) == 0.0) continue;
      std::complex<double> q = last->second / before->second;
      if (std::abs(q) >= 0.999) {
        // chains at the noise level say nothing about divergence
        if (std::abs(last->second) <= tol * prof.abs_mass) continue;
        finite = false;
        continue;
      }
      prof.tails.push_back({anchor_of[static_cast<std::size_t>(id)], last->second * (q / (1.0 - q))});
    }
  }
  prof.finite = finite;
  return prof;
}

}  // namespace oscdecay
