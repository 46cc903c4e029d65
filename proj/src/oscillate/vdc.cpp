#include "oscdecay/oscillate.hpp"

#include "oscdecay/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oscdecay {

double vdc_constant(int k) {
  if (k < 1) throw std::invalid_argument("derivative order must be at least 1");
  if (k == 1) return 3.0;
  if (k == 2) return 8.0;
  return 5.0 * std::ldexp(1.0, k - 1) - 2.0;
}

double vdc_reference(int k, double A, double a, double b, const VdcAmplitude& amp, bool monotone_derivative) {
  if (k == 1 && !monotone_derivative) throw std::invalid_argument("k = 1 needs a monotone phase derivative");
  if (!(A > 0.0)) throw std::invalid_argument("lower bound A must be positive");
  if (!(b > a)) throw std::invalid_argument("empty interval");
  if (amp.end_value < 0.0 || amp.variation < 0.0) throw std::invalid_argument("amplitude data must be nonnegative");
  return vdc_constant(k) * std::pow(A, -1.0 / k) * (amp.end_value + amp.variation);
}

std::complex<double> phase_integral(const std::function<double(double)>& h, const std::function<double(double)>& phi,
                                    double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  // cut wherever the accumulated phase change reaches pi
  constexpr int kProbe = 4096;
  std::vector<double> cuts{a};
  double last = h(a), acc = 0.0;
  for (int i = 1; i <= kProbe; ++i) {
    double x = a + (b - a) * i / kProbe;
    double v = h(x);
    acc += std::fabs(v - last);
    last = v;
    if (acc >= std::numbers::pi || i == kProbe) {
      cuts.push_back(x);
      acc = 0.0;
    }
  }
  const GaussRule& g = gauss_legendre(20);
  auto rule = [&](double lo, double hi) {
    double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    std::complex<double> s = 0.0;
    for (int j = 0; j < g.n; ++j) {
      double x = c + r * g.x[static_cast<std::size_t>(j)];
      s += g.w[static_cast<std::size_t>(j)] * phi(x) * std::polar(1.0, h(x));
    }
    return s * r;
  };
  std::complex<double> total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    struct Item {
      double lo, hi;
      std::complex<double> whole;
      int depth;
    };
    std::vector<Item> st{{cuts[i], cuts[i + 1], rule(cuts[i], cuts[i + 1]), 0}};
    while (!st.empty()) {
      Item it = st.back();
      st.pop_back();
      double m = 0.5 * (it.lo + it.hi);
      auto l = rule(it.lo, m), r = rule(m, it.hi);
      if (std::abs(l + r - it.whole) <= tol * (it.hi - it.lo) || it.depth > 30) {
        total += l + r;
      } else {
        st.push_back({it.lo, m, l, it.depth + 1});
        st.push_back({m, it.hi, r, it.depth + 1});
      }
    }
  }
  return total;
}

}  // namespace oscdecay
