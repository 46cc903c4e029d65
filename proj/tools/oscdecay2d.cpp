#include "oscdecay/bounds.hpp"
#include "oscdecay/funcspec.hpp"
#include "oscdecay/measure.hpp"
#include "oscdecay/newton.hpp"
#include "oscdecay/oscillate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace oscdecay;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double env_tol(double fallback) {
  const char* s = std::getenv("OSCDECAY_TOL");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (*end != '\0' || !(v > 0.0)) throw UsageError("OSCDECAY_TOL must be a positive number");
  return v;
}

MultiplierSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const SemanticError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw UsageError("bad number list: " + text);
    out.push_back(v);
  }
  return out;
}

Scope parse_scope(const std::string& text) {
  if (text == "overall") return Scope::overall();
  auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("scope must be overall, ray:THETA or strip:THETA,H");
  std::string kind = text.substr(0, colon);
  auto vals = parse_list(text.substr(colon + 1));
  if (kind == "ray" && vals.size() == 1) return Scope::ray(Direction::from_angle(vals[0]));
  if (kind == "strip" && vals.size() == 2 && vals[1] > 0.0) return Scope::strip(Direction::from_angle(vals[0]), vals[1]);
  throw UsageError("scope must be overall, ray:THETA or strip:THETA,H");
}

// CSV goes to --output when given, otherwise to stdout
struct Sink {
  std::ofstream file;
  std::ostream* os{&std::cout};
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw UsageError("cannot write " + path);
    os = &file;
  }
  std::ostream& operator*() { return *os; }
};

std::string fit_line(const FitResult& f) {
  return "a=" + num(f.exponents.power) + ",b=" + std::to_string(f.exponents.logpower) + ",c=" + num(f.constant) +
         ",residual=" + num(f.residual);
}

void print_polygon(std::ostream& os, const NewtonPolygon& p) {
  os << "  vertices:";
  for (const auto& v : p.vertices) os << " (" << to_string(v.i) << ", " << to_string(v.j) << ")";
  os << "\n";
  for (const auto& e : p.edges)
    os << "  edge " << e.from << "-" << e.to << ": slope " << to_string(e.slope) << ", y ~ x^" << to_string(e.q())
       << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillatory integral decay for singular two-dimensional multipliers"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 1;
  int seed = 0;
  std::string output;
  app.add_option("--jobs", jobs, "Worker threads for sample grids")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Random seed, recorded for reproducible configs (all steps are deterministic)");
  app.add_option("-o,--output", output, "Write the CSV here instead of standard output");

  std::string spec_path;
  auto spec_opt = [&](CLI::App* sub) { sub->add_option("--spec", spec_path, "Multiplier spec file")->required(); };

  auto* newton = app.add_subcommand("newton", "Newton polygons of the factors and the singular line directions");
  spec_opt(newton);

  auto* resolve_cmd = app.add_subcommand("resolve", "Sliver decomposition with monomialization certificates");
  spec_opt(resolve_cmd);
  double eta = 0.3;
  std::string csv_path;
  resolve_cmd->add_option("--eta", eta, "Monomialization target")->check(CLI::PositiveNumber);
  resolve_cmd->add_option("--csv", csv_path, "Also write the sliver table as CSV");

  auto* mass = app.add_subcommand("mass", "Disk or strip masses of g and the fitted growth law");
  spec_opt(mass);
  std::string mode = "disk";
  double theta = 0.0, rmin = 1e-5, rmax = 1e-2, length = 0.0, tol = 0.0;
  int samples = 16;
  mass->add_option("--mode", mode, "disk or strip")->check(CLI::IsMember({"disk", "strip"}));
  mass->add_option("--theta", theta, "Strip direction angle");
  mass->add_option("--rmin", rmin, "Smallest radius")->check(CLI::PositiveNumber);
  mass->add_option("--rmax", rmax, "Largest radius")->check(CLI::PositiveNumber);
  mass->add_option("--samples", samples, "Number of radii")->check(CLI::Range(2, 100000));
  mass->add_option("--length", length, "Strip half-length (default half the working radius)");
  mass->add_option("--tol", tol, "Relative tolerance (default 1e-6 or OSCDECAY_TOL)");

  auto* kernel = app.add_subcommand("kernel", "K(t, u) with its error estimate");
  spec_opt(kernel);
  double t = 0.0, u = 0.0;
  kernel->add_option("--t", t, "First frequency")->required();
  kernel->add_option("--u", u, "Second frequency")->required();
  kernel->add_option("--tol", tol, "Relative tolerance (default 1e-4 or OSCDECAY_TOL)");

  auto* decay = app.add_subcommand("decay", "Sampled |K| along a ray or strip and the fitted envelope");
  spec_opt(decay);
  double ray = std::numeric_limits<double>::quiet_NaN();
  std::string strip;
  double rho_min = 1e2, rho_max = 1e4;
  int rho_samples = 16;
  auto* ray_opt = decay->add_option("--ray", ray, "Ray angle");
  auto* strip_opt = decay->add_option("--strip", strip, "Strip THETA,H");
  ray_opt->excludes(strip_opt);
  auto rho_opts = [&](CLI::App* sub) {
    sub->add_option("--rho-min", rho_min, "Smallest |(t,u)|")->check(CLI::PositiveNumber);
    sub->add_option("--rho-max", rho_max, "Largest |(t,u)|")->check(CLI::PositiveNumber);
    sub->add_option("--samples", rho_samples, "Number of rho values")->check(CLI::Range(2, 100000));
    sub->add_option("--tol", tol, "Section profile accuracy (default 1e-10)");
  };
  rho_opts(decay);

  auto* verify = app.add_subcommand("verify", "Check measured |K| against the predicted envelope");
  spec_opt(verify);
  std::string scope_text = "overall";
  double env_power = std::numeric_limits<double>::quiet_NaN();
  int env_log = 0, scan = 32;
  verify->add_option("--scope", scope_text, "overall, ray:THETA or strip:THETA,H");
  verify->add_option("--power", env_power, "Envelope power instead of the prediction");
  verify->add_option("--log", env_log, "Envelope log power with --power")->check(CLI::Range(0, 2));
  verify->add_option("--scan", scan, "Coarse direction scan size")->check(CLI::Range(1, 100000));
  verify->add_option("--csv", csv_path, "Write the (theta, rho, measured, envelope) rows here");
  rho_opts(verify);

  auto* probe = app.add_subcommand("probe", "Sharpness probe I_L along a direction");
  spec_opt(probe);
  double delta = 0.0, probe_eta = 0.0;
  std::string Ls = "100,1000,10000";
  probe->add_option("--theta", theta, "Direction angle")->required();
  probe->add_option("--delta", delta, "Trial exponent")->required();
  probe->add_option("--eta", probe_eta, "Offset eta, 0 < eta < delta")->required();
  probe->add_option("--L", Ls, "Comma separated scales");
  probe->add_option("--tol", tol, "Section profile accuracy (default 1e-9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    MultiplierSpec spec = load_spec(spec_path);
    Sink sink(output);
    std::ostream& os = *sink;

    if (newton->parsed()) {
      int k = 0;
      for (const auto& f : spec.factors) {
        std::cout << "factor " << k++ << ": " << f.f.to_string() << ", gamma " << num(f.gamma) << "\n";
        print_polygon(std::cout, newton_polygon(f.f));
      }
      std::cout << "line directions:";
      for (const auto& d : root_directions(spec)) std::cout << " " << num(d.theta);
      std::cout << "\n";
      return 0;
    }

    if (resolve_cmd->parsed()) {
      ResolveOptions ro;
      ro.eta = eta;
      Resolution res = resolve(spec, ro);
      std::cout << "split slopes " << num(res.split_m) << ", " << num(res.split_mp) << "; x_max " << num(res.x_max)
                << "; " << res.slivers.size() << " slivers\n";
      for (const auto& s : res.slivers) {
        std::cout << "sliver " << s.id << " [" << s.kind << "] chart " << s.chart.code << (s.sign < 0 ? " reflected" : "")
                  << (s.in_region ? "" : " outside E") << ": k(X) = " << s.shift.to_string('X') << ", "
                  << s.lower.to_string('X') << " < Y < " << s.upper.to_string('X') << "\n";
        std::size_t i = 0;
        for (const auto& m : s.per_factor)
          std::cout << "  factor " << i++ << " ~ " << num(m.d) << " X^" << to_string(m.alpha) << " Y^" << m.beta << "\n";
      }
      bool ok = true;
      for (const auto& c : res.certificates) {
        std::cout << "certificate sliver " << c.sliver_id << " factor " << c.factor_id << ": max ratio error "
                  << num(c.max_observed_ratio_error) << (c.passes() ? " < " : " >= ") << num(c.eta_target) << "\n";
        ok = ok && c.passes();
      }
      std::cout << (ok ? "all certificates pass" : "some certificates fail") << "\n";
      if (!csv_path.empty()) {
        Sink csv(csv_path);
        *csv << "sliver,reflection,k_leading,alpha,beta,d,x_max\n";
        for (const auto& s : res.slivers) {
          std::string a, b, d;
          for (const auto& m : s.per_factor) {
            a += (a.empty() ? "" : ";") + to_string(m.alpha);
            b += (b.empty() ? "" : ";") + std::to_string(m.beta);
            d += (d.empty() ? "" : ";") + num(m.d);
          }
          std::string lead = s.shift.terms.empty() ? "0"
                                                   : num(s.shift.leading().c) + "*X^" + to_string(s.shift.leading().q);
          *csv << s.id << "," << s.sign << "," << lead << "," << a << "," << b << "," << d << ","
               << num(s.x_max) << "\n";
        }
      }
      return ok ? 0 : 1;
    }

    if (mass->parsed()) {
      if (!(rmin < rmax)) throw UsageError("--rmin must be below --rmax");
      ExponentOptions eo;
      eo.rmin = rmin;
      eo.rmax = rmax;
      eo.samples = samples;
      eo.c = length;
      eo.tol = tol > 0.0 ? tol : env_tol(1e-6);
      eo.jobs = jobs;
      FitResult f = mode == "disk" ? disk_fit(spec, eo) : directional_fit(spec, Direction::from_angle(theta), eo);
      os << "r,value\n";
      for (auto [r, v] : f.samples) os << num(r) << "," << num(v) << "\n";
      std::cout << "# " << fit_line(f) << "\n";
      return 0;
    }

    if (kernel->parsed()) {
      KernelOptions ko;
      ko.jobs = jobs;
      KernelSample k = kernel_eval(spec, t, u, tol > 0.0 ? tol : env_tol(1e-4), ko);
      os << "t,u,re,im,abs,est_error\n";
      os << num(t) << "," << num(u) << "," << num(k.value.real()) << "," << num(k.value.imag()) << ","
         << num(std::abs(k.value)) << "," << num(k.est_error) << "\n";
      if (!k.converged) std::cerr << "warning: error estimate above tolerance\n";
      return 0;
    }

    DecayOptions dopt;
    dopt.rho_min = rho_min;
    dopt.rho_max = rho_max;
    dopt.samples = rho_samples;
    dopt.jobs = jobs;
    if (tol > 0.0) dopt.tol = tol;
    if (!(rho_min < rho_max)) throw UsageError("--rho-min must be below --rho-max");

    if (decay->parsed()) {
      DecayPath path = RayPath{Direction::from_angle(0.0)};
      if (!strip.empty()) {
        auto v = parse_list(strip);
        if (v.size() != 2 || !(v[1] > 0.0)) throw UsageError("--strip takes THETA,H with H > 0");
        path = StripPath{Direction::from_angle(v[0]), v[1]};
      } else if (!std::isnan(ray)) {
        path = RayPath{Direction::from_angle(ray)};
      } else {
        throw UsageError("decay needs --ray or --strip");
      }
      DecayResult r = decay_fit(spec, path, dopt);
      os << "rho,offset,abs_value,est_error\n";
      for (const auto& s : r.samples)
        os << num(s.rho) << "," << num(s.offset) << "," << num(s.abs_value) << "," << num(s.est_error) << "\n";
      std::cout << "# " << fit_line(r.fit) << ",noisy=" << r.noisy << (r.inconclusive ? ",inconclusive" : "") << "\n";
      return 0;
    }

    if (verify->parsed()) {
      Scope scope = parse_scope(scope_text);
      VerifyOptions vo;
      vo.decay = dopt;
      vo.estimate.coarse_scan = scan;
      vo.estimate.jobs = jobs;
      std::optional<DecayEstimate> env;
      if (!std::isnan(env_power)) env = DecayEstimate{scope, {env_power, env_log}, false, EstimateSource::HalfPower};
      VerifyReport rep = verify_bounds(spec, scope, env, vo);
      std::cout << rep.summary();
      Sink csv(csv_path);
      std::ostream& cs = csv_path.empty() ? os : *csv;
      cs << "theta,rho,measured,envelope\n";
      for (const auto& row : rep.rows)
        cs << num(row.theta) << "," << num(row.rho) << "," << num(row.measured) << "," << num(row.envelope) << "\n";
      return 0;
    }

    if (probe->parsed()) {
      if (!(probe_eta > 0.0 && probe_eta < delta && delta - probe_eta < 1.0))
        throw UsageError("probe needs 0 < eta < delta and delta - eta < 1");
      ProbeOptions po;
      po.jobs = jobs;
      if (tol > 0.0) po.tol = tol;
      ProbeResult r = sharpness_probe(spec, Direction::from_angle(theta), delta, probe_eta, parse_list(Ls), po);
      os << "L,I_L\n";
      for (auto [L, I] : r.values) os << num(L) << "," << num(I) << "\n";
      std::cout << "# growth=" << num(r.growth) << ",slope=" << num(r.slope) << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
