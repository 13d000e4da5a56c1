// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracholder/capacity.hpp"
#include "fracholder/error.hpp"
#include "fracholder/experiments.hpp"
#include "fracholder/measure.hpp"
#include "fracholder/oracle.hpp"

using namespace fracholder;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

GridPtr interval_grid(double h) { return build_grid(make_domain(Shape::ball({0, 0}, 1, 1)), h); }

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += std::pow(std::log(x[k]) - mx, 2);
    sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
  }
  return sxy / sxx;
}

Verdict oracle_agreement() {
  Verdict v;
  for (double s : {0.25, 0.5, 0.75}) {
    const auto t0 = Clock::now();
    const GridPtr g = interval_grid(1.0 / 256);
    const Shape G = Shape::segment({1, 0}, {2, 0}, 1);
    const Field u = solve_dirichlet(assemble(g, s), exterior_data(g, [&](const Point& p) { return G.contains(p) ? 1.0 : 0.0; }), {});
    const KernelSpec spec = make_kernel_spec({0, 0}, 1.0, s, 1);
    const ExteriorFunction data = indicator_interval(1.0, 2.0);
    double err = 0.0;
    for (auto n : g->interior()) err = std::max(err, std::abs(u[n] - ball_solution(data, g->node(n), spec)));
    const double secs = seconds_since(t0);
    v.pass = v.pass && err <= 0.02 && secs <= 60.0;
    v.detail += "s=" + fmt(s) + " sup=" + fmt(err) + " (" + fmt(secs) + "s) ";
  }
  return v;
}

Verdict cs_trace() {
  Verdict v;
  const auto t0 = Clock::now();
  const Shape G = Shape::complement(Shape::halfspace({-1, 0}, -1, 1));
  double previous = std::numeric_limits<double>::infinity();
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const GridPtr g = interval_grid(h);
    const Field data = exterior_data(g, [&](const Point& p) { return G.contains(p) ? 1.0 : 0.0; });
    const CsReport rep = cs_consistency(g, 0.5, data, far_field_of(G, g->lattice().box()));
    v.pass = v.pass && rep.sup_error < previous;
    previous = rep.sup_error;
    v.detail += "h=" + fmt(h) + " sup=" + fmt(rep.sup_error) + " ";
  }
  const double secs = seconds_since(t0);
  v.pass = v.pass && previous <= 0.05 && secs <= 300.0;
  v.detail += "(" + fmt(secs) + "s)";
  return v;
}

std::vector<double> besov_family(int dim, double s, double h, const std::vector<double>& radii) {
  std::vector<double> caps;
  for (double r : radii) caps.push_back(besov_capacity(Shape::closed_ball({0, 0}, 0.5 * r, dim), Ball{{0, 0}, 2 * r}, h, s).value);
  return caps;
}

Verdict capacity_scaling() {
  Verdict v;
  const auto t0 = Clock::now();
  struct Case {
    int dim;
    double s, h;
    std::vector<double> radii;
  };
  const std::vector<Case> cases{{1, 0.25, 1.0 / 512, {0.125, 0.25, 0.5, 1.0}},
                                {1, 0.5, 1.0 / 512, {0.125, 0.25, 0.5, 1.0}},
                                {2, 0.5, 1.0 / 32, {0.0625, 0.125, 0.25, 0.5, 1.0}}};
  for (const auto& c : cases) {
    const double target = c.dim - 2.0 * c.s;
    const double slope = ls_slope(c.radii, besov_family(c.dim, c.s, c.h, c.radii));
    // Zero target exponent: 10% of the unit scale.
    const double tol = 0.1 * std::max(std::abs(target), 0.5);
    v.pass = v.pass && std::abs(slope - target) <= tol;
    v.detail += "(N,s)=(" + std::to_string(c.dim) + "," + fmt(c.s) + ") slope=" + fmt(slope) + " target=" + fmt(target) + " ";
  }
  const double secs = seconds_since(t0);
  v.pass = v.pass && secs <= 600.0;
  v.detail += "(" + fmt(secs) + "s)";
  return v;
}

Verdict capacity_equivalence() {
  Verdict v;
  const std::vector<double> radii{0.0625, 0.125, 0.25, 0.5, 1.0};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double r : radii) {
    const Shape K = Shape::closed_ball({0, 0}, 0.5 * r, 2);
    const Ball B{{0, 0}, 2 * r};
    const double ratio = weighted_capacity(K, B, 1.0 / 32, 0.5).value / besov_capacity(K, B, 1.0 / 32, 0.5).value;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  v.pass = hi / lo <= 3.0;
  v.detail = "ratio in [" + fmt(lo) + ", " + fmt(hi) + "] spread=" + fmt(hi / lo);
  return v;
}

Verdict measure_axioms() {
  Verdict v;
  double range_violation = 0.0, comp = 0.0, mono = 0.0, additivity = 0.0;
  auto range_of = [&](const Field& w) {
    for (auto n : w.grid->interior()) range_violation = std::max({range_violation, -w[n], w[n] - 1.0});
  };

  const GridPtr g1 = interval_grid(1.0 / 64);
  const NonlocalForm f1 = assemble(g1, 0.5);
  const Shape right = Shape::intersect(Shape::complement(Shape::ball({0, 0}, 1, 1)), Shape::halfspace({1, 0}, 0, 1));
  comp = std::max(comp, complementation_residual(f1, right));
  range_of(harmonic_measure(f1, right));

  const GridPtr g2 = build_grid(make_domain(Shape::ball({0, 0}, 1, 2)), 1.0 / 8);
  const NonlocalForm f2 = assemble(g2, 0.5);
  const Shape upper = Shape::intersect(Shape::complement(Shape::ball({0, 0}, 1, 2)), Shape::halfspace({0, 1}, 0.3, 2));
  comp = std::max(comp, complementation_residual(f2, Shape::complement(Shape::ball({0, 0}, 1.5, 2))));
  range_of(harmonic_measure(f2, Shape::complement(Shape::ball({0, 0}, 1.5, 2))));
  range_of(harmonic_measure(f2, Shape::intersect(upper, Shape::ball({0, 0}, 3, 2))));

  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> U(1.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    double a = U(rng), b = U(rng);
    if (a > b) std::swap(a, b);
    const double lo = 1.0 + (a - 1.0) * std::uniform_real_distribution<double>(0, 1)(rng);
    const double hi = b + (4.0 - b) * std::uniform_real_distribution<double>(0, 1)(rng);
    const double side = trial % 2 ? 1.0 : -1.0;
    const Shape inner = Shape::segment({side * a, 0}, {side * b, 0}, 1);
    const Shape outer = Shape::segment({side * lo, 0}, {side * hi, 0}, 1);
    const Field wi = harmonic_measure(f1, inner), wo = harmonic_measure(f1, outer);
    range_of(wi);
    range_of(wo);
    for (auto n : g1->interior()) mono = std::max(mono, wi[n] - wo[n]);
  }

  const Shape A = Shape::segment({1, 0}, {2, 0}, 1), B = Shape::segment({-3, 0}, {-1.5, 0}, 1);
  const Field wa = harmonic_measure(f1, A), wb = harmonic_measure(f1, B), wab = harmonic_measure(f1, Shape::unite(A, B));
  for (auto n : g1->interior()) additivity = std::max(additivity, std::abs(wab[n] - wa[n] - wb[n]));

  v.pass = range_violation <= 1e-12 && comp <= 1e-7 && mono <= 1e-12 && additivity <= 1e-8;
  v.detail = "range_violation=" + fmt(range_violation) + " complementation=" + fmt(comp) +
             " monotonicity_violation=" + fmt(mono) + " additivity=" + fmt(additivity);
  return v;
}

Verdict decay_calibration() {
  Verdict v;
  const GridPtr g = interval_grid(1.0 / 128);
  const NonlocalForm form = assemble(g, 0.5);
  const double lhmd = fit_decay(lhmd_samples(g, 0.5, {1, 0})).exponent;
  const double ghmd = fit_decay(ghmd_samples(form, {1, 0})).exponent;
  v.pass = lhmd >= 0.42 && lhmd <= 0.58 && ghmd >= lhmd - 0.1;
  v.detail = "lhmd=" + fmt(lhmd) + " ghmd=" + fmt(ghmd);
  return v;
}

Outcome run_config(const std::string& name, int jobs = 1) {
  return run_experiment(load_config(std::string(FRACHOLDER_SOURCE_DIR) + "/configs/" + name + ".ini"), {jobs, false});
}

Verdict positive_chain() {
  Verdict v;
  for (const char* name : {"suite_interval", "suite_disk", "suite_slit"}) {
    const Outcome o = run_config(name);
    const Json& r = o.report["results"];
    const Json& verdicts = r["verdicts"];
    const double lhmd = r["decay"]["min_lhmd_exponent"].get<double>();
    const Json& first = r["holder"]["condition_ii"][0];
    const double spread = first["spread"].is_null() ? INFINITY : first["spread"].get<double>();
    const bool ok = verdicts["uniformly_fat"].get<bool>() && lhmd > 0.0 && verdicts["condition_ii"].get<bool>() &&
                    spread <= 0.2 && verdicts["operator_norm_stable"].get<bool>() && o.passed;
    v.pass = v.pass && ok;
    v.detail += std::string(name) + ":" + (ok ? "ok" : "fail") + " lhmd=" + fmt(lhmd) + " c1_spread(sigma=" +
                fmt(first["sigma"].get<double>()) + ")=" + fmt(spread) + " ";
  }
  return v;
}

Verdict negative_chain() {
  const Outcome o = run_config("suite_punctured");
  const Json& verdicts = o.report["results"]["verdicts"];
  Verdict v;
  v.pass = verdicts["trivial_point"].get<bool>() && !verdicts["uniformly_fat"].get<bool>() &&
           !verdicts["lhmd"].get<bool>() && !verdicts["condition_ii"].get<bool>() && o.passed;
  v.detail = "verdicts=" + verdicts.dump();
  return v;
}

Verdict energy_minimality() {
  Verdict v;
  const GridPtr g = interval_grid(1.0 / 64);
  const NonlocalForm form = assemble(g, 0.5);
  const Shape G = Shape::segment({1, 0}, {2, 0}, 1);
  const Field data = exterior_data(g, [&](const Point& p) { return G.contains(p) ? 1.0 : 0.0; });
  const Field u = solve_dirichlet(form, data, {});
  const double e0 = energy(form, u);
  std::mt19937 rng(97);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> scale(-12.0, 0.0);
  int violations = 0;
  double smallest_gain = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    Field w = u;
    const double eps = std::pow(10.0, scale(rng) / 2.0);
    for (auto n : g->interior()) w[n] += eps * N(rng);
    const double e = energy(form, w);
    if (e < e0) ++violations;
    smallest_gain = std::min(smallest_gain, e - e0);
  }
  v.pass = violations == 0;
  v.detail = "violations=" + std::to_string(violations) + "/100 min_gain=" + fmt(smallest_gain);
  return v;
}

Verdict determinism() {
  auto strip = [](Json j) {
    j.erase("timestamp");
    return j.dump(2);
  };
  const Outcome a = run_config("suite_punctured", 1);
  const Outcome b = run_config("suite_punctured", 2);
  Verdict v;
  v.pass = strip(a.report) == strip(b.report);
  v.detail = v.pass ? "identical report.json" : "report.json differs";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"oracle_agreement", oracle_agreement},
      {"cs_trace_equivalence", cs_trace},
      {"capacity_scaling", capacity_scaling},
      {"capacity_equivalence", capacity_equivalence},
      {"measure_axioms", measure_axioms},
      {"decay_calibration", decay_calibration},
      {"positive_chain", positive_chain},
      {"negative_chain", negative_chain},
      {"energy_minimality", energy_minimality},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
