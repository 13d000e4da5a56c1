#include "fracholder/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "fracholder/capacity.hpp"
#include "fracholder/error.hpp"
#include "fracholder/extension.hpp"
#include "fracholder/holder.hpp"
#include "fracholder/measure.hpp"
#include "fracholder/nonlocal.hpp"

namespace fracholder {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            f(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ExteriorFunction indicator_function_1d(const Shape& G) {
  double scale = 1.0;
  if (auto b = G.bounds()) scale = std::max({1.0, std::abs(b->lo[0]), std::abs(b->hi[0])});
  const double L = 64.0 * scale;
  const double step = 1e-3 * scale;
  auto in = [&](double x) { return G.contains({x, 0.0}); };
  ExteriorFunction f;
  f.value = [G](const Point& p) { return G.contains(p) ? 1.0 : 0.0; };
  bool prev = in(-L);
  const long n = static_cast<long>(std::ceil(2.0 * L / step));
  for (long k = 1; k <= n; ++k) {
    const double x = -L + k * step;
    const bool cur = in(x);
    if (cur != prev) {
      double a = x - step, b = x;
      for (int it = 0; it < 80 && b - a > 1e-15 * scale; ++it) {
        const double m = 0.5 * (a + b);
        (in(m) == prev ? a : b) = m;
      }
      double x0 = 0.5 * (a + b);
      const double snapped = std::ldexp(std::round(std::ldexp(x0, 20)), -20);
      if (std::abs(snapped - x0) <= 1e-9 * scale) x0 = snapped;
      f.breaks.push_back(x0);
    }
    prev = cur;
  }
  return f;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt_point(const Point& p, int dim) {
  std::string out = "[" + format_number(p[0]);
  if (dim == 2) out += ", " + format_number(p[1]);
  return out + "]";
}

Json point_json(const Point& p, int dim) {
  Json j = Json::array();
  for (int d = 0; d < dim; ++d) j.push_back(p[d]);
  return j;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double relative_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!(*lo > 0.0)) return std::numeric_limits<double>::infinity();
  return *hi / *lo - 1.0;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= x.size();
  my /= x.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
    sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
  }
  return sxy / sxx;
}

class Runner {
 public:
  Runner(const ExperimentConfig& c, const RunOptions& o) : c_(c), opt_(o), hash_(config_hash(c)) {
    domain_shape_ = parse_shape(c.domain_text);
  }

  Outcome run() {
    const auto start = Clock::now();
    Json inputs;
    inputs["kind"] = to_string(c_.kind);
    inputs["name"] = c_.name;
    inputs["domain"] = c_.domain_text;
    inputs["dim"] = c_.dim;
    inputs["s"] = c_.s;
    inputs["h"] = c_.h;
    inputs["dilation"] = c_.dilation;
    inputs["solver_tolerance"] = kSolverTolerance;
    out_.report["config_hash"] = hash_;
    out_.report["inputs"] = inputs;
    out_.report["checks"] = Json::array();
    out_.report["results"] = Json::object();
    switch (c_.kind) {
      case ExperimentKind::Solve: solve(); break;
      case ExperimentKind::Measure: measure(); break;
      case ExperimentKind::Capacity: capacity(); break;
      case ExperimentKind::Fatness: fatness(); break;
      case ExperimentKind::Decay: decay(); break;
      case ExperimentKind::Holder: holder(); break;
      case ExperimentKind::CsCheck: cs_check(); break;
      case ExperimentKind::EquivalenceSuite: suite(); break;
    }
    out_.report["passed"] = out_.passed;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out_.report["timestamp"] = stamp;
    out_.timing["config_hash"] = hash_;
    out_.timing["total_seconds"] = seconds_since(start);
    out_.timing["stages"] = stages_;
    return std::move(out_);
  }

 private:
  static double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  }

  template <class F>
  auto timed(const std::string& stage, F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(stage, seconds_since(t0));
    } else {
      auto r = f();
      record(stage, seconds_since(t0));
      return r;
    }
  }
  void record(const std::string& stage, double secs) {
    std::lock_guard<std::mutex> lock(mutex_);
    stages_[stage] = secs;
  }

  void check(const std::string& name, bool pass, double value, double threshold, const std::string& relation,
             const std::string& detail = {}) {
    Json j;
    j["name"] = name;
    j["pass"] = pass;
    j["value"] = number_or_null(value);
    j["threshold"] = number_or_null(threshold);
    j["relation"] = relation;
    if (!detail.empty()) j["detail"] = detail;
    j["config_hash"] = hash_;
    out_.report["checks"].push_back(j);
    if (!pass) out_.passed = false;
  }

  Json& results() { return out_.report["results"]; }

  Table table(const std::string& file, std::vector<std::string> columns) {
    Table t;
    t.file = file;
    t.columns = {"config_hash", "h", "solver_tolerance"};
    t.columns.insert(t.columns.end(), columns.begin(), columns.end());
    return t;
  }
  void row(Table& t, double h, std::vector<std::string> cells) {
    std::vector<std::string> r{hash_, format_number(h), format_number(kSolverTolerance)};
    r.insert(r.end(), cells.begin(), cells.end());
    t.rows.push_back(std::move(r));
  }

  GridPtr main_grid(double h) const { return build_grid(make_domain(domain_shape_), h, c_.dilation); }

  struct Data {
    Field g;
    FarField far;
  };
  Data exterior(const GridPtr& grid) const {
    if (!c_.set_text.empty()) {
      const Shape G = parse_shape(c_.set_text);
      return {exterior_data(grid, [&](const Point& p) { return G.contains(p) ? 1.0 : 0.0; }),
              far_field_of(G, grid->lattice().box())};
    }
    const double v = *c_.data_value;
    return {exterior_data(grid, [&](const Point&) { return v; }), FarField::uniform(v)};
  }

  Table field_table(const std::string& file, const Field& u, double h) {
    Table t = table(file, {"x", "y", "class", "value"});
    const Grid& g = *u.grid;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Point x = g.node(n);
      row(t, h,
          {format_number(x[0]), format_number(x[1]), g.is_interior(n) ? "interior" : "exterior",
           format_number(u[n])});
    }
    return t;
  }

  // ---------------------------------------------------------------------------

  void solve() {
    const GridPtr grid = main_grid(c_.h);
    const NonlocalForm form = timed("assemble", [&] { return assemble(grid, c_.s); });
    const Data data = exterior(grid);
    SolveInfo info;
    const Field u = timed("solve", [&] { return solve_dirichlet(form, data.g, data.far, &info); });
    const double residual = interior_residual(form, u, data.far);
    double lo = std::min(data.far.negative, data.far.positive), hi = std::max(data.far.negative, data.far.positive);
    for (auto n : grid->exterior()) {
      lo = std::min(lo, data.g[n]);
      hi = std::max(hi, data.g[n]);
    }
    double excess = 0.0;
    for (auto n : grid->interior()) excess = std::max({excess, lo - u[n], u[n] - hi});
    Json& r = results();
    r["interior_nodes"] = grid->interior().size();
    r["iterations"] = info.iterations;
    r["relative_residual"] = info.relative_residual;
    r["interior_residual"] = residual;
    r["energy"] = energy(form, u, data.far);
    check("interior_residual", residual <= c_.thresholds.residual, residual, c_.thresholds.residual, "<=");
    check("maximum_principle", excess <= 1e-8, excess, 1e-8, "<=");
    if (c_.oracle) {
      const Ball b = *as_ball(c_.domain_text);
      const KernelSpec spec = make_kernel_spec(b.center, b.radius, c_.s, 1);
      ExteriorFunction g = c_.set_text.empty() ? constant_function(*c_.data_value)
                                               : indicator_function_1d(parse_shape(c_.set_text));
      const auto& nodes = grid->interior();
      std::vector<double> ref(nodes.size());
      timed("oracle", [&] {
        parallel_for(opt_.jobs, nodes.size(), [&](std::size_t k) { ref[k] = ball_solution(g, grid->node(nodes[k]), spec); });
      });
      double sup = 0.0;
      Table t = table("oracle.csv", {"x", "numeric", "oracle", "error"});
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double e = std::abs(u[nodes[k]] - ref[k]);
        sup = std::max(sup, e);
        row(t, c_.h, {format_number(grid->node(nodes[k])[0]), format_number(u[nodes[k]]), format_number(ref[k]),
                      format_number(e)});
      }
      r["sup_error"] = sup;
      out_.tables.push_back(std::move(t));
      check("oracle_sup_error", sup <= c_.thresholds.oracle, sup, c_.thresholds.oracle, "<=");
    }
    out_.tables.push_back(field_table("field.csv", u, c_.h));
  }

  void measure() {
    const GridPtr grid = main_grid(c_.h);
    const NonlocalForm form = timed("assemble", [&] { return assemble(grid, c_.s); });
    const Shape G = parse_shape(c_.set_text);
    const Field omega = timed("solve", [&] { return harmonic_measure(form, G); });
    double lo = 1.0, hi = 0.0;
    for (auto n : grid->interior()) {
      lo = std::min(lo, omega[n]);
      hi = std::max(hi, omega[n]);
    }
    const double comp = timed("complementation", [&] { return complementation_residual(form, G); });
    Json& r = results();
    r["min_omega"] = lo;
    r["max_omega"] = hi;
    r["complementation_residual"] = comp;
    const double range_excess = std::max({0.0, -lo, hi - 1.0});
    check("omega_in_unit_interval", range_excess <= 1e-9, range_excess, 1e-9, "<=");
    check("complementation_residual", comp <= c_.thresholds.residual, comp, c_.thresholds.residual, "<=");
    out_.tables.push_back(field_table("omega.csv", omega, c_.h));
  }

  void capacity() {
    const Shape K = parse_shape(c_.set_text);
    const Ball B{*c_.ball_center, *c_.ball_radius};
    const CapacityResult besov = timed("besov", [&] { return besov_capacity(K, B, c_.h, c_.s); });
    Json& r = results();
    r["set"] = besov.k_description;
    r["ball"] = {{"center", point_json(B.center, c_.dim)}, {"radius", B.radius}};
    r["besov_capacity"] = besov.value;
    r["empty_k"] = besov.empty_k;
    check("besov_capacity_nonnegative", besov.value >= 0.0, besov.value, 0.0, ">=");
    if (c_.weighted) {
      WeightedCapacityOptions wo;
      wo.grading = c_.extension.grading;
      const CapacityResult w = timed("weighted", [&] { return weighted_capacity(K, B, c_.h, c_.s, wo); });
      r["weighted_capacity"] = w.value;
      r["ratio"] = besov.value > 0.0 ? Json(w.value / besov.value) : Json(nullptr);
      check("weighted_capacity_nonnegative", w.value >= 0.0, w.value, 0.0, ">=");
    }
    if (!c_.capacity_radii.empty()) {
      const auto& radii = c_.capacity_radii;
      std::vector<double> caps(radii.size()), weighted(radii.size(), 0.0);
      timed("scaling", [&] {
        parallel_for(opt_.jobs, radii.size(), [&](std::size_t k) {
          const double rr = radii[k];
          const Shape Kr = Shape::closed_ball(B.center, 0.5 * rr, c_.dim);
          caps[k] = besov_capacity(Kr, Ball{B.center, 2.0 * rr}, c_.h, c_.s).value;
          if (c_.weighted) {
            WeightedCapacityOptions wo;
            wo.grading = c_.extension.grading;
            weighted[k] = weighted_capacity(Kr, Ball{B.center, 2.0 * rr}, c_.h, c_.s, wo).value;
          }
        });
      });
      Table t = table("capacity_scaling.csv", {"r", "besov", "weighted", "ratio"});
      std::vector<double> ratios;
      for (std::size_t k = 0; k < radii.size(); ++k) {
        const double ratio = c_.weighted && caps[k] > 0.0 ? weighted[k] / caps[k] : std::nan("");
        if (c_.weighted) ratios.push_back(ratio);
        row(t, c_.h, {format_number(radii[k]), format_number(caps[k]), c_.weighted ? format_number(weighted[k]) : "",
                      c_.weighted ? format_number(ratio) : ""});
      }
      out_.tables.push_back(std::move(t));
      const double target = c_.dim - 2.0 * c_.s;
      const double slope = radii.size() >= 2 ? log_slope(radii, caps) : std::nan("");
      const double tol = c_.thresholds.slope * std::max(std::abs(target), 0.5);
      r["scaling"] = {{"radii", radii}, {"besov", caps}, {"slope", number_or_null(slope)}, {"target", target}};
      check("capacity_scaling_slope", std::abs(slope - target) <= tol, std::abs(slope - target), tol, "<=",
            "|slope - (N - 2s)|");
      if (c_.weighted) {
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        const double spread = *hi / *lo;
        r["scaling"]["weighted"] = weighted;
        r["scaling"]["ratio_spread"] = spread;
        check("capacity_ratio_spread", spread <= 3.0, spread, 3.0, "<=", "max / min of weighted / Besov");
      }
      Plot p{"capacity_scaling.svg", "Capacity scaling", "r", "capacity", true, true, {}};
      p.series.push_back({"Besov", radii, caps, true});
      if (c_.weighted) p.series.push_back({"weighted", radii, weighted, true});
      std::vector<double> fit(radii.size());
      for (std::size_t k = 0; k < radii.size(); ++k) fit[k] = caps.front() * std::pow(radii[k] / radii.front(), target);
      p.series.push_back({"r^(N-2s)", radii, fit, false});
      out_.plots.push_back(std::move(p));
    }
  }

  std::vector<double> fat_radii(double diam) const {
    return c_.radii.empty() ? std::vector<double>{diam / 16.0, diam / 8.0} : c_.radii;
  }

  Shape exterior_set() const {
    return c_.set_text.empty() ? Shape::complement(domain_shape_) : parse_shape(c_.set_text);
  }

  struct FatOutcome {
    FatnessReport report;
    std::vector<bool> perfect;
  };

  FatOutcome run_fatness(double diam) {
    const Shape E = exterior_set();
    const auto radii = fat_radii(diam);
    FatnessOptions fo;
    fo.threshold = c_.thresholds.fat;
    std::vector<FatnessReport> per(c_.anchors.size());
    timed("fatness", [&] {
      parallel_for(opt_.jobs, c_.anchors.size(),
                   [&](std::size_t k) { per[k] = fatness_scan(E, {c_.anchors[k]}, radii, c_.s, fo); });
    });
    FatOutcome out;
    out.report.threshold = fo.threshold;
    out.report.min_psi = std::numeric_limits<double>::infinity();
    for (auto& p : per) {
      out.report.min_psi = std::min(out.report.min_psi, p.min_psi);
      for (auto& e : p.entries) out.report.entries.push_back(std::move(e));
    }
    out.report.fat = !out.report.entries.empty() && out.report.min_psi >= fo.threshold;
    const auto pr = c_.perfect_radii.empty() ? radii : c_.perfect_radii;
    out.perfect = perfectness_check(E, c_.anchors, pr, c_.thresholds.perfectness, c_.h);
    Table t = table("fatness.csv", {"anchor", "r", "level_h", "numerator", "denominator", "psi"});
    Json entries = Json::array();
    for (const auto& e : out.report.entries) {
      for (std::size_t l = 0; l < e.h.size(); ++l) {
        row(t, e.h[l], {fmt_point(e.anchor, c_.dim), format_number(e.r), format_number(e.h[l]),
                        format_number(e.numerator[l]), format_number(e.denominator[l]), format_number(e.psi_levels[l])});
      }
      entries.push_back({{"anchor", point_json(e.anchor, c_.dim)},
                         {"r", e.r},
                         {"h", e.h},
                         {"psi_levels", e.psi_levels},
                         {"psi", e.psi},
                         {"vanishing", e.vanishing}});
    }
    out_.tables.push_back(std::move(t));
    Json& r = results()["fatness"];
    r["entries"] = entries;
    r["min_psi"] = out.report.min_psi;
    r["threshold"] = out.report.threshold;
    r["fat"] = out.report.fat;
    Json perfect = Json::array();
    for (bool b : out.perfect) perfect.push_back(b);
    r["perfect"] = perfect;
    return out;
  }

  void fatness() {
    const GridPtr grid = main_grid(c_.h);
    const FatOutcome f = run_fatness(grid->diameter());
    check("uniformly_fat", f.report.fat, f.report.min_psi, c_.thresholds.fat, ">=", "min psi over anchors and radii");
  }

  struct DecayOutcome {
    std::vector<DecaySamples> ghmd, lhmd;
    std::vector<DecayFit> ghmd_fit, lhmd_fit;
    double min_ghmd = 0.0, min_lhmd = 0.0;
  };

  static DecayFit safe_fit(const DecaySamples& s) {
    try {
      return fit_decay(s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSamples && e.code() != ErrorCode::InsufficientSamples) throw;
      return DecayFit{};
    }
  }

  DecayOutcome run_decay(const NonlocalForm& form) {
    const GridPtr& grid = form.grid();
    const int levels = c_.decay_levels > 0 ? c_.decay_levels : (c_.dim == 1 ? 6 : 4);
    const auto radii = dyadic_radii(grid->diameter(), levels);
    const std::size_t A = c_.anchors.size();
    DecayOutcome d;
    d.ghmd.resize(A);
    d.lhmd.resize(A);
    timed("decay", [&] {
      parallel_for(opt_.jobs, 2 * A, [&](std::size_t k) {
        if (k < A) {
          d.ghmd[k] = ghmd_samples(form, c_.anchors[k], radii);
        } else {
          d.lhmd[k - A] = lhmd_samples(grid, c_.s, c_.anchors[k - A], radii);
        }
      });
    });
    d.min_ghmd = d.min_lhmd = std::numeric_limits<double>::infinity();
    Table t = table("decay.csv", {"kind", "anchor", "r", "d", "value"});
    Json fits = Json::array();
    Plot p{"decay.svg", "Harmonic measure decay", "d / r", "value", true, true, {}};
    for (std::size_t k = 0; k < A; ++k) {
      for (const DecaySamples* s : {&d.ghmd[k], &d.lhmd[k]}) {
        const DecayFit fit = safe_fit(*s);
        (s->kind == DecayKind::Global ? d.ghmd_fit : d.lhmd_fit).push_back(fit);
        double& m = s->kind == DecayKind::Global ? d.min_ghmd : d.min_lhmd;
        m = std::min(m, fit.exponent);
        Series pts{to_string(s->kind) + " " + fmt_point(s->anchor, c_.dim), {}, {}, true};
        const double local_h = s->kind == DecayKind::Global ? grid->h() : 0.0;
        for (const auto& smp : s->samples) {
          const double hh = local_h > 0.0 ? local_h : smp.r / (c_.dim == 1 ? 128.0 : 20.0);
          row(t, hh, {to_string(s->kind), fmt_point(s->anchor, c_.dim), format_number(smp.r),
                      format_number(smp.d), format_number(smp.value)});
          if (smp.value > 0.0 && smp.d > 0.0) {
            pts.x.push_back(smp.d / smp.r);
            pts.y.push_back(smp.value);
          }
        }
        fits.push_back({{"kind", to_string(s->kind)},
                        {"anchor", point_json(s->anchor, c_.dim)},
                        {"exponent", fit.exponent},
                        {"constant", fit.constant},
                        {"residual", fit.residual},
                        {"count", fit.count}});
        if (!pts.x.empty()) {
          const auto [lo, hi] = std::minmax_element(pts.x.begin(), pts.x.end());
          Series line{to_string(s->kind) + " fit", {*lo, *hi},
                      {fit.constant * std::pow(*lo, fit.exponent), fit.constant * std::pow(*hi, fit.exponent)}, false};
          p.series.push_back(std::move(pts));
          if (fit.count > 0) p.series.push_back(std::move(line));
        }
      }
    }
    out_.tables.push_back(std::move(t));
    out_.plots.push_back(std::move(p));
    Json& r = results()["decay"];
    r["radii"] = radii;
    r["fits"] = fits;
    r["min_ghmd_exponent"] = d.min_ghmd;
    r["min_lhmd_exponent"] = d.min_lhmd;
    return d;
  }

  void decay() {
    const GridPtr grid = main_grid(c_.h);
    const NonlocalForm form = timed("assemble", [&] { return assemble(grid, c_.s); });
    const DecayOutcome d = run_decay(form);
    check("lhmd_exponent", d.min_lhmd >= c_.thresholds.decay_min_exponent, d.min_lhmd,
          c_.thresholds.decay_min_exponent, ">=");
    check("ghmd_dominates_lhmd", d.min_ghmd >= d.min_lhmd - c_.thresholds.decay_gap, d.min_ghmd,
          d.min_lhmd - c_.thresholds.decay_gap, ">=");
  }

  struct HolderOutcome {
    std::optional<double> alpha0;
    double sigma0 = 0.0;
    std::vector<double> sigmas;
    std::vector<std::vector<double>> c1;  // [sigma][level]
    std::vector<double> op_norm;          // per level, at the smallest sigma
    std::vector<bool> stable;
    bool condition = false;
    bool op_stable = false;
  };

  /// Interior node furthest from the discrete boundary.
  static std::pair<Point, double> deepest_point(const Grid& grid) {
    const auto boundary = grid.boundary_nodes();
    Point best{};
    double best_d = -1.0;
    for (auto n : grid.interior()) {
      double d = std::numeric_limits<double>::infinity();
      for (auto b : boundary) d = std::min(d, distance(grid.node(n), grid.node(b)));
      if (d > best_d + 1e-12) {
        best_d = d;
        best = grid.node(n);
      }
    }
    return {best, best_d};
  }

  HolderOutcome run_holder(const NonlocalForm& form) {
    HolderOutcome out;
    const GridPtr& grid = form.grid();
    Json& r = results()["holder"];
    timed("alpha0", [&] {
      const ConditionResult base = condition_ii_constant(form, c_.anchors.front(), 1.0);
      const auto [x, depth] = deepest_point(*grid);
      try {
        const OscillationFit fit = alpha0_estimate(base.solution, x, 0.5 * depth);
        out.alpha0 = fit.exponent;
        r["alpha0_center"] = point_json(x, c_.dim);
        r["alpha0_radii"] = fit.radii;
        r["alpha0_oscillation"] = fit.oscillation;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientInteriorRoom) throw;
        r["alpha0_note"] = e.what();
      }
    });
    out.sigma0 = out.alpha0 ? std::min(c_.s, *out.alpha0) : c_.s;
    out.sigmas = c_.sigmas.empty() ? sigma_grid(c_.s, out.sigma0) : c_.sigmas;
    if (out.sigmas.empty()) throw Error(ErrorCode::ConfigInvalid, "no admissible Hoelder exponent below sigma0");
    r["alpha0"] = out.alpha0 ? Json(*out.alpha0) : Json(nullptr);
    r["sigma0"] = out.sigma0;
    r["sigmas"] = out.sigmas;

    const auto& H = c_.refinements;
    const std::size_t S = out.sigmas.size(), A = c_.anchors.size();
    std::vector<std::vector<std::vector<double>>> c1(H.size(), std::vector<std::vector<double>>(S, std::vector<double>(A)));
    std::vector<std::vector<double>> op(H.size(), std::vector<double>(A));
    timed("refinements", [&] {
      parallel_for(opt_.jobs, H.size(), [&](std::size_t l) {
        const GridPtr g = main_grid(H[l]);
        const NonlocalForm f = assemble(g, c_.s);
        for (std::size_t a = 0; a < A; ++a) {
          for (std::size_t k = 0; k < S; ++k) {
            const ConditionResult res = condition_ii_constant(f, c_.anchors[a], out.sigmas[k]);
            c1[l][k][a] = res.constant;
            if (k == 0) {
              double sup = 0.0;
              for (auto n : g->interior()) sup = std::max(sup, std::abs(res.solution[n]));
              op[l][a] = 0.5 * (sup + holder_seminorm(res.solution, out.sigmas[k]));
            }
          }
        }
      });
    });
    Table t = table("holder.csv", {"anchor", "sigma", "c1", "operator_norm_lower_bound"});
    out.c1.assign(S, std::vector<double>(H.size()));
    out.op_norm.assign(H.size(), 0.0);
    for (std::size_t l = 0; l < H.size(); ++l) {
      for (std::size_t a = 0; a < A; ++a) {
        out.op_norm[l] = std::max(out.op_norm[l], op[l][a]);
        for (std::size_t k = 0; k < S; ++k) {
          out.c1[k][l] = std::max(out.c1[k][l], c1[l][k][a]);
          row(t, H[l], {fmt_point(c_.anchors[a], c_.dim), format_number(out.sigmas[k]), format_number(c1[l][k][a]),
                        k == 0 ? format_number(op[l][a]) : ""});
        }
      }
    }
    out_.tables.push_back(std::move(t));
    Json per = Json::array();
    Plot p{"holder.svg", "Condition (ii) constant under refinement", "h", "C1", true, false, {}};
    for (std::size_t k = 0; k < S; ++k) {
      const double spread = relative_spread(out.c1[k]);
      const bool ok = spread <= c_.thresholds.stability;
      out.stable.push_back(ok);
      out.condition = out.condition || ok;
      per.push_back({{"sigma", out.sigmas[k]}, {"c1", out.c1[k]}, {"spread", number_or_null(spread)}, {"stable", ok}});
      p.series.push_back({"sigma " + format_number(out.sigmas[k]), H, out.c1[k], true});
    }
    const double op_spread = relative_spread(out.op_norm);
    out.op_stable = op_spread <= c_.thresholds.stability;
    bool monotone = true;
    for (std::size_t l = 0; l < H.size(); ++l) {
      for (std::size_t k = 0; k + 1 < S; ++k) {
        if (out.c1[k + 1][l] < out.c1[k][l] * 0.95) monotone = false;
      }
    }
    r["refinements"] = H;
    r["condition_ii"] = per;
    r["condition_ii_holds"] = out.condition;
    r["operator_norm"] = {{"sigma", out.sigmas.front()},
                          {"values", out.op_norm},
                          {"spread", number_or_null(op_spread)},
                          {"stable", out.op_stable}};
    r["c1_monotone_in_sigma"] = monotone;
    out_.plots.push_back(std::move(p));
    return out;
  }

  void holder() {
    const GridPtr grid = main_grid(c_.h);
    const NonlocalForm form = timed("assemble", [&] { return assemble(grid, c_.s); });
    const HolderOutcome h = run_holder(form);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : h.c1) best = std::min(best, relative_spread(v));
    check("condition_ii_stabilizes", h.condition, best, c_.thresholds.stability, "<=",
          "smallest relative spread of C1 over refinements");
    check("operator_norm_stabilizes", h.op_stable, relative_spread(h.op_norm), c_.thresholds.stability, "<=");
  }

  void cs_check() {
    const Shape G = parse_shape(c_.set_text);
    const auto& levels = c_.cs_levels;
    std::vector<CsReport> reps(levels.size());
    timed("cs", [&] {
      parallel_for(opt_.jobs, levels.size(), [&](std::size_t k) {
        const GridPtr grid = main_grid(levels[k]);
        const Field g = exterior_data(grid, [&](const Point& p) { return G.contains(p) ? 1.0 : 0.0; });
        reps[k] = cs_consistency(grid, c_.s, g, far_field_of(G, grid->lattice().box()), c_.extension);
      });
    });
    Table t = table("cs.csv", {"sup_error", "l2_error", "height", "layers", "grading", "unknowns"});
    Json arr = Json::array();
    bool decreasing = true;
    std::vector<double> hs, sups;
    for (std::size_t k = 0; k < reps.size(); ++k) {
      const auto& rep = reps[k];
      row(t, rep.h, {format_number(rep.sup_error), format_number(rep.l2_error), format_number(rep.height),
                     std::to_string(rep.layers), format_number(rep.grading), std::to_string(rep.unknowns)});
      arr.push_back({{"h", rep.h},
                     {"sup_error", rep.sup_error},
                     {"l2_error", rep.l2_error},
                     {"height", rep.height},
                     {"layers", rep.layers},
                     {"unknowns", rep.unknowns}});
      if (k > 0 && !(rep.sup_error < reps[k - 1].sup_error)) decreasing = false;
      hs.push_back(rep.h);
      sups.push_back(rep.sup_error);
    }
    out_.tables.push_back(std::move(t));
    results()["levels"] = arr;
    Plot p{"cs.svg", "Extension trace against direct solve", "h", "sup error", true, true, {}};
    p.series.push_back({"sup error", hs, sups, true});
    out_.plots.push_back(std::move(p));
    check("cs_sup_error", reps.back().sup_error <= c_.thresholds.cs, reps.back().sup_error, c_.thresholds.cs, "<=",
          "finest level");
    check("cs_error_decreasing", decreasing, reps.back().sup_error, reps.front().sup_error, "<",
          "strictly decreasing over levels");
  }

  void suite() {
    const GridPtr grid = main_grid(c_.h);
    const NonlocalForm form = timed("assemble", [&] { return assemble(grid, c_.s); });
    const double diam = grid->diameter();
    const double rt = c_.trivial_radius > 0.0 ? c_.trivial_radius : diam / 8.0;
    std::vector<TrivialPointVerdict> trivial(c_.anchors.size());
    timed("trivial_points", [&] {
      parallel_for(opt_.jobs, c_.anchors.size(),
                   [&](std::size_t k) { trivial[k] = trivial_point_test(domain_shape_, c_.anchors[k], rt, c_.s); });
    });
    bool any_trivial = false;
    Json tj = Json::array();
    for (std::size_t k = 0; k < trivial.size(); ++k) {
      any_trivial = any_trivial || trivial[k].is_trivial;
      tj.push_back({{"anchor", point_json(c_.anchors[k], c_.dim)},
                    {"radius", rt},
                    {"h", trivial[k].h},
                    {"capacity", trivial[k].capacity},
                    {"trivial", trivial[k].is_trivial}});
    }
    results()["trivial_points"] = tj;

    const FatOutcome fat = run_fatness(diam);
    const DecayOutcome dec = run_decay(form);
    const HolderOutcome hol = run_holder(form);

    const bool lhmd = dec.min_lhmd >= c_.thresholds.decay_min_exponent;
    const bool ghmd = dec.min_ghmd >= c_.thresholds.decay_min_exponent;
    Json verdicts;
    verdicts["trivial_point"] = any_trivial;
    verdicts["uniformly_fat"] = fat.report.fat;
    verdicts["lhmd"] = lhmd;
    verdicts["ghmd"] = ghmd;
    verdicts["condition_ii"] = hol.condition;
    verdicts["operator_norm_stable"] = hol.op_stable;
    results()["verdicts"] = verdicts;

    const bool agree = fat.report.fat == lhmd && lhmd == ghmd && ghmd == hol.condition;
    check("chain_agreement", agree, agree ? 1.0 : 0.0, 1.0, "==",
          "fatness, LHMD, GHMD and condition (ii) share one verdict");
    check("condition_ii_implies_operator_norm", !hol.condition || hol.op_stable, hol.op_stable ? 1.0 : 0.0,
          hol.condition ? 1.0 : 0.0, ">=");
    check("trivial_point_breaks_chain", !any_trivial || (!fat.report.fat && !hol.condition),
          any_trivial ? 1.0 : 0.0, 0.0, "implies failure");
    results()["consistent"] = out_.passed;
  }

  const ExperimentConfig& c_;
  RunOptions opt_;
  std::string hash_;
  Shape domain_shape_ = Shape::ball({0.0, 0.0}, 1.0, 1);
  Outcome out_;
  Json stages_ = Json::object();
  std::mutex mutex_;
};

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else out += ch;
  }
  return out;
}

}  // namespace

Outcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  Runner runner(config, options);
  return runner.run();
}

std::string render_csv(const Table& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      const bool quote = cells[k].find_first_of(",\"") != std::string::npos;
      if (quote) {
        out += '"';
        for (char ch : cells[k]) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      } else {
        out += cells[k];
      }
    }
    out += '\n';
  };
  line(table.columns);
  for (const auto& r : table.rows) line(r);
  return out;
}

std::string render_svg(const Plot& plot) {
  const double W = 640, H = 420, L = 70, R = 160, T = 40, B = 50;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  auto tx = [&](double v) { return plot.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.logy ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.logx || x > 0.0) && (!plot.logy || y > 0.0);
  };
  for (const auto& s : plot.series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      xlo = std::min(xlo, tx(s.x[k]));
      xhi = std::max(xhi, tx(s.x[k]));
      ylo = std::min(ylo, ty(s.y[k]));
      yhi = std::max(yhi, ty(s.y[k]));
    }
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (xhi - xlo < 1e-12) xlo -= 0.5, xhi += 0.5;
  if (yhi - ylo < 1e-12) ylo -= 0.5, yhi += 0.5;
  const double padx = 0.05 * (xhi - xlo), pady = 0.05 * (yhi - ylo);
  xlo -= padx, xhi += padx, ylo -= pady, yhi += pady;
  auto px = [&](double v) { return L + (tx(v) - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - ylo) / (yhi - ylo) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" font-family=\"sans-serif\" "
                    "font-size=\"12\">\n<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(plot.title) +
         "</text>\n";
  out += "<rect x=\"" + svg_num(L) + "\" y=\"" + svg_num(T) + "\" width=\"" + svg_num(W - L - R) + "\" height=\"" +
         svg_num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xlo + (xhi - xlo) * k / 4.0, fy = ylo + (yhi - ylo) * k / 4.0;
    const double vx = plot.logx ? std::pow(10.0, fx) : fx, vy = plot.logy ? std::pow(10.0, fy) : fy;
    const double X = L + (W - L - R) * k / 4.0, Y = H - B - (H - T - B) * k / 4.0;
    out += "<text x=\"" + svg_num(X) + "\" y=\"" + svg_num(H - B + 16) + "\" text-anchor=\"middle\">" + tick_label(vx) +
           "</text>\n";
    out += "<text x=\"" + svg_num(L - 6) + "\" y=\"" + svg_num(Y + 4) + "\" text-anchor=\"end\">" + tick_label(vy) +
           "</text>\n";
  }
  out += "<text x=\"" + svg_num(L + (W - L - R) / 2) + "\" y=\"" + svg_num(H - 12) + "\" text-anchor=\"middle\">" +
         escape(plot.xlabel) + (plot.logx ? " (log)" : "") + "</text>\n";
  out += "<text x=\"16\" y=\"" + svg_num(T + (H - T - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         svg_num(T + (H - T - B) / 2) + ")\">" + escape(plot.ylabel) + (plot.logy ? " (log)" : "") + "</text>\n";
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const Series& ser = plot.series[s];
    const std::string color = colors[s % 7];
    if (ser.markers) {
      for (std::size_t k = 0; k < ser.x.size(); ++k) {
        if (!usable(ser.x[k], ser.y[k])) continue;
        out += "<circle cx=\"" + svg_num(px(ser.x[k])) + "\" cy=\"" + svg_num(py(ser.y[k])) + "\" r=\"3\" fill=\"" +
               color + "\"/>\n";
      }
    } else {
      std::string pts;
      for (std::size_t k = 0; k < ser.x.size(); ++k) {
        if (!usable(ser.x[k], ser.y[k])) continue;
        pts += svg_num(px(ser.x[k])) + "," + svg_num(py(ser.y[k])) + " ";
      }
      out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = T + 12 + 16.0 * s;
    out += "<rect x=\"" + svg_num(W - R + 10) + "\" y=\"" + svg_num(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
           color + "\"/>\n";
    out += "<text x=\"" + svg_num(W - R + 26) + "\" y=\"" + svg_num(ly + 1) + "\">" + escape(ser.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_outcome(const Outcome& outcome, const std::string& dir, bool plots) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::ConfigInvalid, "cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::ConfigInvalid, "cannot write '" + (fs::path(dir) / name).string() + "'");
    f << text;
  };
  write("report.json", outcome.report.dump(2) + "\n");
  write("timing.json", outcome.timing.dump(2) + "\n");
  for (const auto& t : outcome.tables) write(t.file, render_csv(t));
  if (plots) {
    for (const auto& p : outcome.plots) write(p.file, render_svg(p));
  }
}

}  // namespace fracholder
