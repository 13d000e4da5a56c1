#include "fracholder/nonlocal.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <numbers>

#include "fracholder/error.hpp"

namespace fracholder {

namespace {

constexpr int kSubcells = 8;
constexpr double kGauss3[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGauss3W[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double antiderivative(double z, double s) { return std::pow(z, -2.0 * s) / (2.0 * s); }

double kernel_at(double r2, double exponent_half) { return std::pow(r2, -exponent_half); }

// Gauss 3x3 on a square; the integrand is |y|^{-2-2s}.
double square_gauss(const Point& lo, double len, double s) {
  double sum = 0.0;
  const double half = 0.5 * len;
  for (int a = 0; a < 3; ++a) {
    const double x = lo[0] + half * (1.0 + kGauss3[a]);
    for (int b = 0; b < 3; ++b) {
      const double y = lo[1] + half * (1.0 + kGauss3[b]);
      sum += kGauss3W[a] * kGauss3W[b] * kernel_at(x * x + y * y, 1.0 + s);
    }
  }
  return sum * half * half;
}

void check_order(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::SOutOfRange, "order s must lie in (0, 1)");
}

}  // namespace

namespace kernel {

double interval_integral(double x, double a, double b, double s) {
  if (x <= a) return antiderivative(a - x, s) - antiderivative(b - x, s);
  if (x >= b) return antiderivative(x - b, s) - antiderivative(x - a, s);
  throw Error(ErrorCode::QuadratureFailure, "collocation point inside the integration cell");
}

double square_integral(const Point& lo, double len, double s, int depth) {
  const int m = 1 << depth;
  const double sub = len / m;
  double sum = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) sum += square_gauss({lo[0] + a * sub, lo[1] + b * sub}, sub, s);
  }
  return sum;
}

double self_cell_correction(double h, double s, int dim) {
  const double p = 2.0 - 2.0 * s;
  if (dim == 1) return std::pow(0.5 * h, p) / p;
  const double angular = boost::math::quadrature::gauss<double, 20>::integrate(
      [p](double phi) { return std::pow(std::cos(phi), -p); }, 0.0, std::numbers::pi / 4.0);
  return 2.0 / p * std::pow(0.5 * h, p) * angular;
}

double box_tail(const Point& x, const Box& box, double s, bool positive) {
  if (box.dim == 1) {
    return positive ? antiderivative(box.hi[0] - x[0], s) : antiderivative(x[0] - box.lo[0], s);
  }
  constexpr double pi = std::numbers::pi;
  const double start = positive ? -0.5 * pi : 0.5 * pi;
  const double stop = start + pi;
  std::vector<double> cuts{start, stop};
  for (double cx : {box.lo[0], box.hi[0]}) {
    for (double cy : {box.lo[1], box.hi[1]}) {
      double phi = std::atan2(cy - x[1], cx - x[0]);
      while (phi < start) phi += 2.0 * pi;
      while (phi >= start + 2.0 * pi) phi -= 2.0 * pi;
      if (phi > start && phi < stop) cuts.push_back(phi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto radius = [&](double phi) {
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    double rho = std::numeric_limits<double>::infinity();
    if (c > 0) rho = std::min(rho, (box.hi[0] - x[0]) / c);
    if (c < 0) rho = std::min(rho, (box.lo[0] - x[0]) / c);
    if (sn > 0) rho = std::min(rho, (box.hi[1] - x[1]) / sn);
    if (sn < 0) rho = std::min(rho, (box.lo[1] - x[1]) / sn);
    return rho;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] <= 0.0) continue;
    total += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double phi) { return std::pow(radius(phi), -2.0 * s); }, cuts[k], cuts[k + 1]);
  }
  return total / (2.0 * s);
}

}  // namespace kernel

Field make_field(GridPtr grid, const std::function<double(const Point&)>& f) {
  Field out{grid, std::vector<double>(grid->size())};
  for (std::size_t n = 0; n < grid->size(); ++n) out.values[n] = f(grid->node(n));
  return out;
}

Field exterior_data(GridPtr grid, const std::function<double(const Point&)>& f) {
  Field out{grid, std::vector<double>(grid->size(), 0.0)};
  for (auto n : grid->exterior()) out.values[n] = f(grid->node(n));
  return out;
}

NonlocalForm::NonlocalForm(GridPtr grid, double s) : grid_(std::move(grid)), s_(s) {
  check_order(s);
  const Grid& g = *grid_;
  const Lattice& lat = g.lattice();
  const int dim = lat.dim;
  const double h = lat.h;
  const double cell = lat.cell_measure();
  const double scale = std::pow(h, dim - 2.0 * s);
  const double correction = cell * kernel::self_cell_correction(h, s, dim) / (h * h);

  // Translation-invariant weights between full cells.
  table_stride_ = lat.count[0];
  table_.assign(static_cast<std::size_t>(lat.count[0]) * lat.count[1], 0.0);
  for (int dj = 0; dj < lat.count[1]; ++dj) {
    for (int di = 0; di < lat.count[0]; ++di) {
      if (di == 0 && dj == 0) continue;
      double unit;
      if (dim == 1) {
        unit = kernel::interval_integral(0.0, di - 0.5, di + 0.5, s);
      } else {
        const int reach = std::max(di, dj);
        const int depth = reach <= 3 ? 4 : (reach <= 8 ? 1 : 0);
        unit = kernel::square_integral({di - 0.5, dj - 0.5}, 1.0, s, depth);
      }
      double w = scale * unit;
      if (di + dj == 1) w += correction;
      table_[static_cast<std::size_t>(dj) * table_stride_ + di] = w;
    }
  }

  const auto& interior = g.interior();
  const std::size_t n_int = interior.size();
  const Shape& region = g.region();

  // Cells cut by the boundary: integrate only over the part in the node's class.
  const int per_axis = kSubcells;
  const int subcells = dim == 1 ? per_axis : per_axis * per_axis;
  const double sub = h / per_axis;
  cut_slot_.assign(g.size(), -1);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point xj = g.node(j);
    const bool inside = g.is_interior(j);
    std::vector<char> keep(subcells);
    int kept = 0;
    for (int m = 0; m < subcells; ++m) {
      const int mx = m % per_axis;
      const int my = m / per_axis;
      const Point c{xj[0] - 0.5 * h + (mx + 0.5) * sub, dim == 2 ? xj[1] - 0.5 * h + (my + 0.5) * sub : 0.0};
      keep[m] = region.contains(c) == inside;
      kept += keep[m];
    }
    if (kept == 0 || kept == subcells) continue;

    Eigen::VectorXd column(static_cast<Eigen::Index>(n_int));
    const auto [ij, jj] = lat.index(j);
    for (std::size_t a = 0; a < n_int; ++a) {
      const std::size_t i = interior[a];
      if (i == j) {
        column[static_cast<Eigen::Index>(a)] = 0.0;
        continue;
      }
      const Point xi = g.node(i);
      const auto [ii, ji] = lat.index(i);
      double integral = 0.0;
      if (dim == 1) {
        int m = 0;
        while (m < per_axis) {
          if (!keep[m]) {
            ++m;
            continue;
          }
          int e = m;
          while (e < per_axis && keep[e]) ++e;
          integral += kernel::interval_integral(xi[0], xj[0] - 0.5 * h + m * sub, xj[0] - 0.5 * h + e * sub, s);
          m = e;
        }
      } else {
        const double reach = std::max(std::abs(ii - ij), std::abs(ji - jj));
        if (reach > 8) {
          double cx = 0.0, cy = 0.0;
          for (int m = 0; m < subcells; ++m) {
            if (!keep[m]) continue;
            cx += (m % per_axis + 0.5) * sub;
            cy += (m / per_axis + 0.5) * sub;
          }
          cx = xj[0] - 0.5 * h + cx / kept - xi[0];
          cy = xj[1] - 0.5 * h + cy / kept - xi[1];
          integral = kept * sub * sub * kernel_at(cx * cx + cy * cy, 1.0 + s);
        } else {
          for (int m = 0; m < subcells; ++m) {
            if (!keep[m]) continue;
            const Point lo{xj[0] - 0.5 * h + (m % per_axis) * sub - xi[0],
                           xj[1] - 0.5 * h + (m / per_axis) * sub - xi[1]};
            if (reach > 3) {
              const double cx = lo[0] + 0.5 * sub;
              const double cy = lo[1] + 0.5 * sub;
              integral += sub * sub * kernel_at(cx * cx + cy * cy, 1.0 + s);
            } else {
              integral += kernel::square_integral(lo, sub, s, 1);
            }
          }
        }
      }
      double w = cell * integral;
      if (std::abs(ii - ij) + std::abs(ji - jj) == 1) w += correction;
      column[static_cast<Eigen::Index>(a)] = w;
    }
    cut_slot_[j] = static_cast<long>(cut_columns_.size());
    cut_columns_.push_back(std::move(column));
  }

  // Interior block, symmetrized.
  const auto ni = static_cast<Eigen::Index>(n_int);
  w_interior_ = Eigen::MatrixXd::Zero(ni, ni);
  for (std::size_t a = 0; a < n_int; ++a) {
    for (std::size_t b = a + 1; b < n_int; ++b) {
      const double w = 0.5 * (row_weight(a, interior[b]) + row_weight(b, interior[a]));
      w_interior_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = w;
      w_interior_(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = w;
    }
  }

  const Box outer = lat.cell_union();
  tail_neg_.resize(ni);
  tail_pos_.resize(ni);
  degree_ = w_interior_.rowwise().sum();
  for (std::size_t a = 0; a < n_int; ++a) {
    const auto ia = static_cast<Eigen::Index>(a);
    const Point x = g.node(interior[a]);
    tail_neg_[ia] = cell * kernel::box_tail(x, outer, s, false);
    tail_pos_[ia] = cell * kernel::box_tail(x, outer, s, true);
    double ext = 0.0;
    for (auto j : g.exterior()) ext += row_weight(a, j);
    degree_[ia] += ext + tail_neg_[ia] + tail_pos_[ia];
  }
}

double NonlocalForm::translation_weight(int di, int dj) const {
  return table_[static_cast<std::size_t>(std::abs(dj)) * table_stride_ + static_cast<std::size_t>(std::abs(di))];
}

double NonlocalForm::row_weight(std::size_t slot, std::size_t j) const {
  if (const long c = cut_slot_[j]; c >= 0) return cut_columns_[static_cast<std::size_t>(c)][static_cast<Eigen::Index>(slot)];
  const auto& lat = grid_->lattice();
  const auto a = lat.index(grid_->interior()[slot]);
  const auto b = lat.index(j);
  return translation_weight(a[0] - b[0], a[1] - b[1]);
}

double NonlocalForm::weight(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const long si = grid_->interior_slot(i);
  const long sj = grid_->interior_slot(j);
  if (si >= 0 && sj >= 0) return w_interior_(si, sj);
  if (si >= 0) return row_weight(static_cast<std::size_t>(si), j);
  if (sj >= 0) return row_weight(static_cast<std::size_t>(sj), i);
  const auto& lat = grid_->lattice();
  const auto a = lat.index(i);
  const auto b = lat.index(j);
  return translation_weight(a[0] - b[0], a[1] - b[1]);
}

double NonlocalForm::tail(std::size_t n, bool positive) const {
  const long slot = grid_->interior_slot(n);
  if (slot >= 0) return positive ? tail_pos_[slot] : tail_neg_[slot];
  const auto& lat = grid_->lattice();
  return lat.cell_measure() * kernel::box_tail(grid_->node(n), lat.cell_union(), s_, positive);
}

NonlocalForm assemble(GridPtr grid, double s) { return NonlocalForm(std::move(grid), s); }

namespace {

void check_field(const NonlocalForm& form, const Field& u) {
  if (u.grid != form.grid() && (!u.grid || u.grid->size() != form.grid()->size())) {
    throw Error(ErrorCode::GridMismatch, "field and form live on different grids");
  }
  if (u.values.size() != form.grid()->size()) {
    throw Error(ErrorCode::GridMismatch, "field length does not match the node count");
  }
}

Eigen::VectorXd exterior_load(const NonlocalForm& form, const Field& g, FarField far) {
  const Grid& grid = *form.grid();
  const auto& interior = grid.interior();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(interior.size()));
  for (auto j : grid.exterior()) {
    const double v = g.values[j];
    if (v == 0.0) continue;
    for (std::size_t a = 0; a < interior.size(); ++a) rhs[static_cast<Eigen::Index>(a)] += form.weight(interior[a], j) * v;
  }
  if (far.negative != 0.0 || far.positive != 0.0) {
    for (std::size_t a = 0; a < interior.size(); ++a) {
      rhs[static_cast<Eigen::Index>(a)] +=
          form.tail(interior[a], false) * far.negative + form.tail(interior[a], true) * far.positive;
    }
  }
  return rhs;
}

}  // namespace

double energy(const NonlocalForm& form, const Field& u, FarField far) {
  check_field(form, u);
  const Grid& grid = *form.grid();
  const auto& interior = grid.interior();
  const auto& exterior = grid.exterior();
  const Eigen::MatrixXd& w = form.interior_weights();
  double e = 0.0;
  for (std::size_t a = 0; a < interior.size(); ++a) {
    const double ua = u.values[interior[a]];
    for (std::size_t b = a + 1; b < interior.size(); ++b) {
      const double d = ua - u.values[interior[b]];
      e += w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * d * d;
    }
    for (auto j : exterior) {
      const double d = ua - u.values[j];
      if (d != 0.0) e += form.weight(interior[a], j) * d * d;
    }
  }
  // Exterior pairs: only nodes whose value differs contribute.
  std::map<double, std::vector<std::size_t>> groups;
  for (auto j : exterior) groups[u.values[j]].push_back(j);
  if (groups.size() > 1) {
    auto dominant = groups.begin();
    for (auto it = groups.begin(); it != groups.end(); ++it) {
      if (it->second.size() > dominant->second.size()) dominant = it;
    }
    std::vector<std::size_t> rest;
    for (auto it = groups.begin(); it != groups.end(); ++it) {
      if (it != dominant) rest.insert(rest.end(), it->second.begin(), it->second.end());
    }
    const double base = dominant->first;
    for (std::size_t p = 0; p < rest.size(); ++p) {
      const double up = u.values[rest[p]];
      for (auto j : dominant->second) e += form.weight(rest[p], j) * (up - base) * (up - base);
      for (std::size_t q = p + 1; q < rest.size(); ++q) {
        const double d = up - u.values[rest[q]];
        if (d != 0.0) e += form.weight(rest[p], rest[q]) * d * d;
      }
    }
  }
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double dn = u.values[n] - far.negative;
    const double dp = u.values[n] - far.positive;
    if (dn != 0.0) e += form.tail(n, false) * dn * dn;
    if (dp != 0.0) e += form.tail(n, true) * dp * dp;
  }
  return e;
}

Field solve_dirichlet(const NonlocalForm& form, const Field& g, FarField far, SolveInfo* info) {
  check_field(form, g);
  const Grid& grid = *form.grid();
  for (auto j : grid.exterior()) {
    if (!std::isfinite(g.values[j])) throw Error(ErrorCode::MissingExteriorData, "exterior datum is not finite");
  }
  if (!std::isfinite(far.negative) || !std::isfinite(far.positive)) {
    throw Error(ErrorCode::MissingExteriorData, "far-field value is not finite");
  }
  const Eigen::VectorXd rhs = exterior_load(form, g, far);
  Eigen::MatrixXd A = -form.interior_weights();
  A.diagonal() += form.degree();
  const Eigen::VectorXd x = solve_spd(A, rhs, info);
  Field out{form.grid(), g.values};
  const auto& interior = grid.interior();
  for (std::size_t a = 0; a < interior.size(); ++a) out.values[interior[a]] = x[static_cast<Eigen::Index>(a)];
  return out;
}

double interior_residual(const NonlocalForm& form, const Field& u, FarField far) {
  check_field(form, u);
  const auto& interior = form.grid()->interior();
  Eigen::VectorXd x(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t a = 0; a < interior.size(); ++a) x[static_cast<Eigen::Index>(a)] = u.values[interior[a]];
  if (interior.empty()) return 0.0;
  const Eigen::VectorXd r = form.degree().cwiseProduct(x) - form.interior_weights() * x - exterior_load(form, u, far);
  return r.cwiseQuotient(form.degree()).cwiseAbs().maxCoeff();
}

}  // namespace fracholder
