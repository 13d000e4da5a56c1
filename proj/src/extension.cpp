#include "fracholder/extension.hpp"

#include <cmath>

#include "fracholder/error.hpp"

namespace fracholder {

namespace {

struct Dual {
  std::vector<double> width;
};

Dual dual_cells(const std::vector<double>& z) {
  Dual d;
  const std::size_t n = z.size();
  d.width.resize(n);
  if (n == 1) {
    d.width[0] = 1.0;
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? z[0] : 0.5 * (z[i - 1] + z[i]);
    const double hi = i + 1 == n ? z[n - 1] : 0.5 * (z[i] + z[i + 1]);
    d.width[i] = hi - lo;
  }
  return d;
}

double inverse_weight_integral(double a, double b, double theta) {
  const double p = 1.0 - theta;
  return (std::pow(b, p) - std::pow(a, p)) / p;
}

}  // namespace

WeightedForm assemble_weighted(ExtensionGridPtr grid) {
  const ExtensionGrid& eg = *grid;
  const std::size_t nx = eg.nx();
  const std::size_t ny = eg.ny();
  const std::size_t nt = eg.t.size();
  const Dual dx = dual_cells(eg.axes[0]);
  const Dual dy = dual_cells(eg.axes[1]);
  const Dual dt = dual_cells(eg.t);
  std::vector<double> lateral(nt);
  for (std::size_t k = 0; k < nt; ++k) lateral[k] = eg.layer_weight[k] * dt.width[k];

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(eg.size() * 7);
  auto link = [&](std::size_t p, std::size_t q, double c) {
    const double w = 2.0 * c;
    entries.emplace_back(p, p, w);
    entries.emplace_back(q, q, w);
    entries.emplace_back(p, q, -w);
    entries.emplace_back(q, p, -w);
  };
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t p = eg.flat(i, j, k);
        if (i + 1 < nx) {
          link(p, eg.flat(i + 1, j, k), lateral[k] * dy.width[j] / (eg.axes[0][i + 1] - eg.axes[0][i]));
        }
        if (j + 1 < ny) {
          link(p, eg.flat(i, j + 1, k), lateral[k] * dx.width[i] / (eg.axes[1][j + 1] - eg.axes[1][j]));
        }
        if (k + 1 < nt) {
          link(p, eg.flat(i, j, k + 1),
               dx.width[i] * dy.width[j] / inverse_weight_integral(eg.t[k], eg.t[k + 1], eg.theta));
        }
      }
    }
  }
  WeightedForm form{grid, Eigen::SparseMatrix<double>(static_cast<Eigen::Index>(eg.size()),
                                                      static_cast<Eigen::Index>(eg.size()))};
  form.stiffness.setFromTriplets(entries.begin(), entries.end());
  return form;
}

WeightedForm assemble_weighted(const ExtensionGrid& grid) {
  return assemble_weighted(std::make_shared<const ExtensionGrid>(grid));
}

ExtensionField solve_constrained(const WeightedForm& form, const std::vector<char>& fixed, std::vector<double> values,
                                 SolveInfo* info) {
  const auto n = static_cast<std::size_t>(form.stiffness.rows());
  if (fixed.size() != n || values.size() != n) {
    throw Error(ErrorCode::GridMismatch, "constraint vectors do not match the extension grid");
  }
  std::vector<long> slot(n, -1);
  std::vector<std::size_t> free_nodes;
  for (std::size_t p = 0; p < n; ++p) {
    if (!fixed[p]) {
      slot[p] = static_cast<long>(free_nodes.size());
      free_nodes.push_back(p);
    }
  }
  const auto nf = static_cast<Eigen::Index>(free_nodes.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(form.stiffness.nonZeros()));
  for (Eigen::Index col = 0; col < form.stiffness.outerSize(); ++col) {
    const long sc = slot[static_cast<std::size_t>(col)];
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.stiffness, col); it; ++it) {
      const long sr = slot[static_cast<std::size_t>(it.row())];
      if (sr < 0) continue;
      if (sc >= 0) {
        entries.emplace_back(sr, sc, it.value());
      } else {
        rhs[sr] -= it.value() * values[static_cast<std::size_t>(col)];
      }
    }
  }
  Eigen::SparseMatrix<double> k_ff(nf, nf);
  k_ff.setFromTriplets(entries.begin(), entries.end());
  const Eigen::VectorXd x = solve_spd(k_ff, rhs, info);
  for (Eigen::Index a = 0; a < nf; ++a) values[free_nodes[static_cast<std::size_t>(a)]] = x[a];
  return ExtensionField{form.grid, std::move(values)};
}

ExtensionField solve_extension(const WeightedForm& form, const Field& g, FarField far, SolveInfo* info) {
  const ExtensionGrid& eg = *form.grid;
  const Grid& base = *eg.base;
  if (g.values.size() != base.size()) throw Error(ErrorCode::GridMismatch, "exterior data is not on the base grid");
  const double centre = base.lattice().box().center()[0];
  auto far_at = [&](double x) { return x < centre ? far.negative : far.positive; };
  const std::size_t nx = eg.nx();
  const std::size_t ny = eg.ny();
  const std::size_t nt = eg.t.size();
  std::vector<char> fixed(eg.size(), 0);
  std::vector<double> values(eg.size(), 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t p = eg.flat(i, j, 0);
      const long b = eg.base_node(i, j);
      if (b < 0) {
        fixed[p] = 1;
        values[p] = far_at(eg.axes[0][i]);
      } else if (!base.is_interior(static_cast<std::size_t>(b))) {
        if (!std::isfinite(g.values[static_cast<std::size_t>(b)])) {
          throw Error(ErrorCode::MissingExteriorData, "exterior datum is not finite");
        }
        fixed[p] = 1;
        values[p] = g.values[static_cast<std::size_t>(b)];
      }
    }
  }
  if (eg.padded()) {
    for (std::size_t k = 0; k < nt; ++k) {
      for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
          const bool wall = i == 0 || i + 1 == nx || (ny > 1 && (j == 0 || j + 1 == ny));
          if (!wall) continue;
          const std::size_t p = eg.flat(i, j, k);
          fixed[p] = 1;
          values[p] = far_at(eg.axes[0][i]);
        }
      }
    }
  }
  if (far.negative == far.positive) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t p = eg.flat(i, j, nt - 1);
        fixed[p] = 1;
        values[p] = far.positive;
      }
    }
  }
  return solve_constrained(form, fixed, std::move(values), info);
}

Field trace(const ExtensionField& u) {
  const ExtensionGrid& eg = *u.grid;
  Field out{eg.base, std::vector<double>(eg.base->size(), 0.0)};
  for (std::size_t j = 0; j < eg.ny(); ++j) {
    for (std::size_t i = 0; i < eg.nx(); ++i) {
      const long b = eg.base_node(i, j);
      if (b >= 0) out.values[static_cast<std::size_t>(b)] = u.values[eg.flat(i, j, 0)];
    }
  }
  return out;
}

double weighted_energy(const WeightedForm& form, const std::vector<double>& v) {
  const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  return x.dot(form.stiffness * x);
}

ExtensionGrid make_extension_grid(GridPtr base, double s, const ExtensionParams& params) {
  const double diam = base->diameter();
  if (!(diam > 0.0)) throw Error(ErrorCode::InvalidGeometry, "extension needs a domain with interior nodes");
  const double T = params.height_factor * diam;
  const double first = params.first_layer > 0.0 ? params.first_layer : base->h();
  const int M = layers_for(T, first, params.grading);
  ExtensionOptions options;
  if (params.pad) {
    const Box box = base->lattice().box();
    double half = 0.5 * (box.hi[0] - box.lo[0]);
    if (box.dim == 2) half = std::max(half, 0.5 * (box.hi[1] - box.lo[1]));
    options.lateral_padding = std::max(0.0, T - half);
  }
  return build_extension_grid(std::move(base), s, T, M, params.grading, options);
}

CsReport cs_consistency(GridPtr grid, double s, const Field& g, FarField far, const ExtensionParams& params) {
  const NonlocalForm form = assemble(grid, s);
  const Field direct = solve_dirichlet(form, g, far);
  auto eg = std::make_shared<const ExtensionGrid>(make_extension_grid(grid, s, params));
  const WeightedForm wf = assemble_weighted(eg);
  const Field tr = trace(solve_extension(wf, g, far));
  CsReport rep;
  double sq = 0.0;
  for (auto n : grid->interior()) {
    const double d = std::abs(tr.values[n] - direct.values[n]);
    rep.sup_error = std::max(rep.sup_error, d);
    sq += d * d;
  }
  rep.l2_error = std::sqrt(sq * grid->lattice().cell_measure());
  rep.h = grid->h();
  rep.height = eg->t.back();
  rep.layers = static_cast<int>(eg->t.size()) - 1;
  rep.grading = params.grading;
  rep.unknowns = eg->size();
  return rep;
}

}  // namespace fracholder
