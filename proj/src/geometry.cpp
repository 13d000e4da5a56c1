#include "fracholder/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracholder/error.hpp"

namespace fracholder {

double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

Point Box::center() const noexcept { return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])}; }

double Box::diameter() const noexcept { return distance(lo, hi); }

bool Box::contains(const Point& p) const noexcept {
  for (int d = 0; d < dim; ++d) {
    if (p[d] < lo[d] || p[d] > hi[d]) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const noexcept {
  for (int d = 0; d < dim; ++d) {
    if (other.lo[d] < lo[d] || other.hi[d] > hi[d]) return false;
  }
  return true;
}

namespace {

std::string fmt_num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_point(const Point& p, int dim) {
  std::string out = "[" + fmt_num(p[0]);
  if (dim == 2) out += ", " + fmt_num(p[1]);
  return out + "]";
}

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidGeometry, what);
}

void check_box(const Point& lo, const Point& hi, int dim) {
  for (int d = 0; d < dim; ++d) {
    require(std::isfinite(lo[d]) && std::isfinite(hi[d]) && lo[d] < hi[d],
            "box requires lo < hi in every coordinate");
  }
}

bool on_segment(const Point& x, const Point& p, const Point& q) {
  const Point pq{q[0] - p[0], q[1] - p[1]};
  const Point px{x[0] - p[0], x[1] - p[1]};
  const double len2 = dot(pq, pq);
  double t = len2 > 0 ? dot(px, pq) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Point foot{p[0] + t * pq[0], p[1] + t * pq[1]};
  const double scale = 1.0 + std::abs(p[0]) + std::abs(p[1]) + std::abs(q[0]) + std::abs(q[1]);
  return distance(x, foot) <= 1e-12 * scale;
}

bool in_cantor(double t, int level) {
  if (t < 0.0 || t > 1.0) return false;
  for (int k = 0; k < level; ++k) {
    t *= 3.0;
    if (t > 1.0 && t < 2.0) return false;
    if (t >= 2.0) t -= 2.0;
  }
  return true;
}

std::optional<Box> hull(const std::optional<Box>& a, const std::optional<Box>& b) {
  if (!a || !b) return std::nullopt;
  Box out = *a;
  for (int d = 0; d < 2; ++d) {
    out.lo[d] = std::min(a->lo[d], b->lo[d]);
    out.hi[d] = std::max(a->hi[d], b->hi[d]);
  }
  return out;
}

std::optional<Box> overlap(const std::optional<Box>& a, const std::optional<Box>& b) {
  if (!a) return b;
  if (!b) return a;
  Box out = *a;
  for (int d = 0; d < 2; ++d) {
    out.lo[d] = std::max(a->lo[d], b->lo[d]);
    out.hi[d] = std::max(out.lo[d], std::min(a->hi[d], b->hi[d]));
  }
  return out;
}

}  // namespace

namespace detail {

struct ShapeNode {
  explicit ShapeNode(int d) : dim(d) {}
  virtual ~ShapeNode() = default;
  virtual bool contains(const Point& p) const = 0;
  virtual std::optional<Box> bounds() const = 0;
  // Bounding box of the complement, when the complement is bounded.
  virtual std::optional<Box> co_bounds() const { return std::nullopt; }
  virtual std::string describe() const = 0;
  virtual void check() const = 0;
  int dim;
};

namespace {

struct BallNode final : ShapeNode {
  BallNode(Point c, double r, bool closed, int d) : ShapeNode(d), center(c), radius(r), closed(closed) {}
  bool contains(const Point& p) const override {
    const double dist = distance(p, center);
    return closed ? dist <= radius : dist < radius;
  }
  std::optional<Box> bounds() const override {
    Box b{dim, center, center};
    for (int k = 0; k < dim; ++k) {
      b.lo[k] -= radius;
      b.hi[k] += radius;
    }
    return b;
  }
  std::string describe() const override {
    return std::string(closed ? "closed_ball(" : "ball(") + fmt_point(center, dim) + ", " +
           fmt_num(radius) + ")";
  }
  void check() const override {
    require(std::isfinite(radius) && (closed ? radius >= 0.0 : radius > 0.0),
            closed ? "closed ball radius must be >= 0" : "ball radius must be > 0");
  }
  Point center;
  double radius;
  bool closed;
};

struct BoxNode final : ShapeNode {
  BoxNode(Point l, Point h, int d) : ShapeNode(d), lo(l), hi(h) {}
  bool contains(const Point& p) const override {
    for (int k = 0; k < dim; ++k) {
      if (!(p[k] > lo[k] && p[k] < hi[k])) return false;
    }
    return true;
  }
  std::optional<Box> bounds() const override { return Box{dim, lo, hi}; }
  std::string describe() const override {
    return "box(" + fmt_point(lo, dim) + ", " + fmt_point(hi, dim) + ")";
  }
  void check() const override { check_box(lo, hi, dim); }
  Point lo, hi;
};

struct HalfspaceNode final : ShapeNode {
  HalfspaceNode(Point n, double o, int d) : ShapeNode(d), normal(n), offset(o) {}
  bool contains(const Point& p) const override { return dot(normal, p) > offset; }
  std::optional<Box> bounds() const override { return std::nullopt; }
  std::string describe() const override {
    return "halfspace(" + fmt_point(normal, dim) + ", " + fmt_num(offset) + ")";
  }
  void check() const override {
    require(std::hypot(normal[0], normal[1]) > 0.0, "halfspace normal must be nonzero");
  }
  Point normal;
  double offset;
};

struct SegmentNode final : ShapeNode {
  SegmentNode(Point a, Point b, int d) : ShapeNode(d), p(a), q(b) {}
  bool contains(const Point& x) const override { return on_segment(x, p, q); }
  std::optional<Box> bounds() const override {
    return Box{dim, {std::min(p[0], q[0]), std::min(p[1], q[1])}, {std::max(p[0], q[0]), std::max(p[1], q[1])}};
  }
  std::string describe() const override {
    return "segment(" + fmt_point(p, dim) + ", " + fmt_point(q, dim) + ")";
  }
  void check() const override { require(distance(p, q) > 0.0, "segment endpoints must differ"); }
  Point p, q;
};

struct PuncturedBallNode final : ShapeNode {
  PuncturedBallNode(Point c, double r, double hr, int d) : ShapeNode(d), center(c), radius(r), hole(hr) {}
  bool contains(const Point& p) const override {
    const double dist = distance(p, center);
    return dist < radius && dist > hole;
  }
  std::optional<Box> bounds() const override { return BallNode(center, radius, false, dim).bounds(); }
  std::string describe() const override {
    return "punctured_ball(" + fmt_point(center, dim) + ", " + fmt_num(radius) + ", " + fmt_num(hole) + ")";
  }
  void check() const override {
    require(std::isfinite(radius) && radius > 0.0, "punctured ball radius must be > 0");
    require(hole >= 0.0 && hole < radius, "hole radius must lie in [0, radius)");
  }
  Point center;
  double radius, hole;
};

struct SlitBoxNode final : ShapeNode {
  SlitBoxNode(Point l, Point h, Point a, Point b, int d) : ShapeNode(d), lo(l), hi(h), p(a), q(b) {}
  bool contains(const Point& x) const override {
    return BoxNode(lo, hi, dim).contains(x) && !on_segment(x, p, q);
  }
  std::optional<Box> bounds() const override { return Box{dim, lo, hi}; }
  std::string describe() const override {
    return "slit_box(" + fmt_point(lo, dim) + ", " + fmt_point(hi, dim) + ", " + fmt_point(p, dim) +
           ", " + fmt_point(q, dim) + ")";
  }
  void check() const override {
    check_box(lo, hi, dim);
    require(distance(p, q) > 0.0, "slit endpoints must differ");
  }
  Point lo, hi, p, q;
};

struct CantorComplementNode final : ShapeNode {
  CantorComplementNode(Point l, Point h, int lev, int d) : ShapeNode(d), lo(l), hi(h), level(lev) {}
  bool contains(const Point& x) const override {
    if (!BoxNode(lo, hi, dim).contains(x)) return false;
    for (int k = 0; k < dim; ++k) {
      if (!in_cantor((x[k] - lo[k]) / (hi[k] - lo[k]), level)) return true;
    }
    return false;
  }
  std::optional<Box> bounds() const override { return Box{dim, lo, hi}; }
  std::string describe() const override {
    return "cantor_complement(" + fmt_point(lo, dim) + ", " + fmt_point(hi, dim) + ", " +
           std::to_string(level) + ")";
  }
  void check() const override {
    check_box(lo, hi, dim);
    require(level >= 0 && level <= 6, "Cantor construction level must lie in [0, 6]");
  }
  Point lo, hi;
  int level;
};

struct UnionNode final : ShapeNode {
  UnionNode(std::shared_ptr<const ShapeNode> x, std::shared_ptr<const ShapeNode> y)
      : ShapeNode(x->dim), a(std::move(x)), b(std::move(y)) {}
  bool contains(const Point& p) const override { return a->contains(p) || b->contains(p); }
  std::optional<Box> bounds() const override { return hull(a->bounds(), b->bounds()); }
  std::optional<Box> co_bounds() const override {
    auto ca = a->co_bounds();
    auto cb = b->co_bounds();
    if (!ca && !cb) return std::nullopt;
    return overlap(ca, cb);
  }
  std::string describe() const override { return "union(" + a->describe() + ", " + b->describe() + ")"; }
  void check() const override {
    require(a->dim == b->dim, "union operands must share a dimension");
    a->check();
    b->check();
  }
  std::shared_ptr<const ShapeNode> a, b;
};

struct IntersectNode final : ShapeNode {
  IntersectNode(std::shared_ptr<const ShapeNode> x, std::shared_ptr<const ShapeNode> y)
      : ShapeNode(x->dim), a(std::move(x)), b(std::move(y)) {}
  bool contains(const Point& p) const override { return a->contains(p) && b->contains(p); }
  std::optional<Box> bounds() const override {
    auto ba = a->bounds();
    auto bb = b->bounds();
    if (!ba && !bb) return std::nullopt;
    return overlap(ba, bb);
  }
  std::optional<Box> co_bounds() const override { return hull(a->co_bounds(), b->co_bounds()); }
  std::string describe() const override {
    return "intersect(" + a->describe() + ", " + b->describe() + ")";
  }
  void check() const override {
    require(a->dim == b->dim, "intersect operands must share a dimension");
    a->check();
    b->check();
  }
  std::shared_ptr<const ShapeNode> a, b;
};

struct ComplementNode final : ShapeNode {
  explicit ComplementNode(std::shared_ptr<const ShapeNode> x) : ShapeNode(x->dim), a(std::move(x)) {}
  bool contains(const Point& p) const override { return !a->contains(p); }
  std::optional<Box> bounds() const override { return a->co_bounds(); }
  std::optional<Box> co_bounds() const override { return a->bounds(); }
  std::string describe() const override { return "complement(" + a->describe() + ")"; }
  void check() const override { a->check(); }
  std::shared_ptr<const ShapeNode> a;
};

}  // namespace
}  // namespace detail

namespace {
void check_dim(int dim) { require(dim == 1 || dim == 2, "dimension must be 1 or 2"); }
Point flatten(Point p, int dim) {
  if (dim == 1) p[1] = 0.0;
  return p;
}
}  // namespace

Shape Shape::ball(Point center, double radius, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::BallNode>(flatten(center, dim), radius, false, dim));
}
Shape Shape::closed_ball(Point center, double radius, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::BallNode>(flatten(center, dim), radius, true, dim));
}
Shape Shape::box(Point lo, Point hi, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::BoxNode>(flatten(lo, dim), flatten(hi, dim), dim));
}
Shape Shape::halfspace(Point normal, double offset, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::HalfspaceNode>(flatten(normal, dim), offset, dim));
}
Shape Shape::segment(Point p, Point q, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::SegmentNode>(flatten(p, dim), flatten(q, dim), dim));
}
Shape Shape::punctured_ball(Point center, double radius, double hole_radius, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::PuncturedBallNode>(flatten(center, dim), radius, hole_radius, dim));
}
Shape Shape::slit_box(Point lo, Point hi, Point p, Point q, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::SlitBoxNode>(flatten(lo, dim), flatten(hi, dim), flatten(p, dim),
                                                     flatten(q, dim), dim));
}
Shape Shape::cantor_complement(Point lo, Point hi, int level, int dim) {
  check_dim(dim);
  return Shape(std::make_shared<detail::CantorComplementNode>(flatten(lo, dim), flatten(hi, dim), level, dim));
}
Shape Shape::unite(Shape a, Shape b) { return Shape(std::make_shared<detail::UnionNode>(a.node_, b.node_)); }
Shape Shape::intersect(Shape a, Shape b) {
  return Shape(std::make_shared<detail::IntersectNode>(a.node_, b.node_));
}
Shape Shape::complement(Shape a) { return Shape(std::make_shared<detail::ComplementNode>(a.node_)); }

bool Shape::contains(const Point& p) const { return node_->contains(p); }
std::optional<Box> Shape::bounds() const { return node_->bounds(); }
int Shape::dim() const { return node_->dim; }
std::string Shape::describe() const { return node_->describe(); }
void Shape::check() const { node_->check(); }

Domain make_domain(Shape spec) {
  spec.check();
  auto b = spec.bounds();
  if (!b) throw Error(ErrorCode::UnboundedDomain, "domain " + spec.describe() + " is unbounded");
  return Domain(std::move(spec), *b);
}

// ---------------------------------------------------------------------------

Box Lattice::box() const noexcept {
  Box b{dim, lo, lo};
  b.hi[0] = lo[0] + (count[0] - 1) * h;
  if (dim == 2) b.hi[1] = lo[1] + (count[1] - 1) * h;
  return b;
}

Box Lattice::cell_union() const noexcept {
  Box b = box();
  for (int d = 0; d < dim; ++d) {
    b.lo[d] -= 0.5 * h;
    b.hi[d] += 0.5 * h;
  }
  return b;
}

Lattice make_lattice(const Box& box, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::SpacingMismatch, "spacing must be positive");
  Lattice lat;
  lat.dim = box.dim;
  lat.lo = box.lo;
  lat.h = h;
  for (int d = 0; d < box.dim; ++d) {
    const double cells = (box.hi[d] - box.lo[d]) / h;
    const double rounded = std::round(cells);
    if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded)) {
      throw Error(ErrorCode::SpacingMismatch, "spacing " + fmt_num(h) + " does not divide box side " +
                                                  fmt_num(box.hi[d] - box.lo[d]));
    }
    lat.count[d] = static_cast<int>(rounded) + 1;
  }
  if (box.dim == 1) {
    lat.count[1] = 1;
    lat.lo[1] = 0.0;
  }
  return lat;
}

Lattice lattice_around(const Point& center, double radius, double h, int dim) {
  const int m = static_cast<int>(std::ceil(radius / h - 1e-9)) + 1;
  Lattice lat;
  lat.dim = dim;
  lat.h = h;
  lat.lo = {center[0] - m * h, dim == 2 ? center[1] - m * h : 0.0};
  lat.count = {2 * m + 1, dim == 2 ? 2 * m + 1 : 1};
  return lat;
}

Grid::Grid(Lattice lattice, Shape region) : lattice_(lattice), region_(std::move(region)) {
  const std::size_t n = lattice_.size();
  classes_.resize(n);
  slot_.assign(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    if (region_.contains(lattice_.node(k))) {
      classes_[k] = NodeClass::Interior;
      slot_[k] = static_cast<long>(interior_.size());
      interior_.push_back(k);
    } else {
      classes_[k] = NodeClass::Exterior;
      exterior_.push_back(k);
    }
  }
  if (interior_.empty()) return;
  const int directions = lattice_.dim == 1 ? 1 : 64;
  for (int q = 0; q < directions; ++q) {
    const double phi = std::numbers::pi * q / directions;
    const Point e{std::cos(phi), std::sin(phi)};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto k : interior_) {
      const double proj = dot(lattice_.node(k), e);
      lo = std::min(lo, proj);
      hi = std::max(hi, proj);
    }
    diameter_ = std::max(diameter_, hi - lo);
  }
}

std::vector<std::size_t> Grid::boundary_nodes() const {
  std::vector<std::size_t> out;
  for (auto k : exterior_) {
    auto [i, j] = lattice_.index(k);
    bool touches = false;
    const int offsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (const auto& o : offsets) {
      const int ii = i + o[0];
      const int jj = j + o[1];
      if (ii < 0 || jj < 0 || ii >= lattice_.count[0] || jj >= lattice_.count[1]) continue;
      if (is_interior(lattice_.flat(ii, jj))) touches = true;
    }
    if (touches) out.push_back(k);
  }
  return out;
}

std::size_t Grid::snap_anchor(const Point& a) const {
  const auto candidates = boundary_nodes();
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (auto k : candidates) {
    const double d = distance(lattice_.node(k), a);
    if (d < best_dist - 1e-14) {
      best_dist = d;
      best = k;
    }
  }
  if (candidates.empty() || best_dist > 2.0 * lattice_.h) {
    throw Error(ErrorCode::AnchorNotOnBoundary, "no discrete boundary node within 2h of the anchor");
  }
  return best;
}

Box default_box(const Domain& domain, double h, double dilation) {
  const Box b = domain.bounds();
  const Point c = b.center();
  Box out{b.dim, c, c};
  for (int d = 0; d < b.dim; ++d) {
    const double half = 0.5 * (b.hi[d] - b.lo[d]) * dilation;
    out.lo[d] = std::floor((c[d] - half) / h + 1e-9) * h;
    out.hi[d] = std::ceil((c[d] + half) / h - 1e-9) * h;
  }
  return out;
}

GridPtr build_grid(const Domain& domain, const Box& box, double h) {
  if (box.dim != domain.dim()) throw Error(ErrorCode::InvalidGeometry, "box and domain dimensions differ");
  const Lattice lat = make_lattice(box, h);
  if (!box.contains(domain.bounds())) {
    throw Error(ErrorCode::DomainNotContained, "domain " + domain.shape().describe() + " is not inside the box");
  }
  for (int d = 0; d < box.dim; ++d) {
    if (lat.count[d] < 2) throw Error(ErrorCode::SpacingMismatch, "grid needs at least 2 nodes per axis");
  }
  return std::make_shared<const Grid>(lat, domain.shape());
}

GridPtr build_grid(const Domain& domain, double h, double dilation) {
  return build_grid(domain, default_box(domain, h, dilation), h);
}

GridPtr classify(const Lattice& lattice, const Shape& region) {
  return std::make_shared<const Grid>(lattice, region);
}

// ---------------------------------------------------------------------------

long ExtensionGrid::base_node(std::size_t i, std::size_t j) const noexcept {
  const auto& lat = base->lattice();
  const long bi = static_cast<long>(i) - base_offset[0];
  const long bj = static_cast<long>(j) - base_offset[1];
  if (bi < 0 || bj < 0 || bi >= lat.count[0] || bj >= lat.count[1]) return -1;
  return static_cast<long>(lat.flat(static_cast<int>(bi), static_cast<int>(bj)));
}

double weight_integral(double a, double b, double theta) {
  return (std::pow(b, theta + 1.0) - std::pow(a, theta + 1.0)) / (theta + 1.0);
}

std::vector<double> graded_layers(double T, int M, double grading) {
  if (!(grading >= 1.0)) throw Error(ErrorCode::BadGrading, "grading must be >= 1");
  if (M < 4) throw Error(ErrorCode::TooFewLayers, "extension grid needs at least 4 layers");
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidGeometry, "extension height must be positive");
  std::vector<double> t(static_cast<std::size_t>(M) + 1, 0.0);
  const double first = grading == 1.0 ? T / M : T * (grading - 1.0) / (std::pow(grading, M) - 1.0);
  double width = first;
  for (int k = 1; k <= M; ++k) {
    t[k] = t[k - 1] + width;
    width *= grading;
  }
  t[M] = T;
  return t;
}

int layers_for(double T, double first_width, double grading) {
  if (!(grading >= 1.0)) throw Error(ErrorCode::BadGrading, "grading must be >= 1");
  int M = 4;
  while (true) {
    const double first = grading == 1.0 ? T / M : T * (grading - 1.0) / (std::pow(grading, M) - 1.0);
    if (first <= first_width * (1.0 + 1e-12) || M > 10000) return M;
    ++M;
  }
}

ExtensionGrid build_extension_grid(GridPtr base, double s, double T, int M, double grading,
                                   const ExtensionOptions& options) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::SOutOfRange, "order s must lie in (0, 1)");
  ExtensionGrid eg;
  eg.t = graded_layers(T, M, grading);
  eg.s = s;
  eg.theta = 1.0 - 2.0 * s;
  const auto& lat = base->lattice();
  for (int d = 0; d < 2; ++d) {
    std::vector<double>& axis = eg.axes[d];
    if (d == 1 && lat.dim == 1) {
      axis = {0.0};
      continue;
    }
    std::vector<double> pad;
    if (options.lateral_padding > 0.0) {
      if (!(options.padding_grading >= 1.0)) throw Error(ErrorCode::BadGrading, "padding grading must be >= 1");
      double width = lat.h;
      double total = 0.0;
      while (total < options.lateral_padding - 1e-12) {
        width *= options.padding_grading;
        total += width;
        pad.push_back(total);
      }
    }
    const double lo = lat.lo[d];
    const double hi = lat.lo[d] + (lat.count[d] - 1) * lat.h;
    for (auto it = pad.rbegin(); it != pad.rend(); ++it) axis.push_back(lo - *it);
    eg.base_offset[d] = static_cast<int>(axis.size());
    for (int i = 0; i < lat.count[d]; ++i) axis.push_back(lo + i * lat.h);
    for (double p : pad) axis.push_back(hi + p);
  }
  const std::size_t layers = eg.t.size();
  eg.layer_weight.resize(layers);
  for (std::size_t k = 0; k < layers; ++k) {
    const double a = k == 0 ? 0.0 : 0.5 * (eg.t[k - 1] + eg.t[k]);
    const double b = k + 1 == layers ? eg.t[k] : 0.5 * (eg.t[k] + eg.t[k + 1]);
    eg.layer_weight[k] = weight_integral(a, b, eg.theta) / (b - a);
  }
  eg.base = std::move(base);
  return eg;
}

}  // namespace fracholder
