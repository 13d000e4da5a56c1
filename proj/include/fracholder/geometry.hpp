#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fracholder {

/// Coordinates in R^N for N in {1, 2}. In 1D the second coordinate is always 0,
/// so Euclidean formulas hold unchanged.
using Point = std::array<double, 2>;

double distance(const Point& a, const Point& b) noexcept;

struct Box {
  int dim = 1;
  Point lo{};
  Point hi{};

  Point center() const noexcept;
  double diameter() const noexcept;
  bool contains(const Point& p) const noexcept;  // closed box
  bool contains(const Box& other) const noexcept;
};

namespace detail {
struct ShapeNode;
}

/// Constructive description of a subset of R^N. Shapes are immutable values
/// sharing their expression tree; membership is a total, deterministic predicate.
class Shape {
 public:
  static Shape ball(Point center, double radius, int dim);          // open
  static Shape closed_ball(Point center, double radius, int dim);   // radius 0 is a point
  static Shape box(Point lo, Point hi, int dim);                    // open
  static Shape halfspace(Point normal, double offset, int dim);     // {n.x > offset}
  static Shape segment(Point p, Point q, int dim);                  // closed
  static Shape punctured_ball(Point center, double radius, double hole_radius, int dim);
  static Shape slit_box(Point lo, Point hi, Point p, Point q, int dim);
  static Shape cantor_complement(Point lo, Point hi, int level, int dim);
  static Shape unite(Shape a, Shape b);
  static Shape intersect(Shape a, Shape b);
  static Shape complement(Shape a);

  bool contains(const Point& p) const;
  /// Bounding box, or nullopt when the set is unbounded.
  std::optional<Box> bounds() const;
  int dim() const;
  /// Canonical expression; parse_shape(describe()) reproduces the shape.
  std::string describe() const;
  /// Throws InvalidGeometry on degenerate parameters anywhere in the tree.
  void check() const;

 private:
  explicit Shape(std::shared_ptr<const detail::ShapeNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::ShapeNode> node_;
};

/// A validated bounded open set Omega with nonempty complement.
class Domain {
 public:
  const Shape& shape() const noexcept { return shape_; }
  int dim() const { return shape_.dim(); }
  bool contains(const Point& p) const { return shape_.contains(p); }
  const Box& bounds() const noexcept { return bounds_; }

 private:
  friend Domain make_domain(Shape spec);
  Domain(Shape s, Box b) : shape_(std::move(s)), bounds_(b) {}
  Shape shape_;
  Box bounds_;
};

Domain make_domain(Shape spec);

// ---------------------------------------------------------------------------
// Uniform lattices and classified grids.

struct Lattice {
  int dim = 1;
  Point lo{};
  std::array<int, 2> count{1, 1};  // nodes per axis; count[1] == 1 in 1D
  double h = 1.0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(count[0]) * static_cast<std::size_t>(count[1]);
  }
  std::array<int, 2> index(std::size_t node) const noexcept {
    return {static_cast<int>(node % count[0]), static_cast<int>(node / count[0])};
  }
  std::size_t flat(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * count[0] + static_cast<std::size_t>(i);
  }
  Point node(std::size_t n) const noexcept {
    auto [i, j] = index(n);
    return {lo[0] + i * h, dim == 2 ? lo[1] + j * h : 0.0};
  }
  /// Box spanned by the nodes.
  Box box() const noexcept;
  /// Union of all node cells [x - h/2, x + h/2]^N.
  Box cell_union() const noexcept;
  double cell_measure() const noexcept { return dim == 2 ? h * h : h; }
};

/// Lattice with nodes on `box` corners; throws SpacingMismatch when h does not
/// divide every side.
Lattice make_lattice(const Box& box, double h);

/// Lattice of spacing h whose nodes include `center` and cover the closed ball
/// of the given radius with one spare node per side.
Lattice lattice_around(const Point& center, double radius, double h, int dim);

enum class NodeClass : unsigned char { Interior, Exterior, FarField };

/// A lattice with every stored node classified against a region. Nodes outside
/// the lattice (FarField) are never stored; the tail machinery accounts for them.
class Grid {
 public:
  Grid(Lattice lattice, Shape region);

  const Lattice& lattice() const noexcept { return lattice_; }
  const Shape& region() const noexcept { return region_; }
  int dim() const noexcept { return lattice_.dim; }
  double h() const noexcept { return lattice_.h; }
  std::size_t size() const noexcept { return classes_.size(); }
  Point node(std::size_t n) const noexcept { return lattice_.node(n); }
  NodeClass node_class(std::size_t n) const noexcept { return classes_[n]; }
  bool is_interior(std::size_t n) const noexcept { return classes_[n] == NodeClass::Interior; }

  const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  const std::vector<std::size_t>& exterior() const noexcept { return exterior_; }
  /// Position of `n` in interior(), or -1.
  long interior_slot(std::size_t n) const noexcept { return slot_[n]; }

  /// Diameter of the interior node set (maximal directional width).
  double diameter() const noexcept { return diameter_; }

  /// Exterior nodes with an axial neighbour in the interior: the discrete boundary.
  std::vector<std::size_t> boundary_nodes() const;
  /// Nearest boundary node to `a`; AnchorNotOnBoundary if it lies further than 2h.
  std::size_t snap_anchor(const Point& a) const;

 private:
  Lattice lattice_;
  Shape region_;
  std::vector<NodeClass> classes_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> exterior_;
  std::vector<long> slot_;
  double diameter_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Bounding box of the domain dilated by `dilation` about its center, expanded
/// outward to multiples of h.
Box default_box(const Domain& domain, double h, double dilation = 4.0);

GridPtr build_grid(const Domain& domain, const Box& box, double h);
GridPtr build_grid(const Domain& domain, double h, double dilation = 4.0);
/// Classify an arbitrary (not necessarily validated) open region on a lattice.
GridPtr classify(const Lattice& lattice, const Shape& region);

// ---------------------------------------------------------------------------
// Graded (N+1)-dimensional grid for the extension problem.

struct ExtensionOptions {
  /// Lateral distance added beyond the base box on every side (0 = none).
  double lateral_padding = 0.0;
  double padding_grading = 1.15;
};

class ExtensionGrid {
 public:
  GridPtr base;
  double s = 0.5;
  double theta = 0.0;
  /// Lateral node coordinates per axis (axis 1 is {0} for a 1D base).
  std::array<std::vector<double>, 2> axes;
  /// Index of the first base-lattice node within each padded axis.
  std::array<int, 2> base_offset{0, 0};
  /// Heights t_0 = 0 < t_1 < ... < t_M.
  std::vector<double> t;
  /// Cell average of |t|^theta over each layer's dual cell.
  std::vector<double> layer_weight;

  std::size_t nx() const noexcept { return axes[0].size(); }
  std::size_t ny() const noexcept { return axes[1].size(); }
  std::size_t layer_size() const noexcept { return nx() * ny(); }
  std::size_t size() const noexcept { return layer_size() * t.size(); }
  std::size_t flat(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return (k * ny() + j) * nx() + i;
  }
  /// Base-lattice node under lateral index (i, j), or -1 in the padding.
  long base_node(std::size_t i, std::size_t j) const noexcept;
  bool padded() const noexcept { return axes[0].size() != static_cast<std::size_t>(base->lattice().count[0]); }
};

/// Geometric layers with t_{k+1} - t_k = grading * (t_k - t_{k-1}) summing to T.
std::vector<double> graded_layers(double T, int M, double grading);

ExtensionGrid build_extension_grid(GridPtr base, double s, double T, int M, double grading,
                                   const ExtensionOptions& options = {});

/// Smallest layer count whose first geometric layer is no wider than `first_width`.
int layers_for(double T, double first_width, double grading);

/// Integral of t^theta over [a, b], a >= 0, theta > -1.
double weight_integral(double a, double b, double theta);

}  // namespace fracholder
