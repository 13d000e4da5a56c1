#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracholder/capacity.hpp"
#include "fracholder/extension.hpp"
#include "fracholder/geometry.hpp"

namespace fracholder {

/// A parsed value of the small expression language used in configs:
/// numbers, bracketed lists, and shape constructors such as `ball([0], 1)`.
struct Value {
  enum class Kind { Number, List, Shape } kind = Kind::Number;
  double number = 0.0;
  std::vector<Value> items;
  std::optional<fracholder::Shape> shape;
};

Value parse_value(const std::string& text);
Shape parse_shape(const std::string& text);
double parse_number(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);
/// `[[1], [-1]]` or `[1, 0]` (a single point) into points of the given dimension.
std::vector<Point> parse_points(const std::string& text, int dim);

/// Centre and radius when the expression is a bare `ball(...)`.
std::optional<Ball> as_ball(const std::string& text);

enum class ExperimentKind { Solve, Measure, Capacity, Fatness, Decay, Holder, CsCheck, EquivalenceSuite };
std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& text);

struct Thresholds {
  double fat = 0.05;
  double perfectness = 0.25;
  double decay_min_exponent = 0.1;
  double decay_gap = 0.1;
  double stability = 0.2;
  double oracle = 0.02;
  double cs = 0.05;
  double residual = 1e-7;
  double slope = 0.1;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Solve;
  std::string name;
  std::string domain_text;
  int dim = 1;
  double s = 0.5;
  double h = 0.0;
  double dilation = 4.0;
  std::vector<double> refinements;

  std::string set_text;  // G, K or E depending on the experiment
  std::optional<double> data_value;
  bool oracle = false;

  std::optional<Point> ball_center;
  std::optional<double> ball_radius;
  std::vector<double> capacity_radii;
  bool weighted = false;

  std::vector<Point> anchors;
  std::vector<double> radii;
  std::vector<double> sigmas;
  int decay_levels = 0;
  double trivial_radius = 0.0;
  std::vector<double> perfect_radii;

  ExtensionParams extension;
  std::vector<double> cs_levels;

  Thresholds thresholds;
  std::string output_dir;
  std::optional<bool> plots;

  /// Sorted `section.key = value` lines; the hashed identity of the experiment.
  std::string canonical;
};

/// Parses INI-style text; throws ConfigInvalid with a line diagnostic.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Hex SHA-256 of the canonical form.
std::string config_hash(const ExperimentConfig& config);
std::string sha256_hex(const std::string& data);

struct CatalogEntry {
  std::string name;
  std::string expression;
  int dim;
  std::string note;
};

const std::vector<CatalogEntry>& domain_catalog();

}  // namespace fracholder
