#include "fracholder/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fracholder/error.hpp"

namespace fracholder {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

/// Recursive descent over
///   value  := sum | list | call
///   sum    := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := number | 'inf' | '-' factor | '(' sum ')'
///   list   := '[' (value (',' value)*)? ']'
///   call   := ident '(' value (',' value)* ')'
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Value parse_all() {
    Value v = value();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + text_.substr(pos_, 1) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    invalid(what + " at column " + std::to_string(pos_ + 1) + " of '" + text_ + "'");
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Value value() {
    skip();
    if (pos_ >= text_.size()) fail("missing value");
    if (text_[pos_] == '[') return list();
    if (std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      const std::size_t save = pos_;
      const std::string name = identifier();
      if (name == "inf" || name == "pi") {
        pos_ = save;
      } else {
        return call(name);
      }
    }
    Value v;
    v.number = sum();
    return v;
  }

  Value list() {
    expect('[');
    Value v;
    v.kind = Value::Kind::List;
    if (accept(']')) return v;
    do {
      v.items.push_back(value());
    } while (accept(','));
    expect(']');
    return v;
  }

  double sum() {
    double v = term();
    for (;;) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }
  double term() {
    double v = factor();
    for (;;) {
      if (accept('*')) {
        v *= factor();
      } else if (accept('/')) {
        const double d = factor();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  double factor() {
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    if (accept('(')) {
      const double v = sum();
      expect(')');
      return v;
    }
    skip();
    if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      const std::string name = identifier();
      if (name == "inf") return std::numeric_limits<double>::infinity();
      if (name == "pi") return 3.14159265358979323846;
      fail("unknown name '" + name + "'");
    }
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return v;
  }

  Value call(const std::string& name) {
    expect('(');
    std::vector<Value> args;
    if (!accept(')')) {
      do {
        args.push_back(value());
      } while (accept(','));
      expect(')');
    }
    Value v;
    v.kind = Value::Kind::Shape;
    v.shape = build(name, args);
    return v;
  }

  double number_arg(const std::vector<Value>& args, std::size_t k, const std::string& name) {
    if (args[k].kind != Value::Kind::Number) fail(name + " argument " + std::to_string(k + 1) + " must be a number");
    return args[k].number;
  }
  Point point_arg(const std::vector<Value>& args, std::size_t k, const std::string& name, int& dim) {
    const Value& v = args[k];
    if (v.kind != Value::Kind::List || v.items.empty() || v.items.size() > 2) {
      fail(name + " argument " + std::to_string(k + 1) + " must be a point [x] or [x, y]");
    }
    const int d = static_cast<int>(v.items.size());
    if (dim != 0 && d != dim) fail(name + " mixes 1D and 2D points");
    dim = d;
    Point p{0.0, 0.0};
    for (int i = 0; i < d; ++i) {
      if (v.items[i].kind != Value::Kind::Number) fail(name + " point coordinates must be numbers");
      p[i] = v.items[i].number;
    }
    return p;
  }
  Shape shape_arg(const std::vector<Value>& args, std::size_t k, const std::string& name) {
    if (args[k].kind != Value::Kind::Shape) fail(name + " argument " + std::to_string(k + 1) + " must be a shape");
    return *args[k].shape;
  }
  void arity(const std::vector<Value>& args, std::size_t n, const std::string& name) {
    if (args.size() != n) fail(name + " takes " + std::to_string(n) + " arguments");
  }

  Shape build(const std::string& name, const std::vector<Value>& args) {
    int dim = 0;
    auto checked = [&](Shape s) {
      try {
        s.check();
      } catch (const Error& e) {
        fail(e.what());
      }
      return s;
    };
    if (name == "ball" || name == "closed_ball") {
      arity(args, 2, name);
      const Point c = point_arg(args, 0, name, dim);
      const double r = number_arg(args, 1, name);
      return checked(name == "ball" ? Shape::ball(c, r, dim) : Shape::closed_ball(c, r, dim));
    }
    if (name == "point") {
      arity(args, 1, name);
      const Point c = point_arg(args, 0, name, dim);
      return checked(Shape::closed_ball(c, 0.0, dim));
    }
    if (name == "box") {
      arity(args, 2, name);
      const Point lo = point_arg(args, 0, name, dim);
      const Point hi = point_arg(args, 1, name, dim);
      return checked(Shape::box(lo, hi, dim));
    }
    if (name == "halfspace") {
      arity(args, 2, name);
      const Point n = point_arg(args, 0, name, dim);
      return checked(Shape::halfspace(n, number_arg(args, 1, name), dim));
    }
    if (name == "segment") {
      arity(args, 2, name);
      const Point p = point_arg(args, 0, name, dim);
      const Point q = point_arg(args, 1, name, dim);
      return checked(Shape::segment(p, q, dim));
    }
    if (name == "punctured_ball") {
      arity(args, 3, name);
      const Point c = point_arg(args, 0, name, dim);
      return checked(Shape::punctured_ball(c, number_arg(args, 1, name), number_arg(args, 2, name), dim));
    }
    if (name == "slit_box") {
      arity(args, 4, name);
      const Point lo = point_arg(args, 0, name, dim);
      const Point hi = point_arg(args, 1, name, dim);
      const Point p = point_arg(args, 2, name, dim);
      const Point q = point_arg(args, 3, name, dim);
      return checked(Shape::slit_box(lo, hi, p, q, dim));
    }
    if (name == "cantor_complement") {
      arity(args, 3, name);
      const Point lo = point_arg(args, 0, name, dim);
      const Point hi = point_arg(args, 1, name, dim);
      const double level = number_arg(args, 2, name);
      if (level != std::floor(level)) fail("Cantor level must be an integer");
      return checked(Shape::cantor_complement(lo, hi, static_cast<int>(level), dim));
    }
    if (name == "complement") {
      arity(args, 1, name);
      return Shape::complement(shape_arg(args, 0, name));
    }
    if (name == "union" || name == "intersect") {
      if (args.size() < 2) fail(name + " takes at least 2 shapes");
      Shape acc = shape_arg(args, 0, name);
      for (std::size_t k = 1; k < args.size(); ++k) {
        Shape next = shape_arg(args, k, name);
        if (next.dim() != acc.dim()) fail(name + " mixes 1D and 2D shapes");
        acc = name == "union" ? Shape::unite(acc, next) : Shape::intersect(acc, next);
      }
      return acc;
    }
    fail("unknown shape '" + name + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

Point to_point(const Value& v, int dim, const std::string& what) {
  if (v.kind != Value::Kind::List || static_cast<int>(v.items.size()) != dim) {
    invalid(what + " must be a point with " + std::to_string(dim) + " coordinate(s)");
  }
  Point p{0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    if (v.items[i].kind != Value::Kind::Number) invalid(what + " coordinates must be numbers");
    p[i] = v.items[i].number;
  }
  return p;
}

}  // namespace

Value parse_value(const std::string& text) { return Parser(text).parse_all(); }

Shape parse_shape(const std::string& text) {
  Value v = parse_value(text);
  if (v.kind != Value::Kind::Shape) invalid("'" + text + "' is not a shape expression");
  return *v.shape;
}

double parse_number(const std::string& text) {
  Value v = parse_value(text);
  if (v.kind != Value::Kind::Number) invalid("'" + text + "' is not a number");
  return v.number;
}

std::vector<double> parse_number_list(const std::string& text) {
  Value v = parse_value(text);
  if (v.kind == Value::Kind::Number) return {v.number};
  if (v.kind != Value::Kind::List) invalid("'" + text + "' is not a list of numbers");
  std::vector<double> out;
  for (const Value& item : v.items) {
    if (item.kind != Value::Kind::Number) invalid("'" + text + "' is not a list of numbers");
    out.push_back(item.number);
  }
  return out;
}

std::vector<Point> parse_points(const std::string& text, int dim) {
  Value v = parse_value(text);
  if (v.kind != Value::Kind::List) invalid("'" + text + "' is not a point list");
  if (!v.items.empty() && v.items[0].kind == Value::Kind::Number) return {to_point(v, dim, "point")};
  std::vector<Point> out;
  for (const Value& item : v.items) out.push_back(to_point(item, dim, "point"));
  return out;
}

std::optional<Ball> as_ball(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("ball(", 0) != 0) return std::nullopt;
  Value v = parse_value(t);
  if (v.kind != Value::Kind::Shape) return std::nullopt;
  // The arguments are reparsed from the call so the expression stays the single source.
  std::size_t open = t.find('('), close = t.rfind(')');
  Value args = parse_value("[" + t.substr(open + 1, close - open - 1) + "]");
  const int dim = static_cast<int>(args.items[0].items.size());
  return Ball{to_point(args.items[0], dim, "ball centre"), args.items[1].number};
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Solve: return "solve";
    case ExperimentKind::Measure: return "measure";
    case ExperimentKind::Capacity: return "capacity";
    case ExperimentKind::Fatness: return "fatness";
    case ExperimentKind::Decay: return "decay";
    case ExperimentKind::Holder: return "holder";
    case ExperimentKind::CsCheck: return "cs-check";
    case ExperimentKind::EquivalenceSuite: return "equivalence-suite";
  }
  return "solve";
}

ExperimentKind parse_kind(const std::string& text) {
  for (auto k : {ExperimentKind::Solve, ExperimentKind::Measure, ExperimentKind::Capacity, ExperimentKind::Fatness,
                 ExperimentKind::Decay, ExperimentKind::Holder, ExperimentKind::CsCheck,
                 ExperimentKind::EquivalenceSuite}) {
    if (to_string(k) == text) return k;
  }
  invalid("unknown experiment kind '" + text + "'");
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"kind", "name"}},
      {"domain", {"shape", "dilation"}},
      {"solver", {"s", "h", "refinements"}},
      {"data", {"set", "value", "oracle"}},
      {"capacity", {"set", "center", "radius", "radii", "weighted"}},
      {"probes", {"anchors", "radii", "sigmas", "decay_levels", "trivial_radius", "perfect_radii"}},
      {"extension", {"height_factor", "grading", "first_layer", "pad", "levels"}},
      {"thresholds",
       {"fat", "perfectness", "decay_min_exponent", "decay_gap", "stability", "oracle", "cs", "residual", "slope"}},
      {"output", {"dir", "plots"}},
  };
  return keys;
}

bool parse_switch(const std::string& v, const std::string& where) {
  if (v == "on" || v == "true" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "no") return false;
  invalid(where + ": expected on or off, got '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find_first_of("#;")));
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') invalid(at + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) invalid(at + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) invalid(at + ": expected key = value");
    if (section.empty()) invalid(at + ": key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!schema().at(section).count(key)) invalid(at + ": unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) invalid(at + ": empty value for '" + key + "'");
    const std::string full = section + "." + key;
    if (entries.count(full)) invalid(at + ": duplicate key '" + full + "'");
    entries[full] = {value, line_no};
  }

  ExperimentConfig c;
  auto has = [&](const std::string& k) { return entries.count(k) > 0; };
  auto field = [&](const std::string& k, auto&& fn) {
    auto it = entries.find(k);
    if (it == entries.end()) return;
    try {
      fn(it->second.value);
    } catch (const Error& e) {
      std::string what = e.what();
      const std::string prefix = std::string(to_string(ErrorCode::ConfigInvalid)) + ": ";
      if (what.rfind(prefix, 0) == 0) what = what.substr(prefix.size());
      invalid("line " + std::to_string(it->second.line) + " (" + k + "): " + what);
    }
  };
  auto positive = [&](const std::string& k, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) invalid(k + " must be a positive number");
    return v;
  };

  if (!has("experiment.kind")) invalid("missing required key experiment.kind");
  field("experiment.kind", [&](const std::string& v) { c.kind = parse_kind(v); });
  c.name = to_string(c.kind);
  field("experiment.name", [&](const std::string& v) { c.name = v; });

  if (!has("domain.shape")) invalid("missing required key domain.shape");
  field("domain.shape", [&](const std::string& v) {
    Shape s = parse_shape(v);
    make_domain(s);
    c.domain_text = s.describe();
    c.dim = s.dim();
  });
  field("domain.dilation", [&](const std::string& v) {
    c.dilation = parse_number(v);
    if (!(c.dilation >= 1.0)) invalid("dilation must be at least 1");
  });

  field("solver.s", [&](const std::string& v) {
    c.s = parse_number(v);
    if (!(c.s > 0.0 && c.s < 1.0)) invalid("s must lie in (0, 1)");
  });
  if (!has("solver.s")) invalid("missing required key solver.s");
  c.h = c.dim == 1 ? 1.0 / 256 : 1.0 / 32;
  field("solver.h", [&](const std::string& v) { c.h = positive("h", parse_number(v)); });
  c.refinements = c.dim == 1 ? std::vector<double>{1.0 / 64, 1.0 / 256, 1.0 / 1024}
                             : std::vector<double>{1.0 / 8, 1.0 / 16, 1.0 / 32};
  field("solver.refinements", [&](const std::string& v) {
    c.refinements = parse_number_list(v);
    for (double h : c.refinements) positive("refinement spacing", h);
    if (c.refinements.size() < 2) invalid("refinements need at least two spacings");
  });

  auto set_field = [&](const std::string& k) {
    field(k, [&](const std::string& v) {
      Shape s = parse_shape(v);
      if (s.dim() != c.dim) invalid("set dimension differs from the domain");
      c.set_text = s.describe();
    });
  };
  set_field("data.set");
  field("data.value", [&](const std::string& v) { c.data_value = parse_number(v); });
  if (has("data.set") && has("data.value")) invalid("data.set and data.value are mutually exclusive");
  field("data.oracle", [&](const std::string& v) { c.oracle = parse_switch(v, "oracle"); });
  if (c.oracle && !as_ball(c.domain_text)) invalid("data.oracle requires a ball(...) domain");
  if (c.oracle && c.dim != 1) invalid("data.oracle is available for 1D domains");

  set_field("capacity.set");
  if (has("capacity.set") && has("data.set")) invalid("capacity.set and data.set are mutually exclusive");
  field("capacity.center", [&](const std::string& v) { c.ball_center = to_point(parse_value(v), c.dim, "center"); });
  field("capacity.radius", [&](const std::string& v) { c.ball_radius = positive("radius", parse_number(v)); });
  field("capacity.radii", [&](const std::string& v) {
    c.capacity_radii = parse_number_list(v);
    for (double r : c.capacity_radii) positive("capacity radius", r);
  });
  field("capacity.weighted", [&](const std::string& v) { c.weighted = parse_switch(v, "weighted"); });

  field("probes.anchors", [&](const std::string& v) { c.anchors = parse_points(v, c.dim); });
  field("probes.radii", [&](const std::string& v) {
    c.radii = parse_number_list(v);
    for (double r : c.radii) positive("radius", r);
  });
  field("probes.sigmas", [&](const std::string& v) {
    c.sigmas = parse_number_list(v);
    for (double sg : c.sigmas) {
      if (!(sg > 0.0 && sg <= 1.0)) invalid("sigma must lie in (0, 1]");
    }
  });
  field("probes.decay_levels", [&](const std::string& v) {
    const double l = parse_number(v);
    if (!(l >= 2 && l <= 12 && l == std::floor(l))) invalid("decay_levels must be an integer in [2, 12]");
    c.decay_levels = static_cast<int>(l);
  });
  field("probes.trivial_radius", [&](const std::string& v) { c.trivial_radius = positive("trivial_radius", parse_number(v)); });
  field("probes.perfect_radii", [&](const std::string& v) {
    c.perfect_radii = parse_number_list(v);
    for (double r : c.perfect_radii) positive("perfectness radius", r);
  });

  field("extension.height_factor", [&](const std::string& v) { c.extension.height_factor = positive("height_factor", parse_number(v)); });
  field("extension.grading", [&](const std::string& v) {
    c.extension.grading = parse_number(v);
    if (!(c.extension.grading >= 1.0)) invalid("grading must be at least 1");
  });
  field("extension.first_layer", [&](const std::string& v) { c.extension.first_layer = positive("first_layer", parse_number(v)); });
  field("extension.pad", [&](const std::string& v) { c.extension.pad = parse_switch(v, "pad"); });
  c.cs_levels = c.dim == 1 ? std::vector<double>{1.0 / 32, 1.0 / 64, 1.0 / 128}
                           : std::vector<double>{1.0 / 4, 1.0 / 8, 1.0 / 16};
  field("extension.levels", [&](const std::string& v) {
    c.cs_levels = parse_number_list(v);
    for (double h : c.cs_levels) positive("extension level spacing", h);
  });

  auto threshold = [&](const std::string& key, double& target) {
    field("thresholds." + key, [&](const std::string& v) {
      target = parse_number(v);
      if (!(target >= 0.0) || !std::isfinite(target)) invalid(key + " must be a finite nonnegative number");
    });
  };
  threshold("fat", c.thresholds.fat);
  threshold("perfectness", c.thresholds.perfectness);
  threshold("decay_min_exponent", c.thresholds.decay_min_exponent);
  threshold("decay_gap", c.thresholds.decay_gap);
  threshold("stability", c.thresholds.stability);
  threshold("oracle", c.thresholds.oracle);
  threshold("cs", c.thresholds.cs);
  threshold("residual", c.thresholds.residual);
  threshold("slope", c.thresholds.slope);
  if (!(c.thresholds.perfectness > 0.0 && c.thresholds.perfectness < 1.0)) {
    invalid("thresholds.perfectness must lie in (0, 1)");
  }

  field("output.dir", [&](const std::string& v) { c.output_dir = v; });
  field("output.plots", [&](const std::string& v) { c.plots = parse_switch(v, "plots"); });

  switch (c.kind) {
    case ExperimentKind::Measure:
    case ExperimentKind::CsCheck:
      if (c.set_text.empty()) invalid(to_string(c.kind) + " requires data.set");
      break;
    case ExperimentKind::Solve:
      if (c.set_text.empty() && !c.data_value) invalid("solve requires data.set or data.value");
      break;
    case ExperimentKind::Capacity:
      if (c.set_text.empty()) invalid("capacity requires capacity.set");
      if (!c.ball_center || !c.ball_radius) invalid("capacity requires capacity.center and capacity.radius");
      break;
    case ExperimentKind::Fatness:
    case ExperimentKind::Decay:
    case ExperimentKind::Holder:
    case ExperimentKind::EquivalenceSuite:
      if (c.anchors.empty()) invalid(to_string(c.kind) + " requires probes.anchors");
      break;
  }

  std::ostringstream canon;
  for (const auto& [k, e] : entries) {
    if (k == "output.dir" || k == "output.plots") continue;
    canon << k << " = " << e.value << "\n";
  }
  c.canonical = canon.str();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) { return sha256_hex(config.canonical); }

const std::vector<CatalogEntry>& domain_catalog() {
  static const std::vector<CatalogEntry> catalog{
      {"interval", "ball([0], 1)", 1, "unit interval (-1, 1); smooth, uniformly fat"},
      {"disk", "ball([0, 0], 1)", 2, "unit disk; smooth, uniformly fat"},
      {"square", "box([-1, -1], [1, 1])", 2, "square with convex corners"},
      {"slit_square", "slit_box([-1, -1], [1, 1], [0, 0], [1, 0])", 2,
       "square minus the segment from the centre to the right edge"},
      {"punctured_interval", "punctured_ball([0], 1, 0)", 1, "interval minus its centre; 0 is a trivial point"},
      {"punctured_disk", "punctured_ball([0, 0], 1, 0)", 2, "disk minus its centre; 0 is a trivial point"},
      {"annulus", "punctured_ball([0, 0], 1, 0.5)", 2, "annulus 1/2 < |x| < 1"},
      {"cantor_gaps", "cantor_complement([-1], [1], 3)", 1, "gaps of the level-3 Cantor set in (-1, 1)"},
      {"two_intervals", "union(ball([-1], 0.75), ball([1], 0.75))", 1, "two disjoint intervals"},
  };
  return catalog;
}

}  // namespace fracholder
