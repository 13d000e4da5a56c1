#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracholder/config.hpp"
#include "fracholder/oracle.hpp"

namespace fracholder {

using Json = nlohmann::ordered_json;

struct RunOptions {
  int jobs = 1;
  bool plots = true;
};

struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = true;  // false draws a line
};

struct Plot {
  std::string file;
  std::string title, xlabel, ylabel;
  bool logx = true, logy = true;
  std::vector<Series> series;
};

struct Outcome {
  Json report;
  Json timing;
  std::vector<Table> tables;
  std::vector<Plot> plots;
  bool passed = true;
};

Outcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes report.json, timing.json, the tables and (optionally) the plots.
void write_outcome(const Outcome& outcome, const std::string& dir, bool plots);

std::string render_csv(const Table& table);
std::string render_svg(const Plot& plot);

/// Exterior data chi_G on the line with its jump points located by scanning.
ExteriorFunction indicator_function_1d(const Shape& G);

/// Runs f(0..count-1) on up to `jobs` threads; the first failing index is rethrown.
void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)>& f);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace fracholder
