#pragma once

#include "epmat/consensus.hpp"
#include "epmat/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace epmat {

/// Matrix document: `name <id>`, `n <order>`, then n rows of n entries.
/// Blank lines and text after '#' are ignored throughout.
struct NamedMatrix {
  std::string name;
  Matrix value;
};

/// Vector document: `name <id>`, `n <length>`, then the entries.
struct NamedVector {
  std::string name;
  Vector value;
};

enum class GridSpacing { linear, log, both };

const char* to_string(GridSpacing s);
GridSpacing spacing_from_string(const std::string& s);

struct GridSpec {
  double t_max = 10.0;
  int points = 200;
  GridSpacing spacing = GridSpacing::linear;
};

/// Scenario document: `name`, `n`, any number of `arc from to weight` and
/// `x0 v1 .. vn` lines, and one `grid t_max points spacing` line.
struct Scenario {
  std::string name;
  WeightedDigraph graph;
  std::vector<Vector> x0s;
  GridSpec grid;
};

NamedMatrix read_matrix_file(const std::string& path);
NamedVector read_vector_file(const std::string& path);
Scenario read_scenario_file(const std::string& path);

void write_matrix_file(const std::string& path, const NamedMatrix& doc);
void write_vector_file(const std::string& path, const NamedVector& doc);

/// 17 significant digits; reparsing reproduces the double bit-exactly.
std::string format_double(double x);

/// linear: points values from 0 to t_max inclusive. log: points values
/// from max(1e-3, t_max*1e-4) to t_max. both: sorted union.
std::vector<double> make_time_grid(const GridSpec& spec);

/// Header row, then one record per matrix row, entries at 17 significant
/// digits.
void write_csv(const std::string& path,
               const std::vector<std::string>& header, const Matrix& rows);

std::uint64_t fnv1a64(const void* bytes, std::size_t len);

/// Hex FNV-1a of the raw file bytes; stable across runs for report
/// reproducibility.
std::string file_digest(const std::string& path);

}  // namespace epmat
