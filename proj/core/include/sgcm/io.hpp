#pragma once

#include <string>
#include <vector>

#include "sgcm/spaces.hpp"

namespace sgcm {

/// Numeric CSV with one observation per row.  Blank lines and lines starting
/// with '#' are skipped; all rows must have the same number of columns.
/// Errors name the file and 1-based row.
Matrix read_csv_matrix(const std::string& path);

/// Numeric CSV with possibly ragged rows (point clouds: one cloud per row).
std::vector<Vector> read_csv_rows(const std::string& path);

/// Density sample: the first data row is the shared grid, every later row
/// one observation's density values on that grid.
std::vector<DensityGrid> read_density_csv(const std::string& path);

/// Curve sample: a directory of per-observation CSV files (sorted by name),
/// each with columns t,x1,...,xD and one row per time point.  A header line
/// is permitted.  All files must share the same time grid.
std::vector<MetricCurve> read_curve_dir(const std::string& dir);

}  // namespace sgcm
