#pragma once

// Comma-separated files with a mandatory header row and LF line endings.
// Numbers are written in the shortest form that reads back to the same
// double, so output is stable across runs.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecodyn/fitting.hpp"
#include "ecodyn/trajectory.hpp"

namespace ecodyn::cli {

std::string format_number(double x);

/// Header t,x1,...,xn followed by one column per monitor.
void write_trajectory(std::ostream& out, const Trajectory& traj);

/// Reads columns L, K, Y and optionally t and D, in any order. Throws
/// IoError when the file cannot be opened and ValidationError for missing
/// or unknown columns and malformed cells (with row and column).
Dataset read_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::istream& in, const std::string& source);

/// Header L,K,Y,Y_fit,residual.
void write_fit(std::ostream& out, const Dataset& data, const std::vector<double>& fitted);

}  // namespace ecodyn::cli
