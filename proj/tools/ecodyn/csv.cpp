#include "csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn::cli {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string format_number(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.empty() ? 0 : static_cast<std::size_t>(traj.states.front().size());
  out << "t";
  for (std::size_t i = 0; i < n; ++i) out << ",x" << (i + 1);
  for (const auto& name : traj.monitor_names) out << ',' << name;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_number(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) out << ',' << format_number(traj.states[k][i]);
    for (const auto& col : traj.monitor_values) out << ',' << format_number(col[k]);
    out << '\n';
  }
}

Dataset parse_dataset(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(source + ": empty file, expected header L,K,Y");
  const auto header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name = trim(header[j]);
    if (name != "L" && name != "K" && name != "Y" && name != "t" && name != "D") {
      throw ValidationError(source + ": unknown column '" + name + "' (expected L, K, Y and optionally t, D)");
    }
    if (!col.emplace(name, j).second) throw ValidationError(source + ": duplicate column '" + name + "'");
  }
  for (const char* req : {"L", "K", "Y"}) {
    if (!col.count(req)) throw ValidationError(source + ": missing required column '" + std::string(req) + "'");
  }

  Dataset d;
  std::vector<double> t, D;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << source << ": row " << row << " has " << cells.size() << " fields, header has " << header.size();
      throw ValidationError(os.str());
    }
    auto value = [&](const std::string& name) {
      const std::string cell = trim(cells[col.at(name)]);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        std::ostringstream os;
        os << source << ": row " << row << ", column " << name << ": cannot parse '" << cell << "' as a number";
        throw ValidationError(os.str());
      }
      return v;
    };
    d.L.push_back(value("L"));
    d.K.push_back(value("K"));
    d.Y.push_back(value("Y"));
    if (col.count("t")) t.push_back(value("t"));
    if (col.count("D")) D.push_back(value("D"));
  }
  if (col.count("t")) d.t = std::move(t);
  if (col.count("D")) d.D = std::move(D);
  return d;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read data file '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

void write_fit(std::ostream& out, const Dataset& data, const std::vector<double>& fitted) {
  out << "L,K,Y,Y_fit,residual\n";
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out << format_number(data.L[i]) << ',' << format_number(data.K[i]) << ',' << format_number(data.Y[i])
        << ',' << format_number(fitted[i]) << ',' << format_number(data.Y[i] - fitted[i]) << '\n';
  }
}

}  // namespace ecodyn::cli
