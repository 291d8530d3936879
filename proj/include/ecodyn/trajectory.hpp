#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ecodyn {

/// Sampled solution of an ODE with optional monitored quantities.
/// monitor_values[m][s] is monitor m evaluated at states[s].
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<std::string> monitor_names;
  std::vector<std::vector<double>> monitor_values;
  std::string model;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const Eigen::VectorXd& back() const { return states.back(); }
};

}  // namespace ecodyn
