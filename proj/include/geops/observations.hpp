#pragma once

#include <Eigen/Core>
#include <vector>

namespace geops {

/// Point observations on the sphere, geographic coordinates in degrees.
/// Rows with missing values are dropped before fitting, so these are the
/// usable observations only.
struct Observations {
  std::vector<double> lat;
  std::vector<double> lon;
  Eigen::VectorXd value;

  Eigen::Index size() const { return value.size(); }
};

}  // namespace geops
