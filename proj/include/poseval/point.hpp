#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace poseval {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Points = std::vector<Vec3>;
using PointSpan = std::span<const Vec3>;

}  // namespace poseval
