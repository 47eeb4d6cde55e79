#pragma once

#include <vector>

#include "poseval/point.hpp"
#include "poseval/structio.hpp"

namespace poseval {

/// Proper rigid motion x -> R x + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Points apply(PointSpan pts) const;
  void apply_in_place(Structure& s) const;
  void apply_in_place(Points& pts) const;
  RigidTransform inverse() const;
  /// (*this) after `first`.
  RigidTransform compose(const RigidTransform& first) const;
};

struct Superposition {
  RigidTransform transform;
  double rmsd = 0;
};

/// Least-squares rigid superposition of `mobile` onto `target` (R*mobile + t ~ target).
/// Throws PreconditionError on size mismatch, fewer than 3 points, or collinear input.
Superposition kabsch(PointSpan mobile, PointSpan target);

Vec3 centroid(PointSpan points);

struct NeighborPair {
  int i;
  int j;
  double dist;
};

/// All pairs i < j with |p_i - p_j| <= radius, ascending by (i, j). Cell-list search, OpenMP over cells.
std::vector<NeighborPair> neighbor_pairs(PointSpan points, double radius);
/// Same result over all atoms of `s`; indices refer to `s.atoms`.
std::vector<NeighborPair> neighbor_pairs(const Structure& s, double radius);

namespace serial {
/// O(n^2) reference for neighbor_pairs.
std::vector<NeighborPair> neighbor_pairs(PointSpan points, double radius);
}  // namespace serial

/// Smallest |a_i - b_j| / (ra_i + rb_j) over all cross pairs (+inf when either side is empty).
/// `arg_a`/`arg_b` receive the minimising indices when non-null.
double min_scaled_distance(PointSpan a, std::span<const double> ra, PointSpan b, std::span<const double> rb,
                           int* arg_a = nullptr, int* arg_b = nullptr);

namespace serial {
double min_scaled_distance(PointSpan a, std::span<const double> ra, PointSpan b, std::span<const double> rb,
                           int* arg_a = nullptr, int* arg_b = nullptr);
}  // namespace serial

/// Best-fit plane through `points`: returns max absolute out-of-plane deviation.
double max_plane_deviation(PointSpan points);

}  // namespace poseval
