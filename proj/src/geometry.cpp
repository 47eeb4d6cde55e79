#include "poseval/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "poseval/error.hpp"

namespace poseval {

Points RigidTransform::apply(PointSpan pts) const {
  Points out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(apply(p));
  return out;
}

void RigidTransform::apply_in_place(Structure& s) const {
  for (auto& a : s.atoms) a.coords = apply(a.coords);
}

void RigidTransform::apply_in_place(Points& pts) const {
  for (auto& p : pts) p = apply(p);
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& first) const {
  return {rotation * first.rotation, rotation * first.translation + translation};
}

Vec3 centroid(PointSpan points) {
  if (points.empty()) throw PreconditionError("centroid of an empty point set");
  Vec3 c = Vec3::Zero();
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

Superposition kabsch(PointSpan mobile, PointSpan target) {
  if (mobile.size() != target.size())
    throw PreconditionError("kabsch: point counts differ (" + std::to_string(mobile.size()) + " vs " +
                            std::to_string(target.size()) + ")");
  if (mobile.size() < 3) throw PreconditionError("kabsch: need at least 3 points");

  const Vec3 cm = centroid(mobile), ct = centroid(target);
  Mat3 h = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  for (std::size_t k = 0; k < mobile.size(); ++k) {
    const Vec3 a = mobile[k] - cm, b = target[k] - ct;
    h += a * b.transpose();
    spread += a * a.transpose();
  }
  // Rank check on the mobile set: collinear or coincident points leave the rotation undetermined.
  Eigen::SelfAdjointEigenSolver<Mat3> es(spread);
  const auto ev = es.eigenvalues();  // ascending
  if (ev(2) <= 1e-12 || ev(1) <= 1e-10 * ev(2)) throw PreconditionError("kabsch: degenerate (collinear) point set");

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) d(2, 2) = -1;
  Superposition out;
  out.transform.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  out.transform.translation = ct - out.transform.rotation * cm;
  double ss = 0;
  for (std::size_t k = 0; k < mobile.size(); ++k) ss += (out.transform.apply(mobile[k]) - target[k]).squaredNorm();
  out.rmsd = std::sqrt(ss / static_cast<double>(mobile.size()));
  return out;
}

double max_plane_deviation(PointSpan points) {
  if (points.size() < 4) return 0;
  const Vec3 c = centroid(points);
  Mat3 cov = Mat3::Zero();
  for (const auto& p : points) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 normal = es.eigenvectors().col(0);
  double worst = 0;
  for (const auto& p : points) worst = std::max(worst, std::abs(normal.dot(p - c)));
  return worst;
}

}  // namespace poseval
