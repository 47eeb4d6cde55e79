// Data-parallel kernels and their serial references. The OpenMP versions must produce
// results identical to the serial ones (same per-element arithmetic, same output order).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <omp.h>

#include "poseval/error.hpp"
#include "poseval/geometry.hpp"
#include "poseval/metrics.hpp"

namespace poseval {
namespace {

struct CellGrid {
  Vec3 origin;
  double cell = 1;
  std::array<long, 3> dims{1, 1, 1};
  std::vector<std::size_t> start;  // CSR offsets per cell
  std::vector<int> members;

  long index(long x, long y, long z) const { return (x * dims[1] + y) * dims[2] + z; }

  // Calls fn(j) for every member of the 27 cells around `p`.
  template <class F>
  void visit_around(const Vec3& p, F&& fn) const {
    const auto c = cell_of(p);
    for (long x = std::max(c[0] - 1, 0L); x <= std::min(c[0] + 1, dims[0] - 1); ++x)
      for (long y = std::max(c[1] - 1, 0L); y <= std::min(c[1] + 1, dims[1] - 1); ++y)
        for (long z = std::max(c[2] - 1, 0L); z <= std::min(c[2] + 1, dims[2] - 1); ++z) {
          const long cell = index(x, y, z);
          for (std::size_t m = start[cell]; m < start[cell + 1]; ++m) fn(members[m]);
        }
  }
  std::array<long, 3> cell_of(const Vec3& p) const {
    std::array<long, 3> c;
    for (int d = 0; d < 3; ++d) c[d] = std::clamp(static_cast<long>((p[d] - origin[d]) / cell), 0L, dims[d] - 1);
    return c;
  }
};

CellGrid build_grid(PointSpan pts, double radius) {
  CellGrid g;
  Vec3 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  g.origin = lo;
  g.cell = radius;
  // Keep the grid from exploding for tiny radii over large extents.
  const double max_cells = std::max<double>(64.0, 8.0 * static_cast<double>(pts.size()));
  for (;;) {
    double total = 1;
    for (int d = 0; d < 3; ++d) total *= std::floor((hi[d] - lo[d]) / g.cell) + 1;
    if (total <= max_cells) break;
    g.cell *= 2;
  }
  for (int d = 0; d < 3; ++d) g.dims[d] = static_cast<long>(std::floor((hi[d] - lo[d]) / g.cell)) + 1;
  const std::size_t ncell = static_cast<std::size_t>(g.dims[0] * g.dims[1] * g.dims[2]);
  std::vector<long> cell_id(pts.size());
  g.start.assign(ncell + 1, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto c = g.cell_of(pts[i]);
    cell_id[i] = g.index(c[0], c[1], c[2]);
    ++g.start[cell_id[i] + 1];
  }
  for (std::size_t c = 0; c < ncell; ++c) g.start[c + 1] += g.start[c];
  g.members.resize(pts.size());
  auto fill = g.start;
  for (std::size_t i = 0; i < pts.size(); ++i) g.members[fill[cell_id[i]]++] = static_cast<int>(i);
  return g;
}

}  // namespace

std::vector<NeighborPair> neighbor_pairs(PointSpan points, double radius) {
  if (!(radius > 0)) throw PreconditionError("neighbor_pairs: radius must be positive");
  const long n = static_cast<long>(points.size());
  if (n < 2) return {};
  const CellGrid grid = build_grid(points, radius);
  std::vector<std::vector<NeighborPair>> per_atom(n);

#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) {
    auto& out = per_atom[i];
    grid.visit_around(points[i], [&](int j) {
      if (j <= i) return;
      const double d = (points[i] - points[j]).norm();
      if (d <= radius) out.push_back({static_cast<int>(i), j, d});
    });
    std::sort(out.begin(), out.end(), [](const NeighborPair& a, const NeighborPair& b) { return a.j < b.j; });
  }

  std::vector<NeighborPair> all;
  for (auto& v : per_atom) all.insert(all.end(), v.begin(), v.end());
  return all;
}

std::vector<NeighborPair> neighbor_pairs(const Structure& s, double radius) {
  Points pts;
  pts.reserve(s.atoms.size());
  for (const auto& a : s.atoms) pts.push_back(a.coords);
  return neighbor_pairs(pts, radius);
}

std::vector<NeighborPair> serial::neighbor_pairs(PointSpan points, double radius) {
  if (!(radius > 0)) throw PreconditionError("neighbor_pairs: radius must be positive");
  std::vector<NeighborPair> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = (points[i] - points[j]).norm();
      if (d <= radius) out.push_back({static_cast<int>(i), static_cast<int>(j), d});
    }
  return out;
}

namespace {

struct ScaledMin {
  double value = std::numeric_limits<double>::infinity();
  int a = -1;
  int b = -1;

  void offer(double v, int i, int j) {
    if (v < value || (v == value && (i < a || (i == a && j < b)))) {
      value = v;
      a = i;
      b = j;
    }
  }
};

void check_radii(PointSpan a, std::span<const double> ra, PointSpan b, std::span<const double> rb) {
  if (a.size() != ra.size() || b.size() != rb.size()) throw PreconditionError("min_scaled_distance: radius count mismatch");
}

}  // namespace

double min_scaled_distance(PointSpan a, std::span<const double> ra, PointSpan b, std::span<const double> rb,
                           int* arg_a, int* arg_b) {
  check_radii(a, ra, b, rb);
  ScaledMin best;
  const long na = static_cast<long>(a.size());
#pragma omp parallel
  {
    ScaledMin local;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < na; ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        local.offer((a[i] - b[j]).norm() / (ra[i] + rb[j]), static_cast<int>(i), static_cast<int>(j));
#pragma omp critical(poseval_min_scaled)
    if (local.a >= 0) best.offer(local.value, local.a, local.b);
  }
  if (arg_a) *arg_a = best.a;
  if (arg_b) *arg_b = best.b;
  return best.value;
}

double serial::min_scaled_distance(PointSpan a, std::span<const double> ra, PointSpan b, std::span<const double> rb,
                                   int* arg_a, int* arg_b) {
  check_radii(a, ra, b, rb);
  ScaledMin best;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      best.offer((a[i] - b[j]).norm() / (ra[i] + rb[j]), static_cast<int>(i), static_cast<int>(j));
  if (arg_a) *arg_a = best.a;
  if (arg_b) *arg_b = best.b;
  return best.value;
}

// ---------------------------------------------------------------------------
// lDDT

namespace {

void check_lddt_inputs(PointSpan ref, PointSpan pred, std::span<const int> residue, const LddtParams& params) {
  params.validate();
  if (ref.size() != pred.size() || ref.size() != residue.size())
    throw PreconditionError("lddt: reference, prediction and residue arrays differ in length");
  if (ref.empty()) throw PreconditionError("lddt: no atoms in correspondence");
}

// Preserved-distance counts for one (i, j) pair, added into `counts`.
inline void tally(double d_ref, double d_pred, const std::vector<double>& thresholds, std::vector<long>& counts) {
  const double diff = std::abs(d_pred - d_ref);
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    if (diff < thresholds[k]) ++counts[k];
}

inline double atom_score(const std::vector<long>& counts, long n_neighbors) {
  double s = 0;
  for (long c : counts) s += static_cast<double>(c) / static_cast<double>(n_neighbors);
  return s / static_cast<double>(counts.size());
}

LddtScore finish(const std::vector<double>& per_atom, const std::vector<char>& has, std::size_t n) {
  LddtScore out;
  out.n_matched = n;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (has[i]) {
      total += per_atom[i];
      ++out.n_scored;
    }
  if (out.n_scored == 0) throw PreconditionError("lddt: no atom has a neighbour within the inclusion radius");
  out.score = total / static_cast<double>(out.n_scored);
  return out;
}

}  // namespace

LddtScore lddt(PointSpan ref, PointSpan pred, std::span<const int> residue, const LddtParams& params) {
  check_lddt_inputs(ref, pred, residue, params);
  const std::size_t n = ref.size();
  const CellGrid grid = build_grid(ref, params.inclusion_radius);
  std::vector<double> per_atom(n, 0.0);
  std::vector<char> has(n, 0);
  const long ln = static_cast<long>(n);
#pragma omp parallel
  {
    std::vector<long> counts(params.thresholds.size());
#pragma omp for schedule(dynamic, 32)
    for (long i = 0; i < ln; ++i) {
      std::fill(counts.begin(), counts.end(), 0);
      long nn = 0;
      // Counts are integers, so visiting order does not affect the result.
      grid.visit_around(ref[i], [&](int j) {
        if (j == i || (params.exclude_same_residue && residue[j] == residue[i])) return;
        const auto lo = std::min<long>(i, j), hi = std::max<long>(i, j);
        const double d_ref = (ref[lo] - ref[hi]).norm();
        if (d_ref > params.inclusion_radius) return;
        ++nn;
        tally(d_ref, (pred[i] - pred[j]).norm(), params.thresholds, counts);
      });
      if (nn > 0) {
        per_atom[i] = atom_score(counts, nn);
        has[i] = 1;
      }
    }
  }
  return finish(per_atom, has, n);
}

LddtScore serial::lddt(PointSpan ref, PointSpan pred, std::span<const int> residue, const LddtParams& params) {
  check_lddt_inputs(ref, pred, residue, params);
  const std::size_t n = ref.size();
  std::vector<double> per_atom(n, 0.0);
  std::vector<char> has(n, 0);
  std::vector<long> counts(params.thresholds.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    long nn = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (params.exclude_same_residue && residue[j] == residue[i]) continue;
      const double d_ref = (ref[std::min(i, j)] - ref[std::max(i, j)]).norm();
      if (d_ref > params.inclusion_radius) continue;
      ++nn;
      tally(d_ref, (pred[i] - pred[j]).norm(), params.thresholds, counts);
    }
    if (nn > 0) {
      per_atom[i] = atom_score(counts, nn);
      has[i] = 1;
    }
  }
  return finish(per_atom, has, n);
}

namespace {

void check_cross_inputs(PointSpan lig_ref, PointSpan lig_pred, PointSpan prot_ref, PointSpan prot_pred,
                        const LddtParams& params) {
  params.validate();
  if (lig_ref.size() != lig_pred.size() || prot_ref.size() != prot_pred.size())
    throw PreconditionError("lddt_cross: reference and prediction differ in length");
  if (lig_ref.empty()) throw PreconditionError("lddt_cross: empty ligand");
}

}  // namespace

CrossLddt lddt_cross(PointSpan lig_ref, PointSpan lig_pred, PointSpan prot_ref, PointSpan prot_pred,
                     const LddtParams& params) {
  check_cross_inputs(lig_ref, lig_pred, prot_ref, prot_pred, params);
  const long nl = static_cast<long>(lig_ref.size());
  std::vector<double> per_atom(nl, 0.0);
  std::vector<long> nn(nl, 0);
#pragma omp parallel
  {
    std::vector<long> counts(params.thresholds.size());
#pragma omp for schedule(static)
    for (long i = 0; i < nl; ++i) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t j = 0; j < prot_ref.size(); ++j) {
        const double d_ref = (lig_ref[i] - prot_ref[j]).norm();
        if (d_ref > params.inclusion_radius) continue;
        ++nn[i];
        tally(d_ref, (lig_pred[i] - prot_pred[j]).norm(), params.thresholds, counts);
      }
      if (nn[i] > 0) per_atom[i] = atom_score(counts, nn[i]);
    }
  }
  CrossLddt out;
  double total = 0;
  for (long i = 0; i < nl; ++i) {
    out.n_pairs += static_cast<std::size_t>(nn[i]);
    if (nn[i] > 0) {
      total += per_atom[i];
      ++out.n_scored;
    }
  }
  if (out.n_scored > 0) out.score = total / static_cast<double>(out.n_scored);
  return out;
}

CrossLddt serial::lddt_cross(PointSpan lig_ref, PointSpan lig_pred, PointSpan prot_ref, PointSpan prot_pred,
                             const LddtParams& params) {
  check_cross_inputs(lig_ref, lig_pred, prot_ref, prot_pred, params);
  CrossLddt out;
  double total = 0;
  std::vector<long> counts(params.thresholds.size());
  for (std::size_t i = 0; i < lig_ref.size(); ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    long nn = 0;
    for (std::size_t j = 0; j < prot_ref.size(); ++j) {
      const double d_ref = (lig_ref[i] - prot_ref[j]).norm();
      if (d_ref > params.inclusion_radius) continue;
      ++nn;
      tally(d_ref, (lig_pred[i] - prot_pred[j]).norm(), params.thresholds, counts);
    }
    out.n_pairs += static_cast<std::size_t>(nn);
    if (nn > 0) {
      total += atom_score(counts, nn);
      ++out.n_scored;
    }
  }
  if (out.n_scored > 0) out.score = total / static_cast<double>(out.n_scored);
  return out;
}

}  // namespace poseval
