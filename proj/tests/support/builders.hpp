#pragma once

#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "poseval/harness.hpp"
#include "poseval/structio.hpp"

namespace testsupport {

using poseval::MoleculeGraph;
using poseval::Points;
using poseval::Structure;
using poseval::Vec3;

std::string fixture(const std::string& relative);
std::string golden(const std::string& relative);

/// Edges as (i, j, order) with order 1-4.
MoleculeGraph make_graph(const std::vector<std::string>& elements, const std::vector<std::tuple<int, int, int>>& edges,
                         const Points& coords, const std::vector<int>& charges = {});

/// 4-hydroxybenzoate in the z = 0 plane, ring centred at the origin (same as the bundled fixture).
MoleculeGraph hydroxybenzoate();
/// Regular planar hexagon of single-bonded carbons.
MoleculeGraph flat_cyclohexane(const Vec3& center = Vec3::Zero());
/// Chair cyclohexane with ideal geometry.
MoleculeGraph chair_cyclohexane(const Vec3& center = Vec3::Zero());
MoleculeGraph single_atom(const std::string& element, const Vec3& at, int charge = 0);

struct ResidueSpec {
  std::string name;
  int seq;
  std::vector<std::pair<std::string, Vec3>> atoms;  // atom name, position; element from first letter
  std::string chain = "A";
};
Structure make_structure(const std::vector<ResidueSpec>& residues);

/// A rigid motion with a non-trivial rotation.
poseval::RigidTransform planted_motion(double angle_deg = 37.0, Vec3 axis = Vec3(1, 2, 3), Vec3 shift = Vec3(4, -7, 2));

Points random_points(std::mt19937_64& rng, std::size_t n, double box);

/// Fresh temporary directory under the system temp path.
std::string temp_dir(const std::string& tag);

/// Whole-file byte comparison.
bool same_bytes(const std::string& a, const std::string& b);

}  // namespace testsupport
