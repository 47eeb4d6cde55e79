#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "poseval/structio.hpp"

namespace poseval {

/// Tolerance added to the covalent-radius sum when perceiving bonds from coordinates.
inline constexpr double kDefaultBondTolerance = 0.45;
inline constexpr std::size_t kDefaultAutomorphismCap = 10000;
inline constexpr std::size_t kDefaultMatchBudget = 2'000'000;

/// Heavy-atom correspondence between a template graph and a coordinate-bearing graph.
/// Indices are node indices of the respective graphs.
struct AtomMapping {
  std::vector<std::pair<int, int>> pairs;  // (template_index, coordinate_index)

  /// coordinate index for each template node (-1 when unmapped); sized to `template_size`.
  std::vector<int> forward(std::size_t template_size) const;
};

/// Label-preserving permutations of a graph's heavy atoms.
struct AutomorphismSet {
  std::vector<std::vector<int>> perms;  // over heavy-atom positions 0..h-1
  std::vector<int> heavy_nodes;         // heavy position -> node index
  bool truncated = false;
};

/// Bonds by distance: edge iff d <= r_cov(i) + r_cov(j) + tolerance, never metal-metal, all single.
/// Throws PreconditionError naming any element without a covalent radius.
MoleculeGraph perceive_bonds(const std::vector<Atom>& ligand_atoms, double tolerance = kDefaultBondTolerance);

/// Heavy-atom graph isomorphism template -> target respecting element labels and topology.
/// Bond orders and charges are not compared so that Kekulé, aromatic and perceived
/// representations of the same ligand still match.
/// Throws PreconditionError on differing heavy counts or element multisets, MappingError when
/// no isomorphism exists and ResourceError when the search exceeds `node_budget`.
AtomMapping match_template(const MoleculeGraph& tmpl, const MoleculeGraph& target,
                           std::size_t node_budget = kDefaultMatchBudget);

/// All heavy-atom automorphisms preserving element and connectivity, up to `cap`. Bond orders and
/// charges are ignored, as in match_template. The identity is always first.
AutomorphismSet automorphisms(const MoleculeGraph& g, std::size_t cap = kDefaultAutomorphismCap,
                              std::size_t node_budget = kDefaultMatchBudget);

/// Chordless cycles with at most `max_size` atoms, each as a node-index cycle in traversal order.
std::vector<std::vector<int>> find_rings(const MoleculeGraph& g, std::size_t max_size = 8);

/// Aromatic flags on every ring atom or bond, or (for graphs with real bond orders) a Kekulé pattern:
/// six-ring with three alternating double bonds, or five-ring with two double bonds and an N/O/S.
bool ring_is_aromatic(const MoleculeGraph& g, const std::vector<int>& ring);

/// Heavy-atom subgraph with coordinates carried over; `index_map` receives old node indices.
MoleculeGraph heavy_subgraph(const MoleculeGraph& g, std::vector<int>* index_map = nullptr);

/// Sorted element symbols of the heavy atoms ("formula" for fragment grouping).
std::vector<std::string> heavy_formula(const MoleculeGraph& g);

}  // namespace poseval
