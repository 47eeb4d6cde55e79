#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poseval/geometry.hpp"
#include "poseval/molgraph.hpp"
#include "poseval/structio.hpp"

namespace poseval {

// ---------------------------------------------------------------------------
// RMSD family

/// Root mean square deviation of corresponding points, no superposition.
double rmsd(PointSpan pred, PointSpan ref);

/// Distance between the centroids of two (possibly different-length) point sets.
double centroid_rmsd(PointSpan pred, PointSpan ref);

struct SymmetryRmsd {
  double rmsd = 0;         // minimum over automorphisms
  double naive_rmsd = 0;   // identity permutation
  bool truncated = false;  // automorphism enumeration hit its cap; rmsd may not be the true minimum
  std::size_t n_automorphisms = 0;
  std::vector<int> best_perm;  // over template heavy positions
};

/// Minimum RMSD over the template's automorphisms. `ref` and `pred` are heavy-atom coordinates in
/// template heavy order (see AutomorphismSet::heavy_nodes). With `superpose`, each candidate is
/// scored after optimal Kabsch superposition of pred onto ref.
SymmetryRmsd symmetry_rmsd(const AutomorphismSet& autos, PointSpan pred, PointSpan ref, bool superpose = false);

/// Symmetry-corrected RMSD with `ref` as template; `mapping` maps ref nodes to pred nodes.
SymmetryRmsd rmsd_symmetry_corrected(const MoleculeGraph& pred, const MoleculeGraph& ref, const AtomMapping& mapping,
                                     std::size_t cap = kDefaultAutomorphismCap, bool superpose = false);

// ---------------------------------------------------------------------------
// lDDT

struct LddtParams {
  double inclusion_radius = 15.0;
  std::vector<double> thresholds{0.5, 1.0, 2.0, 4.0};
  bool exclude_same_residue = true;

  /// Throws PreconditionError unless thresholds are positive, strictly increasing and below the radius.
  void validate() const;
};

/// Defaults for the protein-ligand interface variant (cross-pair radius 6 Å).
LddtParams lddt_pli_defaults();

struct LddtScore {
  double score = 0;
  std::size_t n_scored = 0;     // atoms with a non-empty neighbourhood
  std::size_t n_matched = 0;    // atoms in correspondence
  std::size_t n_unmatched = 0;  // reference heavy atoms without a predicted partner
};

/// Per-atom lDDT averaged over atoms with neighbours. `ref`/`pred` are in correspondence; neighbours are
/// taken in `ref` within the inclusion radius and exclude atoms sharing `residue[i]`.
/// Throws PreconditionError on size mismatch, empty input, or when no atom has a neighbour.
LddtScore lddt(PointSpan ref, PointSpan pred, std::span<const int> residue, const LddtParams& params);

/// Cross-pair lDDT: neighbours of each ligand atom are the protein atoms within the inclusion radius.
/// Averaged over ligand atoms with at least one neighbour; nullopt score when none have any.
struct CrossLddt {
  std::optional<double> score;
  std::size_t n_scored = 0;
  std::size_t n_pairs = 0;
};
CrossLddt lddt_cross(PointSpan lig_ref, PointSpan lig_pred, PointSpan prot_ref, PointSpan prot_pred,
                     const LddtParams& params);

namespace serial {
LddtScore lddt(PointSpan ref, PointSpan pred, std::span<const int> residue, const LddtParams& params);
CrossLddt lddt_cross(PointSpan lig_ref, PointSpan lig_pred, PointSpan prot_ref, PointSpan prot_pred,
                     const LddtParams& params);
}  // namespace serial

// ---------------------------------------------------------------------------
// Chains, pockets, alignment

struct ChainMap {
  std::vector<std::pair<std::string, std::string>> pairs;  // (predicted, reference)
  std::vector<double> identities;                          // per pair
  double score = 0;                                        // mean identity over mapped pairs
  std::vector<std::string> unmapped_reference;

  std::optional<std::string> predicted_for(const std::string& ref_chain) const;
};

/// One-letter protein sequence per chain (standard residues only), chains in first-seen order.
std::vector<std::pair<std::string, std::string>> chain_sequences(const Structure& s);

/// Longest-common-subsequence identity: matches / max(len_a, len_b).
double sequence_identity(std::string_view a, std::string_view b);

/// Optimal one-to-one chain assignment maximising total identity; pairs below `identity_floor` stay unmapped.
ChainMap map_chains(const Structure& pred, const Structure& ref, double identity_floor = 0.3);

struct AtomPair {
  std::size_t pred;
  std::size_t ref;
};

/// Heavy-atom correspondence by (mapped chain, residue number, insertion code, atom name).
/// `only` restricts to the given reference residues when non-null. `unmatched` receives the count of
/// reference heavy atoms with no partner.
std::vector<AtomPair> correspond_atoms(const Structure& pred, const Structure& ref, const ChainMap& map,
                                       const std::set<ResidueKey>* only = nullptr, std::size_t* unmatched = nullptr);

/// lDDT over corresponding heavy atoms of two structures.
LddtScore lddt(const Structure& pred, const Structure& ref, const LddtParams& params, const ChainMap& map);

struct PocketSelection {
  std::set<ResidueKey> residues;
  double cutoff = 10.0;
};

inline constexpr double kDefaultPocketCutoff = 10.0;

bool is_water(std::string_view residue_name);

/// Reference residues with any heavy atom within `cutoff` (inclusive) of any ligand heavy atom.
/// Waters are never pocket residues. Throws PreconditionError on empty ligands or an empty pocket.
PocketSelection select_pocket(const Structure& ref_protein, std::span<const Points> ligands,
                              double cutoff = kDefaultPocketCutoff);

struct PocketAlignment {
  RigidTransform transform;  // predicted frame -> reference frame
  double rmsd = 0;           // pocket heavy-atom RMSD after alignment
  std::size_t n_atoms = 0;
  std::size_t n_missing = 0;  // reference pocket atoms absent from the prediction
};

/// Kabsch over matched pocket heavy atoms. Throws PreconditionError with fewer than 3 matches.
PocketAlignment align_pocket(const Structure& pred, const Structure& ref, const PocketSelection& pocket,
                             const ChainMap& map);

struct LddtPli {
  std::optional<double> score;
  std::size_t n_pairs = 0;
  std::size_t n_scored = 0;
};

/// Interface lDDT between one ligand and the reference pocket. Ligand coordinates are heavy atoms in
/// correspondence (pred already mapped onto ref order). The predicted side is expressed in the reference
/// frame through `pred_to_ref` before scoring. Throws PreconditionError on an empty pocket.
LddtPli lddt_pli(const Structure& pred_protein, PointSpan pred_ligand, const Structure& ref_protein,
                 PointSpan ref_ligand, const PocketSelection& pocket, const ChainMap& map,
                 const RigidTransform& pred_to_ref, const LddtParams& params = lddt_pli_defaults());

}  // namespace poseval
