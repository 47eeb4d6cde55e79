#include "poseval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "poseval/error.hpp"

namespace poseval {

double rmsd(PointSpan pred, PointSpan ref) {
  if (pred.size() != ref.size())
    throw PreconditionError("rmsd: lengths differ (" + std::to_string(pred.size()) + " vs " + std::to_string(ref.size()) + ")");
  if (pred.empty()) throw PreconditionError("rmsd: empty input");
  double ss = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ss += (pred[i] - ref[i]).squaredNorm();
  return std::sqrt(ss / static_cast<double>(pred.size()));
}

double centroid_rmsd(PointSpan pred, PointSpan ref) {
  if (pred.empty() || ref.empty()) throw PreconditionError("centroid_rmsd: empty input");
  return (centroid(pred) - centroid(ref)).norm();
}

SymmetryRmsd symmetry_rmsd(const AutomorphismSet& autos, PointSpan pred, PointSpan ref, bool superpose) {
  if (pred.size() != ref.size()) throw PreconditionError("symmetry_rmsd: lengths differ");
  if (autos.perms.empty()) throw PreconditionError("symmetry_rmsd: empty automorphism set");
  for (const auto& p : autos.perms)
    if (p.size() != ref.size()) throw PreconditionError("symmetry_rmsd: permutation size differs from atom count");

  // Superposed scoring needs a well-posed Kabsch problem; small or collinear ligands fall back to plain RMSD.
  bool can_superpose = superpose && pred.size() >= 3;
  if (can_superpose) {
    try {
      (void)kabsch(pred, ref);
    } catch (const PreconditionError&) {
      can_superpose = false;
    }
  }

  const long np = static_cast<long>(autos.perms.size());
  std::vector<double> values(np);
#pragma omp parallel for schedule(static) if (np > 64)
  for (long k = 0; k < np; ++k) {
    const auto& perm = autos.perms[k];
    Points permuted(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) permuted[i] = ref[perm[i]];
    values[k] = can_superpose ? kabsch(pred, permuted).rmsd : rmsd(pred, permuted);
  }

  SymmetryRmsd out;
  out.truncated = autos.truncated;
  out.n_automorphisms = autos.perms.size();
  out.naive_rmsd = values[0];
  long best = 0;
  for (long k = 1; k < np; ++k)
    if (values[k] < values[best]) best = k;
  out.rmsd = values[best];
  out.best_perm = autos.perms[best];
  return out;
}

SymmetryRmsd rmsd_symmetry_corrected(const MoleculeGraph& pred, const MoleculeGraph& ref, const AtomMapping& mapping,
                                     std::size_t cap, bool superpose) {
  if (!pred.coords || !ref.coords) throw PreconditionError("rmsd_symmetry_corrected: graphs need coordinates");
  const auto autos = automorphisms(ref, cap);
  const auto fwd = mapping.forward(ref.size());
  Points ref_h, pred_h;
  for (int node : autos.heavy_nodes) {
    const int target = fwd[node];
    if (target < 0 || target >= static_cast<int>(pred.size()))
      throw PreconditionError("rmsd_symmetry_corrected: mapping does not cover every reference heavy atom");
    ref_h.push_back((*ref.coords)[node]);
    pred_h.push_back((*pred.coords)[target]);
  }
  return symmetry_rmsd(autos, pred_h, ref_h, superpose);
}

void LddtParams::validate() const {
  if (thresholds.empty()) throw PreconditionError("lddt: no thresholds");
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!(thresholds[k] > 0)) throw PreconditionError("lddt: thresholds must be positive");
    if (k > 0 && !(thresholds[k] > thresholds[k - 1])) throw PreconditionError("lddt: thresholds must increase strictly");
  }
  if (!(inclusion_radius > thresholds.back())) throw PreconditionError("lddt: inclusion radius must exceed the largest threshold");
}

LddtParams lddt_pli_defaults() {
  LddtParams p;
  p.inclusion_radius = 6.0;
  return p;
}

bool is_water(std::string_view residue_name) {
  return residue_name == "HOH" || residue_name == "WAT" || residue_name == "H2O" || residue_name == "DOD";
}

std::optional<std::string> ChainMap::predicted_for(const std::string& ref_chain) const {
  for (const auto& [p, r] : pairs)
    if (r == ref_chain) return p;
  return std::nullopt;
}

std::vector<AtomPair> correspond_atoms(const Structure& pred, const Structure& ref, const ChainMap& map,
                                       const std::set<ResidueKey>* only, std::size_t* unmatched) {
  std::map<std::tuple<std::string, int, char, std::string>, std::size_t> index;
  for (std::size_t i = 0; i < pred.atoms.size(); ++i) {
    const auto& a = pred.atoms[i];
    if (a.is_hydrogen() || is_water(a.residue_name)) continue;
    index.emplace(std::make_tuple(a.chain_id, a.residue_seq, a.insertion_code, a.name), i);
  }
  std::map<std::string, std::optional<std::string>> chain_cache;
  std::vector<AtomPair> out;
  std::size_t missing = 0;
  for (std::size_t r = 0; r < ref.atoms.size(); ++r) {
    const auto& a = ref.atoms[r];
    if (a.is_hydrogen() || is_water(a.residue_name)) continue;
    if (only && !only->contains(a.residue())) continue;
    auto [it, fresh] = chain_cache.try_emplace(a.chain_id);
    if (fresh) it->second = map.predicted_for(a.chain_id);
    if (!it->second) {
      ++missing;
      continue;
    }
    auto hit = index.find(std::make_tuple(*it->second, a.residue_seq, a.insertion_code, a.name));
    if (hit == index.end()) {
      ++missing;
      continue;
    }
    out.push_back({hit->second, r});
  }
  if (unmatched) *unmatched = missing;
  return out;
}

LddtScore lddt(const Structure& pred, const Structure& ref, const LddtParams& params, const ChainMap& map) {
  std::size_t missing = 0;
  const auto pairs = correspond_atoms(pred, ref, map, nullptr, &missing);
  if (pairs.empty()) throw PreconditionError("lddt: no atoms in correspondence");
  Points rc, pc;
  std::vector<int> residue;
  std::map<ResidueKey, int> residue_ids;
  for (const auto& p : pairs) {
    rc.push_back(ref.atoms[p.ref].coords);
    pc.push_back(pred.atoms[p.pred].coords);
    residue.push_back(residue_ids.try_emplace(ref.atoms[p.ref].residue(), static_cast<int>(residue_ids.size())).first->second);
  }
  auto score = lddt(rc, pc, residue, params);
  score.n_unmatched = missing;
  return score;
}

PocketSelection select_pocket(const Structure& ref_protein, std::span<const Points> ligands, double cutoff) {
  if (ligands.empty()) throw PreconditionError("select_pocket: no ligands");
  if (!(cutoff > 0)) throw PreconditionError("select_pocket: cutoff must be positive");
  PocketSelection out;
  out.cutoff = cutoff;
  for (const auto& a : ref_protein.atoms) {
    if (a.is_hydrogen() || is_water(a.residue_name)) continue;
    if (out.residues.contains(a.residue())) continue;
    bool near = false;
    for (const auto& lig : ligands) {
      for (const auto& p : lig)
        if ((a.coords - p).norm() <= cutoff) {
          near = true;
          break;
        }
      if (near) break;
    }
    if (near) out.residues.insert(a.residue());
  }
  if (out.residues.empty()) throw PreconditionError("select_pocket: no residue within " + std::to_string(cutoff) + " Å of the ligands");
  return out;
}

PocketAlignment align_pocket(const Structure& pred, const Structure& ref, const PocketSelection& pocket,
                             const ChainMap& map) {
  PocketAlignment out;
  const auto pairs = correspond_atoms(pred, ref, map, &pocket.residues, &out.n_missing);
  if (pairs.size() < 3)
    throw PreconditionError("align_pocket: only " + std::to_string(pairs.size()) + " matched pocket atoms (need 3)");
  Points mobile, target;
  for (const auto& p : pairs) {
    mobile.push_back(pred.atoms[p.pred].coords);
    target.push_back(ref.atoms[p.ref].coords);
  }
  const auto sup = kabsch(mobile, target);
  out.transform = sup.transform;
  out.rmsd = sup.rmsd;
  out.n_atoms = pairs.size();
  return out;
}

LddtPli lddt_pli(const Structure& pred_protein, PointSpan pred_ligand, const Structure& ref_protein,
                 PointSpan ref_ligand, const PocketSelection& pocket, const ChainMap& map,
                 const RigidTransform& pred_to_ref, const LddtParams& params) {
  if (pocket.residues.empty()) throw PreconditionError("lddt_pli: empty pocket");
  const auto pairs = correspond_atoms(pred_protein, ref_protein, map, &pocket.residues);
  Points prot_ref, prot_pred;
  for (const auto& p : pairs) {
    prot_ref.push_back(ref_protein.atoms[p.ref].coords);
    prot_pred.push_back(pred_to_ref.apply(pred_protein.atoms[p.pred].coords));
  }
  const auto lig_pred = pred_to_ref.apply(pred_ligand);
  const auto cross = lddt_cross(ref_ligand, lig_pred, prot_ref, prot_pred, params);
  return {cross.score, cross.n_pairs, cross.n_scored};
}

}  // namespace poseval
