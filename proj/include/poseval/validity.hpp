#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poseval/structio.hpp"

namespace poseval {

struct ValidityThresholds {
  double bond_length_tolerance = 0.25;  // fraction of the covalent-radius sum
  double internal_clash_ratio = 0.8;    // of the covalent-radius sum
  double cross_clash_ratio = 0.75;      // of the van der Waals sum
  double aromatic_planarity = 0.25;     // Å
  double aliphatic_flatness = 0.05;     // Å; saturated rings flatter than this fail
};

struct CheckResult {
  bool passed = true;
  std::string detail;
  std::optional<std::string> error;
};

inline constexpr const char* kBondLengths = "bond_lengths";
inline constexpr const char* kInternalClash = "internal_clash";
inline constexpr const char* kProteinLigandClash = "protein_ligand_clash";
inline constexpr const char* kRingFlatness = "ring_flatness";
inline constexpr const char* kInterLigandClash = "inter_ligand_clash";
inline constexpr const char* kEnergyRatio = "energy_ratio";

CheckResult check_bond_lengths(const MoleculeGraph& g, const ValidityThresholds& t = {});
CheckResult check_internal_clash(const MoleculeGraph& g, const ValidityThresholds& t = {});
CheckResult check_protein_ligand_clash(const Structure& protein, const MoleculeGraph& ligand,
                                       const ValidityThresholds& t = {});
CheckResult check_ring_flatness(const MoleculeGraph& g, const ValidityThresholds& t = {});
CheckResult check_inter_ligand_clash(std::span<const MoleculeGraph> ligands, const ValidityThresholds& t = {});

struct ValidityReport {
  std::map<std::string, CheckResult> per_check;
  bool overall = true;
  std::vector<std::string> enabled;
  std::vector<std::string> disabled;  // always contains energy_ratio
};

/// Runs every check over the ligands (all of them ANDed per check) and the protein.
/// A check that throws is recorded as failed with its error message.
ValidityReport pb_valid(const Structure& protein, std::span<const MoleculeGraph> ligands,
                        const ValidityThresholds& t = {});

nlohmann::json to_json(const ValidityReport& r);

}  // namespace poseval
