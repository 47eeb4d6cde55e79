#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "poseval/structio.hpp"

namespace poseval {

enum class InteractionType {
  HBondDonor,
  HBondAcceptor,
  Hydrophobic,
  PiStacking,
  PiCation,
  SaltBridgeCationic,
  SaltBridgeAnionic,
  VdWContact,
  MetalCoordination,
};

inline constexpr InteractionType kAllInteractionTypes[] = {
    InteractionType::HBondDonor,        InteractionType::HBondAcceptor,     InteractionType::Hydrophobic,
    InteractionType::PiStacking,        InteractionType::PiCation,          InteractionType::SaltBridgeCationic,
    InteractionType::SaltBridgeAnionic, InteractionType::VdWContact,        InteractionType::MetalCoordination};

std::string_view to_string(InteractionType t);
std::optional<InteractionType> interaction_from_string(std::string_view s);

/// One ligand-residue contact of a given type. Donor/acceptor and cation/anion are named from the
/// ligand's side (HBondDonor = ligand donates).
struct InteractionRecord {
  std::string ligand_id;
  std::string residue_type;  // standard amino acid or "UNK"
  InteractionType type;
  ResidueKey residue;
};

/// Geometric criteria; every distance in Å, angles in degrees.
struct InteractionParams {
  double hbond_distance = 3.5;
  double hbond_min_angle = 130.0;
  double hydrophobic_distance = 4.5;
  double vdw_tolerance = 0.5;
  double salt_bridge_distance = 4.5;
  double pi_stacking_distance = 5.5;
  double pi_parallel_max_angle = 30.0;
  double pi_tshaped_min_angle = 60.0;
  double pi_cation_distance = 4.5;
  double metal_distance = 2.8;
};

/// One record per (residue, type). VdWContact only for residues with no other interaction.
/// Throws PreconditionError when the ligand has no coordinates.
std::vector<InteractionRecord> detect_interactions(const Structure& protein, const MoleculeGraph& ligand,
                                                   const std::string& ligand_id, const InteractionParams& params = {});

/// Histogram bin. Bins order by (interaction type name, residue type, ligand id).
struct InteractionKey {
  std::string ligand_id;
  std::string residue_type;
  InteractionType type;

  std::string str() const;  // "ligandId|RES|InteractionType"
  static InteractionKey parse(std::string_view s);
  bool operator<(const InteractionKey& o) const;
  bool operator==(const InteractionKey& o) const = default;
};

struct Fingerprint {
  std::map<InteractionKey, long> counts;  // no zero entries

  void add(const InteractionKey& k, long n = 1);
  long total() const;
  bool empty() const { return counts.empty(); }
  void merge(const Fingerprint& other);
};

Fingerprint fingerprint(const std::vector<InteractionRecord>& records);

nlohmann::json to_json(const Fingerprint& f);
Fingerprint fingerprint_from_json(const nlohmann::json& j);

enum class EmdMode { Normalized, RawCounts };
enum class EmdFlag { None, BothEmpty, OneSideEmpty };
std::string_view to_string(EmdFlag f);

struct EmdInput {
  std::vector<InteractionKey> bin_order;
  std::vector<double> u_weights;
  std::vector<double> v_weights;
};

/// Union of both key sets in bin order; weights normalised to unit mass in Normalized mode.
EmdInput build_emd_input(const Fingerprint& u, const Fingerprint& v, EmdMode mode = EmdMode::Normalized);

/// Wasserstein-1 between two weight vectors on positions 0..B-1: sum of |cumulative difference|.
double wasserstein_1d(const std::vector<double>& u, const std::vector<double>& v);

struct EmdResult {
  double distance = 0;
  EmdFlag flag = EmdFlag::None;
  EmdInput input;
};

/// Earth mover's distance between a predicted and a native interaction histogram. Both empty gives 0;
/// one side empty gives max(B - 1, 1) with OneSideEmpty set.
EmdResult plif_emd(const Fingerprint& u, const Fingerprint& v, EmdMode mode = EmdMode::Normalized);

/// Cohort-normalised matching score 1 - (x - min)/(max - min); all 1.0 when max == min.
/// Throws PreconditionError on an empty cohort or non-finite input.
std::map<std::string, double> plif_wm(const std::map<std::string, double>& emds);

}  // namespace poseval
