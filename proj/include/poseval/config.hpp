#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "poseval/metrics.hpp"
#include "poseval/molgraph.hpp"
#include "poseval/plif.hpp"
#include "poseval/validity.hpp"

namespace poseval {

struct SuccessCriteria {
  double rmsd_cutoff = 2.0;
  double centroid_cutoff = 1.0;
  bool require_pb_valid = true;

  void validate() const;
};

/// Every tunable of an evaluation run. Written verbatim into each output as the config echo.
struct EvalConfig {
  SuccessCriteria criteria;
  LddtParams lddt_pli = lddt_pli_defaults();
  double pocket_cutoff = kDefaultPocketCutoff;
  ValidityThresholds validity;
  InteractionParams interactions;
  double bond_tolerance = kDefaultBondTolerance;
  std::size_t automorphism_cap = kDefaultAutomorphismCap;
  bool pre_align_ligand = false;
  EmdMode emd_mode = EmdMode::Normalized;

  void validate() const;
};

nlohmann::json to_json(const EvalConfig& c);
/// Overrides defaults with whatever keys `j` provides; unknown keys raise SchemaError.
EvalConfig config_from_json(const nlohmann::json& j);
EvalConfig load_config(const std::string& path);

}  // namespace poseval
