#include "poseval/config.hpp"

#include "poseval/error.hpp"

namespace poseval {

using nlohmann::json;

void SuccessCriteria::validate() const {
  if (!(rmsd_cutoff > 0) || !(centroid_cutoff > 0)) throw PreconditionError("success cutoffs must be positive");
}

void EvalConfig::validate() const {
  criteria.validate();
  lddt_pli.validate();
  if (!(pocket_cutoff > 0)) throw PreconditionError("pocket_cutoff must be positive");
  if (bond_tolerance < 0) throw PreconditionError("bond_tolerance must be non-negative");
  if (automorphism_cap == 0) throw PreconditionError("automorphism_cap must be at least 1");
}

json to_json(const EvalConfig& c) {
  const auto& v = c.validity;
  const auto& ip = c.interactions;
  return {
      {"success", {{"rmsd_cutoff", c.criteria.rmsd_cutoff},
                   {"centroid_cutoff", c.criteria.centroid_cutoff},
                   {"require_pb_valid", c.criteria.require_pb_valid}}},
      {"lddt_pli", {{"inclusion_radius", c.lddt_pli.inclusion_radius},
                    {"thresholds", c.lddt_pli.thresholds},
                    {"exclude_same_residue", c.lddt_pli.exclude_same_residue}}},
      {"pocket_cutoff", c.pocket_cutoff},
      {"validity", {{"bond_length_tolerance", v.bond_length_tolerance},
                    {"internal_clash_ratio", v.internal_clash_ratio},
                    {"cross_clash_ratio", v.cross_clash_ratio},
                    {"aromatic_planarity", v.aromatic_planarity},
                    {"aliphatic_flatness", v.aliphatic_flatness}}},
      {"interactions", {{"hbond_distance", ip.hbond_distance},
                        {"hbond_min_angle", ip.hbond_min_angle},
                        {"hydrophobic_distance", ip.hydrophobic_distance},
                        {"vdw_tolerance", ip.vdw_tolerance},
                        {"salt_bridge_distance", ip.salt_bridge_distance},
                        {"pi_stacking_distance", ip.pi_stacking_distance},
                        {"pi_parallel_max_angle", ip.pi_parallel_max_angle},
                        {"pi_tshaped_min_angle", ip.pi_tshaped_min_angle},
                        {"pi_cation_distance", ip.pi_cation_distance},
                        {"metal_distance", ip.metal_distance}}},
      {"bond_tolerance", c.bond_tolerance},
      {"automorphism_cap", c.automorphism_cap},
      {"pre_align_ligand", c.pre_align_ligand},
      {"emd_mode", c.emd_mode == EmdMode::Normalized ? "normalized" : "raw_counts"},
  };
}

namespace {

template <class T>
void take(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError("wrong type", 0, path + key);
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
  if (!obj.is_object()) throw SchemaError("expected an object", 0, path.empty() ? "<root>" : path);
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (const char* n : known) ok = ok || k == n;
    if (!ok) throw SchemaError("unknown key", 0, path + k);
  }
}

}  // namespace

EvalConfig config_from_json(const json& j) {
  EvalConfig c;
  reject_unknown(j, {"success", "lddt_pli", "pocket_cutoff", "validity", "interactions", "bond_tolerance",
                     "automorphism_cap", "pre_align_ligand", "emd_mode"}, "");
  if (j.contains("success")) {
    const auto& s = j["success"];
    reject_unknown(s, {"rmsd_cutoff", "centroid_cutoff", "require_pb_valid"}, "success.");
    take(s, "rmsd_cutoff", c.criteria.rmsd_cutoff, "success.");
    take(s, "centroid_cutoff", c.criteria.centroid_cutoff, "success.");
    take(s, "require_pb_valid", c.criteria.require_pb_valid, "success.");
  }
  if (j.contains("lddt_pli")) {
    const auto& s = j["lddt_pli"];
    reject_unknown(s, {"inclusion_radius", "thresholds", "exclude_same_residue"}, "lddt_pli.");
    take(s, "inclusion_radius", c.lddt_pli.inclusion_radius, "lddt_pli.");
    take(s, "thresholds", c.lddt_pli.thresholds, "lddt_pli.");
    take(s, "exclude_same_residue", c.lddt_pli.exclude_same_residue, "lddt_pli.");
  }
  take(j, "pocket_cutoff", c.pocket_cutoff, "");
  if (j.contains("validity")) {
    const auto& s = j["validity"];
    auto& v = c.validity;
    reject_unknown(s, {"bond_length_tolerance", "internal_clash_ratio", "cross_clash_ratio", "aromatic_planarity",
                       "aliphatic_flatness"}, "validity.");
    take(s, "bond_length_tolerance", v.bond_length_tolerance, "validity.");
    take(s, "internal_clash_ratio", v.internal_clash_ratio, "validity.");
    take(s, "cross_clash_ratio", v.cross_clash_ratio, "validity.");
    take(s, "aromatic_planarity", v.aromatic_planarity, "validity.");
    take(s, "aliphatic_flatness", v.aliphatic_flatness, "validity.");
  }
  if (j.contains("interactions")) {
    const auto& s = j["interactions"];
    auto& ip = c.interactions;
    reject_unknown(s, {"hbond_distance", "hbond_min_angle", "hydrophobic_distance", "vdw_tolerance",
                       "salt_bridge_distance", "pi_stacking_distance", "pi_parallel_max_angle",
                       "pi_tshaped_min_angle", "pi_cation_distance", "metal_distance"}, "interactions.");
    take(s, "hbond_distance", ip.hbond_distance, "interactions.");
    take(s, "hbond_min_angle", ip.hbond_min_angle, "interactions.");
    take(s, "hydrophobic_distance", ip.hydrophobic_distance, "interactions.");
    take(s, "vdw_tolerance", ip.vdw_tolerance, "interactions.");
    take(s, "salt_bridge_distance", ip.salt_bridge_distance, "interactions.");
    take(s, "pi_stacking_distance", ip.pi_stacking_distance, "interactions.");
    take(s, "pi_parallel_max_angle", ip.pi_parallel_max_angle, "interactions.");
    take(s, "pi_tshaped_min_angle", ip.pi_tshaped_min_angle, "interactions.");
    take(s, "pi_cation_distance", ip.pi_cation_distance, "interactions.");
    take(s, "metal_distance", ip.metal_distance, "interactions.");
  }
  take(j, "bond_tolerance", c.bond_tolerance, "");
  take(j, "automorphism_cap", c.automorphism_cap, "");
  take(j, "pre_align_ligand", c.pre_align_ligand, "");
  if (j.contains("emd_mode")) {
    std::string m;
    take(j, "emd_mode", m, "");
    if (m == "normalized") c.emd_mode = EmdMode::Normalized;
    else if (m == "raw_counts") c.emd_mode = EmdMode::RawCounts;
    else throw SchemaError("expected normalized or raw_counts", 0, "emd_mode");
  }
  c.validate();
  return c;
}

EvalConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what(), 0, "<root>");
  }
  return config_from_json(j);
}

}  // namespace poseval
