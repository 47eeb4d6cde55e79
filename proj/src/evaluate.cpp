#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>

#include <omp.h>

#include "poseval/assignment.hpp"
#include "poseval/error.hpp"
#include "poseval/harness.hpp"
#include "poseval/metrics.hpp"
#include "poseval/molgraph.hpp"

namespace poseval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Excluded {
  std::string reason;
};

template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Excluded&) {
    throw;
  } catch (const std::exception& e) {
    throw Excluded{std::string(name) + ": " + e.what()};
  }
}

std::string checked_text(const std::string& path) {
  if (!fs::exists(path)) throw Excluded{"input missing: " + path};
  return read_text_file(path);
}

bool is_polymer_hetero(std::string_view residue_name) { return residue_name == "MSE"; }

/// Non-water HETATM residues of `s` become perceived ligand graphs; everything else stays protein.
void split_complex(const Structure& s, double tolerance, Structure& protein, std::vector<MoleculeGraph>& ligands) {
  protein.title = s.title;
  std::vector<ResidueKey> order;
  std::map<ResidueKey, std::vector<Atom>> groups;
  for (const auto& a : s.atoms) {
    if (!a.is_hetero || is_water(a.residue_name) || is_polymer_hetero(a.residue_name)) {
      protein.atoms.push_back(a);
      continue;
    }
    auto [it, fresh] = groups.try_emplace(a.residue());
    if (fresh) order.push_back(a.residue());
    it->second.push_back(a);
  }
  for (const auto& key : order) {
    auto g = perceive_bonds(groups[key], tolerance);
    g.name = groups[key].front().residue_name + "_" + key.str();
    ligands.push_back(std::move(g));
  }
  if (protein.atoms.empty()) throw EmptyStructureError("complex has no protein atoms");
}

/// SDF records without a bond block get bonds perceived from coordinates.
MoleculeGraph with_bonds(MoleculeGraph g, double tolerance) {
  if (!g.edges.empty() || g.nodes.size() < 2) return g;
  std::vector<Atom> atoms(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    atoms[i].element = g.nodes[i].element;
    atoms[i].formal_charge = g.nodes[i].formal_charge;
    atoms[i].coords = (*g.coords)[i];
  }
  auto out = perceive_bonds(atoms, tolerance);
  out.name = g.name;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) out.nodes[i].formal_charge = g.nodes[i].formal_charge;
  return out;
}

std::vector<MoleculeGraph> load_ligands(const std::vector<std::string>& paths, double tolerance, std::string& layout) {
  std::vector<MoleculeGraph> out;
  layout = paths.size() > 1 ? "per_fragment" : "single_file";
  for (const auto& p : paths) {
    const auto text = checked_text(p);
    std::vector<MoleculeGraph> recs;
    if (fs::path(p).extension() == ".pdb") {
      Structure unused;
      const auto s = parse_pdb(text);
      for (const auto& a : s.atoms) {
        if (a.is_hetero) continue;
        throw ParseError("ligand PDB '" + p + "' contains ATOM records");
      }
      split_complex(s, tolerance, unused, recs);
    } else {
      for (auto& g : parse_sdf(text)) recs.push_back(with_bonds(std::move(g), tolerance));
    }
    if (recs.size() > 1) layout = "multi_record";
    for (auto& g : recs) out.push_back(std::move(g));
  }
  return out;
}

std::string ligand_id(int ref_index) { return "L" + std::to_string(ref_index); }

/// One reference ligand scored against one predicted fragment.
struct PairEval {
  FragmentScore score;
  Points pred_in_ref_order;  // predicted heavy atoms, predicted frame, reference heavy order
};

class Evaluator {
public:
  Evaluator(const ManifestEntry& e, std::size_t run, const EvalConfig& cfg) : entry_(e), run_(run), cfg_(cfg) {}

  ComplexScore run() {
    ComplexScore out;
    out.target_id = entry_.target_id;
    out.run = static_cast<int>(run_) + 1;
    out.mode = entry_.mode;
    out.similarity_score = entry_.similarity_score;
    out.annotation = entry_.annotation;
    try {
      evaluate(out);
    } catch (const Excluded& x) {
      out.excluded = true;
      out.reason = x.reason;
    } catch (const std::exception& x) {
      out.excluded = true;
      out.reason = std::string("internal: ") + x.what();
    }
    return out;
  }

private:
  void load() {
    stage("parse", [&] {
      ref_protein_ = parse_pdb(checked_text(entry_.ref_protein_path));
      std::string ref_layout;
      ref_ligands_ = load_ligands(entry_.ref_ligand_paths, cfg_.bond_tolerance, ref_layout);
      for (const auto& g : ref_ligands_)
        if (g.heavy_indices().empty()) throw PreconditionError("reference ligand '" + g.name + "' has no heavy atoms");
      const auto& in = entry_.runs.at(run_);
      if (in.complex) {
        split_complex(parse_pdb(checked_text(*in.complex)), cfg_.bond_tolerance, pred_protein_, pred_ligands_);
        layout_ = "complex_pdb";
      } else {
        pred_protein_ = parse_pdb(checked_text(*in.protein));
        pred_ligands_ = load_ligands(in.ligands, cfg_.bond_tolerance, layout_);
      }
      if (pred_ligands_.empty()) throw PreconditionError("prediction contains no ligand");
      if (entry_.smiles) {
        if (entry_.smiles->size() != ref_ligands_.size())
          throw PreconditionError("smiles lists " + std::to_string(entry_.smiles->size()) + " fragments for " +
                                  std::to_string(ref_ligands_.size()) + " reference ligands");
        for (const auto& s : *entry_.smiles) templates_.push_back(parse_smiles(s));
      }
      return 0;
    });
  }

  void prepare_frame() {
    chains_ = stage("chain mapping", [&] {
      auto m = map_chains(pred_protein_, ref_protein_);
      if (m.pairs.empty()) throw MappingError("no predicted chain matches a reference chain");
      return m;
    });
    pocket_ = stage("pocket selection", [&] {
      std::vector<Points> heavy;
      for (const auto& g : ref_ligands_) heavy.push_back(g.heavy_coords());
      return select_pocket(ref_protein_, heavy, cfg_.pocket_cutoff);
    });
    alignment_ = stage("pocket alignment", [&] { return align_pocket(pred_protein_, ref_protein_, pocket_, chains_); });
    for (const auto& g : pred_ligands_) {
      auto moved = g;
      alignment_.transform.apply_in_place(*moved.coords);
      aligned_ligands_.push_back(std::move(moved));
    }
  }

  /// nullopt when the fragment is not the reference ligand's molecule.
  std::optional<PairEval> try_pair(int k, int p) {
    const auto& ref = ref_ligands_[k];
    const auto& pred = aligned_ligands_[p];
    AtomMapping mapping;
    try {
      if (!templates_.empty()) {
        (void)match_template(templates_[k], pred);
        (void)match_template(templates_[k], ref);
      }
      mapping = match_template(ref, pred);
    } catch (const MappingError&) {
      return std::nullopt;
    } catch (const PreconditionError&) {
      return std::nullopt;
    } catch (const ResourceError&) {
      return std::nullopt;
    }
    PairEval out;
    auto& s = out.score;
    s.ref_index = k;
    s.ligand_id = ligand_id(k);
    s.pred_index = p;
    const auto sym = stage("rmsd", [&] {
      return rmsd_symmetry_corrected(pred, ref, mapping, cfg_.automorphism_cap, cfg_.pre_align_ligand);
    });
    s.rmsd = sym.rmsd;
    s.naive_rmsd = sym.naive_rmsd;
    s.symmetry_truncated = sym.truncated;
    s.centroid_rmsd = centroid_rmsd(pred.heavy_coords(), ref.heavy_coords());

    const auto fwd = mapping.forward(ref.size());
    const auto heavy = ref.heavy_indices();
    const auto& orig = *pred_ligands_[p].coords;
    out.pred_in_ref_order.resize(heavy.size());
    for (std::size_t i = 0; i < heavy.size(); ++i) out.pred_in_ref_order[sym.best_perm[i]] = orig[fwd[heavy[i]]];
    return out;
  }

  void score_pli(PairEval& pe) {
    const auto ref_h = ref_ligands_[pe.score.ref_index].heavy_coords();
    pe.score.lddt_pli = stage("lddt_pli", [&] {
      return lddt_pli(pred_protein_, pe.pred_in_ref_order, ref_protein_, ref_h, pocket_, chains_,
                      alignment_.transform, cfg_.lddt_pli);
    }).score;
  }

  void evaluate(ComplexScore& out) {
    load();
    out.ligand_layout = layout_;
    prepare_frame();
    out.chain_identity = chains_.score;
    out.pocket_rmsd = alignment_.rmsd;
    out.pocket_atoms = alignment_.n_atoms;

    const int n_ref = static_cast<int>(ref_ligands_.size());
    const int n_pred = static_cast<int>(pred_ligands_.size());
    std::vector<PairEval> chosen;

    if (entry_.mode == Mode::Primary) {
      const int k = entry_.primary_ligand_index;
      if (k >= n_ref) throw Excluded{"primary_ligand_index " + std::to_string(k) + " out of range"};
      std::vector<int> order;
      if (k < n_pred) order.push_back(k);
      for (int p = 0; p < n_pred; ++p)
        if (p != k) order.push_back(p);
      for (int p : order)
        if (auto pe = try_pair(k, p)) {
          chosen.push_back(std::move(*pe));
          break;
        }
      if (chosen.empty()) throw Excluded{"template mapping failed"};
    } else {
      std::vector<std::vector<std::optional<PairEval>>> table(n_ref);
      constexpr double kNoMatch = 1e9;
      CostMatrix cost(n_ref, std::vector<double>(n_pred, kNoMatch));
      for (int k = 0; k < n_ref; ++k)
        for (int p = 0; p < n_pred; ++p) {
          table[k].push_back(try_pair(k, p));
          if (table[k][p]) cost[k][p] = table[k][p]->score.rmsd;
        }
      const auto assign = solve_assignment(cost);
      for (int k = 0; k < n_ref; ++k) {
        const int p = assign.row_to_col[k];
        if (p < 0 || !table[k][p]) {
          FragmentScore miss;
          miss.ref_index = k;
          miss.ligand_id = ligand_id(k);
          miss.excluded = true;
          miss.reason = "template mapping failed";
          out.fragments.push_back(miss);
          continue;
        }
        auto pe = std::move(*table[k][p]);
        pe.score.reassigned = p != k;
        chosen.push_back(std::move(pe));
      }
      if (chosen.empty()) throw Excluded{"template mapping failed"};
    }

    std::vector<MoleculeGraph> scored_preds;
    for (auto& pe : chosen) {
      score_pli(pe);
      scored_preds.push_back(pred_ligands_[pe.score.pred_index]);
    }

    out.validity = pb_valid(pred_protein_, scored_preds, cfg_.validity);

    stage("interactions", [&] {
      if (entry_.mode == Mode::Primary) {
        const int k = chosen.front().score.ref_index;
        out.ref_fingerprint = fingerprint(detect_interactions(ref_protein_, ref_ligands_[k], ligand_id(k), cfg_.interactions));
      } else {
        for (int k = 0; k < n_ref; ++k)
          out.ref_fingerprint.merge(
              fingerprint(detect_interactions(ref_protein_, ref_ligands_[k], ligand_id(k), cfg_.interactions)));
      }
      for (const auto& pe : chosen)
        out.pred_fingerprint.merge(fingerprint(detect_interactions(
            pred_protein_, pred_ligands_[pe.score.pred_index], pe.score.ligand_id, cfg_.interactions)));
      return 0;
    });
    out.emd = plif_emd(out.pred_fingerprint, out.ref_fingerprint, cfg_.emd_mode);

    for (auto& pe : chosen) out.fragments.push_back(std::move(pe.score));
    std::sort(out.fragments.begin(), out.fragments.end(),
              [](const FragmentScore& a, const FragmentScore& b) { return a.ref_index < b.ref_index; });
  }

  const ManifestEntry& entry_;
  std::size_t run_;
  const EvalConfig& cfg_;
  Structure ref_protein_, pred_protein_;
  std::vector<MoleculeGraph> ref_ligands_, pred_ligands_, aligned_ligands_, templates_;
  std::string layout_;
  ChainMap chains_;
  PocketSelection pocket_;
  PocketAlignment alignment_;
};

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

ComplexScore evaluate_entry(const ManifestEntry& entry, std::size_t run, const EvalConfig& cfg) {
  if (run >= entry.runs.size()) throw PreconditionError("run index out of range for " + entry.target_id);
  return Evaluator(entry, run, cfg).run();
}

std::vector<ComplexScore> evaluate_manifest(const Manifest& m, const EvalConfig& cfg, int workers,
                                            std::optional<Mode> only) {
  std::vector<std::pair<const ManifestEntry*, std::size_t>> tasks;
  for (const auto& e : m.entries) {
    if (only && e.mode != *only) continue;
    for (std::size_t r = 0; r < e.runs.size(); ++r) tasks.emplace_back(&e, r);
  }
  std::vector<ComplexScore> out(tasks.size());
  const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (long i = 0; i < n; ++i) out[i] = evaluate_entry(*tasks[i].first, tasks[i].second, cfg);
  return out;
}

int default_workers() {
  if (const char* env = std::getenv("POSEVAL_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return omp_get_max_threads();
}

json to_json(const ComplexScore& s, const EvalConfig& cfg) {
  json frags = json::array();
  for (const auto& f : s.fragments) {
    frags.push_back({{"ref_index", f.ref_index},
                     {"ligand_id", f.ligand_id},
                     {"pred_index", f.pred_index},
                     {"excluded", f.excluded},
                     {"reason", f.reason},
                     {"rmsd", f.rmsd},
                     {"naive_rmsd", f.naive_rmsd},
                     {"symmetry_truncated", f.symmetry_truncated},
                     {"centroid_rmsd", f.centroid_rmsd},
                     {"lddt_pli", opt_json(f.lddt_pli)},
                     {"reassigned", f.reassigned}});
  }
  json emd = nullptr;
  if (s.emd) {
    std::vector<std::string> bins;
    for (const auto& k : s.emd->input.bin_order) bins.push_back(k.str());
    emd = {{"distance", s.emd->distance},
           {"flag", std::string(to_string(s.emd->flag))},
           {"bin_order", bins},
           {"predicted_weights", s.emd->input.u_weights},
           {"reference_weights", s.emd->input.v_weights}};
  }
  json j{{"target_id", s.target_id},
         {"run", s.run},
         {"mode", std::string(to_string(s.mode))},
         {"excluded", s.excluded},
         {"reason", s.reason},
         {"ligand_layout", s.ligand_layout},
         {"chain_identity", s.chain_identity},
         {"pocket", {{"rmsd", s.pocket_rmsd}, {"n_atoms", s.pocket_atoms}}},
         {"fragments", frags},
         {"validity", s.validity ? to_json(*s.validity) : json(nullptr)},
         {"fingerprints", {{"predicted", to_json(s.pred_fingerprint)}, {"reference", to_json(s.ref_fingerprint)}}},
         {"plif_emd", emd},
         {"similarity_score", opt_json(s.similarity_score)},
         {"annotation", s.annotation ? json(*s.annotation) : json(nullptr)},
         {"config", to_json(cfg)}};
  if (!s.excluded) {
    j["success"] = {{"complex", complex_success(s, cfg.criteria)}};
  }
  return j;
}

ComplexScore complex_from_json(const json& j) {
  try {
    ComplexScore s;
    s.target_id = j.at("target_id").get<std::string>();
    s.run = j.at("run").get<int>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "primary" && mode != "multi") throw ParseError("unknown mode '" + mode + "'");
    s.mode = mode == "primary" ? Mode::Primary : Mode::Multi;
    s.excluded = j.at("excluded").get<bool>();
    s.reason = j.value("reason", "");
    s.ligand_layout = j.value("ligand_layout", "");
    s.chain_identity = j.value("chain_identity", 0.0);
    if (j.contains("pocket")) {
      s.pocket_rmsd = j["pocket"].value("rmsd", 0.0);
      s.pocket_atoms = j["pocket"].value("n_atoms", std::size_t{0});
    }
    for (const auto& f : j.at("fragments")) {
      FragmentScore x;
      x.ref_index = f.at("ref_index").get<int>();
      x.ligand_id = f.value("ligand_id", "");
      x.pred_index = f.value("pred_index", -1);
      x.excluded = f.at("excluded").get<bool>();
      x.reason = f.value("reason", "");
      x.rmsd = f.at("rmsd").get<double>();
      x.naive_rmsd = f.value("naive_rmsd", x.rmsd);
      x.symmetry_truncated = f.value("symmetry_truncated", false);
      x.centroid_rmsd = f.at("centroid_rmsd").get<double>();
      if (f.contains("lddt_pli") && f["lddt_pli"].is_number()) x.lddt_pli = f["lddt_pli"].get<double>();
      x.reassigned = f.value("reassigned", false);
      s.fragments.push_back(std::move(x));
    }
    if (j.contains("validity") && j["validity"].is_object()) {
      ValidityReport v;
      v.overall = j["validity"].at("overall").get<bool>();
      v.enabled = j["validity"].value("enabled", std::vector<std::string>{});
      v.disabled = j["validity"].value("disabled", std::vector<std::string>{});
      const json checks = j["validity"].value("checks", json::object());
      for (const auto& [name, c] : checks.items()) {
        CheckResult r;
        r.passed = c.at("passed").get<bool>();
        r.detail = c.value("detail", "");
        if (c.contains("error") && c["error"].is_string()) r.error = c["error"].get<std::string>();
        v.per_check[name] = r;
      }
      s.validity = std::move(v);
    }
    if (j.contains("fingerprints")) {
      s.pred_fingerprint = fingerprint_from_json(j["fingerprints"].at("predicted"));
      s.ref_fingerprint = fingerprint_from_json(j["fingerprints"].at("reference"));
    }
    if (j.contains("plif_emd") && j["plif_emd"].is_object()) {
      EmdResult e;
      e.distance = j["plif_emd"].at("distance").get<double>();
      const auto flag = j["plif_emd"].value("flag", "none");
      e.flag = flag == to_string(EmdFlag::BothEmpty)      ? EmdFlag::BothEmpty
               : flag == to_string(EmdFlag::OneSideEmpty) ? EmdFlag::OneSideEmpty
                                                          : EmdFlag::None;
      s.emd = std::move(e);
    }
    if (j.contains("similarity_score") && j["similarity_score"].is_number())
      s.similarity_score = j["similarity_score"].get<double>();
    if (j.contains("annotation") && j["annotation"].is_string()) s.annotation = j["annotation"].get<std::string>();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("complex score JSON: ") + e.what());
  }
}

}  // namespace poseval
