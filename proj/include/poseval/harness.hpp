#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poseval/config.hpp"
#include "poseval/plif.hpp"
#include "poseval/structio.hpp"
#include "poseval/validity.hpp"

namespace poseval {

// ---------------------------------------------------------------------------
// Manifest

enum class Mode { Primary, Multi };
std::string_view to_string(Mode m);

/// One predicted pose set: either a protein file plus ligand files, or a single complex PDB
/// whose non-water HETATM residues are the ligands.
struct RunInput {
  std::optional<std::string> protein;
  std::vector<std::string> ligands;
  std::optional<std::string> complex;
};

struct ManifestEntry {
  std::string target_id;
  Mode mode = Mode::Primary;
  std::string ref_protein_path;
  std::vector<std::string> ref_ligand_paths;
  int primary_ligand_index = 0;
  std::vector<RunInput> runs;
  std::optional<std::vector<std::string>> smiles;
  std::optional<double> similarity_score;
  std::optional<std::string> annotation;
  std::optional<std::string> dataset;
  std::size_t line = 0;
};

struct Manifest {
  std::string path;
  std::vector<ManifestEntry> entries;
};

/// JSON-lines, one entry per non-blank line. Relative paths resolve against `base_dir`.
/// Throws SchemaError carrying the line number and field.
Manifest parse_manifest(std::string_view text, const std::string& base_dir);
Manifest load_manifest(const std::string& path);

struct ManifestSummary {
  std::size_t n_single = 0;
  std::size_t n_multi = 0;
  std::size_t n_ligands = 0;  // reference ligand files listed across entries
  std::size_t n_runs = 0;     // largest run count of any entry

  std::string str() const;  // "n=6 single, n=13 multi"
};
ManifestSummary summarize(std::span<const ManifestEntry> entries);

/// Published benchmark sizes keyed by lower-case dataset name.
struct DatasetSize {
  std::size_t single;
  std::size_t multi;
  std::size_t ligands;
};
std::optional<DatasetSize> known_dataset_size(std::string_view dataset);

// ---------------------------------------------------------------------------
// Scores

struct FragmentScore {
  int ref_index = 0;
  std::string ligand_id;
  int pred_index = -1;
  bool excluded = false;
  std::string reason;
  double rmsd = 0;
  double naive_rmsd = 0;
  bool symmetry_truncated = false;
  double centroid_rmsd = 0;
  std::optional<double> lddt_pli;
  bool reassigned = false;
};

struct ComplexScore {
  std::string target_id;
  int run = 1;
  Mode mode = Mode::Primary;
  bool excluded = false;
  std::string reason;
  std::string ligand_layout;
  double chain_identity = 0;
  double pocket_rmsd = 0;
  std::size_t pocket_atoms = 0;
  std::vector<FragmentScore> fragments;
  std::optional<ValidityReport> validity;
  Fingerprint pred_fingerprint;
  Fingerprint ref_fingerprint;
  std::optional<EmdResult> emd;
  std::optional<double> similarity_score;
  std::optional<std::string> annotation;

  bool pb_valid() const { return validity && validity->overall; }
};

/// Scores run `run` (0-based) of `entry`. Never throws for data problems: they become exclusions.
ComplexScore evaluate_entry(const ManifestEntry& entry, std::size_t run, const EvalConfig& cfg);

/// All (entry, run) pairs, optionally restricted to one mode, in manifest order. `workers` threads.
std::vector<ComplexScore> evaluate_manifest(const Manifest& m, const EvalConfig& cfg, int workers,
                                            std::optional<Mode> only = std::nullopt);

/// POSEVAL_WORKERS if set and positive, else the OpenMP default.
int default_workers();

nlohmann::json to_json(const ComplexScore& s, const EvalConfig& cfg);
/// Reads back the fields aggregation and the analysis commands need.
ComplexScore complex_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Aggregation

struct RunAggregate {
  std::string metric;
  double mean = 0;
  double std = 0;
  std::size_t n_runs = 0;
  std::size_t n_scored = 0;    // summed over runs
  std::size_t n_excluded = 0;  // summed over runs
};

inline constexpr const char* kRmsdSuccess = "rmsd_le_2";
inline constexpr const char* kCentroidSuccess = "centroid_le_1";
inline constexpr const char* kRmsdAndValid = "rmsd_le_2_and_pb_valid";
inline constexpr const char* kPbValid = "pb_valid";
inline constexpr const char* kEmdMean = "plif_emd_mean";
inline constexpr const char* kLddtPliMean = "lddt_pli_mean";

/// Per-run rates over non-excluded complexes, then mean and sample standard deviation across runs.
/// Multi-ligand complexes contribute one RMSD outcome per scored fragment and one validity outcome per complex.
/// Throws PreconditionError when some run has no scoreable complex.
std::vector<RunAggregate> aggregate(std::span<const ComplexScore> scores, const SuccessCriteria& criteria);

/// Sample mean and standard deviation (n - 1 denominator, 0 for a single value).
std::pair<double, double> mean_std(std::span<const double> values);

// ---------------------------------------------------------------------------
// Analysis

struct Correlation {
  double pearson_r = 0;
  double pearson_p = 1;
  double spearman_rho = 0;
  double spearman_p = 1;
  std::size_t permutations = 0;  // 0: t-distribution p-values
};

/// Pearson and Spearman (average ranks for ties) with two-sided p-values from the t approximation with
/// n - 2 degrees of freedom, or from `permutations` seeded shuffles of y when non-zero.
Correlation correlate(std::span<const double> x, std::span<const double> y, std::size_t permutations = 0,
                      std::uint64_t seed = 20240601);

std::vector<double> average_ranks(std::span<const double> v);
double pearson(std::span<const double> x, std::span<const double> y);

struct SiteGroup {
  std::vector<int> ligands;
  Vec3 center = Vec3::Zero();
  double box_size = 25.0;
  std::size_t n_pocket_residues = 0;
};

/// Ligands sharing any heavy-atom pair within `link_distance` belong to one site (transitively). Each site is
/// boxed at the centroid of its pocket residues' heavy atoms, or at the ligand centroid when no residue is near.
std::vector<SiteGroup> group_ligand_sites(std::span<const Points> ligands, const Structure& protein,
                                          double link_distance = 25.0, double pocket_cutoff = kDefaultPocketCutoff,
                                          double box_size = 25.0);

/// Whether one complex run meets RMSD <= cutoff (all scored fragments) and, if required, PB-Valid.
bool complex_success(const ComplexScore& s, const SuccessCriteria& c);

/// target -> keyword from a two-column TSV; '#' lines and blank lines are skipped.
std::map<std::string, std::string> load_annotations(const std::string& path);

/// Keyword counts over targets that succeeded in no run of any listed method (a target missing from a
/// method counts as failed there). Missing keywords are counted as "UNANNOTATED".
std::map<std::string, long> annotate_failures(const std::map<std::string, std::vector<ComplexScore>>& by_method,
                                              const std::map<std::string, std::string>& annotations,
                                              const SuccessCriteria& criteria);

struct TypeDistribution {
  InteractionType type;
  std::size_t n = 0;
  double mean = 0, min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::map<long, long> histogram;  // count per complex -> number of complexes
};

/// Per interaction type, the distribution of per-complex record counts. Every type is always listed.
std::vector<TypeDistribution> interaction_distribution(std::span<const Fingerprint> fingerprints);

/// Linear-interpolation quantile of sorted data.
double quantile(std::span<const double> sorted, double q);

// ---------------------------------------------------------------------------
// Reports

struct ReportLabels {
  std::string method = "method";
  std::string dataset = "dataset";
};

std::string aggregate_csv(std::span<const RunAggregate> rows, const ReportLabels& labels);
nlohmann::json aggregate_json(std::span<const RunAggregate> rows, const ReportLabels& labels,
                              const ManifestSummary& summary);

/// complexes/<target>__run<k>.json, aggregate.csv, aggregate.json and config.json under `out_dir`.
/// Throws Error on any I/O failure.
void write_score_outputs(const std::string& out_dir, std::span<const ComplexScore> scores, const EvalConfig& cfg,
                         const ReportLabels& labels, const ManifestSummary& summary);

struct ScoreDir {
  ReportLabels labels;
  std::vector<ComplexScore> scores;
};
ScoreDir load_score_dir(const std::string& dir);

/// Pretty JSON with sorted keys and a trailing newline.
std::string dump_json(const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace poseval
