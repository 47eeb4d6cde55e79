#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "poseval/error.hpp"
#include "poseval/harness.hpp"

namespace poseval::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  int workers = 0;
  std::string config_path;
  std::string out_dir = "poseval_out";

  std::string manifest;
  std::string method = "method";
  std::string dataset;
  bool pre_align = false;
  bool raw_count_emd = false;

  std::vector<std::string> dirs;
  std::string wm_granularity = "mean-emd";
  bool per_complex_wm = false;

  std::string protein;
  std::vector<std::string> ligands;

  std::string table;
  std::string x_column, y_column;
  bool permutation_p = false;
  std::size_t permutations = 10000;
  std::uint64_t seed = 20240601;

  std::string annotations;
  std::string only_method;
  bool include_reference = false;
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

EvalConfig make_config(const Options& o) {
  EvalConfig c = o.config_path.empty() ? EvalConfig{} : load_config(o.config_path);
  if (o.pre_align) c.pre_align_ligand = true;
  if (o.raw_count_emd) c.emd_mode = EmdMode::RawCounts;
  c.validate();
  return c;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_echo(const Options& o, const std::string& command, const json& options) {
  ensure_dir(o.out_dir);
  json j{{"command", command}, {"evaluation", to_json(make_config(o))}, {"options", options}};
  write_text_file((fs::path(o.out_dir) / "config.json").string(), dump_json(j));
}

std::vector<MoleculeGraph> read_ligand_files(const std::vector<std::string>& paths) {
  std::vector<MoleculeGraph> out;
  for (const auto& p : paths) {
    if (fs::path(p).extension() == ".pdb") {
      const auto s = parse_pdb(read_text_file(p));
      std::vector<Atom> atoms(s.atoms.begin(), s.atoms.end());
      auto g = perceive_bonds(atoms);
      g.name = fs::path(p).stem().string();
      out.push_back(std::move(g));
    } else {
      for (auto& g : parse_sdf(read_text_file(p))) out.push_back(std::move(g));
    }
  }
  return out;
}

int cmd_score(const Options& o, std::optional<Mode> mode, std::ostream& out) {
  const auto cfg = make_config(o);
  const auto manifest = load_manifest(o.manifest);
  std::vector<ManifestEntry> selected;
  for (const auto& e : manifest.entries)
    if (!mode || e.mode == *mode) selected.push_back(e);
  const auto summary = summarize(manifest.entries);

  ReportLabels labels;
  labels.method = o.method;
  labels.dataset = o.dataset;
  if (labels.dataset.empty() && manifest.entries.front().dataset) labels.dataset = *manifest.entries.front().dataset;
  if (labels.dataset.empty()) labels.dataset = fs::path(o.manifest).stem().string();

  out << "manifest " << o.manifest << ": " << summary.str() << ", " << summary.n_ligands << " reference ligand files\n";
  if (const auto known = known_dataset_size(labels.dataset)) {
    const bool ok = known->single == summary.n_single && known->multi == summary.n_multi &&
                    known->ligands == summary.n_ligands;
    out << "dataset " << labels.dataset << ": expected n=" << known->single << " single, n=" << known->multi
        << " multi, " << known->ligands << " ligands (" << (ok ? "ok" : "MISMATCH") << ")\n";
  }

  const int workers = o.workers > 0 ? o.workers : default_workers();
  Manifest subset{manifest.path, selected};
  const auto scores = evaluate_manifest(subset, cfg, workers);
  write_score_outputs(o.out_dir, scores, cfg, labels, summary);

  std::size_t excluded = 0;
  for (const auto& s : scores) excluded += s.excluded;
  out << "scored " << scores.size() - excluded << " of " << scores.size() << " complex runs (" << excluded
      << " excluded)\n";
  try {
    for (const auto& r : aggregate(scores, cfg.criteria))
      out << "  " << r.metric << " " << fixed(r.mean) << " +/- " << fixed(r.std) << "\n";
  } catch (const PreconditionError& e) {
    out << "  no aggregate: " << e.what() << "\n";
  }
  out << "wrote " << o.out_dir << "\n";
  return 0;
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ", ") + x;
  return out;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = make_config(o);
  std::vector<std::pair<std::string, ScoreDir>> methods;
  std::set<std::string> names;
  for (const auto& d : o.dirs) {
    auto sd = load_score_dir(d);
    std::string name = sd.labels.method;
    for (int k = 2; names.contains(name); ++k) name = sd.labels.method + "#" + std::to_string(k);
    names.insert(name);
    methods.emplace_back(name, std::move(sd));
  }

  auto targets_of = [](const ScoreDir& sd) {
    std::set<std::string> t;
    for (const auto& s : sd.scores) t.insert(s.target_id);
    return t;
  };
  const auto reference = targets_of(methods.front().second);
  bool mismatch = false;
  for (std::size_t m = 1; m < methods.size(); ++m) {
    const auto t = targets_of(methods[m].second);
    std::set<std::string> missing, extra;
    std::set_difference(reference.begin(), reference.end(), t.begin(), t.end(), std::inserter(missing, missing.end()));
    std::set_difference(t.begin(), t.end(), reference.begin(), reference.end(), std::inserter(extra, extra.end()));
    if (missing.empty() && extra.empty()) continue;
    mismatch = true;
    err << "target sets differ between " << methods.front().first << " and " << methods[m].first;
    if (!missing.empty()) err << "; missing from " << methods[m].first << ": " << join(missing);
    if (!extra.empty()) err << "; only in " << methods[m].first << ": " << join(extra);
    err << "\n";
  }
  if (mismatch) return 1;

  const std::string granularity = o.per_complex_wm ? "per-complex" : o.wm_granularity;
  std::map<std::string, double> mean_emd, wm;
  std::map<std::string, std::map<std::string, std::vector<double>>> per_target;  // method -> target -> emds
  for (const auto& [name, sd] : methods) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& s : sd.scores)
      if (!s.excluded && s.emd) {
        sum += s.emd->distance;
        ++n;
        per_target[name][s.target_id].push_back(s.emd->distance);
      }
    if (n > 0) mean_emd[name] = sum / static_cast<double>(n);
  }
  if (granularity == "mean-emd") {
    if (!mean_emd.empty()) wm = plif_wm(mean_emd);
  } else {
    std::map<std::string, std::vector<double>> collected;
    for (const auto& t : reference) {
      std::map<std::string, double> cohort;
      for (const auto& [name, _] : methods) {
        const auto it = per_target[name].find(t);
        if (it == per_target[name].end()) break;
        cohort[name] = mean_std(it->second).first;
      }
      if (cohort.size() != methods.size()) continue;
      for (const auto& [name, v] : plif_wm(cohort)) collected[name].push_back(v);
    }
    for (const auto& [name, v] : collected) wm[name] = mean_std(v).first;
  }

  json report{{"cohort", json::array()}, {"wm_granularity", granularity}, {"plif_wm", wm}, {"mean_plif_emd", mean_emd}};
  std::string csv = "method,dataset,metric,mean,std,n_runs,n_scored,n_excluded\n";
  json success = json::object();
  out << "cohort (" << methods.size() << " methods, PLIF-WM by " << granularity << ")\n";
  for (const auto& [name, sd] : methods) {
    report["cohort"].push_back({{"method", name}, {"dataset", sd.labels.dataset}});
    std::vector<RunAggregate> rows;
    try {
      rows = aggregate(sd.scores, cfg.criteria);
    } catch (const PreconditionError& e) {
      err << name << ": " << e.what() << "\n";
    }
    if (wm.contains(name)) rows.push_back({"plif_wm", wm[name], 0.0, rows.empty() ? 0 : rows.front().n_runs,
                                           rows.empty() ? 0 : rows.front().n_scored,
                                           rows.empty() ? 0 : rows.front().n_excluded});
    ReportLabels labels{name, sd.labels.dataset};
    const auto block = aggregate_csv(rows, labels);
    csv += block.substr(block.find('\n') + 1);
    success[name] = aggregate_json(rows, labels, {})["metrics"];
    out << "  " << name;
    for (const auto& r : rows) out << "  " << r.metric << "=" << fixed(r.mean);
    out << "\n";
  }
  report["success"] = success;
  ensure_dir(o.out_dir);
  write_text_file((fs::path(o.out_dir) / "compare.json").string(), dump_json(report));
  write_text_file((fs::path(o.out_dir) / "compare.csv").string(), csv);
  write_echo(o, "compare", {{"dirs", o.dirs}, {"wm_granularity", granularity}});
  return 0;
}

int cmd_sites(const Options& o, std::ostream& out) {
  const auto protein = parse_pdb(read_text_file(o.protein));
  const auto ligands = read_ligand_files(o.ligands);
  std::vector<Points> heavy;
  for (const auto& g : ligands) heavy.push_back(g.heavy_coords());
  const auto groups = group_ligand_sites(heavy, protein);
  json sites = json::array();
  for (const auto& g : groups) {
    json names = json::array();
    for (int i : g.ligands) names.push_back(ligands[i].name.empty() ? "ligand" + std::to_string(i) : ligands[i].name);
    sites.push_back({{"ligand_indices", g.ligands},
                     {"ligand_names", names},
                     {"center", {g.center.x(), g.center.y(), g.center.z()}},
                     {"box_size", {g.box_size, g.box_size, g.box_size}},
                     {"n_pocket_residues", g.n_pocket_residues}});
  }
  const json j{{"sites", sites}, {"link_distance", 25.0}, {"pocket_cutoff", kDefaultPocketCutoff}};
  ensure_dir(o.out_dir);
  write_text_file((fs::path(o.out_dir) / "sites.json").string(), dump_json(j));
  write_echo(o, "sites", {{"protein", o.protein}, {"ligands", o.ligands}});
  out << dump_json(j);
  return 0;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int cmd_correlate(const Options& o, std::ostream& out) {
  std::istringstream in(read_text_file(o.table));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  auto column = [&](const std::string& name, std::size_t fallback) {
    if (name.empty()) {
      if (fallback >= header.size()) throw ParseError("table needs at least two columns", 1);
      return fallback;
    }
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("no column '" + name + "'", 1);
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto xi = column(o.x_column, 0), yi = column(o.y_column, 1);
  std::vector<double> x, y;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() <= std::max(xi, yi)) throw ParseError("too few fields", line_no);
    try {
      std::size_t px = 0, py = 0;
      x.push_back(std::stod(f[xi], &px));
      y.push_back(std::stod(f[yi], &py));
      if (px != f[xi].size() || py != f[yi].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ParseError("non-numeric value", line_no);
    }
  }
  const auto c = correlate(x, y, o.permutation_p ? o.permutations : 0, o.seed);
  const json j{{"n", x.size()},
               {"pearson_r", c.pearson_r},
               {"pearson_p", c.pearson_p},
               {"spearman_rho", c.spearman_rho},
               {"spearman_p", c.spearman_p},
               {"p_method", c.permutations ? "permutation" : "t_approximation"},
               {"permutations", c.permutations},
               {"seed", c.permutations ? json(o.seed) : json(nullptr)}};
  ensure_dir(o.out_dir);
  write_text_file((fs::path(o.out_dir) / "correlation.json").string(), dump_json(j));
  write_echo(o, "correlate", {{"table", o.table}, {"permutation_p", o.permutation_p}});
  out << dump_json(j);
  return 0;
}

int cmd_annotate(const Options& o, std::ostream& out) {
  const auto cfg = make_config(o);
  std::map<std::string, std::vector<ComplexScore>> by_method;
  for (const auto& d : o.dirs) {
    auto sd = load_score_dir(d);
    if (!o.only_method.empty() && sd.labels.method != o.only_method) continue;
    auto& v = by_method[sd.labels.method];
    v.insert(v.end(), sd.scores.begin(), sd.scores.end());
  }
  if (by_method.empty()) throw Error("no score directory matches method '" + o.only_method + "'");
  const auto annotations = o.annotations.empty() ? std::map<std::string, std::string>{} : load_annotations(o.annotations);
  const auto hist = annotate_failures(by_method, annotations, cfg.criteria);
  json methods = json::array();
  for (const auto& [m, _] : by_method) methods.push_back(m);
  const json j{{"methods", methods}, {"histogram", hist}};
  ensure_dir(o.out_dir);
  write_text_file((fs::path(o.out_dir) / "annotations.json").string(), dump_json(j));
  write_echo(o, "annotate", {{"dirs", o.dirs}, {"annotations", o.annotations}, {"method", o.only_method}});
  out << dump_json(j);
  return 0;
}

int cmd_interactions(const Options& o, std::ostream& out) {
  std::string summary = "dataset,method,interaction_type,n,mean,min,q1,median,q3,max\n";
  std::string histogram = "dataset,method,interaction_type,count,n_complexes\n";
  auto emit = [&](const std::string& dataset, const std::string& method, const std::vector<Fingerprint>& fps) {
    for (const auto& d : interaction_distribution(fps)) {
      const std::string type(to_string(d.type));
      char buf[256];
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", d.n, d.mean, d.min, d.q1, d.median,
                    d.q3, d.max);
      summary += dataset + "," + method + "," + type + "," + buf + "\n";
      for (const auto& [count, n] : d.histogram)
        histogram += dataset + "," + method + "," + type + "," + std::to_string(count) + "," + std::to_string(n) + "\n";
    }
  };
  std::set<std::string> reference_done;
  for (const auto& d : o.dirs) {
    const auto sd = load_score_dir(d);
    std::vector<Fingerprint> pred, ref;
    for (const auto& s : sd.scores) {
      if (s.excluded) continue;
      pred.push_back(s.pred_fingerprint);
      if (s.run == 1) ref.push_back(s.ref_fingerprint);
    }
    emit(sd.labels.dataset, sd.labels.method, pred);
    if (o.include_reference && reference_done.insert(sd.labels.dataset).second)
      emit(sd.labels.dataset, "reference", ref);
  }
  ensure_dir(o.out_dir);
  write_text_file((fs::path(o.out_dir) / "interactions_summary.csv").string(), summary);
  write_text_file((fs::path(o.out_dir) / "interactions_histogram.csv").string(), histogram);
  write_echo(o, "interactions", {{"dirs", o.dirs}, {"reference", o.include_reference}});
  out << summary;
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const auto cfg = make_config(o);
  const auto protein = parse_pdb(read_text_file(o.protein));
  const auto ligands = read_ligand_files(o.ligands);
  const auto report = pb_valid(protein, ligands, cfg.validity);
  const auto j = to_json(report);
  ensure_dir(o.out_dir);
  write_text_file((fs::path(o.out_dir) / "validity.json").string(), dump_json(j));
  write_echo(o, "validate", {{"protein", o.protein}, {"ligands", o.ligands}});
  out << dump_json(j);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Protein-ligand pose evaluation: RMSD, lDDT-PLI, PLIF-EMD and validity checks", "poseval"};
  app.set_help_all_flag("--help-all", "Print help for every command");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--workers", o.workers, "Worker threads for scoring (default: POSEVAL_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", o.config_path, "JSON file overriding thresholds")->check(CLI::ExistingFile);
  app.add_option("--out", o.out_dir, "Output directory");

  auto add_score = [&](const char* name, const char* desc) {
    auto* c = app.add_subcommand(name, desc);
    c->add_option("manifest", o.manifest, "JSON-lines manifest")->required();
    c->add_option("--method", o.method, "Method label written to the reports");
    c->add_option("--dataset", o.dataset, "Dataset label (default: manifest field or file name)");
    c->add_flag("--pre-align-ligand", o.pre_align, "Superpose each ligand onto its reference before RMSD");
    c->add_flag("--raw-count-emd", o.raw_count_emd, "Use raw interaction counts instead of unit-mass histograms");
    return c;
  };
  auto* score = add_score("score", "Score the primary-ligand entries of a manifest");
  auto* score_multi = add_score("score-multi", "Score the multi-ligand entries of a manifest");

  auto* compare = app.add_subcommand("compare", "Compare score directories of several methods");
  compare->add_option("dirs", o.dirs, "Score directories, one per method")->required()->check(CLI::ExistingDirectory);
  compare->add_option("--wm-granularity", o.wm_granularity, "PLIF-WM cohort granularity")
      ->check(CLI::IsMember({"mean-emd", "per-complex"}));
  compare->add_flag("--per-complex-wm", o.per_complex_wm, "Same as --wm-granularity per-complex");

  auto* sites = app.add_subcommand("sites", "Group reference ligands into docking sites");
  sites->add_option("--protein", o.protein, "Reference protein PDB")->required()->check(CLI::ExistingFile);
  sites->add_option("--ligands", o.ligands, "Ligand SDF or PDB files")->required()->check(CLI::ExistingFile);

  auto* corr = app.add_subcommand("correlate", "Pearson and Spearman correlation of two table columns");
  corr->add_option("table", o.table, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  corr->add_option("--x", o.x_column, "First column name (default: first column)");
  corr->add_option("--y", o.y_column, "Second column name (default: second column)");
  corr->add_flag("--permutation-p", o.permutation_p, "Permutation p-values instead of the t approximation");
  corr->add_option("--permutations", o.permutations, "Shuffles for --permutation-p")->check(CLI::PositiveNumber);
  corr->add_option("--seed", o.seed, "Shuffle seed for --permutation-p");

  auto* annotate = app.add_subcommand("annotate", "Histogram of annotations over failed targets");
  annotate->add_option("dirs", o.dirs, "Score directories")->required()->check(CLI::ExistingDirectory);
  annotate->add_option("--annotations", o.annotations, "TSV of target and keyword")->check(CLI::ExistingFile);
  annotate->add_option("--method", o.only_method, "Only count failures of this method");

  auto* inter = app.add_subcommand("interactions", "Per-type interaction count distributions as CSV");
  inter->add_option("dirs", o.dirs, "Score directories")->required()->check(CLI::ExistingDirectory);
  inter->add_flag("--reference", o.include_reference, "Also summarise the reference fingerprints");

  auto* validate = app.add_subcommand("validate", "Run the validity checks on one pose");
  validate->add_option("--protein", o.protein, "Protein PDB")->required()->check(CLI::ExistingFile);
  validate->add_option("--ligands", o.ligands, "Ligand SDF or PDB files")->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (score->parsed()) return cmd_score(o, Mode::Primary, out);
    if (score_multi->parsed()) return cmd_score(o, Mode::Multi, out);
    if (compare->parsed()) return cmd_compare(o, out, err);
    if (sites->parsed()) return cmd_sites(o, out);
    if (corr->parsed()) return cmd_correlate(o, out);
    if (annotate->parsed()) return cmd_annotate(o, out);
    if (inter->parsed()) return cmd_interactions(o, out);
    if (validate->parsed()) return cmd_validate(o, out);
  } catch (const std::exception& e) {
    err << "poseval: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace poseval::cli
