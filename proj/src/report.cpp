#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "poseval/error.hpp"
#include "poseval/harness.hpp"

namespace poseval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string file_stem_for(const std::string& target) {
  std::string s = target;
  for (char& c : s)
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  return s;
}

}  // namespace

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string aggregate_csv(std::span<const RunAggregate> rows, const ReportLabels& labels) {
  std::string out = "method,dataset,metric,mean,std,n_runs,n_scored,n_excluded\n";
  for (const auto& r : rows)
    out += csv_field(labels.method) + "," + csv_field(labels.dataset) + "," + r.metric + "," + num(r.mean) + "," +
           num(r.std) + "," + std::to_string(r.n_runs) + "," + std::to_string(r.n_scored) + "," +
           std::to_string(r.n_excluded) + "\n";
  return out;
}

json aggregate_json(std::span<const RunAggregate> rows, const ReportLabels& labels, const ManifestSummary& summary) {
  json metrics = json::array();
  for (const auto& r : rows)
    metrics.push_back({{"metric", r.metric},
                       {"mean", r.mean},
                       {"std", r.std},
                       {"n_runs", r.n_runs},
                       {"n_scored", r.n_scored},
                       {"n_excluded", r.n_excluded}});
  return {{"method", labels.method},
          {"dataset", labels.dataset},
          {"manifest", {{"summary", summary.str()},
                        {"n_single", summary.n_single},
                        {"n_multi", summary.n_multi},
                        {"n_ligand_files", summary.n_ligands},
                        {"n_runs", summary.n_runs}}},
          {"metrics", metrics}};
}

void write_score_outputs(const std::string& out_dir, std::span<const ComplexScore> scores, const EvalConfig& cfg,
                         const ReportLabels& labels, const ManifestSummary& summary) {
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root / "complexes", ec);
  if (ec) throw Error("cannot create output directory '" + (root / "complexes").string() + "': " + ec.message());

  for (const auto& s : scores)
    write_text_file((root / "complexes" / (file_stem_for(s.target_id) + "__run" + std::to_string(s.run) + ".json")).string(),
                    dump_json(to_json(s, cfg)));

  std::vector<RunAggregate> rows;
  std::optional<std::string> failure;
  try {
    rows = aggregate(scores, cfg.criteria);
  } catch (const PreconditionError& e) {
    failure = e.what();
  }
  write_text_file((root / "aggregate.csv").string(), aggregate_csv(rows, labels));
  auto j = aggregate_json(rows, labels, summary);
  j["error"] = failure ? json(*failure) : json(nullptr);
  write_text_file((root / "aggregate.json").string(), dump_json(j));
  write_text_file((root / "config.json").string(), dump_json(to_json(cfg)));
}

ScoreDir load_score_dir(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root / "complexes")) throw Error("'" + dir + "' has no complexes/ directory");
  ScoreDir out;
  out.labels.method = root.filename().string();
  if (fs::exists(root / "aggregate.json")) {
    try {
      const auto j = json::parse(read_text_file((root / "aggregate.json").string()));
      out.labels.method = j.value("method", out.labels.method);
      out.labels.dataset = j.value("dataset", out.labels.dataset);
    } catch (const json::exception& e) {
      throw ParseError("aggregate.json in '" + dir + "': " + e.what());
    }
  }
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(root / "complexes"))
    if (f.path().extension() == ".json") files.push_back(f.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      out.scores.push_back(complex_from_json(json::parse(read_text_file(f.string()))));
    } catch (const json::exception& e) {
      throw ParseError(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace poseval
