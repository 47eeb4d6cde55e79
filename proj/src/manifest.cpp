#include <algorithm>
#include <filesystem>
#include <set>

#include "poseval/error.hpp"
#include "poseval/harness.hpp"

namespace poseval {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Mode m) { return m == Mode::Primary ? "primary" : "multi"; }

namespace {

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base.empty()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

struct EntryReader {
  const json& obj;
  std::size_t line;

  [[noreturn]] void fail(const std::string& field, const std::string& what) const { throw SchemaError(what, line, field); }

  const json& required(const char* field) const {
    if (!obj.contains(field)) fail(field, "missing required field");
    return obj.at(field);
  }
  std::string string_field(const char* field) const {
    const auto& v = required(field);
    if (!v.is_string() || v.get<std::string>().empty()) fail(field, "expected a non-empty string");
    return v.get<std::string>();
  }
  std::vector<std::string> string_list(const json& v, const std::string& field) const {
    if (!v.is_array()) fail(field, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string() || x.get<std::string>().empty()) fail(field, "expected an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }
};

const std::set<std::string_view> kKnownFields{
    "target_id", "mode",   "ref_protein_path", "ref_ligand_paths", "primary_ligand_index", "predicted_complex_paths",
    "smiles",    "dataset", "similarity_score", "annotation"};

ManifestEntry read_entry(const json& obj, std::size_t line, const std::string& base) {
  if (!obj.is_object()) throw SchemaError("expected a JSON object", line, "<entry>");
  EntryReader r{obj, line};
  for (const auto& [k, _] : obj.items())
    if (!kKnownFields.contains(k)) r.fail(k, "unknown field");

  ManifestEntry e;
  e.line = line;
  e.target_id = r.string_field("target_id");
  const auto mode = r.string_field("mode");
  if (mode == "primary") e.mode = Mode::Primary;
  else if (mode == "multi") e.mode = Mode::Multi;
  else r.fail("mode", "expected \"primary\" or \"multi\"");
  e.ref_protein_path = resolve(base, r.string_field("ref_protein_path"));
  for (auto& p : r.string_list(r.required("ref_ligand_paths"), "ref_ligand_paths"))
    e.ref_ligand_paths.push_back(resolve(base, p));
  if (e.ref_ligand_paths.empty()) r.fail("ref_ligand_paths", "at least one reference ligand is required");

  if (obj.contains("primary_ligand_index")) {
    const auto& v = obj.at("primary_ligand_index");
    if (!v.is_number_integer() || v.get<long>() < 0) r.fail("primary_ligand_index", "expected a non-negative integer");
    e.primary_ligand_index = v.get<int>();
  } else if (e.mode == Mode::Primary) {
    r.fail("primary_ligand_index", "missing required field");
  }

  const auto& runs = r.required("predicted_complex_paths");
  if (!runs.is_array() || runs.empty()) r.fail("predicted_complex_paths", "expected a non-empty array of runs");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& run = runs[k];
    const std::string field = "predicted_complex_paths[" + std::to_string(k) + "]";
    RunInput in;
    std::string identity;
    if (run.is_string()) {
      in.complex = resolve(base, run.get<std::string>());
      identity = *in.complex;
    } else if (run.is_object()) {
      for (const auto& [key, _] : run.items())
        if (key != "protein" && key != "ligands") r.fail(field + "." + key, "unknown field");
      if (!run.contains("protein") || !run["protein"].is_string()) r.fail(field + ".protein", "expected a string");
      in.protein = resolve(base, run["protein"].get<std::string>());
      if (!run.contains("ligands")) r.fail(field + ".ligands", "missing required field");
      for (auto& p : r.string_list(run["ligands"], field + ".ligands")) in.ligands.push_back(resolve(base, p));
      if (in.ligands.empty()) r.fail(field + ".ligands", "at least one ligand file is required");
      identity = *in.protein;
      for (const auto& l : in.ligands) identity += "\n" + l;
    } else {
      r.fail(field, "expected a complex path or {\"protein\", \"ligands\"}");
    }
    if (!seen.insert(identity).second) r.fail(field, "duplicate run paths");
    e.runs.push_back(std::move(in));
  }

  if (obj.contains("smiles")) e.smiles = r.string_list(obj.at("smiles"), "smiles");
  if (obj.contains("similarity_score")) {
    if (!obj.at("similarity_score").is_number()) r.fail("similarity_score", "expected a number");
    e.similarity_score = obj.at("similarity_score").get<double>();
  }
  if (obj.contains("annotation")) {
    if (!obj.at("annotation").is_string()) r.fail("annotation", "expected a string");
    e.annotation = obj.at("annotation").get<std::string>();
  }
  if (obj.contains("dataset")) e.dataset = r.string_field("dataset");
  return e;
}

}  // namespace

Manifest parse_manifest(std::string_view text, const std::string& base_dir) {
  Manifest m;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), line_no, "<entry>");
    }
    auto e = read_entry(obj, line_no, base_dir);
    if (!ids.insert(e.target_id).second) throw SchemaError("duplicate target_id", line_no, "target_id");
    if (e.mode == Mode::Primary && e.primary_ligand_index >= static_cast<int>(e.ref_ligand_paths.size()) &&
        e.ref_ligand_paths.size() > 1)
      throw SchemaError("index beyond ref_ligand_paths", line_no, "primary_ligand_index");
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) throw SchemaError("manifest has no entries", 0, "<file>");
  return m;
}

Manifest load_manifest(const std::string& path) {
  const auto text = read_text_file(path);
  auto m = parse_manifest(text, fs::path(path).parent_path().string());
  m.path = path;
  return m;
}

std::string ManifestSummary::str() const {
  return "n=" + std::to_string(n_single) + " single, n=" + std::to_string(n_multi) + " multi";
}

ManifestSummary summarize(std::span<const ManifestEntry> entries) {
  ManifestSummary s;
  for (const auto& e : entries) {
    (e.mode == Mode::Primary ? s.n_single : s.n_multi)++;
    s.n_ligands += e.ref_ligand_paths.size();
    s.n_runs = std::max(s.n_runs, e.runs.size());
  }
  return s;
}

std::optional<DatasetSize> known_dataset_size(std::string_view dataset) {
  std::string d(dataset);
  std::transform(d.begin(), d.end(), d.begin(), [](unsigned char c) { return std::tolower(c); });
  if (d == "astex" || d == "astex_diverse") return DatasetSize{85, 0, 85};
  if (d == "dockgen-e" || d == "dockgen_e" || d == "dockgen") return DatasetSize{122, 0, 122};
  if (d == "posebusters" || d == "posebusters_benchmark") return DatasetSize{130, 0, 130};
  if (d == "posebusters-full" || d == "posebusters_full") return DatasetSize{308, 0, 308};
  if (d == "casp15") return DatasetSize{6, 13, 102};
  return std::nullopt;
}

}  // namespace poseval
