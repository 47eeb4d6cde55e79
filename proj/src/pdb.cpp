#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "poseval/elements.hpp"
#include "poseval/error.hpp"
#include "poseval/structio.hpp"

namespace poseval {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
  // 1-based inclusive PDB column range, clipped to the line.
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - first + 1);
}

double parse_coord(std::string_view field, std::size_t lineno, const char* what) {
  auto t = trim(field);
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ParseError(std::string("invalid ") + what + " coordinate '" + std::string(field) + "'", lineno);
  return v;
}

int parse_int(std::string_view field, std::size_t lineno, const char* what) {
  auto t = trim(field);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError(std::string("invalid ") + what + " '" + std::string(field) + "'", lineno);
  return v;
}

std::string infer_element(std::string_view name_field, bool hetero) {
  // Element symbols are right-justified in columns 13-14 of the atom name.
  std::string raw(name_field.substr(0, std::min<std::size_t>(2, name_field.size())));
  if (!raw.empty() && (raw[0] == ' ' || std::isdigit(static_cast<unsigned char>(raw[0]))))
    return raw.size() > 1 ? std::string(1, raw[1]) : std::string();
  // Polymer atoms are never two-letter elements; left-shifted "CA" there is C-alpha.
  if (hetero && raw.size() == 2 && std::isalpha(static_cast<unsigned char>(raw[1]))) {
    if (const auto* e = find_element(raw); e && e->symbol.size() == 2) return raw;
  }
  return raw.empty() ? std::string() : std::string(1, raw[0]);
}

int parse_charge(std::string_view field) {
  auto t = trim(field);
  if (t.size() != 2) return 0;
  if (!std::isdigit(static_cast<unsigned char>(t[0]))) return 0;
  int mag = t[0] - '0';
  if (t[1] == '-') return -mag;
  if (t[1] == '+') return mag;
  return 0;
}

}  // namespace

std::string ResidueKey::str() const {
  std::string s = chain_id + ":" + std::to_string(seq);
  if (insertion_code != ' ') s += insertion_code;
  return s;
}

bool Atom::is_hydrogen() const { return poseval::is_hydrogen(element); }

std::vector<std::size_t> Structure::heavy_atom_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (!atoms[i].is_hydrogen()) out.push_back(i);
  return out;
}

Points Structure::heavy_coords() const {
  Points out;
  for (const auto& a : atoms)
    if (!a.is_hydrogen()) out.push_back(a.coords);
  return out;
}

Structure Structure::without_hydrogens() const {
  Structure s{{}, title, model_index};
  for (const auto& a : atoms)
    if (!a.is_hydrogen()) s.atoms.push_back(a);
  return s;
}

Structure parse_pdb(std::string_view text) {
  Structure s;
  std::set<std::tuple<std::string, int, char, std::string>> seen;
  int models_seen = 0;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto record = trim(columns(line, 1, 6));
    if (record == "MODEL") {
      if (++models_seen > 1) break;
      auto serial = trim(columns(line, 7, 80));
      if (!serial.empty()) s.model_index = parse_int(serial, lineno, "model serial");
      continue;
    }
    if (record == "ENDMDL") {
      if (!s.atoms.empty()) break;
      continue;
    }
    if (record == "END") break;
    if (record == "TITLE") {
      auto t = trim(columns(line, 11, 80));
      if (!s.title.empty() && !t.empty()) s.title += ' ';
      s.title += t;
      continue;
    }
    if (record != "ATOM" && record != "HETATM") continue;

    if (line.size() < 54) throw ParseError("truncated " + std::string(record) + " record", lineno);
    const char altloc = line[16];
    if (altloc != ' ' && altloc != 'A') continue;

    Atom a;
    a.is_hetero = record == "HETATM";
    a.name = std::string(trim(columns(line, 13, 16)));
    a.residue_name = std::string(trim(columns(line, 18, 20)));
    a.chain_id = std::string(trim(columns(line, 22, 22)));
    a.residue_seq = parse_int(columns(line, 23, 26), lineno, "residue number");
    a.insertion_code = line[26];
    a.coords = Vec3(parse_coord(columns(line, 31, 38), lineno, "x"), parse_coord(columns(line, 39, 46), lineno, "y"),
                    parse_coord(columns(line, 47, 54), lineno, "z"));

    std::string elem(trim(columns(line, 77, 78)));
    if (elem.empty()) elem = infer_element(columns(line, 13, 16), a.is_hetero);
    auto norm = normalize_element(elem);
    if (!norm) throw ParseError("unsupported element '" + elem + "'", lineno);
    a.element = *norm;
    a.formal_charge = parse_charge(columns(line, 79, 80));
    if (a.name.empty()) throw ParseError("missing atom name", lineno);

    if (!seen.emplace(a.chain_id, a.residue_seq, a.insertion_code, a.name).second)
      throw ParseError("duplicate atom " + a.residue().str() + ":" + a.name, lineno);
    s.atoms.push_back(std::move(a));
  }
  if (s.atoms.empty()) throw EmptyStructureError("PDB input contains no atoms");
  if (s.heavy_atom_indices().empty()) throw EmptyStructureError("PDB input contains no heavy atoms");
  return s;
}

std::string write_pdb(const Structure& s) {
  std::string out;
  if (!s.title.empty()) out += "TITLE     " + s.title + "\n";
  char buf[128];
  int serial = 1;
  for (const auto& a : s.atoms) {
    // 4-character names start in column 13; shorter ones with a one-letter element in column 14.
    std::string name = a.name;
    if (name.size() < 4 && a.element.size() == 1) name = " " + name;
    std::string charge;
    if (a.formal_charge != 0) charge = std::to_string(std::abs(a.formal_charge)) + (a.formal_charge > 0 ? "+" : "-");
    std::snprintf(buf, sizeof buf, "%-6s%5d %-4.4s %3.3s %1.1s%4d%c   %8.3f%8.3f%8.3f%6.2f%6.2f          %2s%2s\n",
                  a.is_hetero ? "HETATM" : "ATOM", serial++ % 100000, name.c_str(), a.residue_name.c_str(),
                  a.chain_id.empty() ? " " : a.chain_id.c_str(), a.residue_seq, a.insertion_code, a.coords.x(),
                  a.coords.y(), a.coords.z(), 1.0, 0.0, a.element.c_str(), charge.c_str());
    out += buf;
  }
  out += "END\n";
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace poseval
