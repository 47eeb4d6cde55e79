#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "poseval/elements.hpp"
#include "poseval/error.hpp"
#include "poseval/structio.hpp"

namespace poseval {
namespace {

struct Lines {
  std::vector<std::string_view> lines;
  std::vector<std::size_t> numbers;  // 1-based line numbers in the whole text
};

Lines split_lines(std::string_view text) {
  Lines out;
  std::size_t pos = 0, n = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.lines.push_back(line);
    out.numbers.push_back(++n);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view cols(std::string_view line, std::size_t first, std::size_t len) {
  if (line.size() <= first) return {};
  return line.substr(first, std::min(len, line.size() - first));
}

template <class T>
bool parse_number(std::string_view field, T& out) {
  auto t = trim(field);
  if (t.empty()) return false;
  if (t.front() == '+') t.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

int charge_from_code(int code) {
  switch (code) {
    case 1: return 3;
    case 2: return 2;
    case 3: return 1;
    case 5: return -1;
    case 6: return -2;
    case 7: return -3;
    default: return 0;
  }
}

int code_from_charge(int charge) {
  switch (charge) {
    case 3: return 1;
    case 2: return 2;
    case 1: return 3;
    case -1: return 5;
    case -2: return 6;
    case -3: return 7;
    default: return 0;
  }
}

bool is_property_line(std::string_view line) {
  static constexpr std::string_view prefixes[] = {"M  ", "A  ", "V  ", "G  ", "S  "};
  for (auto p : prefixes)
    if (line.starts_with(p)) return true;
  return false;
}

MoleculeGraph parse_record(const Lines& all, std::size_t begin, std::size_t end) {
  auto line_no = [&](std::size_t i) { return all.numbers[std::min(i, all.numbers.size() - 1)]; };
  if (end - begin < 4) throw ParseError("SDF record shorter than its header block", line_no(begin));

  MoleculeGraph g;
  g.name = std::string(trim(all.lines[begin]));
  const auto counts = all.lines[begin + 3];
  if (counts.find("V3000") != std::string_view::npos)
    throw UnsupportedFormatError("V3000 connection tables are not supported", line_no(begin + 3));
  int n_atoms = 0, n_bonds = 0;
  if (!parse_number(cols(counts, 0, 3), n_atoms) || !parse_number(cols(counts, 3, 3), n_bonds) || n_atoms < 0 ||
      n_bonds < 0)
    throw ParseError("invalid counts line", line_no(begin + 3));

  std::size_t i = begin + 4;
  Points coords;
  for (int k = 0; k < n_atoms; ++k, ++i) {
    if (i >= end) throw ParseError("atom block ends before the " + std::to_string(n_atoms) + " atoms declared", line_no(i));
    const auto line = all.lines[i];
    double x, y, z;
    if (!parse_number(cols(line, 0, 10), x) || !parse_number(cols(line, 10, 10), y) ||
        !parse_number(cols(line, 20, 10), z) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
      throw ParseError("atom/bond count mismatch: expected atom line " + std::to_string(k + 1), line_no(i));
    auto sym = std::string(trim(cols(line, 31, 3)));
    auto norm = normalize_element(sym);
    if (!norm) throw ParseError("unsupported element '" + sym + "'", line_no(i));
    GraphNode node{*norm, 0, false, 0};
    int code = 0;
    if (parse_number(cols(line, 36, 3), code)) node.formal_charge = charge_from_code(code);
    g.nodes.push_back(node);
    coords.emplace_back(x, y, z);
  }
  for (int k = 0; k < n_bonds; ++k, ++i) {
    if (i >= end) throw ParseError("bond block ends before the " + std::to_string(n_bonds) + " bonds declared", line_no(i));
    const auto line = all.lines[i];
    int a = 0, b = 0, t = 0;
    if (!parse_number(cols(line, 0, 3), a) || !parse_number(cols(line, 3, 3), b) || !parse_number(cols(line, 6, 3), t))
      throw ParseError("atom/bond count mismatch: expected bond line " + std::to_string(k + 1), line_no(i));
    if (a < 1 || b < 1 || a > n_atoms || b > n_atoms)
      throw ParseError("bond references atom outside 1.." + std::to_string(n_atoms), line_no(i));
    if (t < 1 || t > 4) throw ParseError("unsupported bond type " + std::to_string(t), line_no(i));
    GraphEdge e{a - 1, b - 1, static_cast<BondOrder>(t)};
    if (e.order == BondOrder::Aromatic) g.nodes[e.i].aromatic = g.nodes[e.j].aromatic = true;
    g.edges.push_back(e);
  }

  bool saw_end = false, saw_chg = false;
  for (; i < end; ++i) {
    const auto line = all.lines[i];
    if (line.starts_with("M  END")) {
      saw_end = true;
      break;
    }
    if (!is_property_line(line))
      throw ParseError("atom/bond count mismatch: unexpected line after bond block", line_no(i));
    if (line.starts_with("M  CHG")) {
      if (!saw_chg)
        for (auto& n : g.nodes) n.formal_charge = 0;  // CHG supersedes atom-block charges
      saw_chg = true;
      int count = 0;
      if (!parse_number(cols(line, 6, 3), count)) throw ParseError("invalid M  CHG entry count", line_no(i));
      for (int k = 0; k < count; ++k) {
        int atom = 0, value = 0;
        if (!parse_number(cols(line, 9 + 8 * k, 4), atom) || !parse_number(cols(line, 13 + 8 * k, 4), value))
          throw ParseError("invalid M  CHG entry", line_no(i));
        if (atom < 1 || atom > n_atoms) throw ParseError("M  CHG references unknown atom", line_no(i));
        g.nodes[atom - 1].formal_charge = value;
      }
    }
  }
  if (!saw_end) throw ParseError("missing 'M  END'", line_no(end));
  g.coords = std::move(coords);
  try {
    g.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), line_no(begin));
  }
  return g;
}

}  // namespace

std::vector<MoleculeGraph> parse_sdf(std::string_view text) {
  const auto all = split_lines(text);
  std::vector<MoleculeGraph> out;
  std::size_t begin = 0;
  auto flush = [&](std::size_t end) {
    bool blank = true;
    for (std::size_t k = begin; k < end; ++k)
      if (!trim(all.lines[k]).empty()) blank = false;
    if (!blank) out.push_back(parse_record(all, begin, end));
  };
  for (std::size_t i = 0; i < all.lines.size(); ++i) {
    if (all.lines[i].starts_with("$$$$")) {
      flush(i);
      begin = i + 1;
    }
  }
  flush(all.lines.size());
  if (out.empty()) throw ParseError("SDF input contains no records");
  return out;
}

std::string write_sdf(const std::vector<MoleculeGraph>& mols) {
  std::string out;
  char buf[128];
  for (const auto& g : mols) {
    if (g.nodes.size() > 999 || g.edges.size() > 999) throw PreconditionError("V2000 limits exceeded");
    out += g.name + "\n  poseval\n\n";
    std::snprintf(buf, sizeof buf, "%3zu%3zu  0  0  0  0  0  0  0  0999 V2000\n", g.nodes.size(), g.edges.size());
    out += buf;
    std::vector<std::pair<int, int>> charges;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const auto& n = g.nodes[k];
      Vec3 p = g.coords ? (*g.coords)[k] : Vec3::Zero();
      std::snprintf(buf, sizeof buf, "%10.4f%10.4f%10.4f %-3s 0%3d  0  0  0  0  0  0  0  0  0  0\n", p.x(), p.y(),
                    p.z(), n.element.c_str(), code_from_charge(n.formal_charge));
      out += buf;
      if (n.formal_charge != 0) charges.emplace_back(static_cast<int>(k) + 1, n.formal_charge);
    }
    for (const auto& e : g.edges) {
      std::snprintf(buf, sizeof buf, "%3d%3d%3d  0\n", e.i + 1, e.j + 1, static_cast<int>(e.order));
      out += buf;
    }
    for (std::size_t k = 0; k < charges.size(); k += 8) {
      const auto n = std::min<std::size_t>(8, charges.size() - k);
      std::snprintf(buf, sizeof buf, "M  CHG%3zu", n);
      out += buf;
      for (std::size_t c = k; c < k + n; ++c) {
        std::snprintf(buf, sizeof buf, " %3d %3d", charges[c].first, charges[c].second);
        out += buf;
      }
      out += "\n";
    }
    out += "M  END\n$$$$\n";
  }
  return out;
}

}  // namespace poseval
