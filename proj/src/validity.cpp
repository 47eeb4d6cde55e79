#include "poseval/validity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "poseval/elements.hpp"
#include "poseval/error.hpp"
#include "poseval/geometry.hpp"
#include "poseval/molgraph.hpp"

namespace poseval {
namespace {

const Points& coords_of(const MoleculeGraph& g) {
  if (!g.coords) throw PreconditionError("ligand '" + g.name + "' has no coordinates");
  return *g.coords;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct HeavySide {
  Points xyz;
  std::vector<double> radius;
  std::vector<bool> metal;
};

HeavySide heavy_side(const MoleculeGraph& g) {
  const auto& xyz = coords_of(g);
  HeavySide s;
  for (int i : g.heavy_indices()) {
    s.xyz.push_back(xyz[i]);
    s.radius.push_back(vdw_radius(g.nodes[i].element));
    s.metal.push_back(is_metal(g.nodes[i].element));
  }
  return s;
}

}  // namespace

CheckResult check_bond_lengths(const MoleculeGraph& g, const ValidityThresholds& t) {
  const auto& xyz = coords_of(g);
  CheckResult r;
  double worst = 0;
  for (const auto& e : g.edges) {
    const double nominal = covalent_radius(g.nodes[e.i].element) + covalent_radius(g.nodes[e.j].element);
    const double dev = std::abs((xyz[e.i] - xyz[e.j]).norm() / nominal - 1.0);
    if (dev > worst) {
      worst = dev;
      r.detail = fmt("worst bond %.0f-%.0f deviates %.3f from nominal", e.i, e.j, dev);
    }
  }
  r.passed = worst <= t.bond_length_tolerance;
  return r;
}

CheckResult check_internal_clash(const MoleculeGraph& g, const ValidityThresholds& t) {
  const auto& xyz = coords_of(g);
  const auto adj = g.adjacency();
  const std::size_t n = g.nodes.size();
  std::set<std::pair<int, int>> excluded;
  for (std::size_t a = 0; a < n; ++a) {
    for (const auto& b : adj[a]) {
      excluded.emplace(std::min<int>(a, b.node), std::max<int>(a, b.node));
      for (const auto& c : adj[b.node])
        if (c.node != static_cast<int>(a))
          excluded.emplace(std::min<int>(a, c.node), std::max<int>(a, c.node));
    }
  }
  CheckResult r;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (excluded.contains({static_cast<int>(i), static_cast<int>(j)})) continue;
      const double ratio = (xyz[i] - xyz[j]).norm() /
                           (covalent_radius(g.nodes[i].element) + covalent_radius(g.nodes[j].element));
      if (ratio < worst) {
        worst = ratio;
        r.detail = fmt("closest non-bonded pair %.0f-%.0f at ratio %.3f", static_cast<double>(i),
                       static_cast<double>(j), ratio);
      }
    }
  r.passed = worst >= t.internal_clash_ratio;
  return r;
}

CheckResult check_protein_ligand_clash(const Structure& protein, const MoleculeGraph& ligand,
                                       const ValidityThresholds& t) {
  const auto lig = heavy_side(ligand);
  // Metal coordination distances sit well inside the van der Waals sum, so metal pairs are not clashes.
  Points p_xyz;
  std::vector<double> p_r;
  for (const auto& a : protein.atoms) {
    if (a.is_hydrogen() || is_metal(a.element)) continue;
    p_xyz.push_back(a.coords);
    p_r.push_back(vdw_radius(a.element));
  }
  Points l_xyz;
  std::vector<double> l_r;
  for (std::size_t i = 0; i < lig.xyz.size(); ++i) {
    if (lig.metal[i]) continue;
    l_xyz.push_back(lig.xyz[i]);
    l_r.push_back(lig.radius[i]);
  }
  CheckResult r;
  const double m = min_scaled_distance(l_xyz, l_r, p_xyz, p_r);
  r.passed = m >= t.cross_clash_ratio;
  if (std::isfinite(m)) r.detail = fmt("minimum distance ratio %.3f", m);
  return r;
}

CheckResult check_ring_flatness(const MoleculeGraph& g, const ValidityThresholds& t) {
  const auto& xyz = coords_of(g);
  CheckResult r;
  if (g.bonds_perceived) {
    r.detail = "skipped: bond orders unknown";
    return r;
  }
  const auto adj = g.adjacency();
  for (const auto& ring : find_rings(g, 6)) {
    Points pts;
    for (int v : ring) pts.push_back(xyz[v]);
    const double dev = max_plane_deviation(pts);
    if (ring_is_aromatic(g, ring)) {
      if (dev > t.aromatic_planarity) {
        r.passed = false;
        r.detail = fmt("aromatic ring of %.0f atoms deviates %.3f A from its plane", ring.size(), dev);
        return r;
      }
      continue;
    }
    if (ring.size() < 5) continue;
    bool saturated = true;
    for (int v : ring) {
      if (g.nodes[v].aromatic) saturated = false;
      for (const auto& nb : adj[v])
        if (nb.order != BondOrder::Single) saturated = false;
    }
    if (saturated && dev <= t.aliphatic_flatness) {
      r.passed = false;
      r.detail = fmt("saturated ring of %.0f atoms is flat (deviation %.3f A)", ring.size(), dev);
      return r;
    }
  }
  return r;
}

CheckResult check_inter_ligand_clash(std::span<const MoleculeGraph> ligands, const ValidityThresholds& t) {
  CheckResult r;
  std::vector<HeavySide> sides;
  for (const auto& g : ligands) sides.push_back(heavy_side(g));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < sides.size(); ++a)
    for (std::size_t b = a + 1; b < sides.size(); ++b) {
      const double m = min_scaled_distance(sides[a].xyz, sides[a].radius, sides[b].xyz, sides[b].radius);
      if (m < worst) {
        worst = m;
        r.detail = fmt("ligands %.0f and %.0f at distance ratio %.3f", static_cast<double>(a),
                       static_cast<double>(b), m);
      }
    }
  r.passed = worst >= t.cross_clash_ratio;
  return r;
}

ValidityReport pb_valid(const Structure& protein, std::span<const MoleculeGraph> ligands, const ValidityThresholds& t) {
  ValidityReport rep;
  rep.enabled = {kBondLengths, kInternalClash, kProteinLigandClash, kRingFlatness, kInterLigandClash};
  rep.disabled = {kEnergyRatio};

  auto guarded = [&](const char* name, auto&& fn) {
    CheckResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.passed = false;
      r.error = e.what();
    }
    rep.per_check[name] = std::move(r);
  };
  auto all_ligands = [&](auto&& check) {
    return [&, check]() {
      CheckResult out;
      for (const auto& g : ligands) {
        auto r = check(g);
        if (!r.passed) return r;
        if (out.detail.empty()) out.detail = r.detail;
      }
      return out;
    };
  };

  guarded(kBondLengths, all_ligands([&](const MoleculeGraph& g) { return check_bond_lengths(g, t); }));
  guarded(kInternalClash, all_ligands([&](const MoleculeGraph& g) { return check_internal_clash(g, t); }));
  guarded(kProteinLigandClash,
          all_ligands([&](const MoleculeGraph& g) { return check_protein_ligand_clash(protein, g, t); }));
  guarded(kRingFlatness, all_ligands([&](const MoleculeGraph& g) { return check_ring_flatness(g, t); }));
  guarded(kInterLigandClash, [&] { return check_inter_ligand_clash(ligands, t); });

  for (const auto& name : rep.enabled) rep.overall = rep.overall && rep.per_check[name].passed;
  return rep;
}

nlohmann::json to_json(const ValidityReport& r) {
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [name, c] : r.per_check) {
    nlohmann::json j{{"passed", c.passed}, {"detail", c.detail}};
    j["error"] = c.error ? nlohmann::json(*c.error) : nlohmann::json(nullptr);
    checks[name] = std::move(j);
  }
  return {{"overall", r.overall}, {"checks", checks}, {"enabled", r.enabled}, {"disabled", r.disabled}};
}

}  // namespace poseval
