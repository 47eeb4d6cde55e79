#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>

#include "poseval/elements.hpp"
#include "poseval/error.hpp"
#include "poseval/geometry.hpp"
#include "poseval/metrics.hpp"
#include "poseval/molgraph.hpp"
#include "poseval/plif.hpp"

namespace poseval {
namespace {

using NameSet = std::set<std::string_view>;

struct ResidueTemplate {
  NameSet donors;
  NameSet acceptors;
  NameSet apolar;
  std::vector<std::vector<std::string_view>> rings;
  std::vector<std::string_view> cation;  // atoms whose centroid is the cationic centre
  std::vector<std::string_view> anion;
};

const std::map<std::string_view, ResidueTemplate>& residue_templates() {
  static const std::map<std::string_view, ResidueTemplate> t{
      {"ALA", {{}, {}, {"CB"}, {}, {}, {}}},
      {"ARG", {{"NE", "NH1", "NH2"}, {}, {"CB", "CG"}, {}, {"NE", "NH1", "NH2"}, {}}},
      {"ASN", {{"ND2"}, {"OD1"}, {"CB"}, {}, {}, {}}},
      {"ASP", {{}, {"OD1", "OD2"}, {"CB"}, {}, {}, {"OD1", "OD2"}}},
      {"CYS", {{"SG"}, {}, {"CB", "SG"}, {}, {}, {}}},
      {"GLN", {{"NE2"}, {"OE1"}, {"CB", "CG"}, {}, {}, {}}},
      {"GLU", {{}, {"OE1", "OE2"}, {"CB", "CG"}, {}, {}, {"OE1", "OE2"}}},
      {"GLY", {{}, {}, {}, {}, {}, {}}},
      {"HIS", {{"ND1", "NE2"}, {"ND1", "NE2"}, {"CB"}, {{"CG", "ND1", "CD2", "CE1", "NE2"}}, {}, {}}},
      {"ILE", {{}, {}, {"CB", "CG1", "CG2", "CD1"}, {}, {}, {}}},
      {"LEU", {{}, {}, {"CB", "CG", "CD1", "CD2"}, {}, {}, {}}},
      {"LYS", {{"NZ"}, {}, {"CB", "CG", "CD"}, {}, {"NZ"}, {}}},
      {"MET", {{}, {"SD"}, {"CB", "CG", "SD", "CE"}, {}, {}, {}}},
      {"PHE", {{}, {}, {"CB", "CG", "CD1", "CD2", "CE1", "CE2", "CZ"}, {{"CG", "CD1", "CD2", "CE1", "CE2", "CZ"}}, {}, {}}},
      {"PRO", {{}, {}, {"CB", "CG"}, {}, {}, {}}},
      {"SER", {{"OG"}, {"OG"}, {}, {}, {}, {}}},
      {"THR", {{"OG1"}, {"OG1"}, {"CG2"}, {}, {}, {}}},
      {"TRP", {{"NE1"}, {}, {"CB", "CG", "CD2", "CE3", "CZ2", "CZ3", "CH2"},
               {{"CD2", "CE2", "CE3", "CZ2", "CZ3", "CH2"}, {"CG", "CD1", "NE1", "CE2", "CD2"}}, {}, {}}},
      {"TYR", {{"OH"}, {"OH"}, {"CB", "CG", "CD1", "CD2", "CE1", "CE2"}, {{"CG", "CD1", "CD2", "CE1", "CE2", "CZ"}}, {}, {}}},
      {"VAL", {{}, {}, {"CB", "CG1", "CG2"}, {}, {}, {}}},
  };
  return t;
}

std::string canonical_residue(std::string_view name) {
  static const std::map<std::string_view, std::string_view> alias{
      {"MSE", "MET"}, {"HID", "HIS"}, {"HIE", "HIS"}, {"HIP", "HIS"}, {"CYX", "CYS"}};
  if (residue_templates().contains(name)) return std::string(name);
  if (auto it = alias.find(name); it != alias.end()) return std::string(it->second);
  return "UNK";
}

struct Ring {
  Vec3 center;
  Vec3 normal;
};

// Perceived bonds carry no orders: fall back to a flat ring with short bonds.
bool looks_aromatic(const Points& ring) {
  if (max_plane_deviation(ring) > 0.1) return false;
  double total = 0;
  for (std::size_t k = 0; k < ring.size(); ++k) total += (ring[k] - ring[(k + 1) % ring.size()]).norm();
  return total / static_cast<double>(ring.size()) <= 1.45;
}

Ring make_ring(const Points& pts) {
  Ring r;
  r.center = centroid(pts);
  Mat3 cov = Mat3::Zero();
  for (const auto& p : pts) cov += (p - r.center) * (p - r.center).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  r.normal = es.eigenvectors().col(0).normalized();
  return r;
}

double angle_deg(const Vec3& a, const Vec3& b) {
  const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// Angle at `h` in the triangle d-h-a.
double dha_angle(const Vec3& d, const Vec3& h, const Vec3& a) { return angle_deg(d - h, a - h); }

struct ProteinResidue {
  ResidueKey key;
  std::string type;
  std::vector<std::size_t> heavy;
  std::vector<std::size_t> hydrogens;
};

struct LigandTyping {
  std::vector<int> heavy;
  std::vector<bool> donor, acceptor, apolar, metal;
  std::vector<std::vector<int>> h_neighbors;  // explicit H node indices per node
  std::vector<Points> cations, anions;
  std::vector<Ring> rings;
};

LigandTyping type_ligand(const MoleculeGraph& g) {
  const auto& xyz = *g.coords;
  const auto adj = g.adjacency();
  const std::size_t n = g.nodes.size();
  LigandTyping t;
  t.heavy = g.heavy_indices();
  t.donor.assign(n, false);
  t.acceptor.assign(n, false);
  t.apolar.assign(n, false);
  t.metal.assign(n, false);
  t.h_neighbors.assign(n, {});
  const bool explicit_h = std::any_of(g.nodes.begin(), g.nodes.end(), [](const GraphNode& x) { return x.is_hydrogen(); });

  for (int i : t.heavy) {
    const auto& node = g.nodes[i];
    int heavy_degree = 0;
    double bond_sum = 0;
    bool polar_neighbor = false;
    for (const auto& nb : adj[i]) {
      if (g.nodes[nb.node].is_hydrogen()) {
        t.h_neighbors[i].push_back(nb.node);
        continue;
      }
      ++heavy_degree;
      bond_sum += nb.order == BondOrder::Aromatic ? 1.5 : static_cast<double>(nb.order);
      const auto& el = g.nodes[nb.node].element;
      if (el == "N" || el == "O") polar_neighbor = true;
    }
    t.metal[i] = is_metal(node.element);
    if ((node.element == "C" || node.element == "S") && !polar_neighbor && node.formal_charge == 0) t.apolar[i] = true;
    if (node.element != "N" && node.element != "O") continue;

    if (g.bonds_perceived && !explicit_h) {
      // No bond orders and no hydrogens: accept either role where the heavy degree allows one.
      if (node.element == "O") {
        t.acceptor[i] = true;
        t.donor[i] = heavy_degree <= 1;
      } else if (heavy_degree <= 2) {
        t.acceptor[i] = t.donor[i] = true;
      }
      continue;
    }
    int h_count = static_cast<int>(t.h_neighbors[i].size()) + node.implicit_hydrogens;
    if (!explicit_h && node.implicit_hydrogens == 0) {
      const int base = node.element == "N" ? 3 : 2;
      h_count = std::max(0, base + node.formal_charge - static_cast<int>(std::lround(std::floor(bond_sum))));
      if (node.aromatic && node.element == "N" && heavy_degree == 2) h_count = 0;
    }
    t.donor[i] = h_count > 0;
    if (node.element == "O")
      t.acceptor[i] = node.formal_charge <= 0;
    else
      t.acceptor[i] = node.formal_charge <= 0 && h_count == 0 && heavy_degree <= 2;
  }

  // Charged groups.
  std::vector<bool> grouped(n, false);
  for (int i : t.heavy) {
    const auto& el = g.nodes[i].element;
    std::vector<int> terminal_o, terminal_n;
    for (const auto& nb : adj[i]) {
      int deg = 0;
      for (const auto& x : adj[nb.node])
        if (!g.nodes[x.node].is_hydrogen()) ++deg;
      if (deg != 1) continue;
      if (g.nodes[nb.node].element == "O") terminal_o.push_back(nb.node);
      if (g.nodes[nb.node].element == "N" && !g.nodes[nb.node].aromatic) terminal_n.push_back(nb.node);
    }
    if ((el == "C" || el == "P" || el == "S") && terminal_o.size() >= 2) {
      Points pts;
      for (int o : terminal_o) {
        pts.push_back(xyz[o]);
        grouped[o] = true;
      }
      t.anions.push_back(std::move(pts));
    } else if (el == "C" && !g.nodes[i].aromatic && terminal_n.size() >= 2) {
      // Amidine / guanidine.
      Points pts;
      for (int m : terminal_n) {
        pts.push_back(xyz[m]);
        grouped[m] = true;
      }
      t.cations.push_back(std::move(pts));
    }
  }
  for (int i : t.heavy) {
    if (grouped[i]) continue;
    if (g.nodes[i].formal_charge > 0) t.cations.push_back({xyz[i]});
    if (g.nodes[i].formal_charge < 0) t.anions.push_back({xyz[i]});
  }

  for (const auto& ring : find_rings(g, 6)) {
    if (ring.size() < 5) continue;
    Points pts;
    for (int v : ring) pts.push_back(xyz[v]);
    if (!ring_is_aromatic(g, ring) && !(g.bonds_perceived && looks_aromatic(pts))) continue;
    t.rings.push_back(make_ring(pts));
  }
  return t;
}

bool stacked(const Ring& a, const Ring& b, const InteractionParams& p) {
  if ((a.center - b.center).norm() > p.pi_stacking_distance) return false;
  double ang = angle_deg(a.normal, b.normal);
  if (ang > 90.0) ang = 180.0 - ang;
  return ang <= p.pi_parallel_max_angle || ang >= p.pi_tshaped_min_angle;
}

}  // namespace

std::vector<InteractionRecord> detect_interactions(const Structure& protein, const MoleculeGraph& ligand,
                                                   const std::string& ligand_id, const InteractionParams& params) {
  if (!ligand.coords) throw PreconditionError("detect_interactions: ligand '" + ligand_id + "' has no coordinates");
  const auto& lxyz = *ligand.coords;
  const auto lt = type_ligand(ligand);
  if (lt.heavy.empty()) return {};

  // Residues with any atom within 10 Å of the ligand, in file order.
  constexpr double kShell = 10.0;
  std::vector<ProteinResidue> residues;
  std::map<ResidueKey, std::size_t> slot;
  for (std::size_t a = 0; a < protein.atoms.size(); ++a) {
    const auto& atom = protein.atoms[a];
    if (is_water(atom.residue_name)) continue;
    auto [it, fresh] = slot.try_emplace(atom.residue(), residues.size());
    if (fresh) residues.push_back({atom.residue(), canonical_residue(atom.residue_name), {}, {}});
    auto& r = residues[it->second];
    (atom.is_hydrogen() ? r.hydrogens : r.heavy).push_back(a);
  }
  std::erase_if(residues, [&](const ProteinResidue& r) {
    for (auto a : r.heavy)
      for (int l : lt.heavy)
        if ((protein.atoms[a].coords - lxyz[l]).norm() <= kShell) return false;
    return true;
  });

  std::vector<InteractionRecord> out;
  for (const auto& res : residues) {
    const auto& tpl_map = residue_templates();
    const auto tpl_it = tpl_map.find(res.type);
    const ResidueTemplate* tpl = tpl_it == tpl_map.end() ? nullptr : &tpl_it->second;
    const bool unknown = tpl == nullptr;
    std::set<InteractionType> found;

    auto atom_named = [&](std::string_view name) -> const Atom* {
      for (auto a : res.heavy)
        if (protein.atoms[a].name == name) return &protein.atoms[a];
      return nullptr;
    };
    auto is_backbone_donor = [&](const Atom& a) { return a.name == "N" && res.type != "PRO"; };
    auto is_backbone_acceptor = [&](const Atom& a) { return a.name == "O" || a.name == "OXT"; };
    auto protein_h_for = [&](const Atom& d) {
      std::vector<const Atom*> hs;
      for (auto h : res.hydrogens)
        if ((protein.atoms[h].coords - d.coords).norm() <= 1.25) hs.push_back(&protein.atoms[h]);
      return hs;
    };

    for (auto pa : res.heavy) {
      const Atom& p = protein.atoms[pa];
      const bool p_donor = !unknown && (tpl->donors.contains(p.name) || is_backbone_donor(p));
      const bool p_acceptor = !unknown && (tpl->acceptors.contains(p.name) || is_backbone_acceptor(p));
      const bool p_apolar = !unknown && tpl->apolar.contains(p.name);
      const bool p_metal = is_metal(p.element);
      const bool p_nos = p.element == "N" || p.element == "O" || p.element == "S";

      for (int l : lt.heavy) {
        const double d = (p.coords - lxyz[l]).norm();
        const auto& lnode = ligand.nodes[l];

        if (d <= params.hbond_distance) {
          if (lt.donor[l] && p_acceptor) {
            bool ok = lt.h_neighbors[l].empty();
            for (int h : lt.h_neighbors[l])
              ok = ok || dha_angle(lxyz[l], lxyz[h], p.coords) >= params.hbond_min_angle;
            if (ok) found.insert(InteractionType::HBondDonor);
          }
          if (lt.acceptor[l] && p_donor) {
            const auto hs = protein_h_for(p);
            bool ok = hs.empty();
            for (const Atom* h : hs) ok = ok || dha_angle(p.coords, h->coords, lxyz[l]) >= params.hbond_min_angle;
            if (ok) found.insert(InteractionType::HBondAcceptor);
          }
        }
        if (lt.apolar[l] && p_apolar && d <= params.hydrophobic_distance) found.insert(InteractionType::Hydrophobic);
        const bool l_nos = lnode.element == "N" || lnode.element == "O" || lnode.element == "S";
        if (d <= params.metal_distance && ((lt.metal[l] && p_nos) || (p_metal && l_nos)))
          found.insert(InteractionType::MetalCoordination);
      }
    }

    if (!unknown) {
      auto group_centre = [&](const std::vector<std::string_view>& names) -> std::optional<Vec3> {
        Points pts;
        for (auto nm : names)
          if (const Atom* a = atom_named(nm)) pts.push_back(a->coords);
        if (pts.empty()) return std::nullopt;
        return centroid(pts);
      };
      const auto p_cation = tpl->cation.empty() ? std::nullopt : group_centre(tpl->cation);
      const auto p_anion = tpl->anion.empty() ? std::nullopt : group_centre(tpl->anion);
      if (p_anion)
        for (const auto& c : lt.cations)
          if ((centroid(c) - *p_anion).norm() <= params.salt_bridge_distance) found.insert(InteractionType::SaltBridgeCationic);
      if (p_cation)
        for (const auto& an : lt.anions)
          if ((centroid(an) - *p_cation).norm() <= params.salt_bridge_distance) found.insert(InteractionType::SaltBridgeAnionic);

      std::vector<Ring> p_rings;
      for (const auto& names : tpl->rings) {
        Points pts;
        for (auto nm : names)
          if (const Atom* a = atom_named(nm)) pts.push_back(a->coords);
        if (pts.size() == names.size()) p_rings.push_back(make_ring(pts));
      }
      for (const auto& pr : p_rings) {
        for (const auto& lr : lt.rings)
          if (stacked(pr, lr, params)) found.insert(InteractionType::PiStacking);
        for (const auto& c : lt.cations)
          if ((centroid(c) - pr.center).norm() <= params.pi_cation_distance) found.insert(InteractionType::PiCation);
      }
      if (p_cation)
        for (const auto& lr : lt.rings)
          if ((lr.center - *p_cation).norm() <= params.pi_cation_distance) found.insert(InteractionType::PiCation);
    }

    if (found.empty()) {
      bool contact = false;
      for (auto pa : res.heavy) {
        const Atom& p = protein.atoms[pa];
        const double rp = vdw_radius(p.element);
        for (int l : lt.heavy)
          if ((p.coords - lxyz[l]).norm() <= rp + vdw_radius(ligand.nodes[l].element) + params.vdw_tolerance) {
            contact = true;
            break;
          }
        if (contact) break;
      }
      if (contact) found.insert(InteractionType::VdWContact);
    }
    for (auto type : found) out.push_back({ligand_id, res.type, type, res.key});
  }
  std::sort(out.begin(), out.end(), [](const InteractionRecord& a, const InteractionRecord& b) {
    return std::tie(a.residue, a.type) < std::tie(b.residue, b.type);
  });
  return out;
}

}  // namespace poseval
