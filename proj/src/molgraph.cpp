#include "poseval/molgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "poseval/elements.hpp"
#include "poseval/error.hpp"

namespace poseval {

bool GraphNode::is_hydrogen() const { return poseval::is_hydrogen(element); }

std::vector<std::vector<Neighbor>> MoleculeGraph::adjacency() const {
  std::vector<std::vector<Neighbor>> adj(nodes.size());
  for (const auto& e : edges) {
    adj[e.i].push_back({e.j, e.order});
    adj[e.j].push_back({e.i, e.order});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  return adj;
}

std::vector<int> MoleculeGraph::heavy_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!nodes[i].is_hydrogen()) out.push_back(static_cast<int>(i));
  return out;
}

Points MoleculeGraph::heavy_coords() const {
  if (!coords) throw PreconditionError("ligand '" + name + "' has no coordinates");
  Points out;
  for (int i : heavy_indices()) out.push_back((*coords)[i]);
  return out;
}

void MoleculeGraph::validate(bool check_valence) const {
  const int n = static_cast<int>(nodes.size());
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw PreconditionError("edge references a missing node");
    if (e.i == e.j) throw PreconditionError("self-loop on node " + std::to_string(e.i));
    if (!seen.emplace(std::min(e.i, e.j), std::max(e.i, e.j)).second)
      throw PreconditionError("duplicate edge " + std::to_string(e.i) + "-" + std::to_string(e.j));
  }
  if (coords && coords->size() != nodes.size()) throw PreconditionError("coordinate count differs from node count");
  if (!check_valence) return;
  std::vector<int> valence(nodes.size(), 0);
  for (const auto& e : edges) {
    const int v = e.order == BondOrder::Aromatic ? 1 : static_cast<int>(e.order);
    valence[e.i] += v;
    valence[e.j] += v;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& info = element_info(nodes[i].element);
    if (info.max_valence == 0) continue;
    const int total = valence[i] + nodes[i].implicit_hydrogens;
    if (total > info.max_valence + std::abs(nodes[i].formal_charge))
      throw PreconditionError("valence " + std::to_string(total) + " exceeds limit for " + nodes[i].element + " (node " +
                              std::to_string(i) + ")");
  }
}

std::vector<int> AtomMapping::forward(std::size_t template_size) const {
  std::vector<int> f(template_size, -1);
  for (auto [t, c] : pairs) f.at(t) = c;
  return f;
}

MoleculeGraph perceive_bonds(const std::vector<Atom>& ligand_atoms, double tolerance) {
  if (ligand_atoms.empty()) throw PreconditionError("perceive_bonds needs at least one atom");
  MoleculeGraph g;
  g.bonds_perceived = true;
  g.name = ligand_atoms.front().residue_name;
  Points coords;
  std::vector<double> radii;
  std::vector<bool> metal;
  for (const auto& a : ligand_atoms) {
    if (!a.coords.allFinite()) throw PreconditionError("non-finite coordinate on atom " + a.name);
    const auto& info = element_info(a.element);
    g.nodes.push_back(GraphNode{std::string(info.symbol), a.formal_charge, false, 0});
    coords.push_back(a.coords);
    radii.push_back(info.covalent_radius);
    metal.push_back(info.metal);
  }
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      if (metal[i] && metal[j]) continue;
      if ((coords[i] - coords[j]).norm() <= radii[i] + radii[j] + tolerance)
        g.edges.push_back({static_cast<int>(i), static_cast<int>(j), BondOrder::Single});
    }
  g.coords = std::move(coords);
  return g;
}

MoleculeGraph heavy_subgraph(const MoleculeGraph& g, std::vector<int>* index_map) {
  const auto heavy = g.heavy_indices();
  std::vector<int> remap(g.nodes.size(), -1);
  MoleculeGraph h;
  h.name = g.name;
  h.bonds_perceived = g.bonds_perceived;
  for (std::size_t k = 0; k < heavy.size(); ++k) {
    remap[heavy[k]] = static_cast<int>(k);
    h.nodes.push_back(g.nodes[heavy[k]]);
  }
  for (const auto& e : g.edges)
    if (remap[e.i] >= 0 && remap[e.j] >= 0) h.edges.push_back({remap[e.i], remap[e.j], e.order});
  if (g.coords) {
    Points c;
    for (int i : heavy) c.push_back((*g.coords)[i]);
    h.coords = std::move(c);
  }
  if (index_map) *index_map = heavy;
  return h;
}

std::vector<std::string> heavy_formula(const MoleculeGraph& g) {
  std::vector<std::string> f;
  for (const auto& n : g.nodes)
    if (!n.is_hydrogen()) f.push_back(n.element);
  std::sort(f.begin(), f.end());
  return f;
}

namespace {

// Heavy-atom graph labelled by element only. Bond orders and charges are left out so that Kekulé
// and resonance forms (ring flips, carboxylate oxygens) stay symmetric.
struct LabeledGraph {
  int n = 0;
  std::vector<int> node_label;
  std::vector<std::vector<int>> nbrs;
  std::vector<int> edge;  // n*n, label+1 or 0

  int edge_at(int a, int b) const { return edge[static_cast<std::size_t>(a) * n + b]; }
};

LabeledGraph build_labeled(const MoleculeGraph& g, const std::vector<int>& heavy,
                           std::map<std::string, int>& label_ids) {
  LabeledGraph lg;
  lg.n = static_cast<int>(heavy.size());
  std::vector<int> pos(g.nodes.size(), -1);
  for (int k = 0; k < lg.n; ++k) {
    pos[heavy[k]] = k;
    const auto& node = g.nodes[heavy[k]];
    auto [it, _] = label_ids.emplace(node.element, static_cast<int>(label_ids.size()));
    lg.node_label.push_back(it->second);
  }
  lg.nbrs.assign(lg.n, {});
  lg.edge.assign(static_cast<std::size_t>(lg.n) * lg.n, 0);
  for (const auto& e : g.edges) {
    const int a = pos[e.i], b = pos[e.j];
    if (a < 0 || b < 0) continue;
    lg.edge[static_cast<std::size_t>(a) * lg.n + b] = lg.edge[static_cast<std::size_t>(b) * lg.n + a] = 1;
    lg.nbrs[a].push_back(b);
    lg.nbrs[b].push_back(a);
  }
  for (auto& v : lg.nbrs) std::sort(v.begin(), v.end());
  return lg;
}

// Joint colour refinement: any label-preserving isomorphism maps each node to one of equal colour.
std::pair<std::vector<int>, std::vector<int>> refine_colors(const LabeledGraph& a, const LabeledGraph& b) {
  std::vector<int> ca = a.node_label, cb = b.node_label;
  std::size_t classes = 0;
  for (int iter = 0; iter <= a.n + b.n; ++iter) {
    std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> ids;
    auto step = [&](const LabeledGraph& g, const std::vector<int>& c) {
      std::vector<std::pair<int, std::vector<std::pair<int, int>>>> sigs(g.n);
      for (int v = 0; v < g.n; ++v) {
        std::vector<std::pair<int, int>> s;
        for (int w : g.nbrs[v]) s.emplace_back(c[w], g.edge_at(v, w));
        std::sort(s.begin(), s.end());
        sigs[v] = {c[v], std::move(s)};
        ids.emplace(sigs[v], 0);
      }
      return sigs;
    };
    auto sa = step(a, ca), sb = step(b, cb);
    int next = 0;
    for (auto& [k, v] : ids) v = next++;
    for (int v = 0; v < a.n; ++v) ca[v] = ids[sa[v]];
    for (int v = 0; v < b.n; ++v) cb[v] = ids[sb[v]];
    if (ids.size() == classes) break;
    classes = ids.size();
  }
  return {ca, cb};
}

// Visit order: breadth-first from the rarest colour so every later node has a mapped neighbour.
std::vector<int> search_order(const LabeledGraph& a, const std::vector<int>& colors) {
  std::map<int, int> freq;
  for (int c : colors) ++freq[c];
  std::vector<bool> seen(a.n, false);
  std::vector<int> order;
  while (static_cast<int>(order.size()) < a.n) {
    int start = -1;
    for (int v = 0; v < a.n; ++v)
      if (!seen[v] && (start < 0 || freq[colors[v]] < freq[colors[start]])) start = v;
    std::vector<int> queue{start};
    seen[start] = true;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      order.push_back(queue[q]);
      for (int w : a.nbrs[queue[q]])
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
    }
  }
  return order;
}

class IsomorphismSearch {
public:
  IsomorphismSearch(const LabeledGraph& a, const LabeledGraph& b, std::size_t budget) : a_(a), b_(b), budget_(budget) {
    auto [ca, cb] = refine_colors(a, b);
    ca_ = std::move(ca);
    cb_ = std::move(cb);
    order_ = search_order(a, ca_);
    map_.assign(a.n, -1);
    used_.assign(b.n, false);
  }

  /// Calls `visit(map)` for each isomorphism until it returns false. Returns false if the budget ran out.
  template <class Visit>
  bool run(Visit&& visit) {
    stop_ = false;
    exhausted_ = false;
    extend(0, visit);
    return !exhausted_;
  }

private:
  bool feasible(int u, int v) const {
    if (used_[v] || ca_[u] != cb_[v]) return false;
    if (a_.nbrs[u].size() != b_.nbrs[v].size()) return false;
    int mapped_u = 0, mapped_v = 0;
    for (int w : a_.nbrs[u]) {
      if (map_[w] < 0) continue;
      ++mapped_u;
      if (b_.edge_at(v, map_[w]) != a_.edge_at(u, w)) return false;
    }
    for (int x : b_.nbrs[v])
      if (used_[x]) ++mapped_v;
    return mapped_u == mapped_v;
  }

  template <class Visit>
  void extend(std::size_t depth, Visit& visit) {
    if (stop_) return;
    if (depth == order_.size()) {
      if (!visit(map_)) stop_ = true;
      return;
    }
    const int u = order_[depth];
    auto attempt = [&](int v) {
      if (stop_) return;
      if (++steps_ > budget_) {
        exhausted_ = stop_ = true;
        return;
      }
      if (!feasible(u, v)) return;
      map_[u] = v;
      used_[v] = true;
      extend(depth + 1, visit);
      map_[u] = -1;
      used_[v] = false;
    };
    // Same-index candidate first so the identity is the first automorphism found.
    if (u < b_.n) attempt(u);
    for (int v = 0; v < b_.n && !stop_; ++v)
      if (v != u) attempt(v);
  }

  const LabeledGraph& a_;
  const LabeledGraph& b_;
  std::size_t budget_;
  std::vector<int> ca_, cb_, order_, map_;
  std::vector<bool> used_;
  std::size_t steps_ = 0;
  bool stop_ = false;
  bool exhausted_ = false;
};

}  // namespace

AtomMapping match_template(const MoleculeGraph& tmpl, const MoleculeGraph& target, std::size_t node_budget) {
  const auto ht = tmpl.heavy_indices(), hg = target.heavy_indices();
  if (ht.size() != hg.size())
    throw PreconditionError("heavy-atom counts differ (" + std::to_string(ht.size()) + " vs " + std::to_string(hg.size()) + ")");
  if (heavy_formula(tmpl) != heavy_formula(target)) throw PreconditionError("heavy-atom element multisets differ");
  if (ht.empty()) throw PreconditionError("graphs have no heavy atoms");

  std::map<std::string, int> labels;
  const auto a = build_labeled(tmpl, ht, labels);
  const auto b = build_labeled(target, hg, labels);
  if (a.edge.size() != b.edge.size() ||
      std::count(a.edge.begin(), a.edge.end(), 0) != std::count(b.edge.begin(), b.edge.end(), 0))
    throw MappingError("template mapping failed: bond counts differ");

  IsomorphismSearch search(a, b, node_budget);
  std::vector<int> found;
  const bool complete = search.run([&](const std::vector<int>& m) {
    found = m;
    return false;
  });
  if (found.empty()) {
    if (!complete) throw ResourceError("template mapping exceeded the search budget of " + std::to_string(node_budget));
    throw MappingError("template mapping failed: graphs are not isomorphic");
  }
  AtomMapping out;
  for (std::size_t k = 0; k < found.size(); ++k) out.pairs.emplace_back(ht[k], hg[found[k]]);
  return out;
}

AutomorphismSet automorphisms(const MoleculeGraph& g, std::size_t cap, std::size_t node_budget) {
  const auto heavy = g.heavy_indices();
  if (heavy.empty()) throw PreconditionError("graph has no heavy atoms");
  if (cap == 0) throw PreconditionError("automorphism cap must be positive");
  std::map<std::string, int> labels;
  const auto lg = build_labeled(g, heavy, labels);

  AutomorphismSet out;
  out.heavy_nodes = heavy;
  IsomorphismSearch search(lg, lg, node_budget);
  const bool complete = search.run([&](const std::vector<int>& m) {
    if (out.perms.size() == cap) {
      out.truncated = true;  // one beyond the cap exists
      return false;
    }
    out.perms.push_back(m);
    return true;
  });
  if (!complete) out.truncated = true;
  if (out.perms.empty()) {
    // Budget ran out before the identity: fall back to it alone.
    std::vector<int> id(heavy.size());
    for (std::size_t k = 0; k < id.size(); ++k) id[k] = static_cast<int>(k);
    out.perms.push_back(std::move(id));
  }
  return out;
}

std::vector<std::vector<int>> find_rings(const MoleculeGraph& g, std::size_t max_size) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  std::vector<std::vector<int>> nbrs(n);
  for (const auto& e : g.edges) {
    adj[e.i][e.j] = adj[e.j][e.i] = 1;
    nbrs[e.i].push_back(e.j);
    nbrs[e.j].push_back(e.i);
  }
  for (auto& v : nbrs) std::sort(v.begin(), v.end());

  std::vector<std::vector<int>> rings;
  std::vector<int> path;
  std::vector<bool> on_path(n, false);
  auto dfs = [&](auto&& self, int s) -> void {
    const int u = path.back();
    for (int v : nbrs[u]) {
      if (v <= s || on_path[v]) continue;
      bool chord = false;
      for (std::size_t k = 1; k + 1 < path.size() && !chord; ++k) chord = adj[v][path[k]];
      if (chord) continue;
      if (path.size() >= 2 && adj[v][s]) {
        if (path[1] < v) {
          auto ring = path;
          ring.push_back(v);
          rings.push_back(std::move(ring));
        }
        continue;
      }
      if (path.size() + 1 < max_size) {
        path.push_back(v);
        on_path[v] = true;
        self(self, s);
        on_path[v] = false;
        path.pop_back();
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    on_path[s] = true;
    dfs(dfs, s);
    on_path[s] = false;
  }
  return rings;
}

bool ring_is_aromatic(const MoleculeGraph& g, const std::vector<int>& ring) {
  const std::size_t n = ring.size();
  if (n < 5) return false;
  std::vector<BondOrder> orders;
  for (std::size_t k = 0; k < n; ++k) {
    const int a = ring[k], b = ring[(k + 1) % n];
    bool found = false;
    for (const auto& e : g.edges)
      if ((e.i == a && e.j == b) || (e.i == b && e.j == a)) {
        orders.push_back(e.order);
        found = true;
        break;
      }
    if (!found) return false;
  }
  const bool all_flagged = std::all_of(ring.begin(), ring.end(), [&](int v) { return g.nodes[v].aromatic; });
  const bool all_bonds = std::all_of(orders.begin(), orders.end(), [](BondOrder o) { return o == BondOrder::Aromatic; });
  if (all_flagged || all_bonds) return true;
  if (g.bonds_perceived) return false;
  const auto doubles = std::count(orders.begin(), orders.end(), BondOrder::Double);
  if (n == 6 && doubles == 3) {
    for (std::size_t k = 0; k < n; ++k)
      if (orders[k] == BondOrder::Double && orders[(k + 1) % n] == BondOrder::Double) return false;
    return true;
  }
  if (n == 5 && doubles == 2) {
    // The atom outside both double bonds donates the lone pair.
    for (std::size_t k = 0; k < n; ++k) {
      const bool in_double = orders[k] == BondOrder::Double || orders[(k + n - 1) % n] == BondOrder::Double;
      if (!in_double) {
        const auto& el = g.nodes[ring[k]].element;
        return el == "N" || el == "O" || el == "S";
      }
    }
  }
  return false;
}

}  // namespace poseval
