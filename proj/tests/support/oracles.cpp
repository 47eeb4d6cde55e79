#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

namespace oracle {

double transport_cost(const std::vector<double>& supply, const std::vector<double>& demand) {
  // Nodes: 0 source, 1..B supply, B+1..2B demand, 2B+1 sink.
  const int b = static_cast<int>(supply.size());
  const int n = 2 * b + 2, src = 0, sink = 2 * b + 1;
  struct Edge {
    int to;
    double cap, cost;
    int rev;
  };
  std::vector<std::vector<Edge>> adj(n);
  auto add = [&](int u, int v, double cap, double cost) {
    adj[u].push_back({v, cap, cost, static_cast<int>(adj[v].size())});
    adj[v].push_back({u, 0.0, -cost, static_cast<int>(adj[u].size()) - 1});
  };
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < b; ++i) add(src, 1 + i, supply[i], 0.0);
  for (int j = 0; j < b; ++j) add(1 + b + j, sink, demand[j], 0.0);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) add(1 + i, 1 + b + j, inf, std::abs(i - j));

  constexpr double eps = 1e-15;
  double total = 0;
  for (int iter = 0; iter < 100 * n; ++iter) {
    std::vector<double> dist(n, inf);
    std::vector<int> prev_node(n, -1), prev_edge(n, -1);
    dist[src] = 0;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int u = 0; u < n; ++u) {
        if (dist[u] == inf) continue;
        for (int k = 0; k < static_cast<int>(adj[u].size()); ++k) {
          const auto& e = adj[u][k];
          if (e.cap > eps && dist[u] + e.cost < dist[e.to] - 1e-12) {
            dist[e.to] = dist[u] + e.cost;
            prev_node[e.to] = u;
            prev_edge[e.to] = k;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf) break;
    double push = inf;
    for (int v = sink; v != src; v = prev_node[v]) push = std::min(push, adj[prev_node[v]][prev_edge[v]].cap);
    for (int v = sink; v != src; v = prev_node[v]) {
      auto& e = adj[prev_node[v]][prev_edge[v]];
      e.cap -= push;
      adj[v][e.rev].cap += push;
    }
    total += push * dist[sink];
  }
  return total;
}

Histograms histograms(const poseval::Fingerprint& u, const poseval::Fingerprint& v) {
  using Key = std::tuple<std::string, std::string, std::string>;  // type name, residue, ligand
  std::map<Key, std::pair<double, double>> merged;
  for (const auto& [k, c] : u.counts) merged[{std::string(poseval::to_string(k.type)), k.residue_type, k.ligand_id}].first += c;
  for (const auto& [k, c] : v.counts) merged[{std::string(poseval::to_string(k.type)), k.residue_type, k.ligand_id}].second += c;
  Histograms h;
  double su = 0, sv = 0;
  for (const auto& [k, w] : merged) {
    h.bins.push_back(std::get<2>(k) + "|" + std::get<1>(k) + "|" + std::get<0>(k));
    h.u.push_back(w.first);
    h.v.push_back(w.second);
    su += w.first;
    sv += w.second;
  }
  for (auto& x : h.u) x /= su;
  for (auto& x : h.v) x /= sv;
  return h;
}

double brute_force_symmetry_rmsd(const poseval::MoleculeGraph& pred, const poseval::MoleculeGraph& ref) {
  const auto rh = ref.heavy_indices(), ph = pred.heavy_indices();
  if (rh.size() != ph.size()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = rh.size();
  auto edge_set = [](const poseval::MoleculeGraph& g, const std::vector<int>& heavy) {
    std::vector<int> pos(g.size(), -1);
    for (std::size_t k = 0; k < heavy.size(); ++k) pos[heavy[k]] = static_cast<int>(k);
    std::set<std::pair<int, int>> s;
    for (const auto& e : g.edges)
      if (pos[e.i] >= 0 && pos[e.j] >= 0) s.emplace(std::min(pos[e.i], pos[e.j]), std::max(pos[e.i], pos[e.j]));
    return s;
  };
  const auto re = edge_set(ref, rh), pe = edge_set(pred, ph);
  if (re.size() != pe.size()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = ref.nodes[rh[i]].element == pred.nodes[ph[perm[i]]].element;
    for (auto it = re.begin(); ok && it != re.end(); ++it) {
      const int a = perm[it->first], b = perm[it->second];
      ok = pe.contains({std::min(a, b), std::max(a, b)});
    }
    if (!ok) continue;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += ((*ref.coords)[rh[i]] - (*pred.coords)[ph[perm[i]]]).squaredNorm();
    best = std::min(best, std::sqrt(ss / static_cast<double>(n)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {
double preserved(double d_ref, double d_pred, const std::vector<double>& thresholds) {
  double hits = 0;
  for (double t : thresholds) hits += std::abs(d_ref - d_pred) < t ? 1.0 : 0.0;
  return hits / static_cast<double>(thresholds.size());
}
}  // namespace

double naive_lddt(const poseval::Points& ref, const poseval::Points& pred, const std::vector<int>& residue, double radius,
                  const std::vector<double>& thresholds, bool* any_scored) {
  double total = 0;
  int scored = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    double sum = 0;
    int count = 0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (i == j || residue[i] == residue[j]) continue;
      const double dr = (ref[i] - ref[j]).norm();
      if (dr > radius) continue;
      sum += preserved(dr, (pred[i] - pred[j]).norm(), thresholds);
      ++count;
    }
    if (count == 0) continue;
    total += sum / count;
    ++scored;
  }
  if (any_scored) *any_scored = scored > 0;
  return scored ? total / scored : 0.0;
}

double naive_cross_lddt(const poseval::Points& lig_ref, const poseval::Points& lig_pred, const poseval::Points& prot_ref,
                        const poseval::Points& prot_pred, double radius, const std::vector<double>& thresholds,
                        bool* any_scored) {
  double total = 0;
  int scored = 0;
  for (std::size_t i = 0; i < lig_ref.size(); ++i) {
    double sum = 0;
    int count = 0;
    for (std::size_t j = 0; j < prot_ref.size(); ++j) {
      const double dr = (lig_ref[i] - prot_ref[j]).norm();
      if (dr > radius) continue;
      sum += preserved(dr, (lig_pred[i] - prot_pred[j]).norm(), thresholds);
      ++count;
    }
    if (count == 0) continue;
    total += sum / count;
    ++scored;
  }
  if (any_scored) *any_scored = scored > 0;
  return scored ? total / scored : 0.0;
}

std::vector<std::vector<int>> components(std::span<const poseval::Points> ligands, double link) {
  const int n = static_cast<int>(ligands.size());
  auto near = [&](int a, int b) {
    for (const auto& p : ligands[a])
      for (const auto& q : ligands[b])
        if ((p - q).norm() <= link) return true;
    return false;
  };
  std::vector<int> seen(n, 0);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp;
    std::deque<int> q{s};
    seen[s] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      comp.push_back(u);
      for (int v = 0; v < n; ++v)
        if (!seen[v] && near(u, v)) {
          seen[v] = 1;
          q.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(comp);
  }
  return out;
}

}  // namespace oracle
