#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "poseval/error.hpp"
#include "poseval/geometry.hpp"
#include "poseval/harness.hpp"
#include "poseval/metrics.hpp"

namespace poseval {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("pearson: lengths differ");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw PreconditionError("correlation undefined: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

double t_test_p(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double permutation_p(std::span<const double> x, std::vector<double> y, double observed, std::size_t n_perm,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n_perm; ++k) {
    std::shuffle(y.begin(), y.end(), rng);
    double r = 0;
    try {
      r = pearson(x, y);
    } catch (const PreconditionError&) {
    }
    if (std::abs(r) >= std::abs(observed) - 1e-12) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(n_perm + 1);
}

}  // namespace

Correlation correlate(std::span<const double> x, std::span<const double> y, std::size_t permutations,
                      std::uint64_t seed) {
  if (x.size() != y.size()) throw PreconditionError("correlate: lengths differ");
  if (x.size() < 3) throw PreconditionError("correlate: need at least 3 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw PreconditionError("correlate: non-finite value");
  Correlation c;
  c.pearson_r = pearson(x, y);
  const auto rx = average_ranks(x), ry = average_ranks(y);
  c.spearman_rho = pearson(rx, ry);
  c.permutations = permutations;
  if (permutations == 0) {
    c.pearson_p = t_test_p(c.pearson_r, x.size());
    c.spearman_p = t_test_p(c.spearman_rho, x.size());
  } else {
    c.pearson_p = permutation_p(x, {y.begin(), y.end()}, c.pearson_r, permutations, seed);
    c.spearman_p = permutation_p(rx, ry, c.spearman_rho, permutations, seed);
  }
  return c;
}

std::vector<SiteGroup> group_ligand_sites(std::span<const Points> ligands, const Structure& protein,
                                          double link_distance, double pocket_cutoff, double box_size) {
  if (ligands.empty()) throw PreconditionError("group_ligand_sites: no ligands");
  const std::size_t n = ligands.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (find(a) == find(b)) continue;
      bool linked = false;
      for (const auto& p : ligands[a]) {
        for (const auto& q : ligands[b])
          if ((p - q).norm() <= link_distance) {
            linked = true;
            break;
          }
        if (linked) break;
      }
      if (linked) parent[std::max(find(a), find(b))] = std::min(find(a), find(b));
    }

  std::map<std::size_t, SiteGroup> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].ligands.push_back(static_cast<int>(i));
  std::vector<SiteGroup> out;
  for (auto& [root, g] : groups) {
    g.box_size = box_size;
    std::vector<Points> members;
    Points all;
    for (int i : g.ligands) {
      members.push_back(ligands[i]);
      all.insert(all.end(), ligands[i].begin(), ligands[i].end());
    }
    if (all.empty()) throw PreconditionError("group_ligand_sites: ligand without heavy atoms");
    g.center = centroid(all);
    try {
      const auto pocket = select_pocket(protein, members, pocket_cutoff);
      Points pts;
      for (const auto& a : protein.atoms)
        if (!a.is_hydrogen() && pocket.residues.contains(a.residue())) pts.push_back(a.coords);
      g.center = centroid(pts);
      g.n_pocket_residues = pocket.residues.size();
    } catch (const PreconditionError&) {
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::map<std::string, std::string> load_annotations(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("annotation line needs target<TAB>keyword", line_no);
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

std::map<std::string, long> annotate_failures(const std::map<std::string, std::vector<ComplexScore>>& by_method,
                                              const std::map<std::string, std::string>& annotations,
                                              const SuccessCriteria& criteria) {
  std::set<std::string> targets;
  std::map<std::string, std::string> manifest_note;
  std::map<std::string, std::set<std::string>> succeeded;  // method -> targets with a successful run
  for (const auto& [method, scores] : by_method)
    for (const auto& s : scores) {
      targets.insert(s.target_id);
      if (s.annotation && !s.annotation->empty()) manifest_note.emplace(s.target_id, *s.annotation);
      if (complex_success(s, criteria)) succeeded[method].insert(s.target_id);
    }
  std::map<std::string, long> hist;
  for (const auto& t : targets) {
    bool failed_everywhere = true;
    for (const auto& [method, _] : by_method) failed_everywhere = failed_everywhere && !succeeded[method].contains(t);
    if (!failed_everywhere) continue;
    std::string key = "UNANNOTATED";
    if (auto it = annotations.find(t); it != annotations.end() && !it->second.empty()) key = it->second;
    else if (auto m = manifest_note.find(t); m != manifest_note.end()) key = m->second;
    ++hist[key];
  }
  return hist;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<TypeDistribution> interaction_distribution(std::span<const Fingerprint> fingerprints) {
  std::vector<TypeDistribution> out;
  for (auto type : kAllInteractionTypes) {
    TypeDistribution d;
    d.type = type;
    d.n = fingerprints.size();
    std::vector<double> v;
    for (const auto& f : fingerprints) {
      long c = 0;
      for (const auto& [k, n] : f.counts)
        if (k.type == type) c += n;
      v.push_back(static_cast<double>(c));
      ++d.histogram[c];
    }
    std::sort(v.begin(), v.end());
    if (!v.empty()) {
      d.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      d.min = v.front();
      d.max = v.back();
      d.q1 = quantile(v, 0.25);
      d.median = quantile(v, 0.5);
      d.q3 = quantile(v, 0.75);
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace poseval
