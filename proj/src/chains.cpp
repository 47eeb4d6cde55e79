#include <algorithm>
#include <cmath>
#include <map>

#include "poseval/assignment.hpp"
#include "poseval/error.hpp"
#include "poseval/metrics.hpp"

namespace poseval {
namespace {

char one_letter(std::string_view res) {
  static const std::map<std::string_view, char> table{
      {"ALA", 'A'}, {"ARG", 'R'}, {"ASN", 'N'}, {"ASP", 'D'}, {"CYS", 'C'}, {"GLN", 'Q'}, {"GLU", 'E'},
      {"GLY", 'G'}, {"HIS", 'H'}, {"ILE", 'I'}, {"LEU", 'L'}, {"LYS", 'K'}, {"MET", 'M'}, {"PHE", 'F'},
      {"PRO", 'P'}, {"SER", 'S'}, {"THR", 'T'}, {"TRP", 'W'}, {"TYR", 'Y'}, {"VAL", 'V'}, {"MSE", 'M'},
      {"SEC", 'U'}, {"PYL", 'O'}, {"HID", 'H'}, {"HIE", 'H'}, {"HIP", 'H'}, {"CYX", 'C'}};
  auto it = table.find(res);
  return it == table.end() ? '\0' : it->second;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> chain_sequences(const Structure& s) {
  std::vector<std::pair<std::string, std::string>> out;
  std::map<std::string, std::size_t> slot;
  const Atom* prev = nullptr;
  for (const auto& a : s.atoms) {
    const char c = one_letter(a.residue_name);
    if (!c) continue;
    if (prev && prev->chain_id == a.chain_id && prev->residue() == a.residue()) continue;
    prev = &a;
    auto [it, fresh] = slot.try_emplace(a.chain_id, out.size());
    if (fresh) out.emplace_back(a.chain_id, "");
    out[it->second].second += c;
  }
  return out;
}

double sequence_identity(std::string_view a, std::string_view b) {
  // Global alignment with match=1, mismatch=0, gap=0 is the longest common subsequence.
  if (a.empty() || b.empty()) return 0;
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

ChainMap map_chains(const Structure& pred, const Structure& ref, double identity_floor) {
  auto ps = chain_sequences(pred), rs = chain_sequences(ref);
  if (ps.empty() || rs.empty()) throw PreconditionError("map_chains: both structures need at least one protein chain");
  auto by_id = [](const auto& x, const auto& y) { return x.first < y.first; };
  std::sort(ps.begin(), ps.end(), by_id);
  std::sort(rs.begin(), rs.end(), by_id);

  // Rows: reference chains; columns: predicted chains. Sub-floor pairs contribute nothing.
  CostMatrix ident(rs.size(), std::vector<double>(ps.size(), 0.0));
  for (std::size_t r = 0; r < rs.size(); ++r)
    for (std::size_t p = 0; p < ps.size(); ++p) {
      const double id = sequence_identity(ps[p].second, rs[r].second);
      ident[r][p] = id >= identity_floor ? id : 0.0;
    }

  auto best_total = [&](const std::vector<int>& fixed) {
    // Optimal total identity with rows [0, fixed.size()) pinned to `fixed` (-1 = unassigned).
    std::vector<bool> col_used(ps.size(), false);
    double total = 0;
    for (std::size_t r = 0; r < fixed.size(); ++r)
      if (fixed[r] >= 0) {
        col_used[fixed[r]] = true;
        total += ident[r][fixed[r]];
      }
    std::vector<std::size_t> free_cols;
    for (std::size_t p = 0; p < ps.size(); ++p)
      if (!col_used[p]) free_cols.push_back(p);
    CostMatrix cost;
    for (std::size_t r = fixed.size(); r < rs.size(); ++r) {
      std::vector<double> row;
      for (auto p : free_cols) row.push_back(-ident[r][p]);
      cost.push_back(std::move(row));
    }
    if (!cost.empty() && !free_cols.empty()) total += -solve_assignment(cost).cost;
    return total;
  };

  // Ties between optimal assignments resolve lexicographically: walk reference chains in id order and
  // give each the smallest predicted chain id that keeps the optimum reachable.
  const double optimum = best_total({});
  std::vector<int> fixed;
  for (std::size_t r = 0; r < rs.size(); ++r) {
    int chosen = -1;
    std::vector<bool> used(ps.size(), false);
    for (int f : fixed)
      if (f >= 0) used[f] = true;
    for (std::size_t p = 0; p < ps.size() && chosen < 0; ++p) {
      if (used[p] || ident[r][p] <= 0) continue;
      auto trial = fixed;
      trial.push_back(static_cast<int>(p));
      if (std::abs(best_total(trial) - optimum) <= 1e-9) chosen = static_cast<int>(p);
    }
    fixed.push_back(chosen);
  }

  ChainMap out;
  double total = 0;
  for (std::size_t r = 0; r < rs.size(); ++r) {
    if (fixed[r] < 0) {
      out.unmapped_reference.push_back(rs[r].first);
      continue;
    }
    out.pairs.emplace_back(ps[fixed[r]].first, rs[r].first);
    out.identities.push_back(ident[r][fixed[r]]);
    total += ident[r][fixed[r]];
  }
  out.score = out.pairs.empty() ? 0.0 : total / static_cast<double>(out.pairs.size());
  return out;
}

}  // namespace poseval
