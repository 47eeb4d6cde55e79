#include <algorithm>
#include <cmath>
#include <tuple>
#include <numeric>
#include <set>

#include "poseval/error.hpp"
#include "poseval/harness.hpp"

namespace poseval {

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("mean_std: no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1))};
}

bool complex_success(const ComplexScore& s, const SuccessCriteria& c) {
  if (s.excluded) return false;
  bool any = false;
  for (const auto& f : s.fragments) {
    if (f.excluded) continue;
    any = true;
    if (!(f.rmsd <= c.rmsd_cutoff)) return false;
  }
  return any && (!c.require_pb_valid || s.pb_valid());
}

namespace {

struct RunTally {
  std::size_t scored = 0, excluded = 0;
  std::size_t frags = 0, rmsd_ok = 0, centroid_ok = 0, both_ok = 0, valid = 0;
  double emd_sum = 0;
  std::size_t emd_n = 0;
  double pli_sum = 0;
  std::size_t pli_n = 0;
};

double rate(std::size_t k, std::size_t n) { return static_cast<double>(k) / static_cast<double>(n); }

}  // namespace

std::vector<RunAggregate> aggregate(std::span<const ComplexScore> scores, const SuccessCriteria& criteria) {
  criteria.validate();
  std::vector<const ComplexScore*> ordered;
  for (const auto& s : scores) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(), [](const ComplexScore* a, const ComplexScore* b) {
    return std::tie(a->run, a->target_id) < std::tie(b->run, b->target_id);
  });
  std::map<int, RunTally> runs;
  for (const ComplexScore* sp : ordered) {
    const auto& s = *sp;
    auto& t = runs[s.run];
    if (s.excluded) {
      ++t.excluded;
      continue;
    }
    ++t.scored;
    const bool valid = s.pb_valid();
    t.valid += valid;
    for (const auto& f : s.fragments) {
      if (f.excluded) continue;
      ++t.frags;
      const bool ok = f.rmsd <= criteria.rmsd_cutoff;
      t.rmsd_ok += ok;
      t.centroid_ok += f.centroid_rmsd <= criteria.centroid_cutoff;
      t.both_ok += ok && (valid || !criteria.require_pb_valid);
      if (f.lddt_pli) {
        t.pli_sum += *f.lddt_pli;
        ++t.pli_n;
      }
    }
    if (s.emd) {
      t.emd_sum += s.emd->distance;
      ++t.emd_n;
    }
  }
  if (runs.empty()) throw PreconditionError("aggregate: no scores");
  for (const auto& [run, t] : runs)
    if (t.scored == 0 || t.frags == 0)
      throw PreconditionError("aggregate: run " + std::to_string(run) + " has no scoreable complex");

  std::size_t n_scored = 0, n_excluded = 0;
  for (const auto& [run, t] : runs) {
    n_scored += t.scored;
    n_excluded += t.excluded;
  }
  std::vector<RunAggregate> out;
  auto emit = [&](const char* metric, auto&& per_run) {
    std::vector<double> v;
    for (const auto& [run, t] : runs) v.push_back(per_run(t));
    const auto [m, sd] = mean_std(v);
    out.push_back({metric, m, sd, runs.size(), n_scored, n_excluded});
  };
  emit(kRmsdSuccess, [](const RunTally& t) { return rate(t.rmsd_ok, t.frags); });
  emit(kCentroidSuccess, [](const RunTally& t) { return rate(t.centroid_ok, t.frags); });
  emit(kRmsdAndValid, [](const RunTally& t) { return rate(t.both_ok, t.frags); });
  emit(kPbValid, [](const RunTally& t) { return rate(t.valid, t.scored); });
  bool all_emd = true, all_pli = true;
  for (const auto& [run, t] : runs) {
    all_emd = all_emd && t.emd_n > 0;
    all_pli = all_pli && t.pli_n > 0;
  }
  if (all_emd) emit(kEmdMean, [](const RunTally& t) { return t.emd_sum / static_cast<double>(t.emd_n); });
  if (all_pli) emit(kLddtPliMean, [](const RunTally& t) { return t.pli_sum / static_cast<double>(t.pli_n); });
  return out;
}

}  // namespace poseval
