#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "oracles.hpp"
#include "poseval/assignment.hpp"
#include "poseval/error.hpp"
#include "poseval/metrics.hpp"

using namespace poseval;
using namespace testsupport;

namespace {

// Backbone-like residue chain along x, one residue every 3.8 A.
Structure peptide(const std::string& chain, const std::vector<std::string>& names, Vec3 origin = Vec3::Zero()) {
  std::vector<ResidueSpec> residues;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const Vec3 ca = origin + Vec3(3.8 * k, (k % 2) ? 1.0 : -1.0, 0);
    residues.push_back({names[k], static_cast<int>(k + 1),
                    {{"N", ca + Vec3(-1.2, 0.5, 0)}, {"CA", ca}, {"C", ca + Vec3(1.2, 0.5, 0.3)}, {"CB", ca + Vec3(0, 0, 1.5)}},
                    chain});
  }
  return make_structure(residues);
}

}  // namespace

TEST(Rmsd, Basics) {
  const Points a{{0, 0, 0}, {1, 0, 0}}, b{{0, 0, 1}, {1, 0, 1}};
  EXPECT_DOUBLE_EQ(rmsd(a, b), 1.0);
  EXPECT_DOUBLE_EQ(rmsd(a, a), 0.0);
  EXPECT_THROW(rmsd(a, Points{{0, 0, 0}}), PreconditionError);
  EXPECT_THROW(rmsd(Points{}, Points{}), PreconditionError);
  EXPECT_DOUBLE_EQ(centroid_rmsd(a, Points{{0.5, 0, 3}}), 3.0);
}

TEST(SymmetryRmsd, RingFlipIsForgiven) {
  const auto ref = hydroxybenzoate();
  auto pred = ref;
  // Mirror through the ring axis: swaps ortho/meta carbons and the carboxylate oxygens.
  for (auto& p : *pred.coords) p.y() = -p.y();
  const auto r = rmsd_symmetry_corrected(pred, ref, match_template(ref, pred));
  EXPECT_LT(r.rmsd, 1e-12);
  EXPECT_GT(r.naive_rmsd, 1.0);
  EXPECT_EQ(r.n_automorphisms, 4u);
  EXPECT_FALSE(r.truncated);
}

TEST(SymmetryRmsd, InvariantsOnRandomPoses) {
  const auto ref = hydroxybenzoate();
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0, 0.8);
  for (int trial = 0; trial < 40; ++trial) {
    auto pred = ref;
    for (auto& p : *pred.coords) p += Vec3(noise(rng), noise(rng), noise(rng));
    const auto m = match_template(ref, pred);
    const auto plain = rmsd_symmetry_corrected(pred, ref, m);
    const auto fitted = rmsd_symmetry_corrected(pred, ref, m, kDefaultAutomorphismCap, true);
    EXPECT_LE(plain.rmsd, plain.naive_rmsd + 1e-12);
    EXPECT_LE(fitted.rmsd, plain.rmsd + 1e-12);
    EXPECT_NEAR(plain.rmsd, oracle::brute_force_symmetry_rmsd(pred, ref), 1e-9);
    // Rigid motion of the prediction does not change the superposed score.
    auto moved = pred;
    planted_motion(20.0 + trial).apply_in_place(*moved.coords);
    EXPECT_NEAR(rmsd_symmetry_corrected(moved, ref, m, kDefaultAutomorphismCap, true).rmsd, fitted.rmsd, 1e-9);
  }
}

TEST(SymmetryRmsd, RequiresCompleteMapping) {
  const auto ref = hydroxybenzoate();
  AtomMapping partial;
  partial.pairs = {{0, 0}};
  EXPECT_THROW(rmsd_symmetry_corrected(ref, ref, partial), PreconditionError);
}

TEST(Lddt, PerfectAndBounded) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> noise(0, 2.0);
  const LddtParams params;
  for (int trial = 0; trial < 20; ++trial) {
    const auto ref = random_points(rng, 60, 25.0);
    std::vector<int> residue(ref.size());
    std::iota(residue.begin(), residue.end(), 0);
    EXPECT_DOUBLE_EQ(lddt(ref, ref, residue, params).score, 1.0);
    auto pred = ref;
    for (auto& p : pred) p += Vec3(noise(rng), noise(rng), noise(rng));
    const double s = lddt(ref, pred, residue, params).score;
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    // Superposition free: a rigid motion of the prediction leaves the score unchanged.
    auto moved = pred;
    planted_motion(15.0 * trial).apply_in_place(moved);
    EXPECT_NEAR(lddt(ref, moved, residue, params).score, s, 1e-12);
  }
}

TEST(Lddt, ThresholdsAreStrict) {
  // One pair 3 A apart in the reference; prediction stretches it by exactly 1.0 A.
  const Points ref{{0, 0, 0}, {3, 0, 0}}, pred{{0, 0, 0}, {4, 0, 0}};
  const std::vector<int> residue{0, 1};
  EXPECT_DOUBLE_EQ(lddt(ref, pred, residue, LddtParams{}).score, 0.5);  // passes 2 and 4, fails 0.5 and 1
}

TEST(Lddt, SameResiduePairsExcluded) {
  const Points ref{{0, 0, 0}, {1.5, 0, 0}, {20, 0, 0}};
  const std::vector<int> residue{0, 0, 1};
  EXPECT_THROW(lddt(ref, ref, residue, LddtParams{}), PreconditionError);
  LddtParams keep;
  keep.exclude_same_residue = false;
  EXPECT_EQ(lddt(ref, ref, residue, keep).n_scored, 2u);
}

TEST(Lddt, ParameterValidation) {
  LddtParams p;
  p.thresholds = {1.0, 0.5};
  EXPECT_THROW(p.validate(), PreconditionError);
  p.thresholds = {};
  EXPECT_THROW(p.validate(), PreconditionError);
  p.thresholds = {0.5, 20.0};
  EXPECT_THROW(p.validate(), PreconditionError);
  EXPECT_DOUBLE_EQ(lddt_pli_defaults().inclusion_radius, 6.0);
}

TEST(Lddt, SerialAndParallelAgree) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> noise(0, 1.0);
  const auto ref = random_points(rng, 800, 40.0);
  auto pred = ref;
  for (auto& p : pred) p += Vec3(noise(rng), noise(rng), noise(rng));
  std::vector<int> residue(ref.size());
  for (std::size_t i = 0; i < residue.size(); ++i) residue[i] = static_cast<int>(i / 7);
  const LddtParams params;
  EXPECT_DOUBLE_EQ(lddt(ref, pred, residue, params).score, serial::lddt(ref, pred, residue, params).score);
  const Points lig(ref.begin(), ref.begin() + 30), lig_p(pred.begin(), pred.begin() + 30);
  const Points prot(ref.begin() + 30, ref.end()), prot_p(pred.begin() + 30, pred.end());
  const auto a = lddt_cross(lig, lig_p, prot, prot_p, lddt_pli_defaults());
  const auto b = serial::lddt_cross(lig, lig_p, prot, prot_p, lddt_pli_defaults());
  ASSERT_TRUE(a.score && b.score);
  EXPECT_DOUBLE_EQ(*a.score, *b.score);
  EXPECT_EQ(a.n_pairs, b.n_pairs);
}

TEST(Lddt, CrossWithoutNeighbours) {
  const Points lig{{0, 0, 0}}, prot{{50, 0, 0}};
  const auto r = lddt_cross(lig, lig, prot, prot, lddt_pli_defaults());
  EXPECT_FALSE(r.score.has_value());
}

TEST(Chains, SequenceIdentity) {
  EXPECT_DOUBLE_EQ(sequence_identity("ACDE", "ACDE"), 1.0);
  EXPECT_DOUBLE_EQ(sequence_identity("ACDE", "ACE"), 0.75);
  EXPECT_DOUBLE_EQ(sequence_identity("", "A"), 0.0);
}

TEST(Chains, MappingFollowsSequenceNotName) {
  const std::vector<std::string> s1{"ALA", "CYS", "ASP", "GLU", "PHE", "GLY"};
  const std::vector<std::string> s2{"HIS", "ILE", "LYS", "LEU", "MET", "ASN"};
  auto ref = peptide("A", s1);
  const auto rb = peptide("B", s2, Vec3(0, 20, 0));
  ref.atoms.insert(ref.atoms.end(), rb.atoms.begin(), rb.atoms.end());
  auto pred = peptide("X", s2, Vec3(0, 20, 0));
  const auto pa = peptide("Y", s1);
  pred.atoms.insert(pred.atoms.end(), pa.atoms.begin(), pa.atoms.end());
  const auto map = map_chains(pred, ref);
  EXPECT_EQ(map.predicted_for("A"), "Y");
  EXPECT_EQ(map.predicted_for("B"), "X");
  EXPECT_DOUBLE_EQ(map.score, 1.0);
  const auto pairs = correspond_atoms(pred, ref, map);
  EXPECT_EQ(pairs.size(), ref.atoms.size());
  for (const auto& p : pairs) EXPECT_EQ(pred.atoms[p.pred].name, ref.atoms[p.ref].name);
}

TEST(Chains, UnrelatedChainStaysUnmapped) {
  const auto ref = peptide("A", {"ALA", "ALA", "ALA", "ALA"});
  const auto pred = peptide("A", {"TRP", "TRP", "TRP", "TRP"});
  const auto map = map_chains(pred, ref);
  EXPECT_TRUE(map.pairs.empty());
  EXPECT_EQ(map.unmapped_reference, (std::vector<std::string>{"A"}));
}

TEST(Pocket, WatersNeverSelected) {
  auto ref = peptide("A", {"ALA", "SER", "GLY"});
  ResidueSpec water{"HOH", 101, {{"O", Vec3(1, 1, 1)}}};
  const auto w = make_structure({water});
  ref.atoms.insert(ref.atoms.end(), w.atoms.begin(), w.atoms.end());
  const Points lig{{1, 1, 2}};
  const auto pocket = select_pocket(ref, std::span<const Points>(&lig, 1));
  EXPECT_FALSE(pocket.residues.contains(ResidueKey{"A", 101, ' '}));
  EXPECT_TRUE(pocket.residues.contains(ResidueKey{"A", 1, ' '}));
  EXPECT_TRUE(is_water("HOH"));
  const Points far{{500, 0, 0}};
  EXPECT_THROW(select_pocket(ref, std::span<const Points>(&far, 1)), PreconditionError);
  EXPECT_THROW(select_pocket(ref, {}), PreconditionError);
}

TEST(Pocket, AlignmentAndInterfaceScore) {
  const auto ref = peptide("A", {"ALA", "SER", "GLY", "LEU", "VAL", "THR"});
  const Points lig{{7.6, 3.0, 1.0}, {8.5, 3.5, 1.5}, {9.5, 3.0, 1.0}};
  const auto pocket = select_pocket(ref, std::span<const Points>(&lig, 1));
  auto pred = ref;
  const auto motion = planted_motion(70.0);
  motion.apply_in_place(pred);
  const auto pred_lig = motion.apply(lig);
  const auto map = map_chains(pred, ref);
  const auto aligned = align_pocket(pred, ref, pocket, map);
  EXPECT_LT(aligned.rmsd, 1e-9);
  EXPECT_EQ(aligned.n_missing, 0u);
  const auto pli = lddt_pli(pred, pred_lig, ref, lig, pocket, map, aligned.transform);
  ASSERT_TRUE(pli.score.has_value());
  EXPECT_NEAR(*pli.score, 1.0, 1e-12);
  // Shifting the ligand relative to the pocket lowers the score.
  Points shifted = pred_lig;
  for (auto& p : shifted) p += motion.rotation * Vec3(0, 0, 1.5);
  EXPECT_LT(*lddt_pli(pred, shifted, ref, lig, pocket, map, aligned.transform).score, 1.0);
}

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> c(0, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 1 + trial % 6, cols = 1 + (trial / 6) % 6;
    CostMatrix m(rows, std::vector<double>(cols));
    for (auto& r : m)
      for (auto& v : r) v = c(rng);
    const auto got = solve_assignment(m);
    // Brute force over injections of the smaller side.
    double best = 1e300;
    const int k = std::min(rows, cols);
    std::vector<int> idx(std::max(rows, cols));
    std::iota(idx.begin(), idx.end(), 0);
    do {
      double s = 0;
      for (int i = 0; i < k; ++i) s += rows <= cols ? m[i][idx[i]] : m[idx[i]][i];
      best = std::min(best, s);
    } while (std::next_permutation(idx.begin(), idx.end()));
    EXPECT_NEAR(got.cost, best, 1e-9);
    std::set<int> used;
    int assigned = 0;
    for (int col : got.row_to_col)
      if (col >= 0) {
        EXPECT_TRUE(used.insert(col).second);
        ++assigned;
      }
    EXPECT_EQ(assigned, k);
  }
  EXPECT_THROW(solve_assignment({{1.0, 2.0}, {1.0}}), PreconditionError);
}
