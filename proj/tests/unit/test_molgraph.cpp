#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "poseval/error.hpp"
#include "poseval/molgraph.hpp"

using namespace poseval;
using namespace testsupport;

namespace {

std::set<std::pair<int, int>> edge_set(const MoleculeGraph& g) {
  std::set<std::pair<int, int>> s;
  for (const auto& e : g.edges) s.emplace(std::min(e.i, e.j), std::max(e.i, e.j));
  return s;
}

MoleculeGraph permuted(const MoleculeGraph& g, const std::vector<int>& order) {
  std::vector<int> where(g.size());
  for (std::size_t k = 0; k < order.size(); ++k) where[order[k]] = static_cast<int>(k);
  MoleculeGraph out;
  for (int old : order) out.nodes.push_back(g.nodes[old]);
  for (const auto& e : g.edges) out.edges.push_back({where[e.i], where[e.j], e.order});
  if (g.coords) {
    Points xyz;
    for (int old : order) xyz.push_back((*g.coords)[old]);
    out.coords = xyz;
  }
  return out;
}

Atom atom(const std::string& el, Vec3 at) {
  Atom a;
  a.element = el;
  a.name = el;
  a.coords = at;
  return a;
}

}  // namespace

TEST(Graph, ValidateRejectsBrokenEdges) {
  auto g = make_graph({"C", "C"}, {{0, 1, 1}}, {{0, 0, 0}, {1.5, 0, 0}});
  EXPECT_NO_THROW(g.validate());
  g.edges.push_back({1, 0, BondOrder::Single});
  EXPECT_THROW(g.validate(), PreconditionError);
  g.edges = {{0, 0, BondOrder::Single}};
  EXPECT_THROW(g.validate(), PreconditionError);
  g.edges = {{0, 5, BondOrder::Single}};
  EXPECT_THROW(g.validate(), PreconditionError);
  auto o = make_graph({"O", "C", "C", "C"}, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}}, {});
  EXPECT_THROW(o.validate(), PreconditionError);
  EXPECT_NO_THROW(o.validate(false));
}

TEST(Perception, BondsByCovalentRadius) {
  const auto g = perceive_bonds({atom("C", {0, 0, 0}), atom("C", {1.54, 0, 0}), atom("O", {3.5, 0, 0}),
                                 atom("Zn", {0, 2.0, 0}), atom("Zn", {0, 4.0, 0})});
  EXPECT_TRUE(g.bonds_perceived);
  const auto e = edge_set(g);
  EXPECT_TRUE(e.contains({0, 1}));
  EXPECT_FALSE(e.contains({1, 2}));
  EXPECT_TRUE(e.contains({0, 3}));   // C-Zn 2.0 A is within 0.76 + 1.22 + 0.45
  EXPECT_FALSE(e.contains({3, 4}));  // never metal-metal
  EXPECT_THROW(perceive_bonds({atom("Xx", {0, 0, 0})}), PreconditionError);
}

TEST(Matching, RecoversAnyRelabelling) {
  const auto ref = hydroxybenzoate();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> order(ref.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto target = permuted(ref, order);
    const auto m = match_template(ref, target);
    ASSERT_EQ(m.pairs.size(), ref.size());
    const auto fwd = m.forward(ref.size());
    const auto target_edges = edge_set(target);
    for (const auto& e : ref.edges) {
      const int a = fwd[e.i], b = fwd[e.j];
      EXPECT_TRUE(target_edges.contains({std::min(a, b), std::max(a, b)}));
    }
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(ref.nodes[i].element, target.nodes[fwd[i]].element);
  }
}

TEST(Matching, IgnoresBondOrdersHydrogensAndCharges) {
  const auto kekule = parse_smiles("OC(=O)c1ccc(O)cc1");
  const auto aromatic = parse_smiles("[O-]C(=O)C1=CC=C(O)C=C1");
  EXPECT_NO_THROW(match_template(kekule, aromatic));
  auto with_h = make_graph({"C", "O", "H"}, {{0, 1, 1}, {1, 2, 1}}, {});
  auto bare = make_graph({"O", "C"}, {{0, 1, 1}}, {});
  const auto m = match_template(with_h, bare);
  EXPECT_EQ(m.forward(3)[0], 1);
  EXPECT_EQ(m.forward(3)[2], -1);
}

TEST(Matching, Failures) {
  const auto butane = parse_smiles("CCCC");
  const auto isobutane = parse_smiles("CC(C)C");
  EXPECT_THROW(match_template(butane, isobutane), MappingError);
  EXPECT_THROW(match_template(butane, parse_smiles("CCCO")), PreconditionError);
  EXPECT_THROW(match_template(butane, parse_smiles("CCC")), PreconditionError);
}

TEST(Matching, BudgetExhaustion) {
  // Two disjoint 12-rings against one 24-ring: colour refinement cannot separate them.
  auto ring = [](int n) { return "C1" + std::string(n - 2, 'C') + "C1"; };
  const std::string two_rings = ring(12) + "." + ring(12), big = ring(24);
  EXPECT_THROW(match_template(parse_smiles(two_rings), parse_smiles(big), 50), ResourceError);
  EXPECT_THROW(match_template(parse_smiles(two_rings), parse_smiles(big)), MappingError);
}

TEST(Automorphisms, CountsAndValidity) {
  EXPECT_EQ(automorphisms(parse_smiles("c1ccccc1")).perms.size(), 12u);
  EXPECT_EQ(automorphisms(parse_smiles("CC(C)(C)C")).perms.size(), 24u);
  EXPECT_EQ(automorphisms(parse_smiles("CCO")).perms.size(), 1u);
  const auto g = hydroxybenzoate();
  const auto a = automorphisms(g);
  EXPECT_EQ(a.perms.size(), 4u);  // ring flip x carboxylate swap
  std::vector<int> identity(a.heavy_nodes.size());
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_EQ(a.perms.front(), identity);
  const auto edges = edge_set(g);
  for (const auto& p : a.perms) {
    for (const auto& e : g.edges) {
      auto pos = [&](int node) { return static_cast<int>(std::find(a.heavy_nodes.begin(), a.heavy_nodes.end(), node) - a.heavy_nodes.begin()); };
      const int x = a.heavy_nodes[p[pos(e.i)]], y = a.heavy_nodes[p[pos(e.j)]];
      EXPECT_TRUE(edges.contains({std::min(x, y), std::max(x, y)}));
    }
  }
}

TEST(Automorphisms, CapTruncates) {
  const auto a = automorphisms(parse_smiles("C(C)(C)(C)C(C)(C)C"), 5);
  EXPECT_TRUE(a.truncated);
  EXPECT_EQ(a.perms.size(), 5u);
}

TEST(Rings, ChordlessOnly) {
  const auto naphthalene = parse_smiles("c1ccc2ccccc2c1");
  const auto rings = find_rings(naphthalene, 12);
  ASSERT_EQ(rings.size(), 2u);
  for (const auto& r : rings) EXPECT_EQ(r.size(), 6u);
  EXPECT_TRUE(find_rings(parse_smiles("CCCC")).empty());
  EXPECT_EQ(find_rings(parse_smiles("C1CCCCCCCC1"), 8).size(), 0u);
}

TEST(Rings, AromaticityFromFlagsOrKekule) {
  const auto g = hydroxybenzoate();
  const auto rings = find_rings(g, 6);
  ASSERT_EQ(rings.size(), 1u);
  EXPECT_TRUE(ring_is_aromatic(g, rings[0]));
  const auto cyclohexane = flat_cyclohexane();
  EXPECT_FALSE(ring_is_aromatic(cyclohexane, find_rings(cyclohexane, 6)[0]));
  const auto pyrrole = parse_smiles("N1C=CC=C1");
  EXPECT_TRUE(ring_is_aromatic(pyrrole, find_rings(pyrrole, 6)[0]));
  const auto diene = parse_smiles("C1C=CC=C1");
  EXPECT_FALSE(ring_is_aromatic(diene, find_rings(diene, 6)[0]));
}

TEST(Subgraph, HeavyOnlyWithIndexMap) {
  const auto g = make_graph({"H", "C", "O", "H"}, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
  std::vector<int> map;
  const auto h = heavy_subgraph(g, &map);
  EXPECT_EQ(h.size(), 2u);
  EXPECT_EQ(map, (std::vector<int>{1, 2}));
  EXPECT_EQ(h.edges.size(), 1u);
  EXPECT_DOUBLE_EQ((*h.coords)[1].x(), 2.0);
  EXPECT_EQ(heavy_formula(g), (std::vector<std::string>{"C", "O"}));
}
