#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poseval/point.hpp"

namespace poseval {

struct ResidueKey {
  std::string chain_id;
  int seq = 0;
  char insertion_code = ' ';

  auto operator<=>(const ResidueKey&) const = default;
  std::string str() const;
};

struct Atom {
  std::string element;  // canonical capitalisation, e.g. "Cl"
  std::string name;
  Vec3 coords = Vec3::Zero();
  std::string chain_id;
  int residue_seq = 0;
  char insertion_code = ' ';
  std::string residue_name;
  int formal_charge = 0;
  bool is_hetero = false;

  bool is_hydrogen() const;
  ResidueKey residue() const { return {chain_id, residue_seq, insertion_code}; }
};

/// Heavy and hydrogen atoms of one model, in file order.
struct Structure {
  std::vector<Atom> atoms;
  std::string title;
  int model_index = 1;

  std::vector<std::size_t> heavy_atom_indices() const;
  Points heavy_coords() const;
  Structure without_hydrogens() const;
};

/// ATOM/HETATM stream -> first model. Altloc 'A' or blank kept, others dropped.
/// Throws ParseError (with line number) on malformed records and EmptyStructureError on no atoms.
Structure parse_pdb(std::string_view text);
std::string write_pdb(const Structure& s);

enum class BondOrder { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct GraphNode {
  std::string element;
  int formal_charge = 0;
  bool aromatic = false;
  int implicit_hydrogens = 0;  // SMILES only; never materialised as nodes

  bool is_hydrogen() const;
};

struct GraphEdge {
  int i = 0;
  int j = 0;
  BondOrder order = BondOrder::Single;
};

struct Neighbor {
  int node;
  BondOrder order;
};

/// Element/charge/bond-order labelled ligand graph, optionally with coordinates.
struct MoleculeGraph {
  std::string name;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::optional<Points> coords;
  /// Bonds came from distance-based perception: orders carry no information.
  bool bonds_perceived = false;

  std::size_t size() const { return nodes.size(); }
  bool has_coords() const { return coords.has_value(); }
  std::vector<std::vector<Neighbor>> adjacency() const;
  std::vector<int> heavy_indices() const;
  Points heavy_coords() const;
  /// Edge list simple and in range, coords size matches; valence limits when `check_valence`.
  void validate(bool check_valence = true) const;
};

/// V2000 records separated by `$$$$`. V3000 raises UnsupportedFormatError.
std::vector<MoleculeGraph> parse_sdf(std::string_view text);
std::string write_sdf(const std::vector<MoleculeGraph>& mols);

/// The SMILES subset documented in FORMATS.md. Stereo and isotopes raise UnsupportedFormatError.
MoleculeGraph parse_smiles(std::string_view smiles);

std::string read_text_file(const std::string& path);

}  // namespace poseval
