#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poseval/elements.hpp"
#include "poseval/error.hpp"
#include "poseval/structio.hpp"

namespace poseval {
namespace {

struct PendingRing {
  int atom;
  std::optional<BondOrder> order;
  std::size_t pos;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string s) : s_(std::move(s)) {}

  MoleculeGraph parse() {
    if (s_.empty()) throw ParseError("empty SMILES");
    std::vector<int> branch_stack;
    int prev = -1;
    std::optional<BondOrder> bond;
    bool bond_pending = false;

    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev < 0) fail("branch opened before any atom");
        branch_stack.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branch_stack.empty()) fail("unbalanced ')'");
        if (bond_pending) fail("bond symbol before ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (bond_pending) fail("bond symbol before '.'");
        prev = -1;
        ++pos_;
      } else if (c == '-' || c == '=' || c == '#' || c == ':') {
        if (bond_pending) fail("two consecutive bond symbols");
        bond = c == '-' ? BondOrder::Single : c == '=' ? BondOrder::Double : c == '#' ? BondOrder::Triple : BondOrder::Aromatic;
        bond_pending = true;
        ++pos_;
      } else if (c == '/' || c == '\\') {
        unsupported("directional bond '" + std::string(1, c) + "' (stereochemistry)");
      } else if (c == '$') {
        unsupported("quadruple bond '$'");
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring-closure digit before any atom");
        ring_closure(prev, bond);
        bond.reset();
        bond_pending = false;
      } else {
        const int atom = c == '[' ? bracket_atom() : organic_atom();
        if (prev >= 0) add_edge(prev, atom, bond);
        else if (bond_pending) fail("bond symbol without a preceding atom");
        bond.reset();
        bond_pending = false;
        prev = atom;
      }
    }
    if (bond_pending) fail("dangling bond symbol at end of input");
    if (!branch_stack.empty()) fail("unbalanced '('");
    if (!rings_.empty()) {
      pos_ = rings_.begin()->second.pos;
      fail("unclosed ring bond " + std::to_string(rings_.begin()->first));
    }
    assign_implicit_hydrogens();
    try {
      g_.validate();
    } catch (const PreconditionError& e) {
      throw ParseError(e.what());
    }
    return std::move(g_);
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("SMILES position " + std::to_string(pos_ + 1) + ": " + what);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedFormatError("SMILES position " + std::to_string(pos_ + 1) + ": unsupported token " + what);
  }

  int add_node(std::string element, bool aromatic, int charge, std::optional<int> hcount) {
    g_.nodes.push_back(GraphNode{std::move(element), charge, aromatic, hcount.value_or(0)});
    bracket_.push_back(hcount.has_value());
    return static_cast<int>(g_.nodes.size()) - 1;
  }

  void add_edge(int a, int b, std::optional<BondOrder> order) {
    if (a == b) fail("ring closure onto the same atom");
    for (const auto& e : g_.edges)
      if ((e.i == a && e.j == b) || (e.i == b && e.j == a)) fail("duplicate bond");
    BondOrder o = order.value_or(g_.nodes[a].aromatic && g_.nodes[b].aromatic ? BondOrder::Aromatic : BondOrder::Single);
    g_.edges.push_back({a, b, o});
  }

  int organic_atom() {
    const char c = s_[pos_];
    if (c == 'C' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'l') {
      pos_ += 2;
      return add_node("Cl", false, 0, std::nullopt);
    }
    if (c == 'B' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'r') {
      pos_ += 2;
      return add_node("Br", false, 0, std::nullopt);
    }
    static const std::map<char, std::pair<const char*, bool>> organic{
        {'B', {"B", false}}, {'C', {"C", false}}, {'N', {"N", false}}, {'O', {"O", false}},
        {'P', {"P", false}}, {'S', {"S", false}}, {'F', {"F", false}}, {'I', {"I", false}},
        {'b', {"B", true}},  {'c', {"C", true}},  {'n', {"N", true}},  {'o', {"O", true}},
        {'p', {"P", true}},  {'s', {"S", true}}};
    auto it = organic.find(c);
    if (c == '*') unsupported("wildcard atom '*'");
    if (it == organic.end()) fail("unexpected character '" + std::string(1, c) + "'");
    ++pos_;
    return add_node(it->second.first, it->second.second, 0, std::nullopt);
  }

  int bracket_atom() {
    const std::size_t open = pos_++;
    auto at_end = [&] { return pos_ >= s_.size(); };
    if (at_end()) fail("unterminated bracket atom");
    if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) unsupported("isotope label");

    std::string sym;
    bool aromatic = false;
    if (std::islower(static_cast<unsigned char>(s_[pos_]))) {
      aromatic = true;
      sym = std::string(1, static_cast<char>(std::toupper(s_[pos_])));
      ++pos_;
      if (!at_end() && (sym == "S" || sym == "A") && (s_[pos_] == 'e' || s_[pos_] == 's')) sym += s_[pos_++];
    } else if (std::isupper(static_cast<unsigned char>(s_[pos_]))) {
      sym = std::string(1, s_[pos_++]);
      if (!at_end() && std::islower(static_cast<unsigned char>(s_[pos_])) && find_element(sym + s_[pos_]))
        sym += s_[pos_++];
    } else {
      if (s_[pos_] == '*') unsupported("wildcard atom '*'");
      fail("bracket atom without an element symbol");
    }
    auto norm = normalize_element(sym);
    if (!norm) fail("unsupported element '" + sym + "'");

    if (!at_end() && s_[pos_] == '@') unsupported("chirality '@'");

    int hcount = 0;
    if (!at_end() && s_[pos_] == 'H') {
      ++pos_;
      hcount = 1;
      if (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) hcount = s_[pos_++] - '0';
    }
    int charge = 0;
    if (!at_end() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_++];
      int mag = 1;
      if (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        mag = s_[pos_++] - '0';
      } else {
        while (!at_end() && s_[pos_] == sign) {
          ++mag;
          ++pos_;
        }
      }
      charge = sign == '+' ? mag : -mag;
    }
    if (!at_end() && s_[pos_] == ':') {
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (at_end() || s_[pos_] != ']') {
      pos_ = at_end() ? open : pos_;
      fail("unterminated or malformed bracket atom");
    }
    ++pos_;
    return add_node(*norm, aromatic, charge, hcount);
  }

  void ring_closure(int atom, std::optional<BondOrder> order) {
    const std::size_t start = pos_;
    int label = 0;
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
        fail("'%' must be followed by two digits");
      label = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      label = s_[pos_++] - '0';
    }
    auto it = rings_.find(label);
    if (it == rings_.end()) {
      rings_.emplace(label, PendingRing{atom, order, start});
      return;
    }
    if (it->second.order && order && *it->second.order != *order) fail("conflicting ring-closure bond orders");
    add_edge(it->second.atom, atom, order ? order : it->second.order);
    rings_.erase(it);
  }

  void assign_implicit_hydrogens() {
    static const std::map<std::string, std::vector<int>> normal{
        {"B", {3}}, {"C", {4}}, {"N", {3, 5}}, {"O", {2}}, {"P", {3, 5}}, {"S", {2, 4, 6}},
        {"F", {1}}, {"Cl", {1}}, {"Br", {1}}, {"I", {1}}};
    std::vector<int> bond_sum(g_.nodes.size(), 0);
    for (const auto& e : g_.edges) {
      const int v = e.order == BondOrder::Aromatic ? 1 : static_cast<int>(e.order);
      bond_sum[e.i] += v;
      bond_sum[e.j] += v;
    }
    for (std::size_t k = 0; k < g_.nodes.size(); ++k) {
      if (bracket_[k]) continue;
      auto& n = g_.nodes[k];
      auto it = normal.find(n.element);
      if (it == normal.end()) continue;
      int used = bond_sum[k] + (n.aromatic ? 1 : 0);
      // Aromatic atoms only take their lowest normal valence.
      const auto& valences = n.aromatic ? std::vector<int>{it->second.front()} : it->second;
      n.implicit_hydrogens = 0;
      for (int v : valences)
        if (v >= used) {
          n.implicit_hydrogens = v - used;
          break;
        }
    }
  }

  std::string s_;
  std::size_t pos_ = 0;
  MoleculeGraph g_;
  std::vector<bool> bracket_;
  std::map<int, PendingRing> rings_;
};

}  // namespace

MoleculeGraph parse_smiles(std::string_view smiles) {
  std::string compact;
  for (char c : smiles)
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  auto g = SmilesParser(compact).parse();
  g.name = std::move(compact);
  return g;
}

}  // namespace poseval
