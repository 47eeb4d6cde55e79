#include "poseval/elements.hpp"

#include <array>
#include <cctype>

#include "poseval/error.hpp"

namespace poseval {
namespace {

// Covalent radii: Cordero et al. (2008), sp3 carbon, low-spin where applicable.
// max_valence is a sanity ceiling (hypervalent N, S, P and halogen oxoanions
// allowed), not a bonding model.
// Van der Waals radii: Bondi (1964) with Alvarez (2013) for elements Bondi omits.
constexpr std::array kElements{
    ElementInfo{"H", 1, 0.31, 1.20, 1, false},
    ElementInfo{"Li", 3, 1.28, 1.82, 0, true},
    ElementInfo{"B", 5, 0.84, 1.92, 3, false},
    ElementInfo{"C", 6, 0.76, 1.70, 4, false},
    ElementInfo{"N", 7, 0.71, 1.55, 5, false},
    ElementInfo{"O", 8, 0.66, 1.52, 2, false},
    ElementInfo{"F", 9, 0.57, 1.47, 1, false},
    ElementInfo{"Na", 11, 1.66, 2.27, 0, true},
    ElementInfo{"Mg", 12, 1.41, 1.73, 0, true},
    ElementInfo{"Al", 13, 1.21, 1.84, 0, true},
    ElementInfo{"Si", 14, 1.11, 2.10, 4, false},
    ElementInfo{"P", 15, 1.07, 1.80, 5, false},
    ElementInfo{"S", 16, 1.05, 1.80, 6, false},
    ElementInfo{"Cl", 17, 1.02, 1.75, 7, false},
    ElementInfo{"K", 19, 2.03, 2.75, 0, true},
    ElementInfo{"Ca", 20, 1.76, 2.31, 0, true},
    ElementInfo{"V", 23, 1.53, 2.07, 0, true},
    ElementInfo{"Cr", 24, 1.39, 2.06, 0, true},
    ElementInfo{"Mn", 25, 1.39, 2.05, 0, true},
    ElementInfo{"Fe", 26, 1.32, 2.04, 0, true},
    ElementInfo{"Co", 27, 1.26, 2.00, 0, true},
    ElementInfo{"Ni", 28, 1.24, 1.63, 0, true},
    ElementInfo{"Cu", 29, 1.32, 1.40, 0, true},
    ElementInfo{"Zn", 30, 1.22, 1.39, 0, true},
    ElementInfo{"Se", 34, 1.20, 1.90, 6, false},
    ElementInfo{"Br", 35, 1.20, 1.85, 7, false},
    ElementInfo{"Sr", 38, 1.95, 2.49, 0, true},
    ElementInfo{"Mo", 42, 1.54, 2.10, 0, true},
    ElementInfo{"Cd", 48, 1.44, 1.58, 0, true},
    ElementInfo{"I", 53, 1.39, 1.98, 7, false},
    ElementInfo{"Ba", 56, 2.15, 2.68, 0, true},
    ElementInfo{"W", 74, 1.62, 2.18, 0, true},
    ElementInfo{"Pt", 78, 1.36, 1.75, 0, true},
    ElementInfo{"Au", 79, 1.36, 1.66, 0, true},
    ElementInfo{"Hg", 80, 1.32, 1.55, 0, true},
};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

}  // namespace

const ElementInfo* find_element(std::string_view symbol) {
  if (iequals(symbol, "D")) symbol = "H";
  for (const auto& e : kElements)
    if (iequals(e.symbol, symbol)) return &e;
  return nullptr;
}

const ElementInfo& element_info(std::string_view symbol) {
  if (const auto* e = find_element(symbol)) return *e;
  throw PreconditionError("unknown element '" + std::string(symbol) + "'");
}

std::optional<std::string> normalize_element(std::string_view symbol) {
  if (const auto* e = find_element(symbol)) return std::string(e->symbol);
  return std::nullopt;
}

bool is_hydrogen(std::string_view symbol) { return iequals(symbol, "H") || iequals(symbol, "D"); }

bool is_metal(std::string_view symbol) {
  const auto* e = find_element(symbol);
  return e && e->metal;
}

double covalent_radius(std::string_view symbol) { return element_info(symbol).covalent_radius; }
double vdw_radius(std::string_view symbol) { return element_info(symbol).vdw_radius; }

}  // namespace poseval
