#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace poseval {

struct ElementInfo {
  std::string_view symbol;
  int atomic_number;
  double covalent_radius;  // Å, single-bond
  double vdw_radius;       // Å
  int max_valence;         // 0 = unconstrained (metals)
  bool metal;
};

/// Lookup by symbol, case-insensitive ("CL", "Cl" and "cl" all resolve). "D" maps to H.
const ElementInfo* find_element(std::string_view symbol);

/// Like find_element, throws PreconditionError naming the element when unknown.
const ElementInfo& element_info(std::string_view symbol);

/// Canonical capitalisation ("CL" -> "Cl"); empty optional when unknown.
std::optional<std::string> normalize_element(std::string_view symbol);

bool is_hydrogen(std::string_view symbol);
bool is_metal(std::string_view symbol);
double covalent_radius(std::string_view symbol);
double vdw_radius(std::string_view symbol);

}  // namespace poseval
