#include <algorithm>
#include <cmath>
#include <set>

#include "poseval/error.hpp"
#include "poseval/plif.hpp"

namespace poseval {

std::string_view to_string(InteractionType t) {
  switch (t) {
    case InteractionType::HBondDonor: return "HBondDonor";
    case InteractionType::HBondAcceptor: return "HBondAcceptor";
    case InteractionType::Hydrophobic: return "Hydrophobic";
    case InteractionType::PiStacking: return "PiStacking";
    case InteractionType::PiCation: return "PiCation";
    case InteractionType::SaltBridgeCationic: return "SaltBridgeCationic";
    case InteractionType::SaltBridgeAnionic: return "SaltBridgeAnionic";
    case InteractionType::VdWContact: return "VdWContact";
    case InteractionType::MetalCoordination: return "MetalCoordination";
  }
  return "?";
}

std::optional<InteractionType> interaction_from_string(std::string_view s) {
  for (auto t : kAllInteractionTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string_view to_string(EmdFlag f) {
  switch (f) {
    case EmdFlag::None: return "none";
    case EmdFlag::BothEmpty: return "both_empty";
    case EmdFlag::OneSideEmpty: return "one_side_empty";
  }
  return "?";
}

std::string InteractionKey::str() const { return ligand_id + "|" + residue_type + "|" + std::string(to_string(type)); }

InteractionKey InteractionKey::parse(std::string_view s) {
  const auto a = s.find('|');
  const auto b = a == std::string_view::npos ? a : s.find('|', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos || s.find('|', b + 1) != std::string_view::npos)
    throw ParseError("interaction key '" + std::string(s) + "' is not ligandId|RES|InteractionType");
  auto type = interaction_from_string(s.substr(b + 1));
  if (!type) throw ParseError("unknown interaction type in key '" + std::string(s) + "'");
  return {std::string(s.substr(0, a)), std::string(s.substr(a + 1, b - a - 1)), *type};
}

bool InteractionKey::operator<(const InteractionKey& o) const {
  const auto ta = to_string(type), tb = to_string(o.type);
  if (ta != tb) return ta < tb;
  if (residue_type != o.residue_type) return residue_type < o.residue_type;
  return ligand_id < o.ligand_id;
}

void Fingerprint::add(const InteractionKey& k, long n) {
  if (n < 0) throw PreconditionError("fingerprint counts must be non-negative");
  if (n == 0) return;
  counts[k] += n;
}

long Fingerprint::total() const {
  long t = 0;
  for (const auto& [k, c] : counts) t += c;
  return t;
}

void Fingerprint::merge(const Fingerprint& other) {
  for (const auto& [k, c] : other.counts) add(k, c);
}

Fingerprint fingerprint(const std::vector<InteractionRecord>& records) {
  Fingerprint f;
  for (const auto& r : records) f.add({r.ligand_id, r.residue_type, r.type});
  return f;
}

nlohmann::json to_json(const Fingerprint& f) {
  auto j = nlohmann::json::object();
  for (const auto& [k, c] : f.counts) j[k.str()] = c;
  return j;
}

Fingerprint fingerprint_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("fingerprint JSON must be an object");
  Fingerprint f;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number_integer() || value.get<long>() < 0)
      throw ParseError("fingerprint count for '" + key + "' must be a non-negative integer");
    f.add(InteractionKey::parse(key), value.get<long>());
  }
  return f;
}

EmdInput build_emd_input(const Fingerprint& u, const Fingerprint& v, EmdMode mode) {
  std::set<InteractionKey> bins;
  for (const auto& [k, c] : u.counts) bins.insert(k);
  for (const auto& [k, c] : v.counts) bins.insert(k);
  EmdInput in;
  in.bin_order.assign(bins.begin(), bins.end());
  const double su = static_cast<double>(u.total()), sv = static_cast<double>(v.total());
  for (const auto& k : in.bin_order) {
    auto iu = u.counts.find(k);
    auto iv = v.counts.find(k);
    double cu = iu == u.counts.end() ? 0.0 : static_cast<double>(iu->second);
    double cv = iv == v.counts.end() ? 0.0 : static_cast<double>(iv->second);
    if (mode == EmdMode::Normalized) {
      cu = su > 0 ? cu / su : 0.0;
      cv = sv > 0 ? cv / sv : 0.0;
    }
    in.u_weights.push_back(cu);
    in.v_weights.push_back(cv);
  }
  return in;
}

double wasserstein_1d(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw PreconditionError("wasserstein_1d: weight vectors differ in length");
  double cu = 0, cv = 0, d = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cu += u[k];
    cv += v[k];
    d += std::abs(cu - cv);
  }
  return d;
}

EmdResult plif_emd(const Fingerprint& u, const Fingerprint& v, EmdMode mode) {
  EmdResult r;
  r.input = build_emd_input(u, v, mode);
  if (u.empty() && v.empty()) {
    r.flag = EmdFlag::BothEmpty;
    r.distance = 0.0;
    return r;
  }
  if (u.empty() || v.empty()) {
    r.flag = EmdFlag::OneSideEmpty;
    r.distance = std::max<double>(static_cast<double>(r.input.bin_order.size()) - 1.0, 1.0);
    return r;
  }
  r.distance = wasserstein_1d(r.input.u_weights, r.input.v_weights);
  return r;
}

std::map<std::string, double> plif_wm(const std::map<std::string, double>& emds) {
  if (emds.empty()) throw PreconditionError("plif_wm: empty cohort");
  double lo = emds.begin()->second, hi = lo;
  for (const auto& [m, x] : emds) {
    if (!std::isfinite(x)) throw PreconditionError("plif_wm: non-finite PLIF-EMD for '" + m + "'");
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  std::map<std::string, double> out;
  for (const auto& [m, x] : emds) out[m] = hi == lo ? 1.0 : 1.0 - (x - lo) / (hi - lo);
  return out;
}

}  // namespace poseval
