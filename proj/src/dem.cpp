#include "hexrsc/dem.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "hexrsc/frame.hpp"
#include "json.hpp"

namespace hexrsc {

namespace {

using SigKey = std::pair<std::vector<uint32_t>, uint32_t>;

// Split a mechanism into its single-qubit X/Z components; the signature
// of the whole is the XOR of the components' signatures.
std::vector<ErrorMechanism> atomize(const ErrorMechanism& m) {
  std::vector<ErrorMechanism> atoms;
  for (size_t k = 0; k < m.targets.size(); ++k) {
    uint8_t p = m.paulis[k];
    if (p & 1) atoms.push_back({m.probability, m.instr, {m.targets[k]}, {1}});
    if (p & 2) atoms.push_back({m.probability, m.instr, {m.targets[k]}, {2}});
  }
  return atoms;
}

std::string describe(size_t index) {
  return "mechanism #" + std::to_string(index);
}

// Partition `dets` into known graphlike signatures whose observables XOR
// to `obs`. Small sets only (at most 4 detectors in practice).
bool split_into_known(const std::set<SigKey>& known,
                      const std::vector<uint32_t>& dets, uint32_t obs,
                      uint32_t num_obs,
                      std::vector<SigKey>& out) {
  if (dets.empty()) return obs == 0;
  uint32_t obs_span = 1u << num_obs;
  // Try peeling a single-detector part.
  for (uint32_t o = 0; o < obs_span; ++o) {
    SigKey part{{dets[0]}, o};
    if (!known.count(part)) continue;
    std::vector<uint32_t> rest(dets.begin() + 1, dets.end());
    if (split_into_known(known, rest, obs ^ o, num_obs, out)) {
      out.push_back(part);
      return true;
    }
  }
  // Try peeling a pair containing the first detector.
  for (size_t j = 1; j < dets.size(); ++j) {
    for (uint32_t o = 0; o < obs_span; ++o) {
      SigKey part{{dets[0], dets[j]}, o};
      if (!known.count(part)) continue;
      std::vector<uint32_t> rest;
      for (size_t k = 1; k < dets.size(); ++k) {
        if (k != j) rest.push_back(dets[k]);
      }
      if (split_into_known(known, rest, obs ^ o, num_obs, out)) {
        out.push_back(part);
        return true;
      }
    }
  }
  return false;
}

}  // namespace

namespace detail {

DemCache make_dem_cache(const Circuit& noisy) {
  DemCache cache;
  cache.num_detectors = static_cast<uint32_t>(noisy.detector_defs.size());
  cache.num_observables = static_cast<uint32_t>(noisy.observable_defs.size());

  auto mechs = enumerate_mechanisms(noisy);
  auto sigs = propagate_mechanisms(noisy, mechs);
  cache.num_mechanisms = mechs.size();
  cache.sig_dets.reserve(sigs.size());
  cache.sig_obs.reserve(sigs.size());
  for (size_t i = 0; i < mechs.size(); ++i) {
    cache.sig_dets.push_back(sigs[i].detectors);
    cache.sig_obs.push_back(sigs[i].observables);
  }

  // Pass 1: graphlike mechanisms enter directly; hyperedges queue their
  // single-Pauli components.
  std::vector<ErrorMechanism> atom_queue;
  std::vector<size_t> atom_parent;
  std::set<SigKey> known;
  auto add_part = [&](const std::vector<uint32_t>& dets, uint32_t obs,
                      size_t parent) {
    cache.part_dets.push_back(dets);
    cache.part_obs.push_back(obs);
    cache.part_parent.push_back(parent);
    known.insert({dets, obs});
  };

  for (size_t i = 0; i < mechs.size(); ++i) {
    const auto& sig = sigs[i];
    if (sig.detectors.empty() && sig.observables == 0) continue;
    if (sig.detectors.size() <= 2) {
      if (sig.detectors.empty()) {
        throw DemError("undetectable logical " + describe(i));
      }
      add_part(sig.detectors, sig.observables, i);
    } else {
      for (auto& atom : atomize(mechs[i])) {
        atom_queue.push_back(atom);
        atom_parent.push_back(i);
      }
    }
  }

  // Pass 2: graphlike components enter; the rest wait for pass 3.
  std::vector<size_t> stubborn;
  std::vector<MechanismSignature> atom_sigs;
  if (!atom_queue.empty()) {
    atom_sigs = propagate_mechanisms(noisy, atom_queue);
    for (size_t a = 0; a < atom_queue.size(); ++a) {
      const auto& sig = atom_sigs[a];
      if (sig.detectors.empty() && sig.observables == 0) continue;
      if (sig.detectors.size() <= 2) {
        if (sig.detectors.empty()) {
          throw DemError("undetectable logical component of " +
                         describe(atom_parent[a]));
        }
        add_part(sig.detectors, sig.observables, atom_parent[a]);
      } else {
        stubborn.push_back(a);
      }
    }
  }

  // Pass 3: split remaining components into already-known signatures.
  for (size_t a : stubborn) {
    const auto& sig = atom_sigs[a];
    std::vector<SigKey> parts;
    if (!split_into_known(known, sig.detectors, sig.observables,
                          cache.num_observables, parts)) {
      throw DemError("undecomposable hyperedge: component of " +
                     describe(atom_parent[a]) + " fires " +
                     std::to_string(sig.detectors.size()) +
                     " detectors and no graphlike split exists");
    }
    for (const auto& part : parts) {
      add_part(part.first, part.second, atom_parent[a]);
    }
  }
  return cache;
}

Dem assemble_dem(const DemCache& cache, const std::vector<double>& probs) {
  if (probs.size() != cache.num_mechanisms) {
    throw DemError("mechanism count does not match the cached model");
  }
  Dem dem;
  dem.num_detectors = cache.num_detectors;
  dem.num_observables = cache.num_observables;

  std::map<SigKey, double> raw_merged, graph_merged;
  for (size_t i = 0; i < cache.num_mechanisms; ++i) {
    const auto& dets = cache.sig_dets[i];
    uint32_t obs = cache.sig_obs[i];
    if (dets.empty() && obs == 0) continue;
    SigKey key{dets, obs};
    auto [it, fresh] = raw_merged.try_emplace(key, 0.0);
    it->second = xor_probability(it->second, probs[i]);
  }
  for (size_t k = 0; k < cache.part_dets.size(); ++k) {
    SigKey key{cache.part_dets[k], cache.part_obs[k]};
    auto [it, fresh] = graph_merged.try_emplace(key, 0.0);
    it->second = xor_probability(it->second, probs[cache.part_parent[k]]);
  }

  for (const auto& [key, p] : raw_merged) {
    dem.raw.push_back({p, key.first, key.second});
  }
  for (const auto& [key, p] : graph_merged) {
    dem.mechanisms.push_back({p, key.first, key.second});
  }
  return dem;
}

}  // namespace detail

Dem build_dem(const Circuit& noisy) {
  auto cache = detail::make_dem_cache(noisy);
  auto mechs = enumerate_mechanisms(noisy);
  std::vector<double> probs;
  probs.reserve(mechs.size());
  for (const auto& m : mechs) probs.push_back(m.probability);
  return detail::assemble_dem(cache, probs);
}

std::string Dem::to_json() const {
  nlohmann::json j;
  j["detectors"] = num_detectors;
  j["observables"] = num_observables;
  j["mechanisms"] = nlohmann::json::array();
  for (const auto& m : mechanisms) {
    nlohmann::json obs = nlohmann::json::array();
    for (uint32_t o = 0; o < num_observables; ++o) {
      if ((m.observables >> o) & 1) obs.push_back(o);
    }
    j["mechanisms"].push_back(
        {{"p", m.probability}, {"dets", m.detectors}, {"obs", obs}});
  }
  return j.dump(2);
}

Dem Dem::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Dem dem;
  dem.num_detectors = j.at("detectors").get<uint32_t>();
  dem.num_observables = j.at("observables").get<uint32_t>();
  for (const auto& m : j.at("mechanisms")) {
    DemMechanism mech;
    mech.probability = m.at("p").get<double>();
    mech.detectors = m.at("dets").get<std::vector<uint32_t>>();
    for (uint32_t o : m.at("obs").get<std::vector<uint32_t>>()) {
      mech.observables |= 1u << o;
    }
    dem.mechanisms.push_back(std::move(mech));
  }
  dem.raw = dem.mechanisms;
  return dem;
}

}  // namespace hexrsc
