#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexrsc/circuit.hpp"
#include "hexrsc/noise.hpp"

namespace hexrsc {

struct DemMechanism {
  double probability = 0.0;
  std::vector<uint32_t> detectors;  // sorted
  uint32_t observables = 0;         // bit mask
};

struct DemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Detector error model. `mechanisms` is the decoding list: every entry
// has at most two detectors (hyperedges are decomposed into their
// single-Pauli components, each keeping the parent probability). `raw`
// keeps the merged un-decomposed signatures; XORing an entry's
// decomposed parts reproduces its raw signature.
struct Dem {
  uint32_t num_detectors = 0;
  uint32_t num_observables = 0;
  std::vector<DemMechanism> mechanisms;
  std::vector<DemMechanism> raw;

  std::string to_json() const;
  static Dem from_json(const std::string& text);
};

Dem build_dem(const Circuit& noisy);

// XOR-combination of probabilities of two independent sources for the
// same signature.
inline double xor_probability(double a, double b) {
  return a * (1.0 - b) + b * (1.0 - a);
}

namespace detail {

// Propagated signatures are independent of the noise rates, so sweeps
// cache them once per circuit shape and re-assemble models per rate.
// Hyperedges are decomposed up front: first into single-Pauli components,
// then, where a component still fires more than two detectors, into
// already-known graphlike signatures whose XOR reproduces it.
struct DemCache {
  uint32_t num_detectors = 0;
  uint32_t num_observables = 0;
  size_t num_mechanisms = 0;
  std::vector<std::vector<uint32_t>> sig_dets;  // per raw mechanism
  std::vector<uint32_t> sig_obs;
  std::vector<std::vector<uint32_t>> part_dets;  // graphlike contributions
  std::vector<uint32_t> part_obs;
  std::vector<size_t> part_parent;  // raw mechanism the part belongs to
};

DemCache make_dem_cache(const Circuit& noisy);
Dem assemble_dem(const DemCache& cache, const std::vector<double>& probs);

}  // namespace detail

}  // namespace hexrsc
