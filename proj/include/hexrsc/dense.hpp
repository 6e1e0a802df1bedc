#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "hexrsc/circuit.hpp"
#include "hexrsc/noise.hpp"

namespace hexrsc {

// Exact joint distribution over (detector bits, observable bits).
// Key layout: detector d -> bit d, observable o -> bit 48+o.
struct OutcomeDist {
  std::map<uint64_t, double> p;

  static uint64_t key(uint64_t det_mask, uint64_t obs_mask) {
    return det_mask | (obs_mask << 48);
  }
  double total() const {
    double t = 0;
    for (const auto& [k, v] : p) t += v;
    return t;
  }
  double total_variation(const OutcomeDist& o) const;
  // Marginal P(all detectors zero).
  double accept_probability() const;
  // E[outcome] of observable `o` conditioned on trivial detectors.
  double accepted_observable_mean(int o) const;
};

enum class NoiseHandling { Ignore, Expand };

// Brute-force statevector oracle for small circuits. Measurements and
// (optionally) Pauli channels branch; paths below `prune` probability are
// dropped, so results are exact up to that mass.
OutcomeDist dense_run(const Circuit& c,
                      NoiseHandling noise = NoiseHandling::Expand,
                      const std::vector<ErrorMechanism>* forced = nullptr,
                      double prune = 1e-13);

// Density-matrix variant (up to 9 qubits): Pauli channels are applied
// exactly as superoperators instead of being expanded path by path, so
// arbitrarily many simultaneous faults are accounted for.
OutcomeDist dense_run_rho(const Circuit& c, double prune = 1e-12);

// Single-qubit helper: amplitudes of U3(theta, phi, 0)|0>.
std::pair<std::complex<double>, std::complex<double>> u3_state(double theta,
                                                               double phi);

}  // namespace hexrsc
