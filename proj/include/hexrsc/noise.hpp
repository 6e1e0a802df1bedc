#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexrsc/circuit.hpp"

namespace hexrsc {

// Circuit-level depolarizing noise. The uniform model uses one rate p
// everywhere; the calibrated preset reflects typical hardware averages.
struct NoiseModel {
  double p1 = 0.0;      // single-qubit depolarizing after 1q gates
  double p2 = 0.0;      // two-qubit depolarizing after CX
  double p_spam = 0.0;  // flip before measurement / after reset
  double p_idle = 0.0;  // depolarizing on idle qubits per tick layer

  static NoiseModel uniform(double p) { return {p, p, p, p}; }
  static NoiseModel calibrated_preset();
  NoiseModel scaled(double factor) const {
    return {p1 * factor, p2 * factor, p_spam * factor, p_idle * factor};
  }

  std::string to_json() const;
  static NoiseModel from_json(const std::string& text);
};

// One probabilistic Pauli fault: `paulis[i]` (1=X, 2=Z, 3=Y) acts on
// `targets[i]` right after instruction `instr`.
struct ErrorMechanism {
  double probability = 0.0;
  uint32_t instr = 0;
  std::vector<QubitId> targets;
  std::vector<uint8_t> paulis;
};

// Annotates a clean circuit with noise instructions.
Circuit apply_noise(const Circuit& c, const NoiseModel& model);

std::vector<ErrorMechanism> enumerate_mechanisms(const Circuit& noisy);

}  // namespace hexrsc
