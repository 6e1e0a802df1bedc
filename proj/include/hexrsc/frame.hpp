#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexrsc/circuit.hpp"
#include "hexrsc/noise.hpp"

namespace hexrsc {

// Sampled detector/observable bits for a batch of shots, packed 64 shots
// per word. Detector bits are flips relative to the noiseless reference,
// which is zero for every emitted detector.
struct ShotBatch {
  uint64_t shots = 0;
  uint32_t num_detectors = 0;
  uint32_t num_observables = 0;
  std::vector<std::vector<uint64_t>> det_bits;  // [detector][word]
  std::vector<std::vector<uint64_t>> obs_bits;  // [observable][word]

  // Injection runs only.
  bool injection = false;
  std::vector<uint64_t> accept_bits;   // 1 = trivial syndrome, kept
  std::vector<uint64_t> outcome_bits;  // 1 = logical outcome -1 ("down")

  size_t words() const { return (shots + 63) / 64; }
  bool det(size_t d, uint64_t s) const {
    return (det_bits[d][s >> 6] >> (s & 63)) & 1;
  }
  bool obs(size_t o, uint64_t s) const {
    return (obs_bits[o][s >> 6] >> (s & 63)) & 1;
  }
  bool accepted(uint64_t s) const {
    return (accept_bits[s >> 6] >> (s & 63)) & 1;
  }
  bool outcome_down(uint64_t s) const {
    return (outcome_bits[s >> 6] >> (s & 63)) & 1;
  }

  std::string to_csv() const;
  std::vector<uint8_t> to_binary() const;
  static ShotBatch from_binary(const std::vector<uint8_t>& bytes);
};

// Deterministic Pauli-frame sampling of a noisy circuit. Results depend
// only on (circuit, seed, shot index); `workers` never changes output.
ShotBatch frame_sample(const Circuit& noisy, uint64_t shots, uint64_t seed,
                       int workers = 1);

// Frame sampling for the injection circuit: the non-stabilizer center is
// handled by drawing the noiseless logical outcome from the injected
// state's Bloch vector, then applying the frame's flip. Acceptance is the
// AND of all post-selection detectors reading zero.
ShotBatch injected_frame_sample(const Circuit& injection, uint64_t shots,
                                uint64_t seed, int workers = 1);

// Deterministic signature of a single error mechanism.
struct MechanismSignature {
  std::vector<uint32_t> detectors;  // fired detector indices, sorted
  uint32_t observables = 0;         // bit mask over observable ids
};

MechanismSignature propagate_mechanism(const Circuit& circuit,
                                       const ErrorMechanism& mech);

// Joint signature of several mechanisms applied in the same shot.
MechanismSignature propagate_combined(const Circuit& circuit,
                                      const std::vector<ErrorMechanism>& set);

// Batched version: signature of every mechanism in one pass set.
std::vector<MechanismSignature> propagate_mechanisms(
    const Circuit& circuit, const std::vector<ErrorMechanism>& mechs);

// Expectation of the injected state in the measured basis, read from the
// circuit's PREP_ARB parameters and center readout basis.
double injected_reference_expectation(const Circuit& injection);

}  // namespace hexrsc
