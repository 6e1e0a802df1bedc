#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexrsc/lattice.hpp"

namespace hexrsc {

enum class Op {
  ResetZ,
  ResetX,
  H,
  CX,
  MeasureZ,
  MeasureX,
  MeasureY,
  PrepArb,
  Tick,
  Noise1Q,
  Noise2Q,
  FlipError,
  Detector,
  Observable,
};

bool is_noise_op(Op op);
bool is_measure_op(Op op);
const char* op_name(Op op);

struct Instruction {
  Op op;
  std::vector<QubitId> targets;  // CX: (control, target) pairs
  double a = 0.0;                // PrepArb: theta; noise ops: probability
  double b = 0.0;                // PrepArb: phi
  char axis = 'X';               // FlipError: 'X' or 'Z'
  std::vector<int32_t> rec;      // Detector/Observable: negative offsets
  int id = 0;                    // Detector: expected parity; Observable: id

  bool operator==(const Instruction& o) const;
};

struct DetectorDef {
  std::vector<uint32_t> records;  // absolute measurement indices
  int expected_parity = 0;
};

struct ObservableDef {
  int id = 0;
  std::vector<uint32_t> records;
};

struct Circuit {
  uint32_t num_qubits = 0;
  std::vector<Instruction> instructions;
  uint32_t measurement_count = 0;
  std::vector<DetectorDef> detector_defs;
  std::vector<ObservableDef> observable_defs;

  void append(Instruction ins);
  bool operator==(const Circuit& o) const;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One syndrome-extraction sub-round for the given stabilizer sub-group,
// as a standalone fragment (ancilla resets through ancilla measurement).
Circuit build_subround(const LatticeLayout& layout, char subgroup);

// r rounds of A+B syndrome extraction on data prepared in `basis`
// ('Z' or 'X'), with cross-sub-round layer overlap, detectors and one
// logical observable.
Circuit build_memory_circuit(const LatticeLayout& layout, char basis,
                             int rounds);

// The injection protocol: initialization, two sub-rounds, transversal
// readout, post-selection detectors and the logical-parity observable.
Circuit build_injection_circuit(const LatticeLayout& layout,
                                const InjectionLayout& inj, double theta,
                                double phi, char meas_basis);

std::string serialize(const Circuit& c);
Circuit parse(const std::string& text);

// Structural checks: two-qubit gates on lattice edges, tick-layer
// discipline, record references in range, PREP_ARB placement.
void validate(const Circuit& c, const LatticeLayout* layout = nullptr);

// Qubits acted on by non-noise instructions, per tick layer.
std::vector<std::vector<QubitId>> tick_layers(const Circuit& c);

}  // namespace hexrsc
