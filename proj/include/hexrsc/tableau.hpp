#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hexrsc/circuit.hpp"
#include "hexrsc/pauli.hpp"

namespace hexrsc {

struct UnsupportedCircuit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Measurement outcome as an affine form over the random bits introduced
// by non-deterministic measurements: value = constant XOR (vars . r).
struct OutcomeForm {
  bool constant = false;
  std::vector<uint64_t> vars;

  bool deterministic() const {
    for (uint64_t w : vars) {
      if (w) return false;
    }
    return true;
  }
  void merge(const OutcomeForm& o) {
    constant ^= o.constant;
    if (vars.size() < o.vars.size()) vars.resize(o.vars.size(), 0);
    for (size_t i = 0; i < o.vars.size(); ++i) vars[i] ^= o.vars[i];
  }
};

struct TableauOutcome {
  bool deterministic = false;
  bool value = false;  // sampled under the run's seed
};

struct TableauResult {
  std::vector<TableauOutcome> records;
  std::vector<TableauOutcome> detectors;
  std::vector<TableauOutcome> observables;
  std::vector<OutcomeForm> record_forms;
};

// Aaronson-Gottesman tableau with symbolic phase tracking. Works for
// Clifford circuits; PREP_ARB is accepted only at stabilizer-state
// angles (multiples of pi/2).
class SymbolicTableau {
 public:
  explicit SymbolicTableau(size_t n);

  void h(size_t q);
  void s(size_t q);
  void sdg(size_t q);
  void x(size_t q);
  void z(size_t q);
  void cx(size_t c, size_t t);
  void reset_z(size_t q);
  void reset_x(size_t q);
  OutcomeForm measure_z(size_t q);
  OutcomeForm measure_x(size_t q);
  OutcomeForm measure_y(size_t q);
  void prep_arb(size_t q, double theta, double phi);

  size_t num_vars() const { return num_vars_; }

 private:
  struct Row {
    std::vector<uint64_t> x, z;
    bool sign = false;
    std::vector<uint64_t> vars;
  };

  bool row_x(const Row& r, size_t q) const { return (r.x[q >> 6] >> (q & 63)) & 1; }
  bool row_z(const Row& r, size_t q) const { return (r.z[q >> 6] >> (q & 63)) & 1; }
  void rowmult(Row& h, const Row& i) const;  // h := i * h
  OutcomeForm fresh_var();

  size_t n_, words_;
  size_t num_vars_ = 0;
  std::vector<Row> rows_;  // [0,n) destabilizers, [n,2n) stabilizers
};

// Runs the noiseless part of a circuit (noise instructions are skipped)
// and reports every record, detector and observable with its determinism
// flag and a value sampled from the given seed.
TableauResult tableau_run(const Circuit& c, uint64_t seed);

// Conjugates a Pauli operator forward through a unitary-only circuit
// (H / CX / PREP-free). Used to check fold-unfold identities.
PauliString conjugate_forward(const Circuit& c, PauliString p);

}  // namespace hexrsc
