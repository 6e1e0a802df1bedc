#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hexrsc/dem.hpp"
#include "hexrsc/lattice.hpp"
#include "hexrsc/matching.hpp"
#include "hexrsc/noise.hpp"

namespace hexrsc {

struct SweepRow {
  char basis = 'Z';
  int d = 3;
  double p = 0.0;
  int rounds = 1;
  uint64_t shots = 0;
  uint64_t failures = 0;
  double p_shot = 0.0;     // raw per-shot logical error rate
  double p_l_round = 0.0;  // per-round rate via the two-state inversion
  double std_err = 0.0;    // binomial error propagated per round
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string to_csv() const;
};

struct SweepConfig {
  std::vector<int> distances = {3, 5, 7};
  std::vector<double> p_grid;
  std::vector<char> bases = {'Z', 'X'};
  uint64_t shots = 100000;
  int rounds_override = -1;  // default: rounds = d
  uint64_t seed = 1;
  int workers = 1;
};

SweepRow run_memory_experiment(int d, char basis, double p, int rounds,
                               uint64_t shots, uint64_t seed, int workers = 1);

SweepResult threshold_sweep(const SweepConfig& config);

struct CrossingEstimate {
  char basis = 'Z';
  bool found = false;
  double p_th = 0.0;
  int pair_count = 0;
  std::vector<double> pair_values;
};

// Averaged pairwise intersections of log-log interpolated curves.
CrossingEstimate estimate_crossing(const SweepResult& sweep, char basis);

struct FitParams {
  bool ok = false;
  double C = 0.0;
  double a = 0.0;
  double p_th = 0.0;
  double a_err = 0.0;
  double logC_err = 0.0;
  std::string note;
};

// Least squares of log p_L = log C - a ((d+1)/2) log(p_th / p) on
// sub-threshold rows of one basis.
FitParams fit_scaling(const SweepResult& sweep, char basis, double p_th);

// Post-selected tomography counts per logical Pauli basis (order X, Y, Z).
struct TomographyCounts {
  std::array<uint64_t, 3> shots = {0, 0, 0};     // sampled per basis
  std::array<uint64_t, 3> accepted = {0, 0, 0};  // passed post-selection
  std::array<uint64_t, 3> up = {0, 0, 0};        // +1 outcomes among accepted
};

struct DensityMatrix2 {
  double x = 0, y = 0, z = 0;           // Bloch vector (projected if needed)
  double raw_x = 0, raw_y = 0, raw_z = 0;
  bool projected = false;
  // rho = (I + r.sigma)/2 with (1+z)/2 in the |0><0| slot.
  std::array<std::array<double, 2>, 4> matrix() const;  // row-major re/im
};

DensityMatrix2 tomography(const TomographyCounts& counts);

// Uhlmann fidelity against the pure state |psi(theta, phi)>; computed via
// the pure-state reduction and cross-checked against the general
// trace-of-square-root formula.
double fidelity(double theta, double phi, const DensityMatrix2& rho);

struct FidelityEstimate {
  double value = 0.0;
  double std_err = 0.0;
  int resamples = 0;
};

FidelityEstimate bootstrap_fidelity(const TomographyCounts& counts,
                                    double theta, double phi, int resamples,
                                    uint64_t seed);

// Standard errors of the three Bloch components by the same resampling.
std::array<double, 3> bootstrap_bloch_err(const TomographyCounts& counts,
                                          int resamples, uint64_t seed);

struct InjectionPoint {
  double theta = 0, phi = 0;
  TomographyCounts counts;
  bool tomography_ok = true;
};

struct InjectionGridConfig {
  std::vector<double> thetas;
  std::vector<double> phis;
  uint64_t shots_per_basis = 20000;
  NoiseModel noise;
  uint64_t seed = 1;
  int workers = 1;
};

// Default pi/4-spaced grid over [0, 2pi].
std::vector<double> default_angle_grid();

std::vector<InjectionPoint> run_injection_grid(const LatticeLayout& layout,
                                               const InjectionLayout& inj,
                                               const InjectionGridConfig& cfg);

std::string injection_grid_csv(const std::vector<InjectionPoint>& grid);
std::string fidelity_surface_csv(const std::vector<InjectionPoint>& grid,
                                 int bootstrap_resamples, uint64_t seed);
std::string fidelity_surface_svg(const std::vector<InjectionPoint>& grid);

struct MagicStateResult {
  std::string name;
  double theta = 0, phi = 0;
  TomographyCounts counts;
  DensityMatrix2 rho;
  FidelityEstimate fidelity;
  double distillation_threshold = 0.0;
  bool above_threshold = false;
};

struct MagicStateReport {
  NoiseModel noise;
  uint64_t shots_per_basis = 0;
  std::vector<MagicStateResult> states;
  bool include_paper_reference = false;
  std::string to_json() const;
};

MagicStateReport magic_state_report(const NoiseModel& noise,
                                    uint64_t shots_per_basis, uint64_t seed,
                                    int workers = 1,
                                    bool include_paper_reference = false);

// Reusable per-(d, basis) decoding context so sweeps share the expensive
// signature propagation across physical error rates.
class MemoryContext {
 public:
  MemoryContext(int d, char basis, int rounds);
  SweepRow run(double p, uint64_t shots, uint64_t seed, int workers) const;

 private:
  int d_, rounds_;
  char basis_;
  LatticeLayout layout_;
  Circuit clean_;
  detail::DemCache cache_;
};

}  // namespace hexrsc
