#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hexrsc/circuit.hpp"
#include "hexrsc/dem.hpp"
#include "hexrsc/dense.hpp"
#include "hexrsc/experiments.hpp"
#include "hexrsc/frame.hpp"
#include "hexrsc/rng.hpp"
#include "hexrsc/lattice.hpp"
#include "hexrsc/matching.hpp"
#include "hexrsc/noise.hpp"
#include "json.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

std::string out_path(const std::string& name) {
  const char* dir = std::getenv("HEXRSC_OUT_DIR");
  if (dir == nullptr || name.empty() || name[0] == '/') return name;
  return std::string(dir) + "/" + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(out_path(path), std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(out_path(path), std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

struct NoiseFlags {
  std::string preset = "uniform";
  double p = 1e-3;
  double scale = 1.0;
  double p1 = -1, p2 = -1, p_spam = -1, p_idle = -1;

  hexrsc::NoiseModel resolve() const {
    hexrsc::NoiseModel m;
    if (preset == "uniform") {
      m = hexrsc::NoiseModel::uniform(p);
    } else if (preset == "calibrated") {
      m = hexrsc::NoiseModel::calibrated_preset();
    } else {
      throw hexrsc::ValidationError("unknown noise preset: " + preset);
    }
    if (p1 >= 0) m.p1 = p1;
    if (p2 >= 0) m.p2 = p2;
    if (p_spam >= 0) m.p_spam = p_spam;
    if (p_idle >= 0) m.p_idle = p_idle;
    return m.scaled(scale);
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--noise", preset, "noise preset: uniform or calibrated");
    cmd->add_option("--p", p, "uniform physical error rate");
    cmd->add_option("--noise-scale", scale, "global noise scale factor");
    cmd->add_option("--p1", p1, "override single-qubit gate rate");
    cmd->add_option("--p2", p2, "override two-qubit gate rate");
    cmd->add_option("--p-spam", p_spam, "override SPAM rate");
    cmd->add_option("--p-idle", p_idle, "override idle rate");
  }
};

nlohmann::json tomography_json(const hexrsc::TomographyCounts& counts,
                               double theta, double phi, uint64_t seed) {
  using namespace hexrsc;
  nlohmann::json j;
  const char names[3] = {'X', 'Y', 'Z'};
  for (int b = 0; b < 3; ++b) {
    std::string key(1, names[b]);
    j["shots_" + key] = counts.shots[b];
    j["accepted_" + key] = counts.accepted[b];
    j["up_" + key] = counts.up[b];
    j["acceptance_" + key] =
        counts.shots[b] ? double(counts.accepted[b]) / counts.shots[b] : 0.0;
  }
  auto rho = tomography(counts);
  j["bloch"] = {{"x", rho.x},       {"y", rho.y},       {"z", rho.z},
                {"raw_x", rho.raw_x}, {"raw_y", rho.raw_y},
                {"raw_z", rho.raw_z}, {"projected", rho.projected}};
  auto est = bootstrap_fidelity(counts, theta, phi, 1000, seed);
  j["fidelity"] = est.value;
  j["fidelity_err"] = est.std_err;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Rotated surface code on the heavy-hexagonal lattice: layouts, "
      "threshold sweeps, and magic state injection"};
  app.require_subcommand(1);

  // ---- layout ----
  auto* lay_cmd = app.add_subcommand("layout", "emit lattice layout files");
  int lay_d = 3;
  std::string lay_json, lay_svg;
  bool lay_injection = false;
  lay_cmd->add_option("--d", lay_d, "code distance (odd, >= 3)")->required();
  lay_cmd->add_option("--json", lay_json, "layout JSON output path");
  lay_cmd->add_option("--svg", lay_svg, "layout SVG output path");
  lay_cmd->add_flag("--injection", lay_injection,
                    "overlay the injection initialization (d=3)");

  // ---- threshold ----
  auto* thr_cmd =
      app.add_subcommand("threshold", "memory sweep and crossing estimate");
  std::vector<int> thr_d = {3, 5, 7};
  std::vector<double> thr_grid = {0.002, 0.003, 0.004, 0.005, 0.006};
  std::vector<std::string> thr_bases = {"Z", "X"};
  uint64_t thr_shots = 100000;
  uint64_t thr_seed = 0;
  int thr_rounds = -1;
  int thr_workers = 1;
  bool thr_paper_ref = false;
  std::string thr_csv = "sweep.csv", thr_json = "crossing.json";
  thr_cmd->add_option("--d", thr_d, "code distances")->delimiter(',');
  thr_cmd->add_option("--p-grid", thr_grid, "physical error rates")
      ->delimiter(',');
  thr_cmd->add_option("--basis", thr_bases, "memory bases (Z, X)")
      ->delimiter(',');
  thr_cmd->add_option("--shots", thr_shots, "shots per grid point");
  thr_cmd->add_option("--seed", thr_seed, "master seed")->required();
  thr_cmd->add_option("--rounds", thr_rounds, "rounds (default: d)");
  thr_cmd->add_option("--workers", thr_workers, "worker threads");
  thr_cmd->add_option("--sweep-csv", thr_csv, "sweep CSV path");
  thr_cmd->add_option("--crossing-json", thr_json, "crossing JSON path");
  thr_cmd->add_flag("--paper-reference", thr_paper_ref,
                    "include published values as labeled comparison rows");

  // ---- inject ----
  auto* inj_cmd =
      app.add_subcommand("inject", "single-state injection run");
  double inj_theta = 0, inj_phi = 0;
  std::string inj_basis = "all";
  std::string inj_magic;
  uint64_t inj_shots = 20000, inj_seed = 0;
  int inj_workers = 1;
  bool inj_paper_ref = false;
  std::string inj_out = "inject";
  NoiseFlags inj_noise;
  inj_cmd->add_option("--theta", inj_theta, "polar angle (radians)");
  inj_cmd->add_option("--phi", inj_phi, "azimuthal angle (radians)");
  inj_cmd->add_option("--basis", inj_basis,
                      "logical readout basis: X, Y, Z or all");
  inj_cmd->add_option("--magic", inj_magic,
                      "magic-state shorthand: H or T (runs the full report)");
  inj_cmd->add_option("--shots", inj_shots, "shots per basis");
  inj_cmd->add_option("--seed", inj_seed, "master seed")->required();
  inj_cmd->add_option("--workers", inj_workers, "worker threads");
  inj_cmd->add_option("--out", inj_out, "output file prefix");
  inj_cmd->add_flag("--paper-reference", inj_paper_ref,
                    "include published values as labeled comparison rows");
  inj_noise.attach(inj_cmd);

  // ---- inject-grid ----
  auto* grid_cmd = app.add_subcommand(
      "inject-grid", "injection tomography over a (theta, phi) grid");
  std::vector<double> grid_thetas, grid_phis;
  uint64_t grid_shots = 20000, grid_seed = 0;
  int grid_workers = 1;
  std::string grid_out = "grid";
  bool grid_svg = false;
  NoiseFlags grid_noise;
  grid_cmd->add_option("--thetas", grid_thetas,
                       "polar angles (default: 0..2pi step pi/4)")
      ->delimiter(',');
  grid_cmd->add_option("--phis", grid_phis, "azimuthal angles")
      ->delimiter(',');
  grid_cmd->add_option("--shots", grid_shots, "shots per basis per point");
  grid_cmd->add_option("--seed", grid_seed, "master seed")->required();
  grid_cmd->add_option("--workers", grid_workers, "worker threads");
  grid_cmd->add_option("--out", grid_out, "output file prefix");
  grid_cmd->add_flag("--svg", grid_svg, "emit a fidelity heatmap SVG");
  grid_noise.attach(grid_cmd);

  // ---- decode ----
  auto* dec_cmd = app.add_subcommand(
      "decode", "decode stored shots against a detector error model");
  std::string dec_dem, dec_shots, dec_out = "decode.json";
  bool dec_oracle = false;
  dec_cmd->add_option("--dem", dec_dem, "detector error model JSON")
      ->required();
  dec_cmd->add_option("--shots", dec_shots, "shot file (binary)")->required();
  dec_cmd->add_option("--out", dec_out, "summary JSON path");
  dec_cmd->add_flag("--oracle-compare", dec_oracle,
                    "cross-check matching weights against the exhaustive "
                    "oracle (small syndromes)");

  CLI11_PARSE(app, argc, argv);

  try {
    using namespace hexrsc;

    if (lay_cmd->parsed()) {
      auto layout = build_layout(lay_d);
      InjectionLayout inj;
      const InjectionLayout* inj_ptr = nullptr;
      if (lay_injection) {
        inj = injection_layout(layout);
        inj_ptr = &inj;
      }
      if (!lay_json.empty()) write_file(lay_json, layout.to_json());
      if (!lay_svg.empty()) write_file(lay_svg, render_svg(layout, inj_ptr));
      std::printf("layout d=%d: %zu qubits, %zu stabilizers\n", lay_d,
                  layout.num_qubits(), layout.stabilizers.size());
      return 0;
    }

    if (thr_cmd->parsed()) {
      SweepConfig cfg;
      cfg.distances = thr_d;
      cfg.p_grid = thr_grid;
      cfg.bases.clear();
      for (const auto& b : thr_bases) cfg.bases.push_back(b[0]);
      cfg.shots = thr_shots;
      cfg.seed = thr_seed;
      cfg.rounds_override = thr_rounds;
      cfg.workers = thr_workers;
      auto sweep = threshold_sweep(cfg);
      write_file(thr_csv, sweep.to_csv());

      nlohmann::json j;
      for (char basis : cfg.bases) {
        auto est = estimate_crossing(sweep, basis);
        std::string key = std::string("basis_") + basis;
        if (est.found) {
          j[key] = {{"p_th", est.p_th},
                    {"pair_count", est.pair_count},
                    {"pair_values", est.pair_values}};
          // The crossing of the B-basis memory locates the threshold of
          // the opposite logical error type.
          std::printf("p_th^%c = %.5f (from %c-basis memory, %d pairs)\n",
                      basis == 'Z' ? 'X' : 'Z', est.p_th, basis,
                      est.pair_count);
        } else {
          j[key] = {{"no_crossing", true}};
          std::printf("no crossing found for %c-basis memory\n", basis);
        }
      }
      if (thr_paper_ref) {
        j["reference"] = {
            {"source", "published values, for comparison only"},
            {"p_th_Z", "0.31%"},
            {"p_th_X", "0.37%"},
        };
      }
      write_file(thr_json, j.dump(2));
      return 0;
    }

    if (inj_cmd->parsed()) {
      auto noise = inj_noise.resolve();
      if (!inj_magic.empty()) {
        if (inj_magic != "H" && inj_magic != "T") {
          throw ValidationError("--magic expects H or T");
        }
        auto report = magic_state_report(noise, inj_shots, inj_seed,
                                         inj_workers, inj_paper_ref);
        write_file(inj_out + "_magic.json", report.to_json());
        for (const auto& s : report.states) {
          if (s.name != inj_magic) continue;
          std::printf("%s-type state: fidelity %.4f +/- %.4f (threshold %.3f) %s\n",
                      s.name.c_str(), s.fidelity.value, s.fidelity.std_err,
                      s.distillation_threshold,
                      s.above_threshold ? "PASS" : "FAIL");
        }
        return 0;
      }

      auto layout = build_layout(3);
      auto inj = injection_layout(layout);
      std::vector<char> bases;
      if (inj_basis == "all") {
        bases = {'X', 'Y', 'Z'};
      } else if (inj_basis == "X" || inj_basis == "Y" || inj_basis == "Z") {
        bases = {inj_basis[0]};
      } else {
        throw ValidationError("basis must be X, Y, Z or all");
      }

      TomographyCounts counts;
      std::ostringstream csv;
      csv << "theta,phi,basis,shot,accept,outcome\n";
      for (char b : bases) {
        auto circuit =
            build_injection_circuit(layout, inj, inj_theta, inj_phi, b);
        auto noisy_circuit = apply_noise(circuit, noise);
        int bindex = (b == 'X') ? 0 : (b == 'Y' ? 1 : 2);
        uint64_t seed = CounterRng(inj_seed).word(0x1417, bindex);
        auto batch =
            injected_frame_sample(noisy_circuit, inj_shots, seed, inj_workers);
        counts.shots[bindex] = inj_shots;
        for (uint64_t s = 0; s < batch.shots; ++s) {
          bool acc = batch.accepted(s);
          counts.accepted[bindex] += acc;
          counts.up[bindex] += acc && !batch.outcome_down(s);
          csv << inj_theta << "," << inj_phi << "," << b << "," << s << ","
              << (acc ? 1 : 0) << "," << (batch.outcome_down(s) ? -1 : 1)
              << "\n";
        }
      }
      write_file(inj_out + "_counts.csv", csv.str());
      if (bases.size() == 3) {
        auto j = tomography_json(counts, inj_theta, inj_phi, inj_seed);
        write_file(inj_out + "_report.json", j.dump(2));
        std::printf("fidelity %.4f +/- %.4f, acceptance %.4f/%.4f/%.4f\n",
                    j["fidelity"].get<double>(),
                    j["fidelity_err"].get<double>(),
                    j["acceptance_X"].get<double>(),
                    j["acceptance_Y"].get<double>(),
                    j["acceptance_Z"].get<double>());
      } else {
        std::printf("accepted %lu of %lu shots\n",
                    static_cast<unsigned long>(
                        counts.accepted[bases[0] == 'X' ? 0
                                        : bases[0] == 'Y' ? 1 : 2]),
                    static_cast<unsigned long>(inj_shots));
      }
      return 0;
    }

    if (grid_cmd->parsed()) {
      auto layout = build_layout(3);
      auto inj = injection_layout(layout);
      InjectionGridConfig cfg;
      cfg.thetas = grid_thetas.empty() ? default_angle_grid() : grid_thetas;
      cfg.phis = grid_phis.empty() ? default_angle_grid() : grid_phis;
      cfg.shots_per_basis = grid_shots;
      cfg.noise = grid_noise.resolve();
      cfg.seed = grid_seed;
      cfg.workers = grid_workers;
      auto grid = run_injection_grid(layout, inj, cfg);
      write_file(grid_out + "_counts.csv", injection_grid_csv(grid));
      write_file(grid_out + "_fidelity.csv",
                 fidelity_surface_csv(grid, 200, grid_seed));
      if (grid_svg) {
        write_file(grid_out + "_fidelity.svg", fidelity_surface_svg(grid));
      }
      std::printf("grid: %zu points x 3 bases, %lu shots each\n", grid.size(),
                  static_cast<unsigned long>(grid_shots));
      return 0;
    }

    if (dec_cmd->parsed()) {
      auto dem = Dem::from_json(read_file(dec_dem));
      auto bytes_str = read_file(dec_shots);
      std::vector<uint8_t> bytes(bytes_str.begin(), bytes_str.end());
      auto batch = ShotBatch::from_binary(bytes);
      if (batch.num_detectors != dem.num_detectors) {
        throw ValidationError("shot file and model disagree on detectors");
      }
      auto graph = build_matching_graph(dem);
      uint64_t failures = 0, oracle_mismatch = 0, oracle_checked = 0;
      std::vector<uint32_t> defects;
      for (uint64_t s = 0; s < batch.shots; ++s) {
        defects.clear();
        for (uint32_t d = 0; d < batch.num_detectors; ++d) {
          if (batch.det(d, s)) defects.push_back(d);
        }
        auto corr = defects.empty() ? Correction{} : decode_mwpm(graph, defects);
        uint32_t actual = batch.num_observables ? (batch.obs(0, s) ? 1 : 0) : 0;
        if ((corr.obs_flip & 1) != actual) ++failures;
        if (dec_oracle && defects.size() <= 14 && !defects.empty()) {
          auto oracle = decode_exhaustive(graph, defects);
          ++oracle_checked;
          if (oracle.weight != corr.weight) ++oracle_mismatch;
        }
      }
      double rate = batch.shots ? double(failures) / batch.shots : 0.0;
      double err =
          batch.shots ? std::sqrt(rate * (1 - rate) / batch.shots) : 0.0;
      nlohmann::json j{{"shots", batch.shots},
                       {"failures", failures},
                       {"failure_rate", rate},
                       {"failure_rate_err", err}};
      if (dec_oracle) {
        j["oracle_checked"] = oracle_checked;
        j["oracle_mismatches"] = oracle_mismatch;
      }
      write_file(dec_out, j.dump(2));
      std::printf("failure rate %.6f +/- %.6f (%lu/%lu)\n", rate, err,
                  static_cast<unsigned long>(failures),
                  static_cast<unsigned long>(batch.shots));
      if (dec_oracle && oracle_mismatch > 0) return kExitValidation;
      return 0;
    }
  } catch (const hexrsc::InvalidDistance& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const hexrsc::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const hexrsc::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
