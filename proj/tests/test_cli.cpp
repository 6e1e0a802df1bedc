#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hexrsc/circuit.hpp"
#include "hexrsc/dem.hpp"
#include "hexrsc/frame.hpp"
#include "hexrsc/lattice.hpp"
#include "hexrsc/noise.hpp"
#include "json.hpp"

#ifndef HEXRSC_CLI_PATH
#define HEXRSC_CLI_PATH ""
#endif

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const fs::path& out_dir) {
  std::string cmd = "HEXRSC_OUT_DIR=" + out_dir.string() + " " +
                    HEXRSC_CLI_PATH + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path fresh_dir(const char* name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli layout emits valid files and proper exit codes") {
  REQUIRE(std::string(HEXRSC_CLI_PATH) != "");
  auto dir = fresh_dir("hexrsc_cli_layout");
  CHECK(run_cli("layout --d 3 --json l.json --svg l.svg", dir) == 0);
  auto j = nlohmann::json::parse(slurp(dir / "l.json"));
  CHECK(j["qubits"].size() == 25);
  CHECK(slurp(dir / "l.svg").find("<svg") == 0);

  // Invalid distance is a validation failure (exit 3); bad flags are a
  // usage error (exit 2).
  CHECK(run_cli("layout --d 4 --json bad.json", dir) == 3);
  CHECK(run_cli("layout --d 3 --not-a-flag", dir) != 0);
  CHECK(run_cli("layout --d 3 --not-a-flag", dir) != 3);
}

TEST_CASE("cli inject writes counts and reports") {
  auto dir = fresh_dir("hexrsc_cli_inject");
  CHECK(run_cli("inject --theta 0 --phi 0 --basis Z --shots 500 --seed 4 "
                "--p 0",
                dir) == 0);
  auto csv = slurp(dir / "inject_counts.csv");
  CHECK(csv.find("theta,phi,basis,shot,accept,outcome") == 0);
  // Noiseless |0_L> read in Z: every accepted outcome is +1.
  CHECK(csv.find(",-1") == std::string::npos);

  CHECK(run_cli("inject --theta 0.7 --phi 0.3 --basis all --shots 400 "
                "--seed 5 --p 0.002 --out full",
                dir) == 0);
  auto report = nlohmann::json::parse(slurp(dir / "full_report.json"));
  CHECK(report.contains("fidelity"));
  CHECK(report["acceptance_X"].get<double>() < 1.0);

  CHECK(run_cli("inject --theta 0 --phi 0 --basis Q --shots 10 --seed 1",
                dir) == 3);
}

TEST_CASE("cli magic shorthand emits the report") {
  auto dir = fresh_dir("hexrsc_cli_magic");
  CHECK(run_cli("inject --magic H --shots 300 --seed 6 --p 0 --out m "
                "--paper-reference",
                dir) == 0);
  auto j = nlohmann::json::parse(slurp(dir / "m_magic.json"));
  CHECK(j["states"].size() == 2);
  CHECK(j.contains("reference"));
  CHECK(j["states"][0]["above_threshold"].get<bool>());
}

TEST_CASE("cli decode round trip with oracle comparison") {
  using namespace hexrsc;
  auto dir = fresh_dir("hexrsc_cli_decode");
  auto lay = build_layout(3);
  auto noisy =
      apply_noise(build_memory_circuit(lay, 'Z', 2), NoiseModel::uniform(2e-3));
  auto dem = build_dem(noisy);
  {
    std::ofstream f(dir / "model.json");
    f << dem.to_json();
  }
  auto batch = frame_sample(noisy, 4000, 99);
  {
    auto bytes = batch.to_binary();
    std::ofstream f(dir / "shots.bin", std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(run_cli("decode --dem " + (dir / "model.json").string() +
                    " --shots " + (dir / "shots.bin").string() +
                    " --oracle-compare --out summary.json",
                dir) == 0);
  auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["shots"].get<uint64_t>() == 4000);
  CHECK(j["oracle_mismatches"].get<uint64_t>() == 0);
  CHECK(j["failure_rate"].get<double>() >= 0.0);

  // Empty syndromes decode to zero failures.
  auto clean = apply_noise(build_memory_circuit(lay, 'Z', 2),
                           NoiseModel::uniform(0.0));
  auto quiet = frame_sample(clean, 256, 1);
  {
    auto bytes = quiet.to_binary();
    std::ofstream f(dir / "quiet.bin", std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(run_cli("decode --dem " + (dir / "model.json").string() +
                    " --shots " + (dir / "quiet.bin").string() +
                    " --out quiet.json",
                dir) == 0);
  auto q = nlohmann::json::parse(slurp(dir / "quiet.json"));
  CHECK(q["failures"].get<uint64_t>() == 0);

  // Dimension mismatch is a validation failure.
  auto lay5 = build_layout(5);
  auto other = apply_noise(build_memory_circuit(lay5, 'Z', 2),
                           NoiseModel::uniform(2e-3));
  auto other_batch = frame_sample(other, 64, 2);
  {
    auto bytes = other_batch.to_binary();
    std::ofstream f(dir / "mismatch.bin", std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(run_cli("decode --dem " + (dir / "model.json").string() +
                    " --shots " + (dir / "mismatch.bin").string(),
                dir) == 3);
}
