#include <cmath>
#include <map>

#include "doctest.h"
#include "hexrsc/circuit.hpp"
#include "hexrsc/frame.hpp"
#include "hexrsc/lattice.hpp"
#include "hexrsc/noise.hpp"

using namespace hexrsc;

TEST_CASE("zero-rate noise leaves the circuit unannotated") {
  auto lay = build_layout(3);
  auto c = build_memory_circuit(lay, 'Z', 1);
  auto noisy = apply_noise(c, NoiseModel::uniform(0.0));
  for (const auto& ins : noisy.instructions) {
    CHECK(!is_noise_op(ins.op));
  }
  CHECK(noisy.instructions.size() == c.instructions.size());
}

TEST_CASE("single CX gets one two-qubit channel at p/15 per pair") {
  Circuit c = parse("QUBITS 2\nCX 0 1\n");
  auto noisy = apply_noise(c, NoiseModel{0, 0.015, 0, 0});
  int n2 = 0;
  for (const auto& ins : noisy.instructions) {
    if (ins.op == Op::Noise2Q) {
      ++n2;
      CHECK(ins.a == 0.015);
    }
  }
  CHECK(n2 == 1);
  auto mechs = enumerate_mechanisms(noisy);
  CHECK(mechs.size() == 15);
  for (const auto& m : mechs) {
    CHECK(std::fabs(m.probability - 0.001) < 1e-15);
  }
}

TEST_CASE("channel expansion counts and normalization") {
  Circuit c = parse(
      "QUBITS 2\n"
      "NOISE_1Q 0.3 0\n"
      "NOISE_2Q 0.15 0 1\n"
      "FLIP_ERROR 0.02 X 1\n");
  auto mechs = enumerate_mechanisms(c);
  REQUIRE(mechs.size() == 3 + 15 + 1);
  std::map<uint32_t, double> per_channel;
  for (const auto& m : mechs) per_channel[m.instr] += m.probability;
  CHECK(std::fabs(per_channel[0] - 0.3) < 1e-12);
  CHECK(std::fabs(per_channel[1] - 0.15) < 1e-12);
  CHECK(std::fabs(per_channel[2] - 0.02) < 1e-12);
  for (auto [instr, total] : per_channel) CHECK(total <= 1.0);
}

TEST_CASE("mechanism count equals an independent location count") {
  auto lay = build_layout(3);
  auto c = build_memory_circuit(lay, 'Z', 1);
  double p = 1e-3;
  auto noisy = apply_noise(c, NoiseModel::uniform(p));

  // Independent walk over the clean circuit: count 1q-gate sites, CX
  // pairs, SPAM sites, and idle sites per tick layer.
  size_t oneq = 0, twoq = 0, spam = 0, idle = 0;
  size_t i = 0;
  const auto& ins_list = c.instructions;
  while (i < ins_list.size()) {
    size_t j = i;
    std::map<QubitId, int> active;
    bool any = false;
    while (j < ins_list.size() && ins_list[j].op != Op::Tick) {
      const auto& ins = ins_list[j];
      switch (ins.op) {
        case Op::H:
        case Op::PrepArb:
          oneq += ins.targets.size();
          any = true;
          break;
        case Op::CX:
          twoq += ins.targets.size() / 2;
          any = true;
          break;
        case Op::ResetZ:
        case Op::ResetX:
        case Op::MeasureZ:
        case Op::MeasureX:
        case Op::MeasureY:
          spam += ins.targets.size();
          any = true;
          break;
        default:
          break;
      }
      for (QubitId q : ins.targets) active[q] = 1;
      ++j;
    }
    if (any) idle += c.num_qubits - active.size();
    i = j + 1;
  }
  size_t expect = 3 * (oneq + idle) + 15 * twoq + spam;
  auto mechs = enumerate_mechanisms(noisy);
  CHECK(mechs.size() == expect);
}

TEST_CASE("calibrated preset values") {
  auto m = NoiseModel::calibrated_preset();
  CHECK(m.p_spam == 0.016);
  CHECK(m.p2 == 0.0029);
  CHECK(std::fabs(m.p1 - 0.00029) < 1e-12);
  CHECK(std::fabs(m.p_idle - 0.00029) < 1e-12);

  // Overriding the 1q rate to zero leaves only 2q + SPAM noise.
  m.p1 = 0;
  m.p_idle = 0;
  auto lay = build_layout(3);
  auto noisy = apply_noise(build_memory_circuit(lay, 'Z', 1), m);
  for (const auto& ins : noisy.instructions) {
    CHECK(ins.op != Op::Noise1Q);
  }
}

TEST_CASE("model json round trip") {
  auto m = NoiseModel::calibrated_preset();
  auto back = NoiseModel::from_json(m.to_json());
  CHECK(back.p1 == m.p1);
  CHECK(back.p2 == m.p2);
  CHECK(back.p_spam == m.p_spam);
  CHECK(back.p_idle == m.p_idle);
}

TEST_CASE("doubling rates never lowers the sampled error volume") {
  auto lay = build_layout(3);
  auto c = build_memory_circuit(lay, 'Z', 2);
  const uint64_t shots = 20000;
  auto count_fires = [&](double p) {
    auto noisy = apply_noise(c, NoiseModel::uniform(p));
    auto batch = frame_sample(noisy, shots, 33);
    uint64_t fires = 0;
    for (const auto& row : batch.det_bits) {
      for (uint64_t w : row) fires += __builtin_popcountll(w);
    }
    return fires;
  };
  uint64_t base = count_fires(1e-3);
  uint64_t doubled = count_fires(2e-3);
  CHECK(doubled > base);
}

TEST_CASE("noisy circuits are rejected as apply_noise input") {
  Circuit c = parse("QUBITS 1\nNOISE_1Q 0.1 0\n");
  CHECK_THROWS_AS(apply_noise(c, NoiseModel::uniform(1e-3)),
                  ValidationError);
}
