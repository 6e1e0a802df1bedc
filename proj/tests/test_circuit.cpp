#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hexrsc/circuit.hpp"
#include "hexrsc/dense.hpp"
#include "hexrsc/lattice.hpp"
#include "hexrsc/rng.hpp"

using namespace hexrsc;

TEST_CASE("builder outputs respect connectivity and layer discipline") {
  for (int d : {3, 5, 7}) {
    CAPTURE(d);
    auto lay = build_layout(d);
    for (char g : {'A', 'B'}) {
      auto c = build_subround(lay, g);
      CHECK_NOTHROW(validate(c, &lay));
    }
    for (char basis : {'Z', 'X'}) {
      for (int r : {1, 2}) {
        auto c = build_memory_circuit(lay, basis, r);
        CHECK_NOTHROW(validate(c, &lay));
      }
    }
  }
  auto lay3 = build_layout(3);
  auto inj = injection_layout(lay3);
  for (char b : {'X', 'Y', 'Z'}) {
    auto c = build_injection_circuit(lay3, inj, 0.3, 0.4, b);
    CHECK_NOTHROW(validate(c, &lay3));
  }
}

TEST_CASE("two sub-rounds measure every generator exactly once") {
  for (int d : {3, 5}) {
    CAPTURE(d);
    auto lay = build_layout(d);
    size_t meas = 0;
    for (char g : {'A', 'B'}) {
      auto c = build_subround(lay, g);
      meas += c.measurement_count;
    }
    CHECK(meas == lay.stabilizers.size());
  }
}

TEST_CASE("memory circuit round structure") {
  auto lay = build_layout(3);
  for (int r : {1, 3}) {
    auto c = build_memory_circuit(lay, 'Z', r);
    // r rounds of 10 ancilla readouts plus the transversal data readout.
    CHECK(c.measurement_count == 10 * r + 11);
    CHECK(c.observable_defs.size() == 1);
    CHECK(c.observable_defs[0].records.size() == 3);
  }
  CHECK_THROWS_AS(build_memory_circuit(lay, 'Z', 0), ValidationError);
}

TEST_CASE("injection circuit structure and elision") {
  auto lay = build_layout(3);
  auto inj = injection_layout(lay);
  auto c = build_injection_circuit(lay, inj, 0.7, 0.2, 'Y');
  // 4 boundary outcomes survive (weight-one checks are elided) + 4
  // random bulk outcomes per the two sub-rounds, plus 11 data readouts.
  CHECK(c.measurement_count == 8 + 11);
  // Criteria (a) + (b): 4 sub-round detectors + 6 final-parity detectors.
  CHECK(c.detector_defs.size() == 10);
  // Y readout uses the joint X/Z support.
  CHECK(c.observable_defs[0].records.size() == 5);
  int preps = 0;
  for (const auto& ins : c.instructions) {
    if (ins.op == Op::PrepArb) ++preps;
  }
  CHECK(preps == 1);
  CHECK_THROWS_AS(build_injection_circuit(lay, inj, 0.1, 0.1, 'Q'),
                  ValidationError);
}

TEST_CASE("serialize/parse round trip") {
  auto lay = build_layout(3);
  auto inj = injection_layout(lay);
  std::vector<Circuit> circuits;
  circuits.push_back(build_subround(lay, 'A'));
  circuits.push_back(build_memory_circuit(lay, 'X', 2));
  circuits.push_back(build_injection_circuit(lay, inj, 0.5, 0.25, 'X'));
  for (const auto& c : circuits) {
    auto text = serialize(c);
    auto parsed = parse(text);
    CHECK(parsed == c);
    CHECK(parsed.measurement_count == c.measurement_count);
    CHECK(parsed.detector_defs.size() == c.detector_defs.size());
  }
}

TEST_CASE("parse diagnostics and validation") {
  CHECK_THROWS_AS(parse("RESET_Z 0\n"), ParseError);  // missing header
  try {
    parse("QUBITS 4\nCX 0 zebra\n");
    CHECK(false);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("zebra") != std::string::npos);
  }

  auto c = parse("QUBITS 4\nPREP_ARB 2 0.5 0.25\n");
  REQUIRE(c.instructions.size() == 1);
  CHECK(c.instructions[0].op == Op::PrepArb);
  CHECK(c.instructions[0].targets[0] == 2);
  CHECK(c.instructions[0].a == 0.5);
  CHECK(c.instructions[0].b == 0.25);

  // A CX between unconnected qubits parses but fails layout validation.
  auto lay = build_layout(3);
  auto bad = parse("QUBITS 25\nCX 0 24\n");
  REQUIRE(!lay.has_edge(0, 24));
  CHECK_THROWS_AS(validate(bad, &lay), ValidationError);
}

TEST_CASE("memory golden file is stable") {
  auto lay = build_layout(3);
  auto c = build_memory_circuit(lay, 'Z', 1);
  auto text = serialize(c);
  std::ifstream f(std::string(TEST_DATA_DIR) + "/memory_d3_z_r1.circuit");
  REQUIRE_MESSAGE(f.good(), "golden file missing");
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(text == buf.str());
}

TEST_CASE("folded plaquette reproduces the weight-four parity on random inputs") {
  // One Z plaquette with corners 0,1 (top) and 2,3 (bottom), bridges 4,5,
  // syndrome 6; qubit 7 measures the weight-four parity directly. The two
  // outcomes must agree for every input state.
  using namespace hexrsc;
  CounterRng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    Circuit c;
    c.num_qubits = 8;
    auto add = [&](Op op, std::initializer_list<QubitId> t) {
      Instruction ins;
      ins.op = op;
      ins.targets = t;
      c.append(std::move(ins));
    };
    // Random stabilizer input on the four data qubits.
    for (QubitId q = 0; q < 4; ++q) {
      Instruction prep;
      prep.op = Op::PrepArb;
      prep.targets = {q};
      uint64_t pick = rng.word(1, trial * 8 + q) % 6;
      const double t[6] = {0, M_PI, M_PI / 2, M_PI / 2, M_PI / 2, M_PI / 2};
      const double ph[6] = {0, 0, 0, M_PI, M_PI / 2, 3 * M_PI / 2};
      prep.a = t[pick];
      prep.b = ph[pick];
      c.append(prep);
    }
    for (int g = 0; g < 6; ++g) {
      uint64_t a = rng.word(2, trial * 16 + g) % 4;
      uint64_t b = rng.word(3, trial * 16 + g) % 4;
      if (a == b) {
        add(Op::H, {static_cast<QubitId>(a)});
      } else {
        add(Op::CX, {static_cast<QubitId>(a), static_cast<QubitId>(b)});
      }
    }
    // Folded measurement, as the sub-round builder schedules it.
    add(Op::ResetZ, {4, 5, 6});
    add(Op::CX, {4, 2});
    add(Op::CX, {5, 3});
    add(Op::CX, {0, 4});
    add(Op::CX, {1, 5});
    add(Op::CX, {4, 2});
    add(Op::CX, {5, 3});
    add(Op::CX, {0, 4});
    add(Op::CX, {1, 5});
    add(Op::CX, {2, 6});
    add(Op::CX, {3, 6});
    add(Op::CX, {0, 4});
    add(Op::CX, {1, 5});
    add(Op::CX, {4, 2});
    add(Op::CX, {5, 3});
    add(Op::CX, {0, 4});
    add(Op::CX, {1, 5});
    add(Op::CX, {4, 2});
    add(Op::CX, {5, 3});
    add(Op::MeasureZ, {6});
    // Direct weight-four parity readout.
    add(Op::ResetZ, {7});
    add(Op::CX, {0, 7});
    add(Op::CX, {1, 7});
    add(Op::CX, {2, 7});
    add(Op::CX, {3, 7});
    add(Op::MeasureZ, {7});
    Instruction det;
    det.op = Op::Detector;
    det.rec = {-2, -1};
    c.append(det);

    auto dist = dense_run(c, NoiseHandling::Ignore);
    for (const auto& [key, prob] : dist.p) {
      if (prob > 1e-12) CHECK((key & 1) == 0);
    }
  }
}
