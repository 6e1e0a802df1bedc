#include "hexrsc/circuit.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace hexrsc {

bool is_noise_op(Op op) {
  return op == Op::Noise1Q || op == Op::Noise2Q || op == Op::FlipError;
}

bool is_measure_op(Op op) {
  return op == Op::MeasureZ || op == Op::MeasureX || op == Op::MeasureY;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::ResetZ: return "RESET_Z";
    case Op::ResetX: return "RESET_X";
    case Op::H: return "H";
    case Op::CX: return "CX";
    case Op::MeasureZ: return "MEASURE_Z";
    case Op::MeasureX: return "MEASURE_X";
    case Op::MeasureY: return "MEASURE_Y";
    case Op::PrepArb: return "PREP_ARB";
    case Op::Tick: return "TICK";
    case Op::Noise1Q: return "NOISE_1Q";
    case Op::Noise2Q: return "NOISE_2Q";
    case Op::FlipError: return "FLIP_ERROR";
    case Op::Detector: return "DETECTOR";
    case Op::Observable: return "OBSERVABLE";
  }
  return "?";
}

bool Instruction::operator==(const Instruction& o) const {
  return op == o.op && targets == o.targets && a == o.a && b == o.b &&
         axis == o.axis && rec == o.rec && id == o.id;
}

void Circuit::append(Instruction ins) {
  if (ins.op == Op::Detector) {
    DetectorDef def;
    def.expected_parity = ins.id;
    for (int32_t r : ins.rec) {
      int64_t abs = static_cast<int64_t>(measurement_count) + r;
      if (r >= 0 || abs < 0) {
        throw ValidationError("detector record offset out of range");
      }
      def.records.push_back(static_cast<uint32_t>(abs));
    }
    detector_defs.push_back(std::move(def));
  } else if (ins.op == Op::Observable) {
    ObservableDef* def = nullptr;
    for (auto& o : observable_defs) {
      if (o.id == ins.id) def = &o;
    }
    if (def == nullptr) {
      observable_defs.push_back({ins.id, {}});
      def = &observable_defs.back();
    }
    for (int32_t r : ins.rec) {
      int64_t abs = static_cast<int64_t>(measurement_count) + r;
      if (r >= 0 || abs < 0) {
        throw ValidationError("observable record offset out of range");
      }
      def->records.push_back(static_cast<uint32_t>(abs));
    }
  } else if (is_measure_op(ins.op)) {
    measurement_count += static_cast<uint32_t>(ins.targets.size());
  }
  instructions.push_back(std::move(ins));
}

bool Circuit::operator==(const Circuit& o) const {
  return num_qubits == o.num_qubits && instructions == o.instructions;
}

namespace {

constexpr int kSubroundLayers = 14;
// Consecutive sub-rounds are shifted by 10 layers: the trailing unfold,
// basis-change and measurement layers of one sub-round host the ancilla
// resets and first fold layers of the next, which act on disjoint qubits.
constexpr int kPitch = 10;

struct TaggedInstr {
  Instruction ins;
  int stab = -1;        // ancilla measurement of this stabilizer
  QubitId final_q = 0;  // transversal data measurement
  bool is_final = false;
};

struct LayerStack {
  std::vector<std::vector<TaggedInstr>> layers;

  void put(size_t layer, Instruction ins, int stab = -1) {
    if (layers.size() <= layer) layers.resize(layer + 1);
    layers[layer].push_back({std::move(ins), stab, 0, false});
  }
  void put_final(size_t layer, Instruction ins, QubitId q) {
    if (layers.size() <= layer) layers.resize(layer + 1);
    layers[layer].push_back({std::move(ins), -1, q, true});
  }
};

Instruction gate(Op op, std::initializer_list<QubitId> t) {
  Instruction ins;
  ins.op = op;
  ins.targets = t;
  return ins;
}

// Emit one sub-round into the stack at the given layer offset.
// Layer map (local):
//   0     bridge and side-ancilla resets
//   1-4   fold ladder [bridge->bottom, top->bridge] x2; layer 4 also
//         carries the syndrome/check ancilla resets
//   5     H on X-type ancillas
//   6-7   ancilla couplings
//   8-11  unfold ladder (reverse of the fold)
//   12    H back on X-type ancillas
//   13    ancilla readout
// Ladders realize a top->bottom CNOT through the bridge for any bridge
// state; the chosen ordering keeps the layers that overlap neighbouring
// sub-rounds on disjoint qubits.
void emit_subround(LayerStack& stack, size_t base, const LatticeLayout& lay,
                   char subgroup, bool elide_w1) {
  auto links = lay.fold_links(subgroup);

  for (const auto& l : links) {
    stack.put(base + 0, gate(Op::ResetZ, {l.bridge}));
    stack.put(base + 1, gate(Op::CX, {l.bridge, l.bottom}));
    stack.put(base + 2, gate(Op::CX, {l.top, l.bridge}));
    stack.put(base + 3, gate(Op::CX, {l.bridge, l.bottom}));
    stack.put(base + 4, gate(Op::CX, {l.top, l.bridge}));
    stack.put(base + 8, gate(Op::CX, {l.top, l.bridge}));
    stack.put(base + 9, gate(Op::CX, {l.bridge, l.bottom}));
    stack.put(base + 10, gate(Op::CX, {l.top, l.bridge}));
    stack.put(base + 11, gate(Op::CX, {l.bridge, l.bottom}));
  }

  for (size_t i = 0; i < lay.stabilizers.size(); ++i) {
    const auto& s = lay.stabilizers[i];
    if (s.subgroup != subgroup) continue;
    if (elide_w1 && s.weight_class == WeightClass::One) continue;
    if (s.boundary != BoundaryKind::Side) {
      // Side ancillas double as fold bridges and are already reset in
      // layer 0; the rest wait until the previous sub-round has finished
      // reading them out.
      stack.put(base + 4, gate(Op::ResetZ, {s.ancilla}));
    }
    if (s.pauli == 'X') {
      stack.put(base + 5, gate(Op::H, {s.ancilla}));
      stack.put(base + 12, gate(Op::H, {s.ancilla}));
    }
    for (size_t k = 0; k < s.couple.size(); ++k) {
      Instruction cx;
      cx.op = Op::CX;
      if (s.pauli == 'Z') {
        cx.targets = {s.couple[k], s.ancilla};
      } else {
        cx.targets = {s.ancilla, s.couple[k]};
      }
      stack.put(base + 6 + k, std::move(cx));
    }
    stack.put(base + 13, gate(Op::MeasureZ, {s.ancilla}),
              static_cast<int>(i));
  }
}

// Flatten the layer stack into a circuit, assigning measurement records.
// Returns per-(stabilizer, occurrence) and per-data-qubit record indices.
struct FlattenResult {
  std::map<std::pair<int, int>, uint32_t> stab_rec;  // (stab, occurrence)
  std::map<QubitId, uint32_t> final_rec;
};

FlattenResult flatten(Circuit& c, LayerStack& stack) {
  FlattenResult res;
  std::map<int, int> seen_count;
  for (auto& layer : stack.layers) {
    std::stable_sort(layer.begin(), layer.end(),
                     [](const TaggedInstr& a, const TaggedInstr& b) {
                       if (a.ins.op != b.ins.op) return a.ins.op < b.ins.op;
                       return a.ins.targets < b.ins.targets;
                     });
    for (auto& t : layer) {
      uint32_t rec = c.measurement_count;
      c.append(std::move(t.ins));
      if (t.stab >= 0) {
        res.stab_rec[{t.stab, seen_count[t.stab]++}] = rec;
      } else if (t.is_final) {
        res.final_rec[t.final_q] = rec;
      }
    }
    c.append(Instruction{Op::Tick});
  }
  return res;
}

Instruction detector(const Circuit& c, std::vector<uint32_t> records) {
  Instruction ins;
  ins.op = Op::Detector;
  ins.id = 0;
  for (uint32_t r : records) {
    ins.rec.push_back(static_cast<int32_t>(r) -
                      static_cast<int32_t>(c.measurement_count));
  }
  return ins;
}

Instruction observable(const Circuit& c, int id,
                       const std::vector<uint32_t>& records) {
  Instruction ins;
  ins.op = Op::Observable;
  ins.id = id;
  for (uint32_t r : records) {
    ins.rec.push_back(static_cast<int32_t>(r) -
                      static_cast<int32_t>(c.measurement_count));
  }
  return ins;
}

}  // namespace

Circuit build_subround(const LatticeLayout& layout, char subgroup) {
  if (subgroup != 'A' && subgroup != 'B') {
    throw ValidationError("subgroup must be 'A' or 'B'");
  }
  Circuit c;
  c.num_qubits = static_cast<uint32_t>(layout.num_qubits());
  LayerStack stack;
  emit_subround(stack, 0, layout, subgroup, false);
  flatten(c, stack);
  return c;
}

Circuit build_memory_circuit(const LatticeLayout& layout, char basis,
                             int rounds) {
  if (basis != 'Z' && basis != 'X') {
    throw ValidationError("memory basis must be 'Z' or 'X'");
  }
  if (rounds < 1) throw ValidationError("rounds must be >= 1");

  Circuit c;
  c.num_qubits = static_cast<uint32_t>(layout.num_qubits());
  LayerStack stack;

  Op data_reset = (basis == 'Z') ? Op::ResetZ : Op::ResetX;
  for (const auto& q : layout.qubits) {
    if (q.role == Role::Data) stack.put(0, gate(data_reset, {q.id}));
  }

  int n_sub = 2 * rounds;
  for (int s = 0; s < n_sub; ++s) {
    emit_subround(stack, 1 + static_cast<size_t>(kPitch) * s, layout,
                  (s % 2 == 0) ? 'A' : 'B', false);
  }

  size_t final_layer = 1 + static_cast<size_t>(kPitch) * (n_sub - 1) +
                       kSubroundLayers;
  Op data_meas = (basis == 'Z') ? Op::MeasureZ : Op::MeasureX;
  for (const auto& q : layout.qubits) {
    if (q.role == Role::Data) {
      stack.put_final(final_layer, gate(data_meas, {q.id}), q.id);
    }
  }

  auto recs = flatten(c, stack);

  // Detectors: the first round's outcome is deterministic only for
  // stabilizers compatible with the preparation basis; later rounds
  // compare consecutive outcomes; the transversal readout reconstructs
  // each compatible stabilizer once more.
  for (int k = 0; k < rounds; ++k) {
    for (size_t i = 0; i < layout.stabilizers.size(); ++i) {
      const auto& s = layout.stabilizers[i];
      uint32_t cur = recs.stab_rec.at({static_cast<int>(i), k});
      if (k == 0) {
        if (s.pauli == basis) c.append(detector(c, {cur}));
      } else {
        uint32_t prev = recs.stab_rec.at({static_cast<int>(i), k - 1});
        c.append(detector(c, {prev, cur}));
      }
    }
  }
  for (size_t i = 0; i < layout.stabilizers.size(); ++i) {
    const auto& s = layout.stabilizers[i];
    if (s.pauli != basis) continue;
    std::vector<uint32_t> records;
    for (QubitId q : s.support) records.push_back(recs.final_rec.at(q));
    records.push_back(recs.stab_rec.at({static_cast<int>(i), rounds - 1}));
    c.append(detector(c, records));
  }

  const auto& logical = (basis == 'Z') ? layout.logical_z : layout.logical_x;
  std::vector<uint32_t> obs;
  for (QubitId q : logical.support) obs.push_back(recs.final_rec.at(q));
  c.append(observable(c, 0, obs));
  return c;
}

Circuit build_injection_circuit(const LatticeLayout& layout,
                                const InjectionLayout& inj, double theta,
                                double phi, char meas_basis) {
  if (layout.d != 3) {
    throw InvalidDistance("injection circuit requires a distance-3 layout");
  }
  if (meas_basis != 'X' && meas_basis != 'Y' && meas_basis != 'Z') {
    throw ValidationError("measurement basis must be 'X', 'Y' or 'Z'");
  }

  Circuit c;
  c.num_qubits = static_cast<uint32_t>(layout.num_qubits());
  LayerStack stack;

  for (const auto& [q, basis] : inj.init_basis) {
    stack.put(0, gate(basis == 'X' ? Op::ResetX : Op::ResetZ, {q}));
  }
  Instruction prep;
  prep.op = Op::PrepArb;
  prep.targets = {inj.center};
  prep.a = theta;
  prep.b = phi;
  stack.put(1, std::move(prep));

  emit_subround(stack, 2, layout, 'A', true);
  emit_subround(stack, 2 + kPitch, layout, 'B', true);

  size_t final_layer = 2 + kPitch + kSubroundLayers;
  auto meas_op = [](char b) {
    return b == 'X' ? Op::MeasureX : (b == 'Y' ? Op::MeasureY : Op::MeasureZ);
  };
  stack.put_final(final_layer, gate(meas_op(meas_basis), {inj.center}),
                  inj.center);
  for (const auto& [q, basis] : inj.init_basis) {
    stack.put_final(final_layer, gate(meas_op(basis), {q}), q);
  }

  auto recs = flatten(c, stack);

  // Post-selection criterion (a): boundary stabilizer outcomes must match
  // the initially conditioned +1 eigenvalues. Bulk outcomes are uniformly
  // random by construction and carry no detector.
  for (size_t i = 0; i < layout.stabilizers.size(); ++i) {
    const auto& s = layout.stabilizers[i];
    if (s.boundary == BoundaryKind::Bulk) continue;
    auto it = recs.stab_rec.find({static_cast<int>(i), 0});
    if (it == recs.stab_rec.end()) continue;  // elided weight-one checks
    c.append(detector(c, {it->second}));
  }
  // Criterion (b): the data-qubit parity over each boundary stabilizer's
  // support, read out in the stabilizer's own basis, must also be +1.
  for (size_t i = 0; i < layout.stabilizers.size(); ++i) {
    const auto& s = layout.stabilizers[i];
    if (s.boundary == BoundaryKind::Bulk) continue;
    std::vector<uint32_t> records;
    for (QubitId q : s.support) records.push_back(recs.final_rec.at(q));
    c.append(detector(c, records));
  }

  std::vector<uint32_t> obs;
  obs.push_back(recs.final_rec.at(inj.center));
  if (meas_basis == 'X' || meas_basis == 'Y') {
    for (QubitId q : layout.logical_x.support) {
      if (q != layout.center) obs.push_back(recs.final_rec.at(q));
    }
  }
  if (meas_basis == 'Z' || meas_basis == 'Y') {
    for (QubitId q : layout.logical_z.support) {
      if (q != layout.center) obs.push_back(recs.final_rec.at(q));
    }
  }
  c.append(observable(c, 0, obs));
  return c;
}

std::string serialize(const Circuit& c) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "QUBITS " << c.num_qubits << "\n";
  for (const auto& ins : c.instructions) {
    out << op_name(ins.op);
    switch (ins.op) {
      case Op::PrepArb:
        out << " " << ins.targets[0] << " " << num(ins.a) << " " << num(ins.b);
        break;
      case Op::Noise1Q:
      case Op::Noise2Q:
        out << " " << num(ins.a);
        for (QubitId q : ins.targets) out << " " << q;
        break;
      case Op::FlipError:
        out << " " << num(ins.a) << " " << ins.axis;
        for (QubitId q : ins.targets) out << " " << q;
        break;
      case Op::Detector:
      case Op::Observable:
        out << " " << ins.id;
        for (int32_t r : ins.rec) out << " " << r;
        break;
      default:
        for (QubitId q : ins.targets) out << " " << q;
        break;
    }
    out << "\n";
  }
  return out.str();
}

Circuit parse(const std::string& text) {
  Circuit c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_qubits = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;

    auto fail = [&](const std::string& msg, const std::string& tok) -> void {
      throw ParseError("line " + std::to_string(line_no) + ": " + msg +
                       " near '" + tok + "'");
    };
    auto read_u32 = [&](const char* what) {
      std::string tok;
      if (!(ls >> tok)) fail(std::string("missing ") + what, name);
      try {
        size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
        return static_cast<uint32_t>(v);
      } catch (const std::exception&) {
        fail(std::string("bad ") + what, tok);
      }
      return 0u;
    };
    auto read_double = [&](const char* what) {
      std::string tok;
      if (!(ls >> tok)) fail(std::string("missing ") + what, name);
      try {
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
      } catch (const std::exception&) {
        fail(std::string("bad ") + what, tok);
      }
      return 0.0;
    };

    if (name == "QUBITS") {
      c.num_qubits = read_u32("qubit count");
      have_qubits = true;
      continue;
    }
    if (!have_qubits) fail("expected QUBITS header", name);

    Instruction ins;
    bool known = false;
    for (Op op : {Op::ResetZ, Op::ResetX, Op::H, Op::CX, Op::MeasureZ,
                  Op::MeasureX, Op::MeasureY, Op::PrepArb, Op::Tick,
                  Op::Noise1Q, Op::Noise2Q, Op::FlipError, Op::Detector,
                  Op::Observable}) {
      if (name == op_name(op)) {
        ins.op = op;
        known = true;
        break;
      }
    }
    if (!known) fail("unknown instruction", name);

    switch (ins.op) {
      case Op::Tick:
        break;
      case Op::PrepArb:
        ins.targets.push_back(read_u32("qubit"));
        ins.a = read_double("theta");
        ins.b = read_double("phi");
        break;
      case Op::Noise1Q:
      case Op::Noise2Q: {
        ins.a = read_double("probability");
        uint32_t q;
        std::string tok;
        while (ls >> tok) {
          try {
            q = static_cast<uint32_t>(std::stoul(tok));
          } catch (const std::exception&) {
            fail("bad qubit", tok);
          }
          ins.targets.push_back(q);
        }
        break;
      }
      case Op::FlipError: {
        ins.a = read_double("probability");
        std::string ax;
        if (!(ls >> ax) || (ax != "X" && ax != "Z")) fail("bad axis", ax);
        ins.axis = ax[0];
        uint32_t q;
        std::string tok;
        while (ls >> tok) {
          try {
            q = static_cast<uint32_t>(std::stoul(tok));
          } catch (const std::exception&) {
            fail("bad qubit", tok);
          }
          ins.targets.push_back(q);
        }
        break;
      }
      case Op::Detector:
      case Op::Observable: {
        ins.id = static_cast<int>(read_u32(
            ins.op == Op::Detector ? "expected parity" : "observable id"));
        std::string tok;
        while (ls >> tok) {
          try {
            ins.rec.push_back(static_cast<int32_t>(std::stol(tok)));
          } catch (const std::exception&) {
            fail("bad record offset", tok);
          }
        }
        break;
      }
      default: {
        std::string tok;
        while (ls >> tok) {
          try {
            size_t pos = 0;
            long v = std::stol(tok, &pos);
            if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
            ins.targets.push_back(static_cast<uint32_t>(v));
          } catch (const std::exception&) {
            fail("bad qubit", tok);
          }
        }
        break;
      }
    }
    if (ins.op == Op::CX && ins.targets.size() % 2 != 0) {
      fail("CX needs an even number of targets", name);
    }
    try {
      c.append(std::move(ins));
    } catch (const ValidationError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

std::vector<std::vector<QubitId>> tick_layers(const Circuit& c) {
  std::vector<std::vector<QubitId>> layers(1);
  for (const auto& ins : c.instructions) {
    if (ins.op == Op::Tick) {
      layers.emplace_back();
      continue;
    }
    if (is_noise_op(ins.op) || ins.op == Op::Detector ||
        ins.op == Op::Observable) {
      continue;
    }
    for (QubitId q : ins.targets) layers.back().push_back(q);
  }
  while (!layers.empty() && layers.back().empty()) layers.pop_back();
  return layers;
}

void validate(const Circuit& c, const LatticeLayout* layout) {
  int preps = 0;
  for (const auto& ins : c.instructions) {
    for (QubitId q : ins.targets) {
      if (q >= c.num_qubits) {
        throw ValidationError("qubit index out of range");
      }
    }
    if (ins.op == Op::CX) {
      for (size_t i = 0; i + 1 < ins.targets.size(); i += 2) {
        if (layout != nullptr &&
            !layout->has_edge(ins.targets[i], ins.targets[i + 1])) {
          throw ValidationError(
              "CX " + std::to_string(ins.targets[i]) + " " +
              std::to_string(ins.targets[i + 1]) + " is not a lattice edge");
        }
      }
    }
    if (ins.op == Op::PrepArb) {
      ++preps;
      if (preps > 1) {
        throw ValidationError("PREP_ARB may appear at most once");
      }
      if (layout != nullptr && ins.targets[0] != layout->center) {
        throw ValidationError("PREP_ARB must target the injection center");
      }
    }
  }
  for (const auto& layer : tick_layers(c)) {
    std::set<QubitId> seen;
    for (QubitId q : layer) {
      if (!seen.insert(q).second) {
        throw ValidationError("qubit " + std::to_string(q) +
                              " used twice in one tick layer");
      }
    }
  }
  for (const auto& d : c.detector_defs) {
    for (uint32_t r : d.records) {
      if (r >= c.measurement_count) {
        throw ValidationError("detector references missing measurement");
      }
    }
  }
  for (const auto& o : c.observable_defs) {
    for (uint32_t r : o.records) {
      if (r >= c.measurement_count) {
        throw ValidationError("observable references missing measurement");
      }
    }
  }
}

}  // namespace hexrsc
