#include "hexrsc/noise.hpp"

#include <set>

#include "json.hpp"

namespace hexrsc {

NoiseModel NoiseModel::calibrated_preset() {
  NoiseModel m;
  m.p_spam = 1.6e-2;
  m.p2 = 2.9e-3;
  // No single-qubit gate rate is published for the device; use a typical
  // 1q:2q ratio of one tenth. Overridable via config or CLI flags.
  m.p1 = m.p2 / 10.0;
  m.p_idle = m.p2 / 10.0;
  return m;
}

std::string NoiseModel::to_json() const {
  nlohmann::json j{
      {"p1", p1}, {"p2", p2}, {"p_spam", p_spam}, {"p_idle", p_idle}};
  return j.dump(2);
}

NoiseModel NoiseModel::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  NoiseModel m;
  m.p1 = j.value("p1", 0.0);
  m.p2 = j.value("p2", 0.0);
  m.p_spam = j.value("p_spam", 0.0);
  m.p_idle = j.value("p_idle", 0.0);
  return m;
}

Circuit apply_noise(const Circuit& c, const NoiseModel& model) {
  for (const auto& ins : c.instructions) {
    if (is_noise_op(ins.op)) {
      throw ValidationError("apply_noise requires a noise-free circuit");
    }
  }

  Circuit out;
  out.num_qubits = c.num_qubits;

  auto flip = [&](double p, char axis, const std::vector<QubitId>& targets) {
    if (p <= 0.0 || targets.empty()) return;
    Instruction ins;
    ins.op = Op::FlipError;
    ins.a = p;
    ins.axis = axis;
    ins.targets = targets;
    out.append(std::move(ins));
  };
  auto depol = [&](Op op, double p, const std::vector<QubitId>& targets) {
    if (p <= 0.0 || targets.empty()) return;
    Instruction ins;
    ins.op = op;
    ins.a = p;
    ins.targets = targets;
    out.append(std::move(ins));
  };

  // Work one tick layer at a time so idle qubits can be identified.
  size_t i = 0;
  const size_t n = c.instructions.size();
  while (i < n) {
    size_t j = i;
    while (j < n && c.instructions[j].op != Op::Tick) ++j;

    std::set<QubitId> active;
    bool any_gate = false;
    for (size_t k = i; k < j; ++k) {
      const auto& ins = c.instructions[k];
      if (ins.op == Op::Detector || ins.op == Op::Observable) continue;
      any_gate = true;
      for (QubitId q : ins.targets) active.insert(q);
    }

    for (size_t k = i; k < j; ++k) {
      const auto& ins = c.instructions[k];
      switch (ins.op) {
        case Op::MeasureZ:
        case Op::MeasureY:
          flip(model.p_spam, 'X', ins.targets);
          out.append(ins);
          break;
        case Op::MeasureX:
          flip(model.p_spam, 'Z', ins.targets);
          out.append(ins);
          break;
        case Op::ResetZ:
          out.append(ins);
          flip(model.p_spam, 'X', ins.targets);
          break;
        case Op::ResetX:
          out.append(ins);
          flip(model.p_spam, 'Z', ins.targets);
          break;
        case Op::H:
          out.append(ins);
          depol(Op::Noise1Q, model.p1, ins.targets);
          break;
        case Op::PrepArb:
          out.append(ins);
          depol(Op::Noise1Q, model.p1, ins.targets);
          break;
        case Op::CX:
          out.append(ins);
          depol(Op::Noise2Q, model.p2, ins.targets);
          break;
        default:
          out.append(ins);
          break;
      }
    }

    if (any_gate) {
      std::vector<QubitId> idle;
      for (QubitId q = 0; q < c.num_qubits; ++q) {
        if (!active.count(q)) idle.push_back(q);
      }
      depol(Op::Noise1Q, model.p_idle, idle);
    }

    if (j < n) {
      out.append(c.instructions[j]);  // the tick
      i = j + 1;
    } else {
      i = j;
    }
  }
  return out;
}

std::vector<ErrorMechanism> enumerate_mechanisms(const Circuit& noisy) {
  std::vector<ErrorMechanism> mechs;
  for (uint32_t idx = 0; idx < noisy.instructions.size(); ++idx) {
    const auto& ins = noisy.instructions[idx];
    switch (ins.op) {
      case Op::Noise1Q:
        for (QubitId q : ins.targets) {
          for (uint8_t p : {uint8_t{1}, uint8_t{3}, uint8_t{2}}) {
            mechs.push_back({ins.a / 3.0, idx, {q}, {p}});
          }
        }
        break;
      case Op::Noise2Q:
        for (size_t t = 0; t + 1 < ins.targets.size(); t += 2) {
          for (uint8_t a = 0; a < 4; ++a) {
            for (uint8_t b = 0; b < 4; ++b) {
              if (a == 0 && b == 0) continue;
              mechs.push_back({ins.a / 15.0,
                               idx,
                               {ins.targets[t], ins.targets[t + 1]},
                               {a, b}});
            }
          }
        }
        break;
      case Op::FlipError: {
        uint8_t p = (ins.axis == 'Z') ? uint8_t{2} : uint8_t{1};
        for (QubitId q : ins.targets) {
          mechs.push_back({ins.a, idx, {q}, {p}});
        }
        break;
      }
      default:
        break;
    }
  }
  return mechs;
}

}  // namespace hexrsc
