#include "hexrsc/frame.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hexrsc/rng.hpp"

namespace hexrsc {

namespace {

constexpr uint64_t kRefStream = 0xf00dULL << 32;

uint64_t prob_threshold(double p) {
  if (p <= 0) return 0;
  long double t = static_cast<long double>(p) * 18446744073709551616.0L;
  if (t >= 18446744073709551615.0L) return UINT64_MAX;
  return static_cast<uint64_t>(t);
}

// Pauli codes: 0=I, 1=X, 2=Z, 3=Y (x-bit | z-bit<<1).
struct PauliPair {
  uint8_t a, b;
};
const PauliPair kTwoQubitTable[15] = {
    {0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 0},
    {2, 1}, {2, 2}, {2, 3}, {3, 0}, {3, 1}, {3, 2}, {3, 3},
};

struct ForcedError {
  uint32_t instr;
  uint64_t lane;
  std::vector<QubitId> targets;
  std::vector<uint8_t> paulis;
};

// Propagates Pauli frames for a contiguous range of shots, 64 per word.
class FrameEngine {
 public:
  FrameEngine(const Circuit& c, uint64_t shot_offset, uint64_t shot_count,
              uint64_t seed, bool sample_noise)
      : c_(c),
        offset_(shot_offset),
        count_(shot_count),
        words_((shot_count + 63) / 64),
        rng_(seed),
        sample_(sample_noise) {
    x_.assign(c.num_qubits, std::vector<uint64_t>(words_, 0));
    z_.assign(c.num_qubits, std::vector<uint64_t>(words_, 0));
    rec_.assign(c.measurement_count, std::vector<uint64_t>(words_, 0));
  }

  void force(const std::vector<ForcedError>& errors) {
    for (const auto& e : errors) {
      forced_by_instr_.resize(
          std::max<size_t>(forced_by_instr_.size(), e.instr + 1));
      forced_by_instr_[e.instr].push_back(&e);
    }
  }

  void run() {
    uint32_t rec_idx = 0;
    for (uint32_t i = 0; i < c_.instructions.size(); ++i) {
      const auto& ins = c_.instructions[i];
      switch (ins.op) {
        case Op::ResetZ:
        case Op::ResetX:
        case Op::PrepArb:
          for (QubitId q : ins.targets) {
            std::fill(x_[q].begin(), x_[q].end(), 0);
            std::fill(z_[q].begin(), z_[q].end(), 0);
          }
          break;
        case Op::H:
          for (QubitId q : ins.targets) x_[q].swap(z_[q]);
          break;
        case Op::CX:
          for (size_t t = 0; t + 1 < ins.targets.size(); t += 2) {
            QubitId ctrl = ins.targets[t], tgt = ins.targets[t + 1];
            for (size_t w = 0; w < words_; ++w) {
              x_[tgt][w] ^= x_[ctrl][w];
              z_[ctrl][w] ^= z_[tgt][w];
            }
          }
          break;
        case Op::MeasureZ:
          for (QubitId q : ins.targets) rec_[rec_idx++] = x_[q];
          break;
        case Op::MeasureX:
          for (QubitId q : ins.targets) rec_[rec_idx++] = z_[q];
          break;
        case Op::MeasureY:
          for (QubitId q : ins.targets) {
            auto& r = rec_[rec_idx++];
            for (size_t w = 0; w < words_; ++w) r[w] = x_[q][w] ^ z_[q][w];
          }
          break;
        case Op::Noise1Q:
          if (sample_) sample_1q(i, ins);
          break;
        case Op::Noise2Q:
          if (sample_) sample_2q(i, ins);
          break;
        case Op::FlipError:
          if (sample_) sample_flip(i, ins);
          break;
        default:
          break;
      }
      if (i < forced_by_instr_.size()) {
        for (const ForcedError* e : forced_by_instr_[i]) apply_forced(*e);
      }
    }
  }

  // Detector/observable bits for this shot range.
  void emit(std::vector<std::vector<uint64_t>>& det,
            std::vector<std::vector<uint64_t>>& obs, size_t word_off) const {
    for (size_t d = 0; d < c_.detector_defs.size(); ++d) {
      for (size_t w = 0; w < words_; ++w) {
        uint64_t v = 0;
        for (uint32_t r : c_.detector_defs[d].records) v ^= rec_[r][w];
        det[d][word_off + w] = v;
      }
    }
    for (size_t o = 0; o < c_.observable_defs.size(); ++o) {
      for (size_t w = 0; w < words_; ++w) {
        uint64_t v = 0;
        for (uint32_t r : c_.observable_defs[o].records) v ^= rec_[r][w];
        obs[o][word_off + w] = v;
      }
    }
  }

 private:
  void xor_pauli(QubitId q, uint8_t pauli, uint64_t lane) {
    uint64_t bit = 1ULL << (lane & 63);
    if (pauli & 1) x_[q][lane >> 6] ^= bit;
    if (pauli & 2) z_[q][lane >> 6] ^= bit;
  }

  void apply_forced(const ForcedError& e) {
    for (size_t k = 0; k < e.targets.size(); ++k) {
      xor_pauli(e.targets[k], e.paulis[k], e.lane);
    }
  }

  void sample_1q(uint32_t instr, const Instruction& ins) {
    if (ins.a <= 0) return;
    uint64_t thr = prob_threshold(ins.a);
    for (size_t slot = 0; slot < ins.targets.size(); ++slot) {
      uint64_t stream = (static_cast<uint64_t>(instr) << 10) | slot;
      QubitId q = ins.targets[slot];
      for (uint64_t s = 0; s < count_; ++s) {
        if (rng_.word(stream, offset_ + s) < thr) {
          uint64_t pick = rng_.word(stream | kChoiceBit, offset_ + s) % 3;
          xor_pauli(q, static_cast<uint8_t>(pick + 1), s);
        }
      }
    }
  }

  void sample_2q(uint32_t instr, const Instruction& ins) {
    if (ins.a <= 0) return;
    uint64_t thr = prob_threshold(ins.a);
    for (size_t t = 0; t + 1 < ins.targets.size(); t += 2) {
      uint64_t stream = (static_cast<uint64_t>(instr) << 10) | (t / 2);
      for (uint64_t s = 0; s < count_; ++s) {
        if (rng_.word(stream, offset_ + s) < thr) {
          uint64_t pick = rng_.word(stream | kChoiceBit, offset_ + s) % 15;
          xor_pauli(ins.targets[t], kTwoQubitTable[pick].a, s);
          xor_pauli(ins.targets[t + 1], kTwoQubitTable[pick].b, s);
        }
      }
    }
  }

  void sample_flip(uint32_t instr, const Instruction& ins) {
    if (ins.a <= 0) return;
    uint64_t thr = prob_threshold(ins.a);
    uint8_t pauli = (ins.axis == 'Z') ? 2 : 1;
    for (size_t slot = 0; slot < ins.targets.size(); ++slot) {
      uint64_t stream = (static_cast<uint64_t>(instr) << 10) | slot;
      QubitId q = ins.targets[slot];
      for (uint64_t s = 0; s < count_; ++s) {
        if (rng_.word(stream, offset_ + s) < thr) xor_pauli(q, pauli, s);
      }
    }
  }

  static constexpr uint64_t kChoiceBit = 1ULL << 63;

  const Circuit& c_;
  uint64_t offset_, count_;
  size_t words_;
  CounterRng rng_;
  bool sample_;
  std::vector<std::vector<uint64_t>> x_, z_, rec_;
  std::vector<std::vector<const ForcedError*>> forced_by_instr_;
};

void mask_tail(std::vector<uint64_t>& bits, uint64_t shots) {
  if (shots % 64 == 0 || bits.empty()) return;
  bits.back() &= (1ULL << (shots % 64)) - 1;
}

ShotBatch sample_common(const Circuit& noisy, uint64_t shots, uint64_t seed,
                        int workers) {
  ShotBatch batch;
  batch.shots = shots;
  batch.num_detectors = static_cast<uint32_t>(noisy.detector_defs.size());
  batch.num_observables = static_cast<uint32_t>(noisy.observable_defs.size());
  size_t words = batch.words();
  batch.det_bits.assign(batch.num_detectors, std::vector<uint64_t>(words, 0));
  batch.obs_bits.assign(batch.num_observables, std::vector<uint64_t>(words, 0));

  if (workers < 1) workers = 1;
  uint64_t words_total = words;
  uint64_t words_per = (words_total + workers - 1) / workers;

  auto run_range = [&](uint64_t w0, uint64_t w1) {
    if (w0 >= w1) return;
    uint64_t s0 = w0 * 64;
    uint64_t s1 = std::min<uint64_t>(shots, w1 * 64);
    FrameEngine eng(noisy, s0, s1 - s0, seed, true);
    eng.run();
    eng.emit(batch.det_bits, batch.obs_bits, w0);
  };

  if (workers == 1) {
    run_range(0, words_total);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      uint64_t w0 = std::min<uint64_t>(words_total, t * words_per);
      uint64_t w1 = std::min<uint64_t>(words_total, (t + 1) * words_per);
      pool.emplace_back(run_range, w0, w1);
    }
    for (auto& th : pool) th.join();
  }

  for (auto& row : batch.det_bits) mask_tail(row, shots);
  for (auto& row : batch.obs_bits) mask_tail(row, shots);
  return batch;
}

}  // namespace

ShotBatch frame_sample(const Circuit& noisy, uint64_t shots, uint64_t seed,
                       int workers) {
  return sample_common(noisy, shots, seed, workers);
}

double injected_reference_expectation(const Circuit& injection) {
  const Instruction* prep = nullptr;
  for (const auto& ins : injection.instructions) {
    if (ins.op == Op::PrepArb) prep = &ins;
  }
  if (prep == nullptr) {
    throw ValidationError("not an injection circuit: no PREP_ARB");
  }
  QubitId center = prep->targets[0];
  Op meas = Op::MeasureZ;
  bool found = false;
  for (const auto& ins : injection.instructions) {
    if (!is_measure_op(ins.op)) continue;
    for (QubitId q : ins.targets) {
      if (q == center) {
        meas = ins.op;
        found = true;
      }
    }
  }
  if (!found) {
    throw ValidationError("injection circuit never reads out the center");
  }
  double theta = prep->a, phi = prep->b;
  switch (meas) {
    case Op::MeasureX: return std::sin(theta) * std::cos(phi);
    case Op::MeasureY: return std::sin(theta) * std::sin(phi);
    default: return std::cos(theta);
  }
}

ShotBatch injected_frame_sample(const Circuit& injection, uint64_t shots,
                                uint64_t seed, int workers) {
  ShotBatch batch = sample_common(injection, shots, seed, workers);
  batch.injection = true;
  size_t words = batch.words();
  batch.accept_bits.assign(words, 0);
  batch.outcome_bits.assign(words, 0);

  for (size_t w = 0; w < words; ++w) {
    uint64_t rejected = 0;
    for (const auto& row : batch.det_bits) rejected |= row[w];
    batch.accept_bits[w] = ~rejected;
  }
  mask_tail(batch.accept_bits, shots);

  double expectation = injected_reference_expectation(injection);
  // P(outcome = +1) for the noiseless reference draw.
  double p_up = 0.5 * (1.0 + expectation);
  uint64_t thr = prob_threshold(p_up);
  CounterRng rng(seed);
  for (uint64_t s = 0; s < shots; ++s) {
    bool down = rng.word(kRefStream, s) >= thr;
    if (down) batch.outcome_bits[s >> 6] ^= 1ULL << (s & 63);
  }
  if (!batch.obs_bits.empty()) {
    for (size_t w = 0; w < words; ++w) {
      batch.outcome_bits[w] ^= batch.obs_bits[0][w];
    }
  }
  mask_tail(batch.outcome_bits, shots);
  return batch;
}

std::vector<MechanismSignature> propagate_mechanisms(
    const Circuit& circuit, const std::vector<ErrorMechanism>& mechs) {
  std::vector<MechanismSignature> sigs(mechs.size());
  size_t n_det = circuit.detector_defs.size();
  size_t n_obs = circuit.observable_defs.size();
  for (size_t base = 0; base < mechs.size(); base += 64) {
    size_t lanes = std::min<size_t>(64, mechs.size() - base);
    FrameEngine eng(circuit, 0, lanes, 0, false);
    std::vector<ForcedError> forced;
    for (size_t l = 0; l < lanes; ++l) {
      const auto& m = mechs[base + l];
      forced.push_back({m.instr, l, m.targets, m.paulis});
    }
    eng.force(forced);
    eng.run();
    std::vector<std::vector<uint64_t>> det(n_det, std::vector<uint64_t>(1, 0));
    std::vector<std::vector<uint64_t>> obs(n_obs, std::vector<uint64_t>(1, 0));
    eng.emit(det, obs, 0);
    for (size_t l = 0; l < lanes; ++l) {
      auto& sig = sigs[base + l];
      for (size_t d = 0; d < n_det; ++d) {
        if ((det[d][0] >> l) & 1) sig.detectors.push_back(d);
      }
      for (size_t o = 0; o < n_obs; ++o) {
        if ((obs[o][0] >> l) & 1) sig.observables |= 1u << o;
      }
    }
  }
  return sigs;
}

MechanismSignature propagate_mechanism(const Circuit& circuit,
                                       const ErrorMechanism& mech) {
  return propagate_mechanisms(circuit, {mech})[0];
}

MechanismSignature propagate_combined(const Circuit& circuit,
                                      const std::vector<ErrorMechanism>& set) {
  FrameEngine eng(circuit, 0, 1, 0, false);
  std::vector<ForcedError> forced;
  for (const auto& m : set) forced.push_back({m.instr, 0, m.targets, m.paulis});
  eng.force(forced);
  eng.run();
  size_t n_det = circuit.detector_defs.size();
  size_t n_obs = circuit.observable_defs.size();
  std::vector<std::vector<uint64_t>> det(n_det, std::vector<uint64_t>(1, 0));
  std::vector<std::vector<uint64_t>> obs(n_obs, std::vector<uint64_t>(1, 0));
  eng.emit(det, obs, 0);
  MechanismSignature sig;
  for (size_t d = 0; d < n_det; ++d) {
    if (det[d][0] & 1) sig.detectors.push_back(d);
  }
  for (size_t o = 0; o < n_obs; ++o) {
    if (obs[o][0] & 1) sig.observables |= 1u << o;
  }
  return sig;
}

std::string ShotBatch::to_csv() const {
  std::ostringstream out;
  out << "shot";
  for (uint32_t d = 0; d < num_detectors; ++d) out << ",d" << d;
  for (uint32_t o = 0; o < num_observables; ++o) out << ",obs" << o;
  if (injection) out << ",accept,outcome";
  out << "\n";
  for (uint64_t s = 0; s < shots; ++s) {
    out << s;
    for (uint32_t d = 0; d < num_detectors; ++d) out << "," << (det(d, s) ? 1 : 0);
    for (uint32_t o = 0; o < num_observables; ++o) out << "," << (obs(o, s) ? 1 : 0);
    if (injection) {
      out << "," << (accepted(s) ? 1 : 0) << ","
          << (outcome_down(s) ? -1 : 1);
    }
    out << "\n";
  }
  return out.str();
}

namespace {
void put_u32(std::vector<uint8_t>& v, uint32_t x) {
  for (int i = 0; i < 4; ++i) v.push_back((x >> (8 * i)) & 0xff);
}
void put_u64(std::vector<uint8_t>& v, uint64_t x) {
  for (int i = 0; i < 8; ++i) v.push_back((x >> (8 * i)) & 0xff);
}
uint32_t get_u32(const std::vector<uint8_t>& v, size_t& p) {
  uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<uint32_t>(v.at(p++)) << (8 * i);
  return x;
}
uint64_t get_u64(const std::vector<uint8_t>& v, size_t& p) {
  uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<uint64_t>(v.at(p++)) << (8 * i);
  return x;
}
void put_words(std::vector<uint8_t>& v, const std::vector<uint64_t>& w) {
  for (uint64_t x : w) put_u64(v, x);
}
std::vector<uint64_t> get_words(const std::vector<uint8_t>& v, size_t& p,
                                size_t n) {
  std::vector<uint64_t> w(n);
  for (size_t i = 0; i < n; ++i) w[i] = get_u64(v, p);
  return w;
}
}  // namespace

std::vector<uint8_t> ShotBatch::to_binary() const {
  std::vector<uint8_t> v;
  put_u32(v, 0x42535848u);  // "HXSB"
  put_u32(v, 1);
  put_u64(v, shots);
  put_u32(v, num_detectors);
  put_u32(v, num_observables);
  put_u32(v, injection ? 1 : 0);
  for (const auto& row : det_bits) put_words(v, row);
  for (const auto& row : obs_bits) put_words(v, row);
  if (injection) {
    put_words(v, accept_bits);
    put_words(v, outcome_bits);
  }
  return v;
}

ShotBatch ShotBatch::from_binary(const std::vector<uint8_t>& bytes) {
  size_t p = 0;
  if (get_u32(bytes, p) != 0x42535848u) {
    throw std::runtime_error("shot file: bad magic");
  }
  if (get_u32(bytes, p) != 1) {
    throw std::runtime_error("shot file: unsupported version");
  }
  ShotBatch b;
  b.shots = get_u64(bytes, p);
  b.num_detectors = get_u32(bytes, p);
  b.num_observables = get_u32(bytes, p);
  b.injection = get_u32(bytes, p) & 1;
  size_t words = b.words();
  for (uint32_t d = 0; d < b.num_detectors; ++d) {
    b.det_bits.push_back(get_words(bytes, p, words));
  }
  for (uint32_t o = 0; o < b.num_observables; ++o) {
    b.obs_bits.push_back(get_words(bytes, p, words));
  }
  if (b.injection) {
    b.accept_bits = get_words(bytes, p, words);
    b.outcome_bits = get_words(bytes, p, words);
  }
  return b;
}

}  // namespace hexrsc
