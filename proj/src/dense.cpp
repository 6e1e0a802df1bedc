#include "hexrsc/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace hexrsc {

double OutcomeDist::total_variation(const OutcomeDist& o) const {
  double tv = 0;
  for (const auto& [k, v] : p) {
    auto it = o.p.find(k);
    tv += std::fabs(v - (it == o.p.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : o.p) {
    if (!p.count(k)) tv += v;
  }
  return tv / 2;
}

double OutcomeDist::accept_probability() const {
  double acc = 0;
  for (const auto& [k, v] : p) {
    if ((k & ((1ULL << 48) - 1)) == 0) acc += v;
  }
  return acc;
}

double OutcomeDist::accepted_observable_mean(int o) const {
  double up = 0, down = 0;
  for (const auto& [k, v] : p) {
    if ((k & ((1ULL << 48) - 1)) != 0) continue;
    if ((k >> (48 + o)) & 1) {
      down += v;
    } else {
      up += v;
    }
  }
  double norm = up + down;
  return norm > 0 ? (up - down) / norm : 0.0;
}

std::pair<std::complex<double>, std::complex<double>> u3_state(double theta,
                                                               double phi) {
  return {std::cos(theta / 2),
          std::exp(std::complex<double>(0, phi)) * std::sin(theta / 2)};
}

namespace {

using State = std::vector<std::complex<double>>;

struct PauliAt {
  QubitId q;
  uint8_t pauli;  // 1=X, 2=Z, 3=Y
};

class DenseRunner {
 public:
  DenseRunner(const Circuit& c, NoiseHandling noise,
              const std::vector<ErrorMechanism>* forced, double prune)
      : c_(c), noise_(noise), prune_(prune) {
    if (c.num_qubits > 14) {
      throw std::invalid_argument("dense oracle supports at most 14 qubits");
    }
    if (c.detector_defs.size() > 48 || c.observable_defs.size() > 16) {
      throw std::invalid_argument("dense oracle: too many detectors");
    }
    if (forced != nullptr) {
      for (const auto& m : *forced) {
        forced_.resize(std::max<size_t>(forced_.size(), m.instr + 1));
        for (size_t k = 0; k < m.targets.size(); ++k) {
          if (m.paulis[k]) forced_[m.instr].push_back({m.targets[k], m.paulis[k]});
        }
      }
    }
  }

  OutcomeDist run() {
    State init(1ULL << c_.num_qubits, 0.0);
    init[0] = 1.0;
    outcomes_.reserve(c_.measurement_count);
    step(0, 0, std::move(init), 1.0);
    return std::move(dist_);
  }

 private:
  void apply_pauli(State& s, QubitId q, uint8_t pauli) {
    // Global phase is irrelevant to outcome probabilities, so Y is
    // applied as X then Z.
    uint64_t bit = 1ULL << q;
    if (pauli & 1) {
      for (uint64_t i = 0; i < s.size(); ++i) {
        if (!(i & bit)) std::swap(s[i], s[i | bit]);
      }
    }
    if (pauli & 2) {
      for (uint64_t i = 0; i < s.size(); ++i) {
        if (i & bit) s[i] = -s[i];
      }
    }
  }

  void apply_h(State& s, QubitId q) {
    const double inv = 1.0 / std::sqrt(2.0);
    uint64_t bit = 1ULL << q;
    for (uint64_t i = 0; i < s.size(); ++i) {
      if (i & bit) continue;
      auto a = s[i], b = s[i | bit];
      s[i] = (a + b) * inv;
      s[i | bit] = (a - b) * inv;
    }
  }

  void apply_sdg(State& s, QubitId q) {
    uint64_t bit = 1ULL << q;
    std::complex<double> mi(0, -1);
    for (uint64_t i = 0; i < s.size(); ++i) {
      if (i & bit) s[i] *= mi;
    }
  }

  void apply_s(State& s, QubitId q) {
    uint64_t bit = 1ULL << q;
    std::complex<double> pi(0, 1);
    for (uint64_t i = 0; i < s.size(); ++i) {
      if (i & bit) s[i] *= pi;
    }
  }

  void apply_cx(State& s, QubitId c, QubitId t) {
    uint64_t cb = 1ULL << c, tb = 1ULL << t;
    for (uint64_t i = 0; i < s.size(); ++i) {
      if ((i & cb) && !(i & tb)) std::swap(s[i], s[i | tb]);
    }
  }

  void apply_u3(State& s, QubitId q, double theta, double phi) {
    auto [a0, a1] = u3_state(theta, phi);
    // Column 2 of U3(theta, phi, 0): [-sin(t/2), e^{i phi} cos(t/2)].
    std::complex<double> b0 = -std::sin(theta / 2);
    std::complex<double> b1 =
        std::exp(std::complex<double>(0, phi)) * std::cos(theta / 2);
    uint64_t bit = 1ULL << q;
    for (uint64_t i = 0; i < s.size(); ++i) {
      if (i & bit) continue;
      auto lo = s[i], hi = s[i | bit];
      s[i] = a0 * lo + b0 * hi;
      s[i | bit] = a1 * lo + b1 * hi;
    }
  }

  double prob_one(const State& s, QubitId q) const {
    uint64_t bit = 1ULL << q;
    double p1 = 0;
    for (uint64_t i = 0; i < s.size(); ++i) {
      if (i & bit) p1 += std::norm(s[i]);
    }
    return p1;
  }

  void collapse(State& s, QubitId q, bool one, double pout) {
    uint64_t bit = 1ULL << q;
    double scale = 1.0 / std::sqrt(pout);
    for (uint64_t i = 0; i < s.size(); ++i) {
      if (((i & bit) != 0) != one) {
        s[i] = 0;
      } else {
        s[i] *= scale;
      }
    }
  }

  // Branch over measurement of Z_q; `record` says whether the outcome
  // enters the measurement record; reset_after forces |0>.
  void measure_branch(size_t ip, size_t sub, State state, double prob,
                      QubitId q, bool record, bool reset_after) {
    double p1 = prob_one(state, q);
    for (int outcome = 0; outcome < 2; ++outcome) {
      double po = outcome ? p1 : 1.0 - p1;
      if (prob * po < prune_) continue;
      State next = (outcome == 0 && p1 * prob < prune_)
                       ? std::move(state)
                       : state;  // reuse buffer on the last viable branch
      collapse(next, q, outcome, po);
      if (reset_after && outcome) apply_pauli(next, q, 1);
      if (record) outcomes_.push_back(static_cast<uint8_t>(outcome));
      step(ip, sub, std::move(next), prob * po);
      if (record) outcomes_.pop_back();
      if (outcome == 0 && p1 * prob < prune_) break;  // moved out
    }
  }

  // Branch over one Pauli channel element set.
  void channel_branch(size_t ip, size_t sub, State state, double prob,
                      const std::vector<std::pair<double, std::vector<PauliAt>>>& elems) {
    for (size_t e = 0; e < elems.size(); ++e) {
      double pe = elems[e].first;
      if (prob * pe < prune_) continue;
      State next = state;
      for (const auto& pa : elems[e].second) apply_pauli(next, pa.q, pa.pauli);
      step(ip, sub + 1, std::move(next), prob * pe);
    }
  }

  // Execute from instruction `ip`, sub-target `sub` (for multi-target
  // branching instructions).
  void step(size_t ip, size_t sub, State state, double prob) {
    while (ip < c_.instructions.size()) {
      const auto& ins = c_.instructions[ip];
      switch (ins.op) {
        case Op::H:
          for (QubitId q : ins.targets) apply_h(state, q);
          break;
        case Op::CX:
          for (size_t t = 0; t + 1 < ins.targets.size(); t += 2) {
            apply_cx(state, ins.targets[t], ins.targets[t + 1]);
          }
          break;
        case Op::PrepArb: {
          if (sub == 0) {  // reset to |0> first, then rotate
            measure_branch(ip, 1, std::move(state), prob, ins.targets[0],
                           false, true);
            return;
          }
          apply_u3(state, ins.targets[0], ins.a, ins.b);
          break;
        }
        case Op::ResetZ:
        case Op::ResetX: {
          if (sub < ins.targets.size()) {
            QubitId q = ins.targets[sub];
            if (ins.op == Op::ResetX) apply_h(state, q);
            measure_branch(ip, sub + 1, std::move(state), prob, q, false,
                           true);
            return;
          }
          if (ins.op == Op::ResetX) {
            for (QubitId q : ins.targets) apply_h(state, q);
          }
          break;
        }
        case Op::MeasureZ:
        case Op::MeasureX:
        case Op::MeasureY: {
          if (sub < ins.targets.size()) {
            QubitId q = ins.targets[sub];
            if (ins.op == Op::MeasureX) apply_h(state, q);
            if (ins.op == Op::MeasureY) {
              apply_sdg(state, q);
              apply_h(state, q);
            }
            measure_branch(ip, sub + 1, std::move(state), prob, q, true,
                           false);
            return;
          }
          // Undo the basis change so later operations see the right frame.
          for (QubitId q : ins.targets) {
            if (ins.op == Op::MeasureX) apply_h(state, q);
            if (ins.op == Op::MeasureY) {
              apply_h(state, q);
              apply_s(state, q);
            }
          }
          break;
        }
        case Op::Noise1Q: {
          if (noise_ == NoiseHandling::Expand && ins.a > 0 &&
              sub < ins.targets.size()) {
            QubitId q = ins.targets[sub];
            channel_branch(ip, sub, std::move(state), prob,
                           {{1.0 - ins.a, {}},
                            {ins.a / 3, {{q, 1}}},
                            {ins.a / 3, {{q, 3}}},
                            {ins.a / 3, {{q, 2}}}});
            return;
          }
          break;
        }
        case Op::Noise2Q: {
          if (noise_ == NoiseHandling::Expand && ins.a > 0 &&
              2 * sub + 1 < ins.targets.size()) {
            QubitId qa = ins.targets[2 * sub], qb = ins.targets[2 * sub + 1];
            std::vector<std::pair<double, std::vector<PauliAt>>> elems;
            elems.push_back({1.0 - ins.a, {}});
            for (uint8_t a = 0; a < 4; ++a) {
              for (uint8_t b = 0; b < 4; ++b) {
                if (a == 0 && b == 0) continue;
                std::vector<PauliAt> ps;
                if (a) ps.push_back({qa, a});
                if (b) ps.push_back({qb, b});
                elems.push_back({ins.a / 15, std::move(ps)});
              }
            }
            channel_branch(ip, sub, std::move(state), prob, elems);
            return;
          }
          break;
        }
        case Op::FlipError: {
          if (noise_ == NoiseHandling::Expand && ins.a > 0 &&
              sub < ins.targets.size()) {
            QubitId q = ins.targets[sub];
            uint8_t pauli = (ins.axis == 'Z') ? 2 : 1;
            channel_branch(ip, sub, std::move(state), prob,
                           {{1.0 - ins.a, {}}, {ins.a, {{q, pauli}}}});
            return;
          }
          break;
        }
        default:
          break;
      }
      if (ip < forced_.size()) {
        for (const auto& pa : forced_[ip]) apply_pauli(state, pa.q, pa.pauli);
      }
      ++ip;
      sub = 0;
    }
    finish(prob);
  }

  void finish(double prob) {
    uint64_t det = 0, obs = 0;
    for (size_t d = 0; d < c_.detector_defs.size(); ++d) {
      int par = c_.detector_defs[d].expected_parity & 1;
      for (uint32_t r : c_.detector_defs[d].records) par ^= outcomes_.at(r);
      if (par) det |= 1ULL << d;
    }
    for (size_t o = 0; o < c_.observable_defs.size(); ++o) {
      int par = 0;
      for (uint32_t r : c_.observable_defs[o].records) par ^= outcomes_.at(r);
      if (par) obs |= 1ULL << o;
    }
    dist_.p[OutcomeDist::key(det, obs)] += prob;
  }

  const Circuit& c_;
  NoiseHandling noise_;
  double prune_;
  std::vector<std::vector<PauliAt>> forced_;
  std::vector<uint8_t> outcomes_;
  OutcomeDist dist_;
};

// Vectorized density matrix: index = ket_bits | (bra_bits << n). A gate U
// acts as U on the ket bits and U* on the bra bits.
class DenseRhoRunner {
 public:
  DenseRhoRunner(const Circuit& c, double prune) : c_(c), prune_(prune) {
    if (c.num_qubits > 9) {
      throw std::invalid_argument("rho oracle supports at most 9 qubits");
    }
    if (c.detector_defs.size() > 48 || c.observable_defs.size() > 16) {
      throw std::invalid_argument("rho oracle: too many detectors");
    }
    n_ = c.num_qubits;
  }

  OutcomeDist run() {
    State rho(1ULL << (2 * n_), 0.0);
    rho[0] = 1.0;
    step(0, 0, std::move(rho), 1.0);
    return std::move(dist_);
  }

 private:
  void pauli_side(State& s, uint32_t bit_index, uint8_t pauli) {
    uint64_t bit = 1ULL << bit_index;
    if (pauli & 1) {
      for (uint64_t i = 0; i < s.size(); ++i) {
        if (!(i & bit)) std::swap(s[i], s[i | bit]);
      }
    }
    if (pauli & 2) {
      for (uint64_t i = 0; i < s.size(); ++i) {
        if (i & bit) s[i] = -s[i];
      }
    }
  }

  void apply_pauli(State& s, QubitId q, uint8_t pauli) {
    pauli_side(s, q, pauli);
    pauli_side(s, q + n_, pauli);
  }

  void apply_1q(State& s, QubitId q, std::complex<double> m00,
                std::complex<double> m01, std::complex<double> m10,
                std::complex<double> m11) {
    auto side = [&](uint32_t bi, std::complex<double> a, std::complex<double> b,
                    std::complex<double> cc, std::complex<double> d) {
      uint64_t bit = 1ULL << bi;
      for (uint64_t i = 0; i < s.size(); ++i) {
        if (i & bit) continue;
        auto lo = s[i], hi = s[i | bit];
        s[i] = a * lo + b * hi;
        s[i | bit] = cc * lo + d * hi;
      }
    };
    side(q, m00, m01, m10, m11);
    side(q + n_, std::conj(m00), std::conj(m01), std::conj(m10),
         std::conj(m11));
  }

  void apply_h(State& s, QubitId q) {
    const double inv = 1.0 / std::sqrt(2.0);
    apply_1q(s, q, inv, inv, inv, -inv);
  }

  void apply_cx(State& s, QubitId c, QubitId t) {
    auto side = [&](uint32_t cb_i, uint32_t tb_i) {
      uint64_t cb = 1ULL << cb_i, tb = 1ULL << tb_i;
      for (uint64_t i = 0; i < s.size(); ++i) {
        if ((i & cb) && !(i & tb)) std::swap(s[i], s[i | tb]);
      }
    };
    side(c, t);
    side(c + n_, t + n_);
  }

  void apply_channel(State& s,
                     const std::vector<std::pair<double, std::vector<PauliAt>>>&
                         elems) {
    State out(s.size(), 0.0);
    for (const auto& [pe, paulis] : elems) {
      if (pe <= 0) continue;
      State tmp = s;
      for (const auto& pa : paulis) apply_pauli(tmp, pa.q, pa.pauli);
      for (uint64_t i = 0; i < s.size(); ++i) out[i] += pe * tmp[i];
    }
    s = std::move(out);
  }

  double prob_one(const State& s, QubitId q) const {
    uint64_t bit = 1ULL << q;
    double p1 = 0;
    for (uint64_t k = 0; k < (1ULL << n_); ++k) {
      if (k & bit) p1 += std::real(s[k | (k << n_)]);
    }
    return p1;
  }

  void collapse(State& s, QubitId q, bool one, double pout) {
    uint64_t kb = 1ULL << q, bb = 1ULL << (q + n_);
    double scale = 1.0 / pout;
    for (uint64_t i = 0; i < s.size(); ++i) {
      bool keep = (((i & kb) != 0) == one) && (((i & bb) != 0) == one);
      s[i] = keep ? s[i] * scale : 0.0;
    }
  }

  void measure_branch(size_t ip, size_t sub, State state, double prob,
                      QubitId q, bool record, bool reset_after) {
    double p1 = std::min(1.0, std::max(0.0, prob_one(state, q)));
    for (int outcome = 0; outcome < 2; ++outcome) {
      double po = outcome ? p1 : 1.0 - p1;
      if (prob * po < prune_) continue;
      State next = state;
      collapse(next, q, outcome, po);
      if (reset_after && outcome) apply_pauli(next, q, 1);
      if (record) outcomes_.push_back(static_cast<uint8_t>(outcome));
      step(ip, sub, std::move(next), prob * po);
      if (record) outcomes_.pop_back();
    }
  }

  void step(size_t ip, size_t sub, State state, double prob) {
    while (ip < c_.instructions.size()) {
      const auto& ins = c_.instructions[ip];
      switch (ins.op) {
        case Op::H:
          for (QubitId q : ins.targets) apply_h(state, q);
          break;
        case Op::CX:
          for (size_t t = 0; t + 1 < ins.targets.size(); t += 2) {
            apply_cx(state, ins.targets[t], ins.targets[t + 1]);
          }
          break;
        case Op::PrepArb: {
          if (sub == 0) {
            measure_branch(ip, 1, std::move(state), prob, ins.targets[0],
                           false, true);
            return;
          }
          auto [a0, a1] = u3_state(ins.a, ins.b);
          std::complex<double> b0 = -std::sin(ins.a / 2);
          std::complex<double> b1 =
              std::exp(std::complex<double>(0, ins.b)) * std::cos(ins.a / 2);
          apply_1q(state, ins.targets[0], a0, b0, a1, b1);
          break;
        }
        case Op::ResetZ:
        case Op::ResetX: {
          if (sub < ins.targets.size()) {
            measure_branch(ip, sub + 1, std::move(state), prob,
                           ins.targets[sub], false, true);
            return;
          }
          if (ins.op == Op::ResetX) {
            for (QubitId q : ins.targets) apply_h(state, q);
          }
          break;
        }
        case Op::MeasureZ:
        case Op::MeasureX:
        case Op::MeasureY: {
          if (sub < ins.targets.size()) {
            QubitId q = ins.targets[sub];
            if (ins.op == Op::MeasureX) apply_h(state, q);
            if (ins.op == Op::MeasureY) {
              apply_1q(state, q, 1.0, 0.0, 0.0, std::complex<double>(0, -1));
              apply_h(state, q);
            }
            measure_branch(ip, sub + 1, std::move(state), prob, q, true,
                           false);
            return;
          }
          for (QubitId q : ins.targets) {
            if (ins.op == Op::MeasureX) apply_h(state, q);
            if (ins.op == Op::MeasureY) {
              apply_h(state, q);
              apply_1q(state, q, 1.0, 0.0, 0.0, std::complex<double>(0, 1));
            }
          }
          break;
        }
        case Op::Noise1Q:
          if (ins.a > 0) {
            for (QubitId q : ins.targets) {
              apply_channel(state, {{1.0 - ins.a, {}},
                                    {ins.a / 3, {{q, 1}}},
                                    {ins.a / 3, {{q, 3}}},
                                    {ins.a / 3, {{q, 2}}}});
            }
          }
          break;
        case Op::Noise2Q:
          if (ins.a > 0) {
            for (size_t t = 0; t + 1 < ins.targets.size(); t += 2) {
              QubitId qa = ins.targets[t], qb = ins.targets[t + 1];
              std::vector<std::pair<double, std::vector<PauliAt>>> elems;
              elems.push_back({1.0 - ins.a, {}});
              for (uint8_t a = 0; a < 4; ++a) {
                for (uint8_t b = 0; b < 4; ++b) {
                  if (a == 0 && b == 0) continue;
                  std::vector<PauliAt> ps;
                  if (a) ps.push_back({qa, a});
                  if (b) ps.push_back({qb, b});
                  elems.push_back({ins.a / 15, std::move(ps)});
                }
              }
              apply_channel(state, elems);
            }
          }
          break;
        case Op::FlipError:
          if (ins.a > 0) {
            uint8_t pauli = (ins.axis == 'Z') ? 2 : 1;
            for (QubitId q : ins.targets) {
              apply_channel(state,
                            {{1.0 - ins.a, {}}, {ins.a, {{q, pauli}}}});
            }
          }
          break;
        default:
          break;
      }
      ++ip;
      sub = 0;
    }
    finish(prob);
  }

  void finish(double prob) {
    uint64_t det = 0, obs = 0;
    for (size_t d = 0; d < c_.detector_defs.size(); ++d) {
      int par = c_.detector_defs[d].expected_parity & 1;
      for (uint32_t r : c_.detector_defs[d].records) par ^= outcomes_.at(r);
      if (par) det |= 1ULL << d;
    }
    for (size_t o = 0; o < c_.observable_defs.size(); ++o) {
      int par = 0;
      for (uint32_t r : c_.observable_defs[o].records) par ^= outcomes_.at(r);
      if (par) obs |= 1ULL << o;
    }
    dist_.p[OutcomeDist::key(det, obs)] += prob;
  }

  const Circuit& c_;
  double prune_;
  uint32_t n_ = 0;
  std::vector<uint8_t> outcomes_;
  OutcomeDist dist_;
};

}  // namespace

OutcomeDist dense_run(const Circuit& c, NoiseHandling noise,
                      const std::vector<ErrorMechanism>* forced,
                      double prune) {
  DenseRunner runner(c, noise, forced, prune);
  return runner.run();
}

OutcomeDist dense_run_rho(const Circuit& c, double prune) {
  DenseRhoRunner runner(c, prune);
  return runner.run();
}

}  // namespace hexrsc
