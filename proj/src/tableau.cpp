#include "hexrsc/tableau.hpp"

#include <cassert>
#include <cmath>

#include "hexrsc/rng.hpp"

namespace hexrsc {

namespace {
constexpr double kAngleTol = 1e-9;

bool near(double a, double b) { return std::fabs(a - b) < kAngleTol; }

double wrap_2pi(double a) {
  double t = std::fmod(a, 2 * M_PI);
  if (t < 0) t += 2 * M_PI;
  return t;
}
}  // namespace

SymbolicTableau::SymbolicTableau(size_t n)
    : n_(n), words_((n + 63) / 64), rows_(2 * n) {
  for (size_t i = 0; i < 2 * n_; ++i) {
    rows_[i].x.assign(words_, 0);
    rows_[i].z.assign(words_, 0);
  }
  for (size_t q = 0; q < n_; ++q) {
    rows_[q].x[q >> 6] |= 1ULL << (q & 63);         // destabilizer X_q
    rows_[n_ + q].z[q >> 6] |= 1ULL << (q & 63);    // stabilizer Z_q
  }
}

void SymbolicTableau::h(size_t q) {
  for (auto& r : rows_) {
    bool xv = row_x(r, q), zv = row_z(r, q);
    r.sign ^= xv && zv;
    if (xv != zv) {
      r.x[q >> 6] ^= 1ULL << (q & 63);
      r.z[q >> 6] ^= 1ULL << (q & 63);
    }
  }
}

void SymbolicTableau::s(size_t q) {
  for (auto& r : rows_) {
    bool xv = row_x(r, q), zv = row_z(r, q);
    r.sign ^= xv && zv;
    if (xv) r.z[q >> 6] ^= 1ULL << (q & 63);
  }
}

void SymbolicTableau::sdg(size_t q) {
  s(q);
  s(q);
  s(q);
}

void SymbolicTableau::x(size_t q) {
  for (auto& r : rows_) r.sign ^= row_z(r, q);
}

void SymbolicTableau::z(size_t q) {
  for (auto& r : rows_) r.sign ^= row_x(r, q);
}

void SymbolicTableau::cx(size_t c, size_t t) {
  for (auto& r : rows_) {
    bool xc = row_x(r, c), zc = row_z(r, c);
    bool xt = row_x(r, t), zt = row_z(r, t);
    r.sign ^= xc && zt && (xt == zc);
    if (xc) r.x[t >> 6] ^= 1ULL << (t & 63);
    if (zt) r.z[c >> 6] ^= 1ULL << (c & 63);
  }
}

void SymbolicTableau::rowmult(Row& h, const Row& i) const {
  // Phase exponent of the product i*h, tracked mod 4; valid products of
  // stabilizer rows always land on 0 or 2.
  int phase = (h.sign ? 2 : 0) + (i.sign ? 2 : 0);
  for (size_t q = 0; q < n_; ++q) {
    int x1 = row_x(i, q), z1 = row_z(i, q);
    int x2 = row_x(h, q), z2 = row_z(h, q);
    if (x1 && z1) {
      phase += z2 - x2;
    } else if (x1) {
      phase += z2 * (2 * x2 - 1);
    } else if (z1) {
      phase += x2 * (1 - 2 * z2);
    }
  }
  phase = ((phase % 4) + 4) % 4;
  assert(phase % 2 == 0);
  h.sign = phase == 2;
  if (h.vars.size() < i.vars.size()) h.vars.resize(i.vars.size(), 0);
  for (size_t w = 0; w < i.vars.size(); ++w) h.vars[w] ^= i.vars[w];
  for (size_t w = 0; w < words_; ++w) {
    h.x[w] ^= i.x[w];
    h.z[w] ^= i.z[w];
  }
}

OutcomeForm SymbolicTableau::fresh_var() {
  OutcomeForm f;
  size_t k = num_vars_++;
  f.vars.assign(k / 64 + 1, 0);
  f.vars[k / 64] = 1ULL << (k % 64);
  return f;
}

OutcomeForm SymbolicTableau::measure_z(size_t q) {
  size_t p = 2 * n_;
  for (size_t i = n_; i < 2 * n_; ++i) {
    if (row_x(rows_[i], q)) {
      p = i;
      break;
    }
  }
  if (p < 2 * n_) {
    // Random outcome: introduce a fresh +/- variable.
    for (size_t i = 0; i < 2 * n_; ++i) {
      if (i != p && row_x(rows_[i], q)) rowmult(rows_[i], rows_[p]);
    }
    rows_[p - n_] = rows_[p];
    OutcomeForm out = fresh_var();
    Row& r = rows_[p];
    r.x.assign(words_, 0);
    r.z.assign(words_, 0);
    r.z[q >> 6] |= 1ULL << (q & 63);
    r.sign = out.constant;
    r.vars = out.vars;
    return out;
  }
  // Deterministic: accumulate the stabilizer combination indicated by
  // the destabilizers that anticommute with Z_q.
  Row scratch;
  scratch.x.assign(words_, 0);
  scratch.z.assign(words_, 0);
  for (size_t i = 0; i < n_; ++i) {
    if (row_x(rows_[i], q)) rowmult(scratch, rows_[i + n_]);
  }
  OutcomeForm out;
  out.constant = scratch.sign;
  out.vars = scratch.vars;
  return out;
}

OutcomeForm SymbolicTableau::measure_x(size_t q) {
  h(q);
  OutcomeForm out = measure_z(q);
  h(q);
  return out;
}

OutcomeForm SymbolicTableau::measure_y(size_t q) {
  sdg(q);
  h(q);
  OutcomeForm out = measure_z(q);
  h(q);
  s(q);
  return out;
}

void SymbolicTableau::reset_z(size_t q) {
  OutcomeForm out = measure_z(q);
  // Apply X conditioned on the (symbolic) outcome.
  for (auto& r : rows_) {
    if (!row_z(r, q)) continue;
    r.sign ^= out.constant;
    if (r.vars.size() < out.vars.size()) r.vars.resize(out.vars.size(), 0);
    for (size_t w = 0; w < out.vars.size(); ++w) r.vars[w] ^= out.vars[w];
  }
}

void SymbolicTableau::reset_x(size_t q) {
  h(q);
  reset_z(q);
  h(q);
}

void SymbolicTableau::prep_arb(size_t q, double theta, double phi) {
  reset_z(q);
  double c = std::cos(theta / 2), sn = std::sin(theta / 2);
  if (near(std::fabs(sn), 0.0)) return;  // |0>
  if (near(c, 0.0)) {
    x(q);  // |1> up to global phase
    return;
  }
  if (!near(std::fabs(c), std::fabs(sn))) {
    throw UnsupportedCircuit(
        "PREP_ARB angle is not a stabilizer state; tableau cannot simulate");
  }
  double rel = phi + (c * sn < 0 ? M_PI : 0.0);
  rel = wrap_2pi(rel);
  if (near(rel, 0.0) || near(rel, 2 * M_PI)) {
    h(q);  // |+>
  } else if (near(rel, M_PI / 2)) {
    h(q);
    s(q);  // |+i>
  } else if (near(rel, M_PI)) {
    x(q);
    h(q);  // |->
  } else if (near(rel, 3 * M_PI / 2)) {
    h(q);
    sdg(q);  // |-i>
  } else {
    throw UnsupportedCircuit(
        "PREP_ARB phase is not a stabilizer state; tableau cannot simulate");
  }
}

TableauResult tableau_run(const Circuit& c, uint64_t seed) {
  SymbolicTableau tab(c.num_qubits);
  std::vector<OutcomeForm> forms;
  forms.reserve(c.measurement_count);

  for (const auto& ins : c.instructions) {
    switch (ins.op) {
      case Op::ResetZ:
        for (QubitId q : ins.targets) tab.reset_z(q);
        break;
      case Op::ResetX:
        for (QubitId q : ins.targets) tab.reset_x(q);
        break;
      case Op::H:
        for (QubitId q : ins.targets) tab.h(q);
        break;
      case Op::CX:
        for (size_t i = 0; i + 1 < ins.targets.size(); i += 2) {
          tab.cx(ins.targets[i], ins.targets[i + 1]);
        }
        break;
      case Op::MeasureZ:
        for (QubitId q : ins.targets) forms.push_back(tab.measure_z(q));
        break;
      case Op::MeasureX:
        for (QubitId q : ins.targets) forms.push_back(tab.measure_x(q));
        break;
      case Op::MeasureY:
        for (QubitId q : ins.targets) forms.push_back(tab.measure_y(q));
        break;
      case Op::PrepArb:
        tab.prep_arb(ins.targets[0], ins.a, ins.b);
        break;
      default:
        break;  // ticks, noise annotations, detector/observable defs
    }
  }

  CounterRng rng(seed);
  auto sample = [&](const OutcomeForm& f) {
    bool v = f.constant;
    for (size_t w = 0; w < f.vars.size(); ++w) {
      uint64_t bits = f.vars[w];
      while (bits) {
        size_t k = w * 64 + static_cast<size_t>(__builtin_ctzll(bits));
        bits &= bits - 1;
        v ^= rng.word(0xb1f5, k) & 1;
      }
    }
    return v;
  };

  TableauResult res;
  res.record_forms = forms;
  for (const auto& f : forms) {
    res.records.push_back({f.deterministic(), sample(f)});
  }
  for (const auto& d : c.detector_defs) {
    OutcomeForm acc;
    for (uint32_t r : d.records) acc.merge(forms.at(r));
    acc.constant ^= (d.expected_parity != 0);
    res.detectors.push_back({acc.deterministic(), sample(acc)});
  }
  for (const auto& o : c.observable_defs) {
    OutcomeForm acc;
    for (uint32_t r : o.records) acc.merge(forms.at(r));
    res.observables.push_back({acc.deterministic(), sample(acc)});
  }
  return res;
}

PauliString conjugate_forward(const Circuit& c, PauliString p) {
  for (const auto& ins : c.instructions) {
    switch (ins.op) {
      case Op::H:
        for (QubitId q : ins.targets) {
          bool xv = p.x(q), zv = p.z(q);
          if (xv && zv) p.set_phase_exponent(p.phase_exponent() + 2);
          p.set_x(q, zv);
          p.set_z(q, xv);
        }
        break;
      case Op::CX:
        for (size_t i = 0; i + 1 < ins.targets.size(); i += 2) {
          QubitId ctrl = ins.targets[i], tgt = ins.targets[i + 1];
          bool xc = p.x(ctrl), zc = p.z(ctrl);
          bool xt = p.x(tgt), zt = p.z(tgt);
          if (xc && zt && (xt == zc)) {
            p.set_phase_exponent(p.phase_exponent() + 2);
          }
          p.set_x(tgt, xt ^ xc);
          p.set_z(ctrl, zc ^ zt);
        }
        break;
      case Op::Tick:
        break;
      default:
        throw UnsupportedCircuit(
            "conjugate_forward handles unitary H/CX circuits only");
    }
  }
  return p;
}

}  // namespace hexrsc
