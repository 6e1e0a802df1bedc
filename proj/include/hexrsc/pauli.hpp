#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace hexrsc {

// Pauli string over n qubits as X/Z bit masks plus a phase exponent
// (power of i, mod 4). Y = i * X * Z, so a qubit with both bits set
// contributes a factor stored in the phase bookkeeping of mul().
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(size_t n)
      : n_(n), x_((n + 63) / 64, 0), z_((n + 63) / 64, 0) {}

  size_t num_qubits() const { return n_; }

  bool x(size_t q) const { return (x_[q >> 6] >> (q & 63)) & 1; }
  bool z(size_t q) const { return (z_[q >> 6] >> (q & 63)) & 1; }
  void set_x(size_t q, bool v) { assign_bit(x_, q, v); }
  void set_z(size_t q, bool v) { assign_bit(z_, q, v); }

  // 0=I, 1=X, 2=Z, 3=Y
  int pauli_at(size_t q) const { return (x(q) ? 1 : 0) | (z(q) ? 2 : 0); }
  void set_pauli(size_t q, int p) {
    set_x(q, p & 1);
    set_z(q, (p >> 1) & 1);
  }

  int phase_exponent() const { return phase_; }
  void set_phase_exponent(int e) { phase_ = ((e % 4) + 4) % 4; }

  size_t weight() const {
    size_t w = 0;
    for (size_t i = 0; i < x_.size(); ++i) {
      w += static_cast<size_t>(__builtin_popcountll(x_[i] | z_[i]));
    }
    return w;
  }

  bool commutes_with(const PauliString& o) const {
    assert(n_ == o.n_);
    uint64_t acc = 0;
    for (size_t i = 0; i < x_.size(); ++i) {
      acc ^= (x_[i] & o.z_[i]) ^ (z_[i] & o.x_[i]);
    }
    return (__builtin_popcountll(acc) & 1) == 0;
  }

  // In-place multiply by other, tracking the i-power phase.
  void mul(const PauliString& o) {
    assert(n_ == o.n_);
    int ph = phase_ + o.phase_;
    for (size_t q = 0; q < n_; ++q) {
      ph += mul_phase(pauli_at(q), o.pauli_at(q));
    }
    for (size_t i = 0; i < x_.size(); ++i) {
      x_[i] ^= o.x_[i];
      z_[i] ^= o.z_[i];
    }
    phase_ = ((ph % 4) + 4) % 4;
  }

  bool is_identity() const {
    for (size_t i = 0; i < x_.size(); ++i) {
      if (x_[i] | z_[i]) return false;
    }
    return true;
  }

  std::string str() const {
    static const char* names = "IXZY";
    std::string s;
    switch (phase_) {
      case 0: break;
      case 1: s += "i*"; break;
      case 2: s += "-"; break;
      case 3: s += "-i*"; break;
    }
    for (size_t q = 0; q < n_; ++q) s += names[pauli_at(q)];
    return s;
  }

  bool operator==(const PauliString& o) const {
    return n_ == o.n_ && phase_ == o.phase_ && x_ == o.x_ && z_ == o.z_;
  }

 private:
  static void assign_bit(std::vector<uint64_t>& v, size_t q, bool b) {
    if (b)
      v[q >> 6] |= (1ULL << (q & 63));
    else
      v[q >> 6] &= ~(1ULL << (q & 63));
  }

  // i-power picked up by single-qubit product a*b (a,b in 0=I,1=X,2=Z,3=Y).
  static int mul_phase(int a, int b) {
    // X*Z = -iY, Z*X = iY, X*Y = iZ, Y*X = -iZ, Z*Y = -iX, Y*Z = iX
    static const int table[4][4] = {
        {0, 0, 0, 0},
        {0, 0, 3, 1},
        {0, 1, 0, 3},
        {0, 3, 1, 0},
    };
    return table[a][b];
  }

  size_t n_ = 0;
  std::vector<uint64_t> x_, z_;
  int phase_ = 0;
};

}  // namespace hexrsc
