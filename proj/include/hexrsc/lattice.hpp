#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hexrsc {

using QubitId = uint32_t;

enum class Role { Data, Syndrome, Bridge };

enum class WeightClass { Four, Two, One };

enum class BoundaryKind { Bulk, Side, Top, Bottom };

struct InvalidDistance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Coord {
  int x = 0;
  int y = 0;
  bool operator<(const Coord& o) const {
    return y != o.y ? y < o.y : x < o.x;
  }
  bool operator==(const Coord& o) const { return x == o.x && y == o.y; }
};

struct Qubit {
  QubitId id = 0;
  Coord coord;
  Role role = Role::Data;
};

// One vertical data-data link of the lattice together with its bridge
// qubit. Fold ladders run top -> bottom through the bridge.
struct FoldLink {
  QubitId top;
  QubitId bridge;
  QubitId bottom;
};

struct Stabilizer {
  char pauli = 'Z';  // 'X' or 'Z'
  std::vector<QubitId> support;  // data qubits, fixed order
  char subgroup = 'A';  // sub-round membership
  WeightClass weight_class = WeightClass::Four;
  BoundaryKind boundary = BoundaryKind::Bulk;
  // Measurement plumbing: ancilla that records the folded outcome and the
  // vertical links whose ladders this stabilizer relies on.
  QubitId ancilla = 0;
  std::vector<FoldLink> folds;
  // Data qubits coupled directly to the ancilla, in coupling-layer order.
  std::vector<QubitId> couple;
};

struct LogicalOperator {
  char pauli = 'X';
  std::vector<QubitId> support;
};

class LatticeLayout {
 public:
  int d = 0;
  std::vector<Qubit> qubits;
  std::vector<std::pair<QubitId, QubitId>> edges;  // unordered pairs, a < b
  std::vector<Stabilizer> stabilizers;
  LogicalOperator logical_x, logical_z;
  QubitId center = 0;  // central data qubit

  size_t num_qubits() const { return qubits.size(); }

  bool has_edge(QubitId a, QubitId b) const;
  std::optional<QubitId> qubit_at(Coord c) const;
  size_t count_role(Role r) const;
  int degree(QubitId q) const;

  // All vertical links of one sub-round's bands, deduplicated.
  std::vector<FoldLink> fold_links(char subgroup) const;

  std::string to_json() const;

 private:
  friend LatticeLayout build_layout(int d);
  std::map<Coord, QubitId> coord_index_;
};

struct InjectionLayout {
  QubitId center;
  // Data qubit -> 'Z' (|0>) or 'X' (|+>); the center is excluded.
  std::map<QubitId, char> init_basis;
};

enum class CodeVariant { Rotated, Unrotated };

// Physical qubit requirements as a function of code distance.
std::pair<long, long> qubit_counts(int d, CodeVariant variant);

LatticeLayout build_layout(int d);

InjectionLayout injection_layout(const LatticeLayout& layout);

std::string render_svg(const LatticeLayout& layout,
                       const InjectionLayout* injection = nullptr);

}  // namespace hexrsc
