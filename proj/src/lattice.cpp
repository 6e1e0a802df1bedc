#include "hexrsc/lattice.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hexrsc {

namespace {

void require_odd(int d, int min_d) {
  if (d < min_d || d % 2 == 0) {
    throw InvalidDistance("code distance must be an odd integer >= " +
                          std::to_string(min_d) + ", got " +
                          std::to_string(d));
  }
}

}  // namespace

std::pair<long, long> qubit_counts(int d, CodeVariant variant) {
  require_odd(d, 1);
  long dl = d;
  if (variant == CodeVariant::Rotated) {
    long data = dl * dl + dl - 1;
    long total = (5 * dl * dl + 4 * dl - 7) / 2;
    return {data, total};
  }
  long data = 2 * dl * dl - 1;
  long total = 5 * dl * dl - 2 * (dl + 1);
  return {data, total};
}

bool LatticeLayout::has_edge(QubitId a, QubitId b) const {
  if (a > b) std::swap(a, b);
  for (const auto& e : edges) {
    if (e.first == a && e.second == b) return true;
  }
  return false;
}

std::optional<QubitId> LatticeLayout::qubit_at(Coord c) const {
  auto it = coord_index_.find(c);
  if (it == coord_index_.end()) return std::nullopt;
  return it->second;
}

size_t LatticeLayout::count_role(Role r) const {
  size_t n = 0;
  for (const auto& q : qubits) {
    if (q.role == r) ++n;
  }
  return n;
}

int LatticeLayout::degree(QubitId q) const {
  int deg = 0;
  for (const auto& e : edges) {
    if (e.first == q || e.second == q) ++deg;
  }
  return deg;
}

std::vector<FoldLink> LatticeLayout::fold_links(char subgroup) const {
  std::vector<FoldLink> links;
  std::set<QubitId> seen;
  for (const auto& s : stabilizers) {
    if (s.subgroup != subgroup) continue;
    for (const auto& f : s.folds) {
      if (seen.insert(f.bridge).second) links.push_back(f);
    }
  }
  std::sort(links.begin(), links.end(),
            [](const FoldLink& a, const FoldLink& b) {
              return a.bridge < b.bridge;
            });
  return links;
}

LatticeLayout build_layout(int d) {
  require_odd(d, 3);

  LatticeLayout lay;
  lay.d = d;

  // Coordinate scheme (doubled integer grid, y grows downward):
  //   data qubit (row r, col c)            -> (2c, 2r)
  //   extra top data qubit k               -> (2k, -2)
  //   in-row syndrome between cols c, c+1  -> (2c+1, 2r)
  //   bridge on vertical link (band b, c)  -> (2c, 2b+1)
  //   weight-one ancilla for top qubit k   -> (2k-1, -2)
  std::vector<std::pair<Coord, Role>> sites;

  auto data_coord = [](int r, int c) { return Coord{2 * c, 2 * r}; };
  auto synd_coord = [](int r, int gap) { return Coord{2 * gap + 1, 2 * r}; };
  auto bridge_coord = [](int band, int c) { return Coord{2 * c, 2 * band + 1}; };

  for (int k = 1; k <= d - 1; ++k) {
    sites.push_back({data_coord(-1, k), Role::Data});
    sites.push_back({Coord{2 * k - 1, -2}, Role::Syndrome});  // weight-one ancilla
    sites.push_back({bridge_coord(-1, k), Role::Bridge});
  }
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      sites.push_back({data_coord(r, c), Role::Data});
    }
  }
  for (int r = 0; r < d - 1; ++r) {
    for (int c = 0; c < d - 1; ++c) {
      if ((r + c) % 2 == 1) sites.push_back({synd_coord(r, c), Role::Syndrome});
    }
  }
  for (int c = 0; c < d - 1; ++c) {
    sites.push_back({synd_coord(d - 1, c), Role::Syndrome});
  }
  for (int b = 0; b < d - 1; ++b) {
    for (int c = 0; c < d; ++c) {
      sites.push_back({bridge_coord(b, c), Role::Bridge});
    }
  }

  std::sort(sites.begin(), sites.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  for (const auto& [coord, role] : sites) {
    QubitId id = static_cast<QubitId>(lay.qubits.size());
    lay.qubits.push_back({id, coord, role});
    lay.coord_index_[coord] = id;
  }

  auto at = [&](Coord c) -> QubitId {
    auto q = lay.qubit_at(c);
    if (!q) throw std::logic_error("layout: no qubit at requested coordinate");
    return *q;
  };
  auto data = [&](int r, int c) { return at(data_coord(r, c)); };
  auto synd = [&](int r, int gap) { return at(synd_coord(r, gap)); };
  auto bridge = [&](int band, int c) { return at(bridge_coord(band, c)); };
  auto wanc = [&](int k) { return at(Coord{2 * k - 1, -2}); };

  auto add_edge = [&](QubitId a, QubitId b) {
    if (a > b) std::swap(a, b);
    lay.edges.push_back({a, b});
  };

  // In-row data-syndrome couplings.
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d - 1; ++c) {
      bool present = (r == d - 1) || ((r + c) % 2 == 1);
      if (!present) continue;
      add_edge(data(r, c), synd(r, c));
      add_edge(data(r, c + 1), synd(r, c));
    }
  }
  // Vertical links through bridges.
  for (int b = 0; b < d - 1; ++b) {
    for (int c = 0; c < d; ++c) {
      add_edge(data(b, c), bridge(b, c));
      add_edge(bridge(b, c), data(b + 1, c));
    }
  }
  for (int k = 1; k <= d - 1; ++k) {
    add_edge(data(-1, k), bridge(-1, k));
    add_edge(bridge(-1, k), data(0, k));
    add_edge(wanc(k), data(-1, k));
  }
  std::sort(lay.edges.begin(), lay.edges.end());

  auto link = [&](int band, int c) {
    return FoldLink{data(band, c), bridge(band, c), data(band + 1, c)};
  };
  auto band_subgroup = [](int band) {
    return (((band % 2) + 2) % 2 == 1) ? 'A' : 'B';
  };

  // Bulk weight-four plaquettes. In band b (between data rows b and b+1)
  // the plaquette over columns (c, c+1) is Z-type when b+c is even. Z
  // plaquettes fold onto their bottom pair, X plaquettes onto their top
  // pair; both use the same downward ladders over the band's links.
  for (int b = 0; b < d - 1; ++b) {
    for (int c = 0; c < d - 1; ++c) {
      Stabilizer s;
      s.pauli = ((b + c) % 2 == 0) ? 'Z' : 'X';
      s.support = {data(b, c), data(b, c + 1), data(b + 1, c),
                   data(b + 1, c + 1)};
      s.subgroup = band_subgroup(b);
      s.weight_class = WeightClass::Four;
      s.boundary = BoundaryKind::Bulk;
      s.folds = {link(b, c), link(b, c + 1)};
      if (s.pauli == 'Z') {
        s.ancilla = synd(b + 1, c);
        s.couple = {data(b + 1, c), data(b + 1, c + 1)};
      } else {
        s.ancilla = synd(b, c);
        s.couple = {data(b, c), data(b, c + 1)};
      }
      lay.stabilizers.push_back(std::move(s));
    }
  }

  // Top boundary: weight-four Z plaquettes over the extra row, plus
  // weight-one Z checks on the extra qubits measured in the other
  // sub-round.
  for (int c = 1; c < d - 1; c += 2) {
    Stabilizer s;
    s.pauli = 'Z';
    s.support = {data(-1, c), data(-1, c + 1), data(0, c), data(0, c + 1)};
    s.subgroup = band_subgroup(-1);  // 'A'
    s.weight_class = WeightClass::Four;
    s.boundary = BoundaryKind::Top;
    s.folds = {FoldLink{data(-1, c), bridge(-1, c), data(0, c)},
               FoldLink{data(-1, c + 1), bridge(-1, c + 1), data(0, c + 1)}};
    s.ancilla = synd(0, c);
    s.couple = {data(0, c), data(0, c + 1)};
    lay.stabilizers.push_back(std::move(s));
  }
  for (int k = 1; k <= d - 1; ++k) {
    Stabilizer s;
    s.pauli = 'Z';
    s.support = {data(-1, k)};
    s.subgroup = 'B';
    s.weight_class = WeightClass::One;
    s.boundary = BoundaryKind::Top;
    s.ancilla = wanc(k);
    s.couple = {data(-1, k)};
    lay.stabilizers.push_back(std::move(s));
  }

  // Bottom boundary: weight-two Z pairs measured directly.
  for (int c = 0; c < d - 1; ++c) {
    if ((d - 1 + c) % 2 != 0) continue;
    Stabilizer s;
    s.pauli = 'Z';
    s.support = {data(d - 1, c), data(d - 1, c + 1)};
    s.subgroup = band_subgroup(d - 1);
    s.weight_class = WeightClass::Two;
    s.boundary = BoundaryKind::Bottom;
    s.ancilla = synd(d - 1, c);
    s.couple = {data(d - 1, c), data(d - 1, c + 1)};
    lay.stabilizers.push_back(std::move(s));
  }

  // Side boundaries: weight-two X pairs on vertical links, measured in
  // the same sub-round as their band. The link qubit acts as the
  // ancilla; the band's ladder folds the pair to weight one on the top
  // qubit, which is the only coupling needed.
  for (int b = 0; b < d - 1; ++b) {
    bool left = (b % 2 == 0);
    bool right = (b % 2 == 1);
    if (left) {
      Stabilizer s;
      s.pauli = 'X';
      s.support = {data(b, 0), data(b + 1, 0)};
      s.subgroup = band_subgroup(b);
      s.weight_class = WeightClass::Two;
      s.boundary = BoundaryKind::Side;
      s.ancilla = bridge(b, 0);
      s.folds = {link(b, 0)};
      s.couple = {data(b, 0)};
      lay.stabilizers.push_back(std::move(s));
    }
    if (right) {
      Stabilizer s;
      s.pauli = 'X';
      s.support = {data(b, d - 1), data(b + 1, d - 1)};
      s.subgroup = band_subgroup(b);
      s.weight_class = WeightClass::Two;
      s.boundary = BoundaryKind::Side;
      s.ancilla = bridge(b, d - 1);
      s.folds = {link(b, d - 1)};
      s.couple = {data(b, d - 1)};
      lay.stabilizers.push_back(std::move(s));
    }
  }

  int mid = (d - 1) / 2;
  lay.center = data(mid, mid);
  lay.logical_z.pauli = 'Z';
  for (int r = 0; r < d; ++r) lay.logical_z.support.push_back(data(r, mid));
  lay.logical_x.pauli = 'X';
  for (int c = 0; c < d; ++c) lay.logical_x.support.push_back(data(mid, c));

  return lay;
}

InjectionLayout injection_layout(const LatticeLayout& layout) {
  if (layout.d != 3) {
    throw InvalidDistance(
        "injection layout is defined for distance 3 only, got d=" +
        std::to_string(layout.d));
  }
  InjectionLayout inj;
  inj.center = layout.center;
  std::set<QubitId> x_init;
  for (QubitId q : layout.logical_x.support) {
    if (q != layout.center) x_init.insert(q);
  }
  // Boundary stabilizers must start in a +1 eigenstate, so their whole
  // support is prepared in their own basis.
  for (const auto& s : layout.stabilizers) {
    if (s.boundary == BoundaryKind::Bulk || s.pauli != 'X') continue;
    for (QubitId q : s.support) x_init.insert(q);
  }
  for (const auto& q : layout.qubits) {
    if (q.role != Role::Data || q.id == layout.center) continue;
    inj.init_basis[q.id] = x_init.count(q.id) ? 'X' : 'Z';
  }
  return inj;
}

std::string LatticeLayout::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  auto role_name = [](Role r) {
    switch (r) {
      case Role::Data: return "data";
      case Role::Syndrome: return "syndrome";
      default: return "bridge";
    }
  };
  auto wc_name = [](WeightClass w) {
    switch (w) {
      case WeightClass::Four: return "four";
      case WeightClass::Two: return "two";
      default: return "one";
    }
  };
  j["qubits"] = nlohmann::json::array();
  for (const auto& q : qubits) {
    j["qubits"].push_back({{"id", q.id},
                           {"role", role_name(q.role)},
                           {"x", q.coord.x},
                           {"y", q.coord.y}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges) j["edges"].push_back({e.first, e.second});
  j["stabilizers"] = nlohmann::json::array();
  for (const auto& s : stabilizers) {
    j["stabilizers"].push_back({{"type", std::string(1, s.pauli)},
                                {"support", s.support},
                                {"subgroup", std::string(1, s.subgroup)},
                                {"weight_class", wc_name(s.weight_class)}});
  }
  j["logical"] = {{"x", logical_x.support}, {"z", logical_z.support}};
  return j.dump(2);
}

std::string render_svg(const LatticeLayout& layout,
                       const InjectionLayout* injection) {
  const int scale = 28, margin = 40;
  int min_x = 1 << 30, min_y = 1 << 30, max_x = -(1 << 30), max_y = -(1 << 30);
  for (const auto& q : layout.qubits) {
    min_x = std::min(min_x, q.coord.x);
    min_y = std::min(min_y, q.coord.y);
    max_x = std::max(max_x, q.coord.x);
    max_y = std::max(max_y, q.coord.y);
  }
  auto px = [&](int x) { return margin + scale * (x - min_x); };
  auto py = [&](int y) { return margin + scale * (y - min_y); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << px(max_x) + margin << "\" height=\"" << py(max_y) + margin << "\">\n";
  for (const auto& e : layout.edges) {
    const auto& a = layout.qubits[e.first].coord;
    const auto& b = layout.qubits[e.second].coord;
    out << "  <line x1=\"" << px(a.x) << "\" y1=\"" << py(a.y) << "\" x2=\""
        << px(b.x) << "\" y2=\"" << py(b.y)
        << "\" stroke=\"#999\" stroke-width=\"2\"/>\n";
  }
  for (const auto& q : layout.qubits) {
    std::string fill;
    int r = 9;
    switch (q.role) {
      case Role::Data: fill = "#444444"; break;
      case Role::Syndrome: fill = "#b5651d"; r = 7; break;
      case Role::Bridge: fill = "#dddddd"; r = 6; break;
    }
    std::string stroke = "#222";
    if (injection != nullptr && q.role == Role::Data) {
      if (q.id == injection->center) {
        fill = "#2e8b57";  // center / injected state
        stroke = "#0a3";
      } else {
        auto it = injection->init_basis.find(q.id);
        if (it != injection->init_basis.end()) {
          fill = (it->second == 'Z') ? "#3465a4" : "#cc0000";
        }
      }
    }
    out << "  <circle cx=\"" << px(q.coord.x) << "\" cy=\"" << py(q.coord.y)
        << "\" r=\"" << r << "\" fill=\"" << fill << "\" stroke=\"" << stroke
        << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hexrsc
