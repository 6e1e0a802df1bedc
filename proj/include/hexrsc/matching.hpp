#pragma once

#include <cstdint>
#include <vector>

#include "hexrsc/dem.hpp"

namespace hexrsc {

// Weighted matching graph over detectors plus a virtual boundary node.
// Edge weights are ln((1-p)/p) in fixed-point so that the matching and
// its oracle compare costs exactly.
class MatchingGraph {
 public:
  static constexpr int64_t kScale = 1 << 20;
  static constexpr int32_t kBoundary = -1;

  struct Edge {
    int32_t u = 0;
    int32_t v = kBoundary;
    int64_t weight = 0;
    uint32_t obs = 0;
  };

  uint32_t num_detectors = 0;
  std::vector<Edge> edges;

  // Shortest-path tables (built on construction): pairwise defect
  // distances and per-node boundary distances, with the observable
  // parity picked up along each shortest path.
  int64_t dist(uint32_t a, uint32_t b) const { return dist_[a * n_ + b]; }
  uint32_t path_obs(uint32_t a, uint32_t b) const {
    return pobs_[a * n_ + b];
  }
  int64_t boundary_dist(uint32_t a) const { return bdist_[a]; }
  uint32_t boundary_obs(uint32_t a) const { return bobs_[a]; }

  void build_tables();

 private:
  uint32_t n_ = 0;
  std::vector<int64_t> dist_, bdist_;
  std::vector<uint32_t> pobs_, bobs_;
};

MatchingGraph build_matching_graph(const Dem& dem);

struct Correction {
  uint32_t obs_flip = 0;
  int64_t weight = 0;
  // Matched defect pairs; second = -1 marks a boundary match.
  std::vector<std::pair<int32_t, int32_t>> pairs;
};

// Exact minimum-weight perfect matching of the fired detectors
// (blossom algorithm over the defect graph, boundary allowed).
Correction decode_mwpm(const MatchingGraph& graph,
                       const std::vector<uint32_t>& defects);

// Independent oracle: optimal pairing by dynamic programming over defect
// subsets. Limited to 16 defects.
Correction decode_exhaustive(const MatchingGraph& graph,
                             const std::vector<uint32_t>& defects);

// Maximum-likelihood oracle for tiny models: sums probabilities of every
// mechanism subset consistent with the syndrome. Limited to 20
// mechanisms. Ties break to no flip.
uint32_t ml_decode_bruteforce(const Dem& dem,
                              const std::vector<uint32_t>& syndrome);

// Minimum number of decoding-graph mechanisms whose combined signature
// fires no detector yet flips observable 0.
int min_distance(const Dem& dem);

// Exact general-graph maximum-weight matching (blossom). Exposed for
// tests; decode_mwpm builds on it.
std::vector<int> max_weight_matching(
    int n, const std::vector<std::array<int64_t, 3>>& edges,
    bool max_cardinality);

}  // namespace hexrsc
