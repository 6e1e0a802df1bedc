#include "hexrsc/matching.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

namespace hexrsc {

namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

// Maximum-weight general matching, primal-dual blossom algorithm with
// integer arithmetic (weights are doubled internally so dual updates stay
// integral). Follows the classic O(n^3) structure: grow alternating
// trees from free vertices, shrink odd cycles into blossoms, augment on
// tight edges, adjust duals by the minimum slack.
class WeightedBlossom {
 public:
  WeightedBlossom() = default;

  // Reusable initialization: vectors keep their capacity across calls so
  // repeated decodes stay allocation-free.
  void init(int n, const std::vector<std::array<int64_t, 3>>& in,
            bool max_cardinality) {
    nvertex = n;
    maxcardinality = max_cardinality;
    edges.clear();
    for (const auto& e : in) {
      edges.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]),
                       2 * e[2]});  // doubled weights keep duals integral
    }
    nedge = static_cast<int>(edges.size());
    int64_t maxweight = 0;
    for (const auto& e : edges) maxweight = std::max(maxweight, e.w);

    endpoint.resize(2 * nedge);
    for (int p = 0; p < 2 * nedge; ++p) {
      endpoint[p] = (p % 2 == 0) ? edges[p / 2].i : edges[p / 2].j;
    }
    resize_clear(neighbend, nvertex);
    for (int k = 0; k < nedge; ++k) {
      neighbend[edges[k].i].push_back(2 * k + 1);
      neighbend[edges[k].j].push_back(2 * k);
    }
    mate.assign(nvertex, -1);
    label.assign(2 * nvertex, 0);
    labelend.assign(2 * nvertex, -1);
    inblossom.resize(nvertex);
    for (int v = 0; v < nvertex; ++v) inblossom[v] = v;
    blossomparent.assign(2 * nvertex, -1);
    resize_clear(blossomchilds, 2 * nvertex);
    blossombase.resize(2 * nvertex);
    for (int v = 0; v < nvertex; ++v) blossombase[v] = v;
    for (int b = nvertex; b < 2 * nvertex; ++b) blossombase[b] = -1;
    resize_clear(blossomendps, 2 * nvertex);
    bestedge.assign(2 * nvertex, -1);
    resize_clear(blossombestedges, 2 * nvertex);
    unusedblossoms.clear();
    for (int b = nvertex; b < 2 * nvertex; ++b) unusedblossoms.push_back(b);
    dualvar.assign(2 * nvertex, 0);
    for (int v = 0; v < nvertex; ++v) dualvar[v] = maxweight;
    allowedge.assign(nedge, false);
  }

  std::vector<int> solve() {
    for (int t = 0; t < nvertex; ++t) {
      std::fill(label.begin(), label.end(), 0);
      std::fill(bestedge.begin(), bestedge.end(), -1);
      for (int b = nvertex; b < 2 * nvertex; ++b) blossombestedges[b].clear();
      std::fill(allowedge.begin(), allowedge.end(), false);
      queue.clear();

      for (int v = 0; v < nvertex; ++v) {
        if (mate[v] == -1 && label[inblossom[v]] == 0) assign_label(v, 1, -1);
      }
      bool augmented = false;
      while (true) {
        while (!queue.empty() && !augmented) {
          int v = queue.back();
          queue.pop_back();
          for (int p : neighbend[v]) {
            int k = p / 2;
            int w = endpoint[p];
            if (inblossom[v] == inblossom[w]) continue;
            int64_t kslack = 0;
            if (!allowedge[k]) {
              kslack = slack(k);
              if (kslack <= 0) allowedge[k] = true;
            }
            if (allowedge[k]) {
              if (label[inblossom[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label[inblossom[w]] == 1) {
                int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label[w] == 0) {
                label[w] = 2;
                labelend[w] = p ^ 1;
              }
            } else if (label[inblossom[w]] == 1) {
              int b = inblossom[v];
              if (bestedge[b] == -1 || kslack < slack(bestedge[b])) {
                bestedge[b] = k;
              }
            } else if (label[w] == 0) {
              if (bestedge[w] == -1 || kslack < slack(bestedge[w])) {
                bestedge[w] = k;
              }
            }
          }
        }
        if (augmented) break;

        int deltatype = -1;
        int64_t delta = 0;
        int deltaedge = -1, deltablossom = -1;
        if (!maxcardinality) {
          deltatype = 1;
          int64_t mind = kInf;
          for (int v = 0; v < nvertex; ++v) mind = std::min(mind, dualvar[v]);
          delta = std::max<int64_t>(0, mind);
        }
        for (int v = 0; v < nvertex; ++v) {
          if (label[inblossom[v]] == 0 && bestedge[v] != -1) {
            int64_t d = slack(bestedge[v]);
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge[v];
            }
          }
        }
        for (int b = 0; b < 2 * nvertex; ++b) {
          if (blossomparent[b] == -1 && label[b] == 1 && bestedge[b] != -1) {
            int64_t ks = slack(bestedge[b]);
            int64_t d = ks / 2;
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge[b];
            }
          }
        }
        for (int b = nvertex; b < 2 * nvertex; ++b) {
          if (blossombase[b] >= 0 && blossomparent[b] == -1 &&
              label[b] == 2 && (deltatype == -1 || dualvar[b] < delta)) {
            delta = dualvar[b];
            deltatype = 4;
            deltablossom = b;
          }
        }
        if (deltatype == -1) {
          deltatype = 1;
          int64_t mind = kInf;
          for (int v = 0; v < nvertex; ++v) mind = std::min(mind, dualvar[v]);
          delta = std::max<int64_t>(0, mind);
        }

        for (int v = 0; v < nvertex; ++v) {
          int lbl = label[inblossom[v]];
          if (lbl == 1) {
            dualvar[v] -= delta;
          } else if (lbl == 2) {
            dualvar[v] += delta;
          }
        }
        for (int b = nvertex; b < 2 * nvertex; ++b) {
          if (blossombase[b] >= 0 && blossomparent[b] == -1) {
            if (label[b] == 1) {
              dualvar[b] += delta;
            } else if (label[b] == 2) {
              dualvar[b] -= delta;
            }
          }
        }

        if (deltatype == 1) break;
        if (deltatype == 2) {
          allowedge[deltaedge] = true;
          int i = edges[deltaedge].i;
          if (label[inblossom[i]] == 0) i = edges[deltaedge].j;
          queue.push_back(i);
        } else if (deltatype == 3) {
          allowedge[deltaedge] = true;
          queue.push_back(edges[deltaedge].i);
        } else if (deltatype == 4) {
          expand_blossom(deltablossom, false);
        }
      }
      if (!augmented) break;
      for (int b = nvertex; b < 2 * nvertex; ++b) {
        if (blossomparent[b] == -1 && blossombase[b] >= 0 && label[b] == 1 &&
            dualvar[b] == 0) {
          expand_blossom(b, true);
        }
      }
    }

    std::vector<int> result(nvertex, -1);
    for (int v = 0; v < nvertex; ++v) {
      if (mate[v] >= 0) result[v] = endpoint[mate[v]];
    }
    return result;
  }

 private:
  struct Edge {
    int i, j;
    int64_t w;
  };

  int64_t slack(int k) const {
    return dualvar[edges[k].i] + dualvar[edges[k].j] - 2 * edges[k].w;
  }

  template <typename Fn>
  void for_leaves(int b, Fn&& fn) {
    scratch_.clear();
    scratch_.push_back(b);
    while (!scratch_.empty()) {
      int s = scratch_.back();
      scratch_.pop_back();
      if (s < nvertex) {
        fn(s);
      } else {
        for (int t : blossomchilds[s]) scratch_.push_back(t);
      }
    }
  }

  void assign_label(int w, int t, int p) {
    int b = inblossom[w];
    label[w] = label[b] = t;
    labelend[w] = labelend[b] = p;
    bestedge[w] = bestedge[b] = -1;
    if (t == 1) {
      for_leaves(b, [&](int lv) { queue.push_back(lv); });
    } else if (t == 2) {
      int base = blossombase[b];
      assign_label(endpoint[mate[base]], 1, mate[base] ^ 1);
    }
  }

  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = inblossom[v];
      if (label[b] & 4) {
        base = blossombase[b];
        break;
      }
      path.push_back(b);
      label[b] = 5;
      if (labelend[b] == -1) {
        v = -1;
      } else {
        v = endpoint[labelend[b]];
        b = inblossom[v];
        v = endpoint[labelend[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label[b] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edges[k].i, w = edges[k].j;
    int bb = inblossom[base], bv = inblossom[v], bw = inblossom[w];
    int b = unusedblossoms.back();
    unusedblossoms.pop_back();
    blossombase[b] = base;
    blossomparent[b] = -1;
    blossomparent[bb] = b;

    std::vector<int> path, endps;
    while (bv != bb) {
      blossomparent[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend[bv]);
      v = endpoint[labelend[bv]];
      bv = inblossom[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend[bw] ^ 1);
      w = endpoint[labelend[bw]];
      bw = inblossom[w];
    }
    blossomchilds[b] = path;
    blossomendps[b] = endps;
    label[b] = 1;
    labelend[b] = labelend[bb];
    dualvar[b] = 0;

    for_leaves(b, [&](int lv) {
      if (label[inblossom[lv]] == 2) queue.push_back(lv);
      inblossom[lv] = b;
    });

    std::vector<int> bestedgeto(2 * nvertex, -1);
    auto consider = [&](int ek) {
      int i = edges[ek].i, j = edges[ek].j;
      if (inblossom[j] == b) std::swap(i, j);
      int bj = inblossom[j];
      if (bj != b && label[bj] == 1 &&
          (bestedgeto[bj] == -1 || slack(ek) < slack(bestedgeto[bj]))) {
        bestedgeto[bj] = ek;
      }
    };
    for (int child : path) {
      if (blossombestedges[child].empty()) {
        for_leaves(child, [&](int x) {
          for (int p : neighbend[x]) consider(p / 2);
        });
      } else {
        for (int ek : blossombestedges[child]) consider(ek);
      }
      blossombestedges[child].clear();
      bestedge[child] = -1;
    }
    blossombestedges[b].clear();
    for (int ek : bestedgeto) {
      if (ek != -1) blossombestedges[b].push_back(ek);
    }
    bestedge[b] = -1;
    for (int ek : blossombestedges[b]) {
      if (bestedge[b] == -1 || slack(ek) < slack(bestedge[b])) {
        bestedge[b] = ek;
      }
    }
  }

  void expand_blossom(int b, bool endstage) {
    for (int s : blossomchilds[b]) {
      blossomparent[s] = -1;
      if (s < nvertex) {
        inblossom[s] = s;
      } else if (endstage && dualvar[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        for_leaves(s, [&](int lv) { inblossom[lv] = s; });
      }
    }
    if (!endstage && label[b] == 2) {
      int entrychild = inblossom[endpoint[labelend[b] ^ 1]];
      int len = static_cast<int>(blossomchilds[b].size());
      auto child_at = [&](int j) {
        return blossomchilds[b][((j % len) + len) % len];
      };
      auto endp_at = [&](int j) {
        return blossomendps[b][((j % len) + len) % len];
      };
      int j = 0;
      for (int idx = 0; idx < len; ++idx) {
        if (blossomchilds[b][idx] == entrychild) {
          j = idx;
          break;
        }
      }
      int jstep, endptrick;
      if (j & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = labelend[b];
      while (j != 0) {
        label[endpoint[p ^ 1]] = 0;
        label[endpoint[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
        assign_label(endpoint[p ^ 1], 2, p);
        allowedge[endp_at(j - endptrick) / 2] = true;
        j += jstep;
        p = endp_at(j - endptrick) ^ endptrick;
        allowedge[p / 2] = true;
        j += jstep;
      }
      int bv = child_at(j);
      label[endpoint[p ^ 1]] = label[bv] = 2;
      labelend[endpoint[p ^ 1]] = labelend[bv] = p;
      bestedge[bv] = -1;
      j += jstep;
      while (child_at(j) != entrychild) {
        bv = child_at(j);
        if (label[bv] == 1) {
          j += jstep;
          continue;
        }
        int marked = -1;
        for_leaves(bv, [&](int lv) {
          if (marked < 0 && label[lv] != 0) marked = lv;
        });
        if (marked >= 0) {
          label[marked] = 0;
          label[endpoint[mate[blossombase[bv]]]] = 0;
          assign_label(marked, 2, labelend[marked]);
        }
        j += jstep;
      }
    }
    label[b] = -1;
    labelend[b] = -1;
    blossomchilds[b].clear();
    blossomendps[b].clear();
    blossombase[b] = -1;
    blossombestedges[b].clear();
    bestedge[b] = -1;
    unusedblossoms.push_back(b);
  }

  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent[t] != b) t = blossomparent[t];
    if (t >= nvertex) augment_blossom(t, v);
    int len = static_cast<int>(blossomchilds[b].size());
    auto child_at = [&](int j) {
      return blossomchilds[b][((j % len) + len) % len];
    };
    auto endp_at = [&](int j) {
      return blossomendps[b][((j % len) + len) % len];
    };
    int i = 0;
    for (int idx = 0; idx < len; ++idx) {
      if (blossomchilds[b][idx] == t) {
        i = idx;
        break;
      }
    }
    int j = i, jstep, endptrick;
    if (i & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = child_at(j);
      int p = endp_at(j - endptrick) ^ endptrick;
      if (t >= nvertex) augment_blossom(t, endpoint[p]);
      j += jstep;
      t = child_at(j);
      if (t >= nvertex) augment_blossom(t, endpoint[p ^ 1]);
      mate[endpoint[p]] = p ^ 1;
      mate[endpoint[p ^ 1]] = p;
    }
    std::rotate(blossomchilds[b].begin(), blossomchilds[b].begin() + i,
                blossomchilds[b].end());
    std::rotate(blossomendps[b].begin(), blossomendps[b].begin() + i,
                blossomendps[b].end());
    blossombase[b] = blossombase[blossomchilds[b][0]];
  }

  void augment_matching(int k) {
    for (auto [s, p] : {std::pair<int, int>{edges[k].i, 2 * k + 1},
                        std::pair<int, int>{edges[k].j, 2 * k}}) {
      while (true) {
        int bs = inblossom[s];
        if (bs >= nvertex) augment_blossom(bs, s);
        mate[s] = p;
        if (labelend[bs] == -1) break;
        int t = endpoint[labelend[bs]];
        int bt = inblossom[t];
        s = endpoint[labelend[bt]];
        int j = endpoint[labelend[bt] ^ 1];
        if (bt >= nvertex) augment_blossom(bt, j);
        mate[j] = labelend[bt];
        p = labelend[bt] ^ 1;
      }
    }
  }

  static void resize_clear(std::vector<std::vector<int>>& v, size_t n) {
    if (v.size() < n) v.resize(n);
    for (size_t i = 0; i < n; ++i) v[i].clear();
  }

  int nvertex = 0, nedge = 0;
  bool maxcardinality = false;
  std::vector<Edge> edges;
  std::vector<int> endpoint;
  std::vector<std::vector<int>> neighbend;
  std::vector<int> mate, label, labelend, inblossom, blossomparent,
      blossombase, bestedge, unusedblossoms;
  std::vector<std::vector<int>> blossomchilds, blossomendps,
      blossombestedges;
  std::vector<int64_t> dualvar;
  std::vector<bool> allowedge;
  std::vector<int> queue;
  std::vector<int> scratch_;
};

}  // namespace

std::vector<int> max_weight_matching(
    int n, const std::vector<std::array<int64_t, 3>>& edges,
    bool max_cardinality) {
  if (n == 0) return {};
  thread_local WeightedBlossom wb;
  wb.init(n, edges, max_cardinality);
  return wb.solve();
}

MatchingGraph build_matching_graph(const Dem& dem) {
  MatchingGraph g;
  g.num_detectors = dem.num_detectors;
  for (const auto& m : dem.mechanisms) {
    if (m.detectors.empty() || m.detectors.size() > 2) continue;
    double p = std::min(std::max(m.probability, 1e-15), 0.5 - 1e-12);
    int64_t w = std::llround(std::log((1.0 - p) / p) *
                             static_cast<double>(MatchingGraph::kScale));
    w = std::max<int64_t>(w, 1);
    MatchingGraph::Edge e;
    e.u = static_cast<int32_t>(m.detectors[0]);
    e.v = (m.detectors.size() == 2) ? static_cast<int32_t>(m.detectors[1])
                                    : MatchingGraph::kBoundary;
    e.weight = w;
    e.obs = m.observables;
    g.edges.push_back(e);
  }
  g.build_tables();
  return g;
}

void MatchingGraph::build_tables() {
  n_ = num_detectors;
  dist_.assign(static_cast<size_t>(n_) * n_, kInf);
  pobs_.assign(static_cast<size_t>(n_) * n_, 0);
  bdist_.assign(n_, kInf);
  bobs_.assign(n_, 0);

  struct Adj {
    uint32_t to;
    int64_t w;
    uint32_t obs;
  };
  std::vector<std::vector<Adj>> adj(n_);
  for (const auto& e : edges) {
    if (e.v == kBoundary) {
      if (e.weight < bdist_[e.u]) {
        // direct boundary edge; refined below by path search
      }
      continue;
    }
    adj[e.u].push_back({static_cast<uint32_t>(e.v), e.weight, e.obs});
    adj[e.v].push_back({static_cast<uint32_t>(e.u), e.weight, e.obs});
  }

  // Dijkstra from every detector. Ties broken toward the first-found
  // path with the adjacency in edge order, so decoding is reproducible.
  for (uint32_t src = 0; src < n_; ++src) {
    auto* dist = &dist_[static_cast<size_t>(src) * n_];
    auto* pobs = &pobs_[static_cast<size_t>(src) * n_];
    using Item = std::pair<int64_t, uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0;
    pq.push({0, src});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (const auto& a : adj[u]) {
        int64_t nd = d + a.w;
        if (nd < dist[a.to]) {
          dist[a.to] = nd;
          pobs[a.to] = pobs[u] ^ a.obs;
          pq.push({nd, a.to});
        }
      }
    }
  }

  // Boundary distances: min over (path to node with a boundary edge).
  for (uint32_t v = 0; v < n_; ++v) {
    for (const auto& e : edges) {
      if (e.v != kBoundary) continue;
      int64_t d = dist(v, e.u);
      if (d >= kInf) continue;
      int64_t nd = d + e.weight;
      if (nd < bdist_[v]) {
        bdist_[v] = nd;
        bobs_[v] = path_obs(v, e.u) ^ e.obs;
      }
    }
  }
}

Correction decode_mwpm(const MatchingGraph& graph,
                       const std::vector<uint32_t>& defects) {
  Correction corr;
  size_t k = defects.size();
  if (k == 0) return corr;
  for (uint32_t d : defects) {
    if (d >= graph.num_detectors) {
      throw std::out_of_range("defect index outside the matching graph");
    }
  }

  auto bdist = [&](size_t a) { return graph.boundary_dist(defects[a]); };

  if (k == 1) {
    if (bdist(0) >= kInf) {
      throw std::runtime_error("lone defect with no boundary path");
    }
    corr.obs_flip = graph.boundary_obs(defects[0]);
    corr.weight = bdist(0);
    corr.pairs.push_back({0, -1});
    return corr;
  }

  // Two defects a, b either pair along their shortest path or each go to
  // the boundary; folding the cheaper option into one edge keeps the
  // matching exact on just the defect nodes.
  auto via_cost = [&](size_t a, size_t b) {
    return (bdist(a) >= kInf || bdist(b) >= kInf) ? kInf
                                                  : bdist(a) + bdist(b);
  };
  auto pair_cost = [&](size_t a, size_t b) {
    return std::min(graph.dist(defects[a], defects[b]), via_cost(a, b));
  };

  // Defects that never pair strictly cheaper than through the boundary
  // split into independent clusters; solving clusters separately is
  // exact and much faster on busy syndromes.
  thread_local std::vector<uint32_t> parent;
  parent.assign(k, 0);
  for (size_t a = 0; a < k; ++a) parent[a] = static_cast<uint32_t>(a);
  auto find = [&](uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = a + 1; b < k; ++b) {
      if (graph.dist(defects[a], defects[b]) < via_cost(a, b)) {
        parent[find(static_cast<uint32_t>(a))] =
            find(static_cast<uint32_t>(b));
      }
    }
  }
  thread_local std::vector<std::vector<uint32_t>> clusters;
  for (auto& c : clusters) c.clear();
  if (clusters.size() < k) clusters.resize(k);
  thread_local std::vector<int32_t> cluster_of;
  cluster_of.assign(k, -1);
  int n_clusters = 0;
  for (size_t a = 0; a < k; ++a) {
    uint32_t root = find(static_cast<uint32_t>(a));
    if (cluster_of[root] < 0) cluster_of[root] = n_clusters++;
    clusters[cluster_of[root]].push_back(static_cast<uint32_t>(a));
  }

  thread_local std::vector<std::array<int64_t, 3>> edges;
  for (int c = 0; c < n_clusters; ++c) {
    const auto& members = clusters[c];
    size_t kc = members.size();
    if (kc == 1) {
      size_t a = members[0];
      if (bdist(a) >= kInf) {
        throw std::runtime_error("lone defect with no boundary path");
      }
      corr.obs_flip ^= graph.boundary_obs(defects[a]);
      corr.weight += bdist(a);
      corr.pairs.push_back({static_cast<int32_t>(a), -1});
      continue;
    }
    size_t nc = kc + (kc % 2);  // odd clusters get one boundary node
    edges.clear();
    int64_t maxcost = 1;
    for (size_t i = 0; i < kc; ++i) {
      for (size_t j = i + 1; j < kc; ++j) {
        int64_t cost = pair_cost(members[i], members[j]);
        if (cost < kInf) maxcost = std::max(maxcost, cost);
      }
      if (nc > kc && bdist(members[i]) < kInf) {
        maxcost = std::max(maxcost, bdist(members[i]));
      }
    }
    int64_t big = maxcost + 1;
    for (size_t i = 0; i < kc; ++i) {
      for (size_t j = i + 1; j < kc; ++j) {
        int64_t cost = pair_cost(members[i], members[j]);
        if (cost < kInf) {
          edges.push_back({static_cast<int64_t>(i), static_cast<int64_t>(j),
                           big - cost});
        }
      }
      if (nc > kc && bdist(members[i]) < kInf) {
        edges.push_back({static_cast<int64_t>(i), static_cast<int64_t>(kc),
                         big - bdist(members[i])});
      }
    }

    auto mate = max_weight_matching(static_cast<int>(nc), edges, true);
    for (size_t i = 0; i < kc; ++i) {
      int m = mate[i];
      if (m < 0) {
        throw std::runtime_error("matching failed to pair a defect");
      }
      size_t a = members[i];
      if (static_cast<size_t>(m) == kc) {  // the odd-count boundary node
        corr.obs_flip ^= graph.boundary_obs(defects[a]);
        corr.weight += bdist(a);
        corr.pairs.push_back({static_cast<int32_t>(a), -1});
      } else if (static_cast<size_t>(m) > i) {
        size_t b = members[m];
        int64_t direct = graph.dist(defects[a], defects[b]);
        if (direct <= via_cost(a, b)) {
          corr.obs_flip ^= graph.path_obs(defects[a], defects[b]);
          corr.weight += direct;
          corr.pairs.push_back(
              {static_cast<int32_t>(a), static_cast<int32_t>(b)});
        } else {
          corr.obs_flip ^= graph.boundary_obs(defects[a]) ^
                           graph.boundary_obs(defects[b]);
          corr.weight += via_cost(a, b);
          corr.pairs.push_back({static_cast<int32_t>(a), -1});
          corr.pairs.push_back({static_cast<int32_t>(b), -1});
        }
      }
    }
  }
  return corr;
}

Correction decode_exhaustive(const MatchingGraph& graph,
                             const std::vector<uint32_t>& defects) {
  size_t k = defects.size();
  if (k > 16) {
    throw std::invalid_argument("exhaustive decoder limited to 16 defects");
  }
  Correction corr;
  if (k == 0) return corr;

  size_t full = (1u << k) - 1;
  std::vector<int64_t> dp(full + 1, kInf);
  std::vector<int32_t> choice(full + 1, -2);  // paired partner of lowest bit
  dp[0] = 0;
  for (size_t mask = 1; mask <= full; ++mask) {
    int a = __builtin_ctz(mask);
    size_t rest = mask ^ (1u << a);
    // Boundary option.
    int64_t bc = graph.boundary_dist(defects[a]);
    if (bc < kInf && dp[rest] < kInf && dp[rest] + bc < dp[mask]) {
      dp[mask] = dp[rest] + bc;
      choice[mask] = -1;
    }
    // Pair with another defect.
    size_t others = rest;
    while (others) {
      int b = __builtin_ctz(others);
      others &= others - 1;
      int64_t c = graph.dist(defects[a], defects[b]);
      size_t rem = rest ^ (1u << b);
      if (c < kInf && dp[rem] < kInf && dp[rem] + c < dp[mask]) {
        dp[mask] = dp[rem] + c;
        choice[mask] = b;
      }
    }
  }
  size_t mask = full;
  while (mask) {
    int a = __builtin_ctz(mask);
    int b = choice[mask];
    if (b == -1) {
      corr.obs_flip ^= graph.boundary_obs(defects[a]);
      corr.pairs.push_back({a, -1});
      mask ^= 1u << a;
    } else {
      corr.obs_flip ^= graph.path_obs(defects[a], defects[b]);
      corr.pairs.push_back({a, b});
      mask ^= (1u << a) | (1u << b);
    }
  }
  corr.weight = dp[full];
  return corr;
}

uint32_t ml_decode_bruteforce(const Dem& dem,
                              const std::vector<uint32_t>& syndrome) {
  size_t m = dem.mechanisms.size();
  if (m > 20) {
    throw std::invalid_argument("ML oracle limited to 20 mechanisms");
  }
  uint64_t target = 0;
  for (uint32_t d : syndrome) target |= 1ULL << d;

  std::vector<uint64_t> det_masks(m);
  for (size_t i = 0; i < m; ++i) {
    for (uint32_t d : dem.mechanisms[i].detectors) det_masks[i] |= 1ULL << d;
  }
  double base = 1.0;
  for (const auto& mech : dem.mechanisms) base *= 1.0 - mech.probability;

  std::vector<double> class_prob(1u << dem.num_observables, 0.0);
  for (uint64_t subset = 0; subset < (1ULL << m); ++subset) {
    uint64_t dets = 0;
    uint32_t obs = 0;
    double prob = base;
    uint64_t s = subset;
    while (s) {
      int i = __builtin_ctzll(s);
      s &= s - 1;
      dets ^= det_masks[i];
      obs ^= dem.mechanisms[i].observables;
      prob *= dem.mechanisms[i].probability / (1.0 - dem.mechanisms[i].probability);
    }
    if (dets == target) class_prob[obs] += prob;
  }
  uint32_t best = 0;
  for (uint32_t o = 1; o < class_prob.size(); ++o) {
    if (class_prob[o] > class_prob[best]) best = o;  // ties keep no-flip
  }
  return best;
}

int min_distance(const Dem& dem) {
  // Minimal undetectable logical = shortest odd-observable walk that is
  // either boundary-to-boundary or a cycle, over the decoding graph with
  // unit edge lengths. States are (node, observable parity); the virtual
  // boundary is node n.
  uint32_t n = dem.num_detectors;
  uint32_t nb = n + 1;
  struct Adj {
    uint32_t to;
    uint32_t obs;
  };
  std::vector<std::vector<Adj>> adj(nb);
  for (const auto& m : dem.mechanisms) {
    uint32_t obs = m.observables & 1u;
    if (m.detectors.size() == 2) {
      adj[m.detectors[0]].push_back({m.detectors[1], obs});
      adj[m.detectors[1]].push_back({m.detectors[0], obs});
    } else if (m.detectors.size() == 1) {
      adj[m.detectors[0]].push_back({n, obs});
      adj[n].push_back({m.detectors[0], obs});
    }
  }

  auto bfs = [&](uint32_t src, std::vector<int>& dist) {
    dist.assign(2 * nb, -1);
    std::deque<uint32_t> q;
    dist[2 * src] = 0;
    q.push_back(2 * src);
    while (!q.empty()) {
      uint32_t s = q.front();
      q.pop_front();
      uint32_t v = s / 2, par = s % 2;
      for (const auto& a : adj[v]) {
        uint32_t ns = 2 * a.to + (par ^ a.obs);
        if (dist[ns] < 0) {
          dist[ns] = dist[s] + 1;
          q.push_back(ns);
        }
      }
    }
  };

  int best = -1;
  std::vector<int> dist;
  // Boundary-to-boundary strings.
  bfs(n, dist);
  if (dist[2 * n + 1] > 0) best = dist[2 * n + 1];
  // Odd cycles: close a path v->u with an edge (u, v, obs).
  for (uint32_t v = 0; v < n; ++v) {
    if (adj[v].empty()) continue;
    bfs(v, dist);
    for (const auto& a : adj[v]) {
      // Edge (v, a.to): cycle = shortest path v->a.to with parity p,
      // closed by this edge; total parity p ^ a.obs must be odd.
      uint32_t want = 1 ^ a.obs;
      int d = dist[2 * a.to + want];
      if (d >= 0) {
        int cyc = d + 1;
        if (best < 0 || cyc < best) best = cyc;
      }
    }
  }
  return best;
}

}  // namespace hexrsc
