#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kds::detail {

// Maximum-weight maximum-cardinality matching on the complete graph K_n,
// primal-dual with blossom shrinking, O(n^3). On a complete graph with even
// n the result is a perfect matching, so running it on negated distances
// yields the min-cost perfect matching.
//
// Weights are doubles; tightness tests use an absolute tolerance scaled to
// the weight magnitude. Edge "endpoints" follow the classic encoding: edge
// k = tri(i,j) has endpoints 2k (-> i) and 2k+1 (-> j), and p^1 flips sides.
template <class WeightFn>
class DenseBlossom {
 public:
  DenseBlossom(int n, WeightFn wt, bool warm_start = true)
      : n_(n), wt_(wt), warm_(warm_start) {}

  // Partner vertex per vertex.
  std::vector<int> solve() {
    if (n_ % 2 != 0) throw std::invalid_argument("DenseBlossom: vertex count must be even");
    if (n_ > 32000) throw std::invalid_argument("DenseBlossom: supports n <= 32000");
    std::vector<int> partner(n_, -1);
    if (n_ == 0) return partner;
    init();
    for (int stage = 0; stage < n_; ++stage) {
      if (!run_stage()) break;
    }
    for (int v = 0; v < n_; ++v) {
      if (mate_[v] < 0) throw std::runtime_error("DenseBlossom: no perfect matching found");
      partner[v] = endpoint(mate_[v]);
    }
    return partner;
  }

 private:
  static std::int64_t tri(int i, int j) {
    if (i > j) std::swap(i, j);
    return static_cast<std::int64_t>(j) * (j - 1) / 2 + i;
  }

  int edge_hi(std::int64_t k) const {
    int j = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
    while (static_cast<std::int64_t>(j) * (j - 1) / 2 > k) --j;
    while (static_cast<std::int64_t>(j + 1) * j / 2 <= k) ++j;
    return j;
  }

  int endpoint(std::int64_t p) const {
    const std::int64_t k = p >> 1;
    const int j = edge_hi(k);
    const int i = static_cast<int>(k - static_cast<std::int64_t>(j) * (j - 1) / 2);
    return (p & 1) ? j : i;
  }

  double slack_vw(int v, int w) const { return dualvar_[v] + dualvar_[w] - 2.0 * wt_(v, w); }

  double slack_edge(std::int64_t k) const {
    const int j = edge_hi(k);
    const int i = static_cast<int>(k - static_cast<std::int64_t>(j) * (j - 1) / 2);
    return slack_vw(i, j);
  }

  // Packed (i,j) pair used for best-edge bookkeeping; avoids edge-id decode.
  static std::int64_t pack(int i, int j) {
    return (static_cast<std::int64_t>(i) << 32) | static_cast<std::uint32_t>(j);
  }
  static int pack_lo(std::int64_t p) { return static_cast<int>(p >> 32); }
  static int pack_hi(std::int64_t p) { return static_cast<int>(p & 0xffffffff); }
  double slack_pair(std::int64_t p) const { return slack_vw(pack_lo(p), pack_hi(p)); }

  template <class F>
  void for_leaves(int b, F&& f) const {
    if (b < n_) {
      f(b);
      return;
    }
    std::vector<int> stack{b};
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      if (t < n_) {
        f(t);
      } else {
        for (int c : blossomchilds_[t]) stack.push_back(c);
      }
    }
  }

  void init() {
    const std::int64_t m = static_cast<std::int64_t>(n_) * (n_ - 1) / 2;
    double maxweight = 0.0, maxabs = 0.0;
    for (int j = 1; j < n_; ++j) {
      for (int i = 0; i < j; ++i) {
        const double w = wt_(i, j);
        maxweight = std::max(maxweight, w);
        maxabs = std::max(maxabs, std::abs(w));
      }
    }
    tol_ = 1e-10 * std::max(1.0, maxabs);

    mate_.assign(n_, -1);
    label_.assign(2 * n_, 0);
    labelend_.assign(2 * n_, -1);
    inblossom_.resize(n_);
    for (int v = 0; v < n_; ++v) inblossom_[v] = v;
    blossomparent_.assign(2 * n_, -1);
    blossombase_.assign(2 * n_, -1);
    for (int v = 0; v < n_; ++v) blossombase_[v] = v;
    blossomchilds_.assign(2 * n_, {});
    blossomendps_.assign(2 * n_, {});
    bestedge_.assign(2 * n_, -1);
    blossombestedges_.assign(2 * n_, {});
    unusedblossoms_.clear();
    for (int b = n_; b < 2 * n_; ++b) unusedblossoms_.push_back(b);
    dualvar_.assign(2 * n_, 0.0);
    allowedge_.assign(static_cast<std::size_t>(m), 0);
    queue_.clear();

    if (warm_) {
      // Feasible start: dual[v] = max_u w(v,u), then match tight pairs.
      // Cuts the number of augmentation stages substantially.
      std::vector<int> best(n_, -1);
      for (int v = 0; v < n_; ++v) {
        double bw = -HUGE_VAL;
        for (int u = 0; u < n_; ++u) {
          if (u == v) continue;
          const double w = wt_(v, u);
          if (w > bw) {
            bw = w;
            best[v] = u;
          }
        }
        dualvar_[v] = bw;
      }
      for (int v = 0; v < n_; ++v) {
        const int u = best[v];
        if (mate_[v] >= 0 || mate_[u] >= 0) continue;
        if (slack_vw(v, u) <= tol_) {
          const std::int64_t k = tri(v, u);
          mate_[v] = 2 * k + (v < u ? 1 : 0);
          mate_[u] = 2 * k + (v < u ? 0 : 1);
        }
      }
    } else {
      for (int v = 0; v < n_; ++v) dualvar_[v] = maxweight;
    }
  }

  void assign_label(int w, int t, std::int64_t p) {
    const int b = inblossom_[w];
    assert(label_[w] == 0 && label_[b] == 0);
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      for_leaves(b, [this](int v) { queue_.push_back(v); });
    } else {
      const int base = blossombase_[b];
      assert(mate_[base] >= 0);
      assign_label(endpoint(mate_[base]), 1, mate_[base] ^ 1);
    }
  }

  // Trace back from v and w to find the common tree ancestor (blossom base),
  // or -1 if the paths hit distinct roots (an augmenting path).
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      assert(label_[b] == 1);
      path.push_back(b);
      label_[b] = 5;
      assert(labelend_[b] == mate_[blossombase_[b]]);
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint(labelend_[b]);
        b = inblossom_[v];
        assert(label_[b] == 2);
        assert(labelend_[b] >= 0);
        v = endpoint(labelend_[b]);
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(int base, std::int64_t k) {
    const int j_hi = edge_hi(k);
    int v = static_cast<int>(k - static_cast<std::int64_t>(j_hi) * (j_hi - 1) / 2);
    int w = j_hi;
    const int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    assert(!unusedblossoms_.empty());
    const int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    auto& path = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      assert(label_[bv] == 2 || (label_[bv] == 1 && labelend_[bv] == mate_[blossombase_[bv]]));
      assert(labelend_[bv] >= 0);
      v = endpoint(labelend_[bv]);
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      assert(label_[bw] == 2 || (label_[bw] == 1 && labelend_[bw] == mate_[blossombase_[bw]]));
      assert(labelend_[bw] >= 0);
      w = endpoint(labelend_[bw]);
      bw = inblossom_[w];
    }
    assert(label_[bb] == 1);
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0.0;
    for_leaves(b, [this, b](int lv) {
      if (label_[inblossom_[lv]] == 2) queue_.push_back(lv);
      inblossom_[lv] = b;
    });

    // Recompute best-edge lists toward other S-blossoms.
    std::vector<std::int64_t> bestedgeto(2 * n_, -1);
    for (int child : path) {
      std::vector<std::int64_t> edgelist;
      if (blossombestedges_[child].empty()) {
        for_leaves(child, [this, &edgelist](int lv) {
          for (int u = 0; u < n_; ++u) {
            if (u != lv) edgelist.push_back(pack(lv, u));
          }
        });
      } else {
        edgelist = blossombestedges_[child];
      }
      for (std::int64_t ek : edgelist) {
        int i = pack_lo(ek), j = pack_hi(ek);
        if (inblossom_[j] == b) std::swap(i, j);
        const int bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 &&
            (bestedgeto[bj] == -1 || slack_vw(i, j) < slack_pair(bestedgeto[bj]))) {
          bestedgeto[bj] = pack(i, j);
        }
      }
      blossombestedges_[child].clear();
      bestedge_[child] = -1;
    }
    auto& bbe = blossombestedges_[b];
    bbe.clear();
    for (std::int64_t ek : bestedgeto) {
      if (ek != -1) bbe.push_back(ek);
    }
    bestedge_[b] = -1;
    for (std::int64_t ek : bbe) {
      if (bestedge_[b] == -1 || slack_pair(ek) < slack_pair(bestedge_[b])) bestedge_[b] = ek;
    }
  }

  void expand_blossom(int b, bool endstage) {
    for (int s : blossomchilds_[b]) {
      blossomparent_[s] = -1;
      if (s < n_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] <= tol_) {
        expand_blossom(s, endstage);
      } else {
        for_leaves(s, [this, s](int v) { inblossom_[v] = s; });
      }
    }
    if (!endstage && label_[b] == 2) {
      assert(labelend_[b] >= 0);
      const int entrychild = inblossom_[endpoint(labelend_[b] ^ 1)];
      const auto& childs = blossomchilds_[b];
      const auto& endps = blossomendps_[b];
      const int L = static_cast<int>(childs.size());
      auto idx = [L](int j) { return ((j % L) + L) % L; };
      int j = 0;
      while (childs[j] != entrychild) ++j;
      int jstep, endptrick;
      if (j & 1) {
        j -= L;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      std::int64_t p = labelend_[b];
      while (j != 0) {
        label_[endpoint(p ^ 1)] = 0;
        label_[endpoint(endps[idx(j - endptrick)] ^ endptrick ^ 1)] = 0;
        assign_label(endpoint(p ^ 1), 2, p);
        allowedge_[static_cast<std::size_t>(endps[idx(j - endptrick)] >> 1)] = 1;
        j += jstep;
        p = endps[idx(j - endptrick)] ^ endptrick;
        allowedge_[static_cast<std::size_t>(p >> 1)] = 1;
        j += jstep;
      }
      int bv = childs[0];
      label_[endpoint(p ^ 1)] = label_[bv] = 2;
      labelend_[endpoint(p ^ 1)] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (childs[idx(j)] != entrychild) {
        bv = childs[idx(j)];
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        int reachable = -1;
        for_leaves(bv, [this, &reachable](int v) {
          if (reachable == -1 && label_[v] != 0) reachable = v;
        });
        if (reachable != -1) {
          assert(label_[reachable] == 2);
          assert(inblossom_[reachable] == bv);
          label_[reachable] = 0;
          label_[endpoint(mate_[blossombase_[bv]])] = 0;
          assign_label(reachable, 2, labelend_[reachable]);
        }
        j += jstep;
      }
    }
    label_[b] = 0;
    labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    bestedge_[b] = -1;
    unusedblossoms_.push_back(b);
  }

  // Rotate blossom b so that vertex v becomes its base, rematching along
  // the even alternating path inside.
  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= n_) augment_blossom(t, v);
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const int L = static_cast<int>(childs.size());
    auto idx = [L](int j) { return ((j % L) + L) % L; };
    int i = 0;
    while (childs[i] != t) ++i;
    int j = i, jstep, endptrick;
    if (i & 1) {
      j -= L;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = childs[idx(j)];
      const std::int64_t p = endps[idx(j - endptrick)] ^ endptrick;
      if (t >= n_) augment_blossom(t, endpoint(p));
      j += jstep;
      t = childs[idx(j)];
      if (t >= n_) augment_blossom(t, endpoint(p ^ 1));
      mate_[endpoint(p)] = p ^ 1;
      mate_[endpoint(p ^ 1)] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
  }

  void augment_matching(std::int64_t k) {
    const int hi = edge_hi(k);
    const int v = static_cast<int>(k - static_cast<std::int64_t>(hi) * (hi - 1) / 2);
    const int w = hi;
    const std::pair<int, std::int64_t> starts[2] = {{v, 2 * k + 1}, {w, 2 * k}};
    for (auto [s, p] : starts) {
      for (;;) {
        const int bs = inblossom_[s];
        assert(label_[bs] == 1);
        assert(labelend_[bs] == mate_[blossombase_[bs]]);
        if (bs >= n_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;
        const int t = endpoint(labelend_[bs]);
        const int bt = inblossom_[t];
        assert(label_[bt] == 2);
        assert(labelend_[bt] >= 0);
        s = endpoint(labelend_[bt]);
        const int j = endpoint(labelend_[bt] ^ 1);
        assert(blossombase_[bt] == t);
        if (bt >= n_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  bool run_stage() {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(bestedge_.begin(), bestedge_.end(), -1);
    for (auto& v : blossombestedges_) v.clear();
    std::fill(allowedge_.begin(), allowedge_.end(), 0);
    queue_.clear();

    for (int v = 0; v < n_; ++v) {
      if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
    }
    bool augmented = false;
    long guard = 0;
    const long guard_limit = 200L * n_ + 10000;
    for (;;) {
      while (!queue_.empty() && !augmented) {
        const int v = queue_.back();
        queue_.pop_back();
        assert(label_[inblossom_[v]] == 1);
        for (int w = 0; w < n_; ++w) {
          if (w == v || inblossom_[v] == inblossom_[w]) continue;
          const std::int64_t k = tri(v, w);
          double kslack = 0.0;
          if (!allowedge_[static_cast<std::size_t>(k)]) {
            kslack = slack_vw(v, w);
            if (kslack <= tol_) allowedge_[static_cast<std::size_t>(k)] = 1;
          }
          if (allowedge_[static_cast<std::size_t>(k)]) {
            const int bw = inblossom_[w];
            if (label_[bw] == 0) {
              const std::int64_t p_remote = 2 * k + (w > v ? 1 : 0);
              assign_label(w, 2, p_remote ^ 1);
            } else if (label_[bw] == 1) {
              const int base = scan_blossom(v, w);
              if (base >= 0) {
                add_blossom(base, k);
              } else {
                augment_matching(k);
                augmented = true;
                break;
              }
            } else if (label_[w] == 0) {
              assert(label_[bw] == 2);
              const std::int64_t p_remote = 2 * k + (w > v ? 1 : 0);
              label_[w] = 2;
              labelend_[w] = p_remote ^ 1;
            }
          } else if (label_[inblossom_[w]] == 1) {
            const int b = inblossom_[v];
            if (bestedge_[b] == -1 || kslack < slack_pair(bestedge_[b])) bestedge_[b] = pack(v, w);
          } else if (label_[w] == 0) {
            if (bestedge_[w] == -1 || kslack < slack_pair(bestedge_[w])) bestedge_[w] = pack(v, w);
          }
        }
      }
      if (augmented) break;

      int deltatype = -1;
      double delta = 0.0;
      std::int64_t deltaedge = -1;
      int deltablossom = -1;
      for (int v = 0; v < n_; ++v) {
        if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
          const double d = slack_pair(bestedge_[v]);
          if (deltatype == -1 || d < delta) {
            deltatype = 2;
            delta = d;
            deltaedge = bestedge_[v];
          }
        }
      }
      for (int b = 0; b < 2 * n_; ++b) {
        if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
          const double d = slack_pair(bestedge_[b]) / 2.0;
          if (deltatype == -1 || d < delta) {
            deltatype = 3;
            delta = d;
            deltaedge = bestedge_[b];
          }
        }
      }
      for (int b = n_; b < 2 * n_; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
            (deltatype == -1 || dualvar_[b] < delta)) {
          deltatype = 4;
          delta = dualvar_[b];
          deltablossom = b;
        }
      }
      if (deltatype == -1) {
        // No way to grow any tree: maximum cardinality reached.
        deltatype = 1;
        double mind = dualvar_[0];
        for (int v = 1; v < n_; ++v) mind = std::min(mind, dualvar_[v]);
        delta = std::max(0.0, mind);
      }

      for (int v = 0; v < n_; ++v) {
        const int lb = label_[inblossom_[v]];
        if (lb == 1) dualvar_[v] -= delta;
        else if (lb == 2) dualvar_[v] += delta;
      }
      // Blossom duals move by delta (z changes at twice the vertex-dual
      // rate, and delta is already that doubled step), keeping matched
      // intra-blossom edges tight and making delta4 land exactly at z = 0.
      for (int b = n_; b < 2 * n_; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
          if (label_[b] == 1) dualvar_[b] += delta;
          else if (label_[b] == 2) dualvar_[b] -= delta;
        }
      }

      if (deltatype == 1) break;
      if (deltatype == 2) {
        int i = pack_lo(deltaedge), j = pack_hi(deltaedge);
        allowedge_[static_cast<std::size_t>(tri(i, j))] = 1;
        if (label_[inblossom_[i]] == 0) std::swap(i, j);
        assert(label_[inblossom_[i]] == 1);
        queue_.push_back(i);
      } else if (deltatype == 3) {
        int i = pack_lo(deltaedge), j = pack_hi(deltaedge);
        allowedge_[static_cast<std::size_t>(tri(i, j))] = 1;
        if (label_[inblossom_[i]] != 1) std::swap(i, j);
        assert(label_[inblossom_[i]] == 1);
        queue_.push_back(i);
      } else {
        expand_blossom(deltablossom, false);
      }
      if (++guard > guard_limit) throw std::runtime_error("DenseBlossom: numerical stall");
    }

    // Free S-blossoms whose dual dropped to zero.
    for (int b = n_; b < 2 * n_; ++b) {
      if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
          dualvar_[b] <= tol_) {
        expand_blossom(b, true);
      }
    }
    return augmented;
  }

  int n_;
  WeightFn wt_;
  bool warm_;
  double tol_ = 1e-12;

  std::vector<std::int64_t> mate_;  // endpoint id or -1
  std::vector<int> label_;
  std::vector<std::int64_t> labelend_;
  std::vector<int> inblossom_;
  std::vector<int> blossomparent_;
  std::vector<int> blossombase_;
  std::vector<std::vector<int>> blossomchilds_;
  std::vector<std::vector<std::int64_t>> blossomendps_;
  std::vector<std::int64_t> bestedge_;
  std::vector<std::vector<std::int64_t>> blossombestedges_;
  std::vector<int> unusedblossoms_;
  std::vector<double> dualvar_;
  std::vector<std::uint8_t> allowedge_;
  std::vector<int> queue_;
};

}  // namespace kds::detail
