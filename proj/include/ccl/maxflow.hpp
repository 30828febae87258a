#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

namespace ccl {

// Dinic's algorithm over an ordered field (exact rationals or doubles).
template <class T>
class FlowNetwork {
 public:
  struct Arc {
    int to;
    int rev;
    T cap;
  };

  explicit FlowNetwork(int n) : adj_(n), level_(n), next_(n) {}

  int size() const { return static_cast<int>(adj_.size()); }

  // Returns the position of the forward arc inside adj(from).
  int add_arc(int from, int to, const T& cap) {
    adj_[from].push_back({to, static_cast<int>(adj_[to].size()), cap});
    adj_[to].push_back({from, static_cast<int>(adj_[from].size()) - 1, T(0)});
    return static_cast<int>(adj_[from].size()) - 1;
  }

  const std::vector<Arc>& adj(int v) const { return adj_[v]; }

  // Flow currently pushed along a forward arc = capacity of its reverse arc.
  const T& flow_on(int from, int pos) const {
    const Arc& a = adj_[from][pos];
    return adj_[a.to][a.rev].cap;
  }

  T max_flow(int source, int sink, const T& eps = T(0)) {
    eps_ = eps;
    T total(0);
    while (bfs(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      for (;;) {
        T pushed = dfs(source, sink, T(-1));
        if (!(pushed > eps_)) break;
        total += pushed;
      }
    }
    return total;
  }

  // Vertices reachable from `source` in the residual network.
  std::vector<bool> residual_reachable(int source) const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<int> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const Arc& a : adj_[v])
        if (a.cap > eps_ && !seen[a.to]) {
          seen[a.to] = true;
          stack.push_back(a.to);
        }
    }
    return seen;
  }

 private:
  bool bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const Arc& a : adj_[v])
        if (a.cap > eps_ && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          q.push(a.to);
        }
    }
    return level_[sink] >= 0;
  }

  // limit < 0 means unbounded (only at the source).
  T dfs(int v, int sink, const T& limit) {
    if (v == sink) return limit;
    for (int& i = next_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
      Arc& a = adj_[v][i];
      if (!(a.cap > eps_) || level_[a.to] != level_[v] + 1) continue;
      T want = (limit < T(0) || a.cap < limit) ? a.cap : limit;
      T got = dfs(a.to, sink, want);
      if (got > eps_) {
        a.cap -= got;
        adj_[a.to][a.rev].cap += got;
        return got;
      }
    }
    return T(0);
  }

  std::vector<std::vector<Arc>> adj_;
  std::vector<int> level_;
  std::vector<int> next_;
  T eps_{};
};

}  // namespace ccl
