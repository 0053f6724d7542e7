#pragma once

#include <numeric>
#include <utility>
#include <vector>

namespace rfim {

/// Disjoint sets with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(int n = 0) { reset(n); }

  void reset(int n) {
    parent_.resize(n);
    size_.assign(n, 1);
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int size() const { return static_cast<int>(parent_.size()); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  /// Returns the new root, or -1 when a and b were already joined.
  int unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return -1;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }
  bool same(int a, int b) { return find(a) == find(b); }
  int set_size(int x) { return size_[find(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// Union-find without path compression whose unions can be undone in LIFO
/// order. Used by the exhaustive bond enumerations, which walk a binary tree
/// of edge decisions and must restore the partition when backtracking.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(int n = 0) { reset(n); }

  void reset(int n) {
    parent_.resize(n);
    size_.assign(n, 1);
    std::iota(parent_.begin(), parent_.end(), 0);
    history_.clear();
  }

  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  /// Joins the roots ra and rb (both must be roots). Returns the surviving root.
  int unite_roots(int ra, int rb) {
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    history_.push_back(rb);
    return ra;
  }
  /// Number of unions performed so far; pass to rollback() to restore.
  std::size_t checkpoint() const { return history_.size(); }
  void rollback(std::size_t mark) {
    while (history_.size() > mark) {
      const int rb = history_.back();
      history_.pop_back();
      const int ra = parent_[rb];
      size_[ra] -= size_[rb];
      parent_[rb] = rb;
    }
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> history_;
};

}  // namespace rfim
