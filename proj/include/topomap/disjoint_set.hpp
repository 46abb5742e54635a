#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace topomap {

class DisjointSet {
public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  std::size_t size() const { return parent_.size(); }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

// Groups element indices by their set representative. Groups are ordered by
// their smallest member, members ascending.
inline std::vector<std::vector<std::size_t>> groups(DisjointSet& ds) {
  const std::size_t n = ds.size();
  std::vector<std::size_t> slot(n, SIZE_MAX);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = ds.find(i);
    if (slot[r] == SIZE_MAX) {
      slot[r] = out.size();
      out.emplace_back();
    }
    out[slot[r]].push_back(i);
  }
  return out;
}

}  // namespace topomap
