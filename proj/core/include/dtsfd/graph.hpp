#pragma once

#include <compare>
#include <set>

namespace dtsfd {

// Unordered node pair stored with i < j (0-based).
struct Edge {
  int i = 0;
  int j = 0;

  auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(int a, int b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

using EdgeSet = std::set<Edge>;

}  // namespace dtsfd
