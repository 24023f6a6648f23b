#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace cohlab {

using Edge = std::pair<int, int>;

inline constexpr int kLamanMaxVertices = 7;

/// Generic rigidity in the plane by exhaustive search: true iff some set of
/// 2n - 3 of the given edges has at most 2n' - 3 edges on every subset of
/// n' >= 2 vertices. Edge {i, j} uses bit pair_index(n, i, j), matching the
/// Cayley-Menger coordinate order. Throws std::invalid_argument for n > 7,
/// loops, repeated edges or out-of-range vertices.
bool laman_brute_oracle(int n, const std::vector<Edge>& edges);

/// Same test on an edge bitmask over pair indices.
bool laman_brute_oracle(int n, std::uint32_t edge_mask);

/// Every edge set of size 2n - 3 on K_n meeting the hereditary count, sorted.
/// Built once per n, in parallel.
const std::vector<std::uint32_t>& laman_bases(int n);

namespace serial {
/// Single-threaded reference enumeration for cohlab::laman_bases.
std::vector<std::uint32_t> laman_bases(int n);
}  // namespace serial

}  // namespace cohlab
