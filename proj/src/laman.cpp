#include "cohlab/laman.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <mutex>
#include <stdexcept>
#include <string>

#include "cohlab/variety.hpp"

namespace cohlab {

namespace {

void check_vertex_count(int n) {
  if (n < 1 || n > kLamanMaxVertices)
    throw std::invalid_argument("laman_brute_oracle: n must lie in [1, " + std::to_string(kLamanMaxVertices) +
                                "], got " + std::to_string(n));
}

// For every vertex subset, the bitmask of K_n edges with both ends inside it.
std::vector<std::uint32_t> induced_edge_masks(int n) {
  std::vector<std::uint32_t> inside(std::size_t{1} << n, 0);
  for (std::uint32_t vs = 0; vs < inside.size(); ++vs)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if ((vs >> i & 1u) && (vs >> j & 1u)) inside[vs] |= 1u << pair_index(n, i, j);
  return inside;
}

bool hereditary_count_holds(std::uint32_t edges, const std::vector<std::uint32_t>& inside) {
  for (std::uint32_t vs = 0; vs < inside.size(); ++vs) {
    const int verts = std::popcount(vs);
    if (verts < 2) continue;
    if (std::popcount(edges & inside[vs]) > 2 * verts - 3) return false;
  }
  return true;
}

int edge_count(int n) { return n * (n - 1) / 2; }
int basis_size(int n) { return n >= 2 ? 2 * n - 3 : 0; }

}  // namespace

namespace serial {
std::vector<std::uint32_t> laman_bases(int n) {
  check_vertex_count(n);
  const auto inside = induced_edge_masks(n);
  const std::uint32_t limit = 1u << edge_count(n);
  std::vector<std::uint32_t> out;
  for (std::uint32_t e = 0; e < limit; ++e)
    if (std::popcount(e) == basis_size(n) && hereditary_count_holds(e, inside)) out.push_back(e);
  return out;
}
}  // namespace serial

const std::vector<std::uint32_t>& laman_bases(int n) {
  check_vertex_count(n);
  static std::array<std::vector<std::uint32_t>, kLamanMaxVertices + 1> tables;
  static std::array<std::once_flag, kLamanMaxVertices + 1> built;
  std::call_once(built[static_cast<std::size_t>(n)], [n] {
    const auto inside = induced_edge_masks(n);
    const long limit = 1L << edge_count(n);
    std::vector<std::uint32_t> out;
#pragma omp parallel
    {
      std::vector<std::uint32_t> local;
#pragma omp for schedule(dynamic, 4096) nowait
      for (long e = 0; e < limit; ++e) {
        const auto mask = static_cast<std::uint32_t>(e);
        if (std::popcount(mask) == basis_size(n) && hereditary_count_holds(mask, inside)) local.push_back(mask);
      }
#pragma omp critical
      out.insert(out.end(), local.begin(), local.end());
    }
    std::sort(out.begin(), out.end());
    tables[static_cast<std::size_t>(n)] = std::move(out);
  });
  return tables[static_cast<std::size_t>(n)];
}

bool laman_brute_oracle(int n, std::uint32_t edge_mask) {
  check_vertex_count(n);
  if (n == 1) return true;
  const auto& bases = laman_bases(n);
  return std::any_of(bases.begin(), bases.end(), [&](std::uint32_t b) { return (b & edge_mask) == b; });
}

bool laman_brute_oracle(int n, const std::vector<Edge>& edges) {
  check_vertex_count(n);
  std::uint32_t mask = 0;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("laman_brute_oracle: vertex out of range");
    if (i == j) throw std::invalid_argument("laman_brute_oracle: loops are not allowed");
    const std::uint32_t bit = 1u << pair_index(n, i, j);
    if (mask & bit) throw std::invalid_argument("laman_brute_oracle: repeated edge");
    mask |= bit;
  }
  return laman_brute_oracle(n, mask);
}

}  // namespace cohlab
