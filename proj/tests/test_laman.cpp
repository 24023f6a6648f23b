#include <doctest.h>

#include <algorithm>

#include "cohlab/laman.hpp"
#include "cohlab/variety.hpp"

using namespace cohlab;

TEST_CASE("small frameworks") {
  CHECK(laman_brute_oracle(3, {{0, 1}, {1, 2}, {0, 2}}));
  CHECK_FALSE(laman_brute_oracle(3, {{0, 1}, {1, 2}}));
  CHECK_FALSE(laman_brute_oracle(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  CHECK(laman_brute_oracle(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}));
  CHECK(laman_brute_oracle(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  // Two triangles sharing a vertex flex about it.
  CHECK_FALSE(laman_brute_oracle(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}}));
  CHECK(laman_brute_oracle(1, std::vector<Edge>{}));
  CHECK(laman_brute_oracle(2, {{0, 1}}));
  CHECK_FALSE(laman_brute_oracle(2, std::vector<Edge>{}));
}

TEST_CASE("bitmask uses pair order") {
  // K4 minus {2,3}: pairs 0..4 of (01,02,03,12,13,23).
  CHECK(laman_brute_oracle(4, 0b011111u));
  CHECK_FALSE(laman_brute_oracle(4, 0b101101u));
  CHECK(pair_index(4, 2, 3) == 5);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(laman_brute_oracle(8, std::vector<Edge>{}), std::invalid_argument);
  CHECK_THROWS_AS(laman_brute_oracle(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(laman_brute_oracle(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(laman_brute_oracle(3, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("labeled minimally rigid graph counts") {
  // Counted independently by subset enumeration.
  CHECK(laman_bases(2).size() == 1);
  CHECK(laman_bases(3).size() == 1);
  CHECK(laman_bases(4).size() == 6);
  CHECK(laman_bases(5).size() == 100);
  CHECK(laman_bases(6).size() == 3355);
}

TEST_CASE("parallel bases match the serial reference") {
  for (int n = 2; n <= 6; ++n) CHECK(laman_bases(n) == serial::laman_bases(n));
  const auto& b = laman_bases(6);
  CHECK(std::is_sorted(b.begin(), b.end()));
}

TEST_CASE("rigidity is monotone under adding edges") {
  const int n = 5, pairs = 10;
  for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
    if (!laman_brute_oracle(n, mask)) continue;
    for (int e = 0; e < pairs; ++e) CHECK(laman_brute_oracle(n, mask | (1u << e)));
  }
}
