#include <catch2/catch_amalgamated.hpp>

#include "rerandb/group.hpp"

using namespace rerandb;

TEST_CASE("group_add matches modular addition") {
  CHECK(group_add(GroupModulus(2), 1, 1) == 0);
  CHECK(group_add(GroupModulus(2), 0, 1) == 1);
  CHECK(group_add(GroupModulus(5), 3, 4) == 2);
  CHECK_THROWS_AS(group_add(GroupModulus(3), 3, 0), contract_error);
}

TEST_CASE("group laws hold for every modulus up to 16") {
  for (std::uint32_t mm = 2; mm <= 16; ++mm) {
    const GroupModulus m(mm);
    for (GroupElem a = 0; a < mm; ++a) {
      CHECK(group_add(m, a, group_neg(m, a)) == 0);
      CHECK(group_add(m, a, 0) == a);
      for (GroupElem b = 0; b < mm; ++b) {
        CHECK(group_add(m, a, b) == group_add(m, b, a));
        for (GroupElem c = 0; c < mm; ++c)
          CHECK(group_add(m, group_add(m, a, b), c) ==
                group_add(m, a, group_add(m, b, c)));
      }
    }
  }
}

TEST_CASE("bits per symbol is ceil(log2 m)") {
  CHECK(GroupModulus(2).bits_per_symbol() == 1);
  CHECK(GroupModulus(3).bits_per_symbol() == 2);
  CHECK(GroupModulus(4).bits_per_symbol() == 2);
  CHECK(GroupModulus(5).bits_per_symbol() == 3);
  CHECK(GroupModulus(256).bits_per_symbol() == 8);
  CHECK_THROWS_AS(GroupModulus(1), contract_error);
}

TEST_CASE("sign convention is a homomorphism from XOR to multiplication") {
  CHECK(to_sign(0) == +1);
  CHECK(to_sign(1) == -1);
  for (GroupElem a = 0; a <= 1; ++a)
    for (GroupElem b = 0; b <= 1; ++b)
      CHECK(to_sign(group_add(GroupModulus(2), a, b)) ==
            to_sign(a) * to_sign(b));
  CHECK_THROWS_AS(to_sign(2), contract_error);
}

TEST_CASE("subset_sum on small examples") {
  const DbString db2(GroupModulus(2), {1, 0, 1, 1});
  CHECK(subset_sum(db2, std::vector<std::uint32_t>{0, 2}) == 0);
  CHECK(subset_sum(db2, std::vector<std::uint32_t>{0, 3}) == 0);
  CHECK(subset_sum(db2, std::vector<std::uint32_t>{1, 3}) == 1);
  const DbString db3(GroupModulus(3), {2, 1, 0});
  CHECK(subset_sum(db3, std::vector<std::uint32_t>{0, 1}) == 0);
  CHECK(subset_sum(db2, std::vector<std::uint32_t>{}) == 0);
  CHECK_THROWS_AS(subset_sum(db2, std::vector<std::uint32_t>{0, 0}),
                  contract_error);
  CHECK_THROWS_AS(subset_sum(db2, std::vector<std::uint32_t>{7}),
                  contract_error);
}

TEST_CASE("DbString packing round-trips") {
  for (std::uint64_t x = 0; x < 64; ++x) {
    const DbString db = DbString::from_bits(x, 6);
    CHECK(db.packed_bits() == x);
    for (std::size_t i = 0; i < 6; ++i) CHECK(db[i] == ((x >> i) & 1));
  }
  CHECK_THROWS_AS(DbString(GroupModulus(2), {2}), contract_error);
  CHECK_THROWS_AS(DbString(GroupModulus(3), {0}).packed_bits(),
                  contract_error);
}

TEST_CASE("masked_parity agrees with subset_sum on packed strings") {
  for (std::uint64_t x = 0; x < 32; ++x)
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
      const DbString db = DbString::from_bits(x, 5);
      std::vector<std::uint32_t> idx;
      for (std::uint32_t i = 0; i < 5; ++i)
        if (mask & (1ULL << i)) idx.push_back(i);
      CHECK(masked_parity(x, mask) == subset_sum(db, idx));
    }
}

TEST_CASE("rng streams replay bit-identically") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(42, 8);
  CHECK(a.next_u64() != c.next_u64());
  CHECK(a.substream(3).next_u64() == b.substream(3).next_u64());
}

TEST_CASE("rng uniformity: per-value frequencies within 4 sigma") {
  const std::uint64_t N = 100000;
  const std::uint32_t m = 5;
  std::vector<std::uint64_t> counts(m, 0);
  RngStream rng(2024);
  for (std::uint64_t i = 0; i < N; ++i) ++counts[rng.next_below(m)];
  const double p = 1.0 / m;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(N));
  for (std::uint32_t v = 0; v < m; ++v) {
    const double freq = static_cast<double>(counts[v]) / N;
    CHECK(std::abs(freq - p) < 4 * sigma);
  }
}

TEST_CASE("uniform bit fraction over 2e4 draws") {
  const std::uint64_t N = 20000;
  RngStream rng(7);
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < N; ++i) {
    const DbString db = sample_uniform_string(GroupModulus(2), 1, rng);
    ones += db[0];
  }
  const double frac = static_cast<double>(ones) / N;
  CHECK(std::abs(frac - 0.5) < 0.015);
}
