#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "rerandb/keys.hpp"

using namespace rerandb;

TEST_CASE("forced subsets") {
  RngStream rng(1);
  CHECK(sample_secret_key(4, 4, rng).indices ==
        std::vector<std::uint32_t>{0, 1, 2, 3});
  CHECK(sample_secret_key(1, 1, rng).indices ==
        std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(sample_secret_key(4, 0, rng), contract_error);
  CHECK_THROWS_AS(sample_secret_key(4, 5, rng), contract_error);
}

TEST_CASE("key sampling is uniform over the 15 pairs of a 6-set") {
  const std::uint64_t N = 150000;
  RngStream rng(99);
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < N; ++i)
    ++counts[sample_secret_key(6, 2, rng).mask()];
  REQUIRE(counts.size() == 15);
  const double p = 1.0 / 15;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(N));
  for (const auto& [mask, c] : counts) {
    const double freq = static_cast<double>(c) / N;
    CHECK(std::abs(freq - p) < 4 * sigma);
  }
}

TEST_CASE("secret key invariants") {
  SecretKey key({5, 1, 3});
  CHECK(key.indices == std::vector<std::uint32_t>{1, 3, 5});  // sorted
  CHECK(key.k() == 3);
  CHECK(key.contains(3));
  CHECK(!key.contains(2));
  CHECK(key.mask() == 0b101010);
  CHECK_THROWS_AS(SecretKey({1, 1}), contract_error);
}

TEST_CASE("registry rejects overlapping keys") {
  CHECK_THROWS_AS(KeyRegistry(6, {SecretKey({0, 1}), SecretKey({1, 2})}),
                  contract_error);
  CHECK_THROWS_AS(KeyRegistry(3, {SecretKey({0, 5})}), contract_error);
  const KeyRegistry ok(6, {SecretKey({0, 1}), SecretKey({2, 3})});
  CHECK(ok.slots() == 2);
  CHECK(ok.key(1).indices == std::vector<std::uint32_t>{2, 3});
}

TEST_CASE("disjoint allocation: forced partition of 4 positions into pairs") {
  RngStream rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const KeyRegistry reg = allocate_disjoint_keys(4, 2, 2, rng);
    CHECK((reg.key(0).mask() | reg.key(1).mask()) == 0b1111);
    CHECK((reg.key(0).mask() & reg.key(1).mask()) == 0);
  }
}

TEST_CASE("disjoint allocation: three pairs exhaust 6 positions") {
  RngStream rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const KeyRegistry reg = allocate_disjoint_keys(6, 2, 3, rng);
    std::uint64_t un = 0;
    for (const auto& key : reg.keys()) un |= key.mask();
    CHECK(un == 0b111111);
  }
}

TEST_CASE("disjoint allocation with one slot matches plain key sampling") {
  // Same support: every one of the 15 pairs occurs.
  RngStream rng(8);
  std::map<std::uint64_t, std::uint64_t> counts;
  for (int rep = 0; rep < 4000; ++rep)
    ++counts[allocate_disjoint_keys(6, 2, 1, rng).key(0).mask()];
  CHECK(counts.size() == 15);
}

TEST_CASE("allocation refuses when the positions cannot host the keys") {
  RngStream rng(9);
  CHECK_THROWS_AS(allocate_disjoint_keys(5, 2, 3, rng), capacity_error);
  CHECK_THROWS_AS(allocate_disjoint_keys(5, 0, 1, rng), contract_error);
}
