#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "rerandb/strategy.hpp"

using namespace rerandb;

TEST_CASE("constant strategy ignores the database") {
  ConstantStrategy s(3, 0b101);
  const ExtractionContext ctx{};
  CHECK(s.evaluate(DbString::from_bits(0b000000, 6), ctx) == BitOutput(3, 5));
  CHECK(s.evaluate(DbString::from_bits(0b111111, 6), ctx) == BitOutput(3, 5));
  CHECK(s.output_length() == 3);
}

TEST_CASE("window strategy reads consecutive low bits") {
  WindowStrategy s(8, 2, 3);
  const ExtractionContext ctx{};
  const DbString db = DbString::from_bits(0b10110100, 8);
  // positions 2,3,4 = 1,0,1
  CHECK(s.evaluate(db, ctx) == BitOutput(3, 0b101));
  CHECK(s.query_set(0, {}) == std::vector<std::uint32_t>{2, 3, 4});
  CHECK(s.query_set(9, {}) == std::vector<std::uint32_t>{2, 3, 4});
}

TEST_CASE("rotating window advances by its length each epoch and wraps") {
  WindowStrategy s(6, 0, 4, true);
  CHECK(s.query_set(0, {}) == std::vector<std::uint32_t>{0, 1, 2, 3});
  CHECK(s.query_set(1, {}) == std::vector<std::uint32_t>{4, 5, 0, 1});
  CHECK(s.query_set(2, {}) == std::vector<std::uint32_t>{2, 3, 4, 5});
}

TEST_CASE("random-index schedule is a function of (seed, epoch) only") {
  RandomIndexStrategy s(10, 3, 77);
  RandomIndexStrategy same(10, 3, 77);
  RandomIndexStrategy other(10, 3, 78);
  bool any_difference = false;
  for (std::size_t e = 0; e < 20; ++e) {
    const auto q = s.query_set(e, {});
    CHECK(q == same.query_set(e, {}));
    if (q != other.query_set(e, {})) any_difference = true;
    CHECK(q.size() == 3);
    CHECK(std::set<std::uint32_t>(q.begin(), q.end()).size() == 3);
    for (std::uint32_t i : q) CHECK(i < 10);
  }
  CHECK(any_difference);
}

TEST_CASE("strategies are pure: re-evaluation with equal context agrees") {
  const DbString db = DbString::from_bits(0b1011010011, 10);
  std::vector<BitOutput> prior{BitOutput(2, 0b01)};
  const ExtractionContext ctx{prior, {}};
  for (const char* name : {"window", "rotating-window", "random-index",
                           "candidate-tracking", "constant"}) {
    StrategyParams p;
    p.n = 10;
    p.k = 2;
    p.length = 2;
    p.seed = 5;
    p.known_bits = {0, 1};
    const auto s = make_strategy(name, p);
    CHECK(s->evaluate(db, ctx) == s->evaluate(db, ctx));
  }
}

TEST_CASE("full-width tracking keeps exactly the parity-consistent subsets") {
  // r = n: the first query set covers everything, so after one epoch the
  // surviving candidates are exactly the k-subsets whose parity matches the
  // known stored bit.
  const std::size_t n = 6, k = 2;
  CandidateTrackingStrategy s(n, k, n, {1});
  const DbString db = DbString::from_bits(0b101100, n);
  const ExtractionContext ctx{};
  std::vector<BitOutput> prior{s.evaluate(db, ctx)};
  const auto cand = s.candidates_after(1, prior);
  std::vector<std::uint64_t> expected;
  for (std::uint64_t mask : CandidateTrackingStrategy::enumerate_subsets(n, k))
    if (masked_parity(db.packed_bits(), mask) == 1) expected.push_back(mask);
  CHECK(cand == expected);
}

TEST_CASE("tracking eliminates only covered, contradicted candidates") {
  // Window of width 3 on a 6-position string: after one observation, every
  // candidate inside the window with the wrong parity is gone; candidates
  // sticking outside the window all survive.
  const std::size_t n = 6, k = 2;
  CandidateTrackingStrategy s(n, k, 3, {0});
  const DbString db = DbString::from_bits(0b010110, n);
  const ExtractionContext ctx{};
  std::vector<BitOutput> prior{s.evaluate(db, ctx)};
  const std::vector<std::uint32_t> q = s.query_set(0, {});
  std::uint64_t qmask = 0;
  for (std::uint32_t i : q) qmask |= 1ULL << i;
  const auto cand = s.candidates_after(1, prior);
  for (std::uint64_t mask : CandidateTrackingStrategy::enumerate_subsets(n, k)) {
    const bool covered = (mask & ~qmask) == 0;
    const bool survives =
        std::find(cand.begin(), cand.end(), mask) != cand.end();
    if (!covered)
      CHECK(survives);
    else
      CHECK(survives == (masked_parity(db.packed_bits(), mask) == 0));
  }
}

TEST_CASE("factory covers every shipped strategy and rejects the rest") {
  StrategyParams p;
  p.n = 8;
  p.k = 2;
  p.length = 2;
  CHECK(make_strategy("constant", p)->name() == "constant");
  CHECK(make_strategy("window", p)->name() == "window");
  CHECK(make_strategy("rotating-window", p)->name() == "rotating-window");
  CHECK(make_strategy("full", p)->output_length() == 8);
  CHECK(make_strategy("random-index", p)->name() == "random-index");
  CHECK(make_strategy("candidate-tracking", p)->name() ==
        "candidate-tracking");
  CHECK_THROWS_AS(make_strategy("nope", p), contract_error);
}

TEST_CASE("window refuses lengths beyond the string") {
  CHECK_THROWS_AS(WindowStrategy(4, 0, 5), contract_error);
  CHECK_THROWS_AS(RandomIndexStrategy(4, 5, 0), contract_error);
}
