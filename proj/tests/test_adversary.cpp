#include <catch2/catch_amalgamated.hpp>

#include "rerandb/adversary.hpp"
#include "rerandb/bounds.hpp"
#include "rerandb/montecarlo.hpp"

using namespace rerandb;
using Catch::Matchers::WithinAbs;

TEST_CASE("zero epochs produce an empty transcript") {
  const ConstantStrategy s(2);
  const AdversaryConfig cfg{8, 2, 2, 2, {}};
  const AdversaryTranscript tr = run_adversary(cfg, s, 0, {}, RngStream(1));
  CHECK(tr.outputs.empty());
  CHECK(tr.key.indices.empty());
  CHECK(!tr.budget_violation);
}

TEST_CASE("transcript shapes: t outputs of r bits each") {
  const WindowStrategy s(8, 0, 2);
  const AdversaryConfig cfg{8, 2, 2, 2, {0, 1, 0}};
  const AdversaryTranscript tr = run_adversary(cfg, s, 3, {}, RngStream(2));
  REQUIRE(tr.outputs.size() == 3);
  for (const BitOutput& o : tr.outputs) CHECK(o.length == 2);
  CHECK(tr.key.k() == 2);
  CHECK(tr.bits == std::vector<GroupElem>{0, 1, 0});
}

TEST_CASE("constant strategy output is key-independent verbatim") {
  const ConstantStrategy s(3, 0b010);
  for (std::uint64_t stream = 0; stream < 20; ++stream) {
    const AdversaryConfig cfg{8, 2, 3, 2, {1, 1}};
    const AdversaryTranscript tr =
        run_adversary(cfg, s, 2, {}, RngStream(3, stream));
    for (const BitOutput& o : tr.outputs) CHECK(o == BitOutput(3, 0b010));
  }
}

TEST_CASE("an oversized extraction marks the transcript, not the process") {
  const WindowStrategy s(8, 0, 5);
  const AdversaryConfig cfg{8, 2, 3, 2, {0}};  // r=3 < 5 declared bits
  const AdversaryTranscript tr = run_adversary(cfg, s, 1, {}, RngStream(4));
  CHECK(tr.budget_violation);
  CHECK(tr.outputs.empty());
}

TEST_CASE("simulator runs need no key and honor the epoch count") {
  const WindowStrategy s(6, 0, 2);
  const AdversaryTranscript tr = run_simulator(s, 6, 4, {}, RngStream(5));
  CHECK(tr.outputs.size() == 4);
  CHECK(tr.key.indices.empty());
}

TEST_CASE("posterior stays uniform under a constant strategy") {
  const ConstantStrategy s(2, 0b11);
  Posterior post(6, 2);
  post.update(s, BitOutput(2, 0b11), 0, {}, {});
  const double expect = 1.0 / (15 * 2);
  for (std::size_t h = 0; h < post.keys().size(); ++h)
    for (GroupElem b = 0; b <= 1; ++b)
      CHECK_THAT(post.prob(h, b), WithinAbs(expect, 1e-12));
}

TEST_CASE("posterior after observing db[0], n=2, k=1: hand enumeration") {
  // Observing db[0]=v: key {0} forces bit v (posterior 1/2); key {1} says
  // nothing about its own parity (1/4 each).
  const WindowStrategy s(2, 0, 1);
  for (GroupElem v = 0; v <= 1; ++v) {
    Posterior post(2, 1);
    post.update(s, BitOutput(1, v), 0, {}, {});
    REQUIRE(post.keys() == std::vector<std::uint64_t>{0b01, 0b10});
    CHECK_THAT(post.prob(0, v), WithinAbs(0.5, 1e-12));
    CHECK_THAT(post.prob(0, 1 - v), WithinAbs(0.0, 1e-12));
    CHECK_THAT(post.prob(1, 0), WithinAbs(0.25, 1e-12));
    CHECK_THAT(post.prob(1, 1), WithinAbs(0.25, 1e-12));
  }
}

TEST_CASE("posterior rejects transcripts no database can produce") {
  const ConstantStrategy s(2, 0b00);
  Posterior post(4, 1);
  CHECK_THROWS_AS(post.update(s, BitOutput(2, 0b11), 0, {}, {}),
                  contract_error);
}

TEST_CASE("argmax with ties is uniform over the tied set") {
  RngStream rng(6);
  std::vector<std::uint64_t> hits(3, 0);
  for (int i = 0; i < 3000; ++i)
    ++hits[Posterior::argmax_with_ties({1.0, 1.0, 1.0}, rng)];
  for (std::uint64_t h : hits) CHECK(std::abs(h / 1000.0 - 1.0) < 0.15);
  CHECK(Posterior::argmax_with_ties({0.1, 0.9, 0.3}, rng) == 1);
}

TEST_CASE("wilson interval brackets the point estimate") {
  const WilsonInterval w = wilson_interval(80, 100);
  CHECK(w.lo < 0.8);
  CHECK(w.hi > 0.8);
  CHECK(w.lo > 0.65);
  CHECK(w.hi < 0.92);
  CHECK_THROWS_AS(wilson_interval(0, 0), contract_error);
  const McComparison c = compare_to_bound(10, 100, 0.2);
  CHECK(c.pass);
  CHECK(!compare_to_bound(90, 100, 0.2).pass);
}

TEST_CASE("everlasting advantage of a constant strategy is pure noise") {
  const ConstantStrategy s(2);
  const AdvantageEstimate est =
      everlasting_experiment(8, 2, 2, 2, s, 2000, 7);
  CHECK(std::abs(est.advantage) < 4 * est.sigma);
}

TEST_CASE("full extraction at k=1, t=1 hands the adversary the bit") {
  // OUT is the whole database and the key is revealed afterwards, so the
  // Bayes guess is the key position's parity: always right.
  const WindowStrategy s(6, 0, 6);
  const AdvantageEstimate est = everlasting_experiment(6, 1, 6, 1, s, 300, 8);
  CHECK_THAT(est.tally.rate(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("everlasting sharding offsets compose to the unsharded tally") {
  const WindowStrategy s(6, 0, 2);
  const AdvantageEstimate whole = everlasting_experiment(6, 2, 2, 1, s, 60, 9);
  const AdvantageEstimate a = everlasting_experiment(6, 2, 2, 1, s, 30, 9, 0);
  const AdvantageEstimate b = everlasting_experiment(6, 2, 2, 1, s, 30, 9, 30);
  CHECK(whole.tally.successes == a.tally.successes + b.tally.successes);
}

TEST_CASE("gf2 solver finds the planted sparse solution") {
  // rows x = rhs with x = {0,3} planted on 6 variables
  const std::uint64_t planted = 0b001001;
  std::vector<std::uint64_t> rows{0b000011, 0b001100, 0b110000, 0b001010};
  std::vector<GroupElem> rhs;
  for (std::uint64_t row : rows) rhs.push_back(masked_parity(planted, row));
  const auto sols = gf2_sparse_solutions(rows, rhs, 6, 2);
  CHECK(std::find(sols.begin(), sols.end(), planted) != sols.end());
  for (std::uint64_t s : sols) {
    CHECK(std::popcount(s) == 2);
    for (std::size_t i = 0; i < rows.size(); ++i)
      CHECK(masked_parity(s, rows[i]) == rhs[i]);
  }
  // contradictory system
  rows = {0b000011, 0b000011};
  rhs = {0, 1};
  CHECK(gf2_sparse_solutions(rows, rhs, 6, 2).empty());
}

TEST_CASE("blind parity learner scores the reciprocal binomial") {
  const ExperimentTally t = stream_parity_experiment(8, 2, 5, 0, "blind",
                                                     3000, 10);
  const double p = 1.0 / 28;
  const double sigma = binomial_sigma(p, 3000);
  CHECK(std::abs(t.rate() - p) < 4 * sigma);
}

TEST_CASE("uncompressed examples let gaussian elimination win") {
  const ExperimentTally t =
      stream_parity_experiment(8, 2, 30, 8, "full", 200, 11);
  CHECK(t.rate() > 0.9);
  CHECK_THROWS_AS(stream_parity_experiment(8, 2, 5, 4, "full", 10, 11),
                  contract_error);
}

TEST_CASE("index-compressed learner stays below the corollary budget") {
  const std::size_t n = 10, k = 2, t = 20;
  const std::uint32_t r = 2;
  const ExperimentTally tally =
      stream_parity_experiment(n, k, t, r, "random-index", 500, 12);
  const double inv_binom = 1.0 / binomial(n, k);
  const double bound =
      inv_binom + t * std::pow(double(r) / n, k / 2.0) *
                      std::sqrt(std::exp(log_ck(double(k))));
  CHECK(compare_to_bound(tally.successes, tally.trials, bound).pass);
}

TEST_CASE("index-query experiment replays deterministically") {
  const ExperimentTally a = index_query_experiment(8, 2, 2, 5, "random-index",
                                                   200, 13);
  const ExperimentTally b = index_query_experiment(8, 2, 2, 5, "random-index",
                                                   200, 13);
  CHECK(a.successes == b.successes);
  const ExperimentTally c = index_query_experiment(8, 2, 2, 5, "random-index",
                                                   200, 14);
  CHECK(c.trials == 200);
}
