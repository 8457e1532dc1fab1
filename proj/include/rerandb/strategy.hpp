#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rerandb/bits.hpp"
#include "rerandb/errors.hpp"
#include "rerandb/group.hpp"
#include "rerandb/keys.hpp"
#include "rerandb/rng.hpp"

namespace rerandb {

// Opaque payload delivered to the adversary between epochs. Canonical kinds
// are "none", "previous bits", and "all bits"; anything goes.
struct Hint {
  std::vector<GroupElem> bits;
};

// Everything a strategy may see besides the database snapshot. The harness
// re-invokes the evaluator fresh each epoch with exactly these inputs, so a
// strategy cannot smuggle state across re-randomizations.
struct ExtractionContext {
  std::span<const BitOutput> prior_outputs;
  std::span<const Hint> hints;
};

// The per-epoch extraction function f: (db, OUT_{[t-1]}, H_{[t]}) -> r bits.
// Implementations must be pure functions of their declared inputs; any
// randomness is derived from a seed fixed at construction so the exact
// enumeration oracles stay valid.
class ExtractionStrategy {
 public:
  virtual ~ExtractionStrategy() = default;

  virtual std::string name() const = 0;
  virtual std::uint32_t output_length() const = 0;
  virtual BitOutput evaluate(const DbString& db,
                             const ExtractionContext& ctx) const = 0;

  // Index-query strategies additionally expose the positions they read in
  // a given epoch, so guessers can reconstruct what was observed. Empty for
  // strategies that compute arbitrary functions of the database.
  virtual std::vector<std::uint32_t> query_set(
      std::size_t epoch, std::span<const BitOutput> prior_outputs) const {
    (void)epoch;
    (void)prior_outputs;
    return {};
  }
};

// Emits a fixed bit pattern regardless of the database. Reveals nothing.
class ConstantStrategy : public ExtractionStrategy {
 public:
  ConstantStrategy(std::uint32_t length, std::uint64_t value = 0)
      : out_(length, value) {}

  std::string name() const override { return "constant"; }
  std::uint32_t output_length() const override { return out_.length; }
  BitOutput evaluate(const DbString&, const ExtractionContext&) const override {
    return out_;
  }

 private:
  BitOutput out_;
};

// Reads `length` consecutive positions starting at `offset` (low bit of each
// symbol). With `rotate` the window advances by `length` each epoch.
class WindowStrategy : public ExtractionStrategy {
 public:
  WindowStrategy(std::size_t n, std::uint32_t offset, std::uint32_t length,
                 bool rotate = false)
      : n_(n), offset_(offset), length_(length), rotate_(rotate) {
    if (length_ > n_) throw contract_error("WindowStrategy: length > n");
  }

  std::string name() const override {
    return rotate_ ? "rotating-window" : "window";
  }
  std::uint32_t output_length() const override { return length_; }

  std::vector<std::uint32_t> query_set(
      std::size_t epoch, std::span<const BitOutput>) const override {
    const std::size_t base =
        rotate_ ? (offset_ + epoch * length_) % n_ : offset_;
    std::vector<std::uint32_t> q(length_);
    for (std::uint32_t j = 0; j < length_; ++j)
      q[j] = static_cast<std::uint32_t>((base + j) % n_);
    return q;
  }

  BitOutput evaluate(const DbString& db,
                     const ExtractionContext& ctx) const override {
    return read_bits(db, query_set(ctx.prior_outputs.size(), {}));
  }

  static BitOutput read_bits(const DbString& db,
                             const std::vector<std::uint32_t>& q) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < q.size(); ++j)
      bits |= static_cast<std::uint64_t>(db[q[j]] & 1u) << j;
    return BitOutput(static_cast<std::uint32_t>(q.size()), bits);
  }

 private:
  std::size_t n_;
  std::uint32_t offset_;
  std::uint32_t length_;
  bool rotate_;
};

// Queries `length` positions chosen pseudorandomly per epoch from a seed
// fixed at construction. The schedule depends only on (seed, epoch), never
// on the database, so the strategy remains a deterministic function of its
// declared inputs.
class RandomIndexStrategy : public ExtractionStrategy {
 public:
  RandomIndexStrategy(std::size_t n, std::uint32_t length, std::uint64_t seed)
      : n_(n), length_(length), seed_(seed) {
    if (length_ > n_) throw contract_error("RandomIndexStrategy: length > n");
  }

  std::string name() const override { return "random-index"; }
  std::uint32_t output_length() const override { return length_; }

  std::vector<std::uint32_t> query_set(
      std::size_t epoch, std::span<const BitOutput>) const override {
    RngStream rng(seed_, epoch);
    std::vector<std::uint32_t> q;
    q.reserve(length_);
    while (q.size() < length_) {
      auto i = static_cast<std::uint32_t>(rng.next_below(n_));
      if (std::find(q.begin(), q.end(), i) == q.end()) q.push_back(i);
    }
    return q;
  }

  BitOutput evaluate(const DbString& db,
                     const ExtractionContext& ctx) const override {
    return WindowStrategy::read_bits(db,
                                     query_set(ctx.prior_outputs.size(), {}));
  }

 private:
  std::size_t n_;
  std::uint32_t length_;
  std::uint64_t seed_;
};

// Index-query strategy that tracks the keys still consistent with every
// past observation and queries so as to cover as many surviving candidates
// as possible. The candidate set is reconstructed from scratch out of the
// prior outputs each epoch (memory discipline), using the stored-bit
// sequence the adversary knows a priori in the Observation 1 setting.
class CandidateTrackingStrategy : public ExtractionStrategy {
 public:
  CandidateTrackingStrategy(std::size_t n, std::size_t k, std::uint32_t length,
                            std::vector<GroupElem> known_bits)
      : n_(n), k_(k), length_(length), known_bits_(std::move(known_bits)) {
    if (n_ > 24) throw capacity_error("CandidateTrackingStrategy: n > 24");
    if (length_ > n_) throw contract_error("CandidateTrackingStrategy: length > n");
    all_candidates_ = enumerate_subsets(n_, k_);
  }

  std::string name() const override { return "candidate-tracking"; }
  std::uint32_t output_length() const override { return length_; }

  std::vector<std::uint32_t> query_set(
      std::size_t epoch, std::span<const BitOutput> prior) const override {
    return select_queries(candidates_after(epoch, prior));
  }

  BitOutput evaluate(const DbString& db,
                     const ExtractionContext& ctx) const override {
    return WindowStrategy::read_bits(
        db, query_set(ctx.prior_outputs.size(), ctx.prior_outputs));
  }

  // Keys consistent with the first `epochs` observations: a candidate S is
  // eliminated once some query set covered it and the observed parity
  // disagreed with the known stored bit for that epoch.
  std::vector<std::uint64_t> candidates_after(
      std::size_t epochs, std::span<const BitOutput> prior) const {
    std::vector<std::uint64_t> cand = all_candidates_;
    for (std::size_t e = 0; e < epochs && e < prior.size(); ++e) {
      const std::vector<std::uint32_t> q = select_queries(cand);
      std::uint64_t qmask = 0, obs = 0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        qmask |= 1ULL << q[j];
        obs |= static_cast<std::uint64_t>((prior[e].bits >> j) & 1) << q[j];
      }
      const GroupElem b = e < known_bits_.size() ? known_bits_[e] : 0;
      std::erase_if(cand, [&](std::uint64_t s) {
        return (s & ~qmask) == 0 && masked_parity(obs, s) != b;
      });
    }
    return cand;
  }

  static std::vector<std::uint64_t> enumerate_subsets(std::size_t n,
                                                      std::size_t k) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = 0; s < (1ULL << n); ++s)
      if (static_cast<std::size_t>(std::popcount(s)) == k) out.push_back(s);
    return out;
  }

 private:
  // Greedy cover: repeatedly take the position occurring in the most
  // candidates whose remaining positions are already chosen or still open.
  std::vector<std::uint32_t> select_queries(
      const std::vector<std::uint64_t>& cand) const {
    std::vector<std::uint32_t> freq(n_, 0);
    for (std::uint64_t s : cand)
      for (std::size_t i = 0; i < n_; ++i)
        if (s & (1ULL << i)) ++freq[i];
    std::vector<std::uint32_t> order(n_);
    for (std::size_t i = 0; i < n_; ++i)
      order[i] = static_cast<std::uint32_t>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return freq[a] > freq[b];
                     });
    order.resize(length_);
    std::sort(order.begin(), order.end());
    return order;
  }

  std::size_t n_;
  std::size_t k_;
  std::uint32_t length_;
  std::vector<GroupElem> known_bits_;
  std::vector<std::uint64_t> all_candidates_;
};

struct StrategyParams {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint32_t length = 0;
  std::uint32_t offset = 0;
  std::uint64_t seed = 0;
  std::uint64_t constant_value = 0;
  std::vector<GroupElem> known_bits;
};

inline std::unique_ptr<ExtractionStrategy> make_strategy(
    const std::string& name, const StrategyParams& p) {
  if (name == "constant")
    return std::make_unique<ConstantStrategy>(p.length, p.constant_value);
  if (name == "window")
    return std::make_unique<WindowStrategy>(p.n, p.offset, p.length, false);
  if (name == "rotating-window")
    return std::make_unique<WindowStrategy>(p.n, p.offset, p.length, true);
  if (name == "full")
    return std::make_unique<WindowStrategy>(
        p.n, 0, static_cast<std::uint32_t>(p.n), false);
  if (name == "random-index")
    return std::make_unique<RandomIndexStrategy>(p.n, p.length, p.seed);
  if (name == "candidate-tracking")
    return std::make_unique<CandidateTrackingStrategy>(p.n, p.k, p.length,
                                                       p.known_bits);
  throw contract_error("unknown strategy: " + name);
}

}  // namespace rerandb
