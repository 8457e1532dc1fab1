#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rerandb/bits.hpp"
#include "rerandb/engine.hpp"
#include "rerandb/errors.hpp"
#include "rerandb/group.hpp"
#include "rerandb/keys.hpp"
#include "rerandb/rng.hpp"
#include "rerandb/strategy.hpp"

namespace rerandb {

// The adversary's entire view of one run: per-epoch outputs plus the hints
// it received. The key is carried only for experiment bookkeeping (success
// accounting); no strategy ever sees it.
struct AdversaryTranscript {
  std::vector<BitOutput> outputs;
  std::vector<Hint> hints;
  SecretKey key;                  // empty for simulator runs
  std::vector<GroupElem> bits;    // b_1..b_t actually encoded
  bool budget_violation = false;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct AdversaryConfig {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t r = 0;
  std::uint32_t m = 2;
  std::vector<GroupElem> bits;  // one stored value per epoch
};

inline std::span<const Hint> hints_through(const std::vector<Hint>& hints,
                                           std::size_t epoch) {
  return {hints.data(), std::min(epoch + 1, hints.size())};
}

// t epochs against a real engine: snapshot -> OUT_e -> re-randomize with
// the next epoch's stored value. A strategy whose declared output does not
// fit the epoch budget is refused and the transcript marks the violation.
inline AdversaryTranscript run_adversary(const AdversaryConfig& cfg,
                                         const ExtractionStrategy& strategy,
                                         std::size_t t,
                                         const std::vector<Hint>& hints,
                                         RngStream rng) {
  if (cfg.bits.size() < t)
    throw contract_error("run_adversary: need one stored value per epoch");
  AdversaryTranscript tr;
  tr.hints = hints;
  tr.bits = {cfg.bits.begin(), cfg.bits.begin() + t};
  tr.seed = rng.seed();
  tr.stream = rng.stream_id();
  if (t == 0) return tr;

  RngStream key_rng = rng.substream(rng.next_u64());
  tr.key = sample_secret_key(cfg.n, cfg.k, key_rng);
  KeyRegistry registry(cfg.n, {tr.key});
  Engine engine(registry, {cfg.bits[0]}, GroupModulus(cfg.m), cfg.r, rng);

  for (std::size_t e = 0; e < t; ++e) {
    const ExtractionContext ctx{tr.outputs, hints_through(hints, e)};
    try {
      tr.outputs.push_back(engine.extract(
          strategy.output_length(),
          [&](const DbString& db) { return strategy.evaluate(db, ctx); }));
    } catch (const budget_error&) {
      tr.budget_violation = true;
      break;
    }
    if (e + 1 < t)
      engine.tick_time({cfg.bits[e + 1]});
    else
      engine.maybe_rerandomize();
  }
  return tr;
}

// The no-database simulator: the identical loop, but every epoch's string
// is unconditionally uniform and no key or engine exists. Its transcript
// distribution is key-independent by construction.
inline AdversaryTranscript run_simulator(const ExtractionStrategy& strategy,
                                         std::size_t n, std::size_t t,
                                         const std::vector<Hint>& hints,
                                         RngStream rng, std::uint32_t m = 2,
                                         std::uint64_t r = 0) {
  AdversaryTranscript tr;
  tr.hints = hints;
  tr.seed = rng.seed();
  tr.stream = rng.stream_id();
  const std::uint64_t budget = r == 0 ? strategy.output_length() : r;
  for (std::size_t e = 0; e < t; ++e) {
    if (strategy.output_length() > budget) {
      tr.budget_violation = true;
      break;
    }
    const DbString db = sample_uniform_string(GroupModulus(m), n, rng);
    const ExtractionContext ctx{tr.outputs, hints_through(hints, e)};
    tr.outputs.push_back(strategy.evaluate(db, ctx));
  }
  return tr;
}

// Exact Bayes posterior over (candidate key, stored bit), maintained by
// summing over all 2^n databases per epoch. Feasible at desk scale only.
class Posterior {
 public:
  Posterior(std::uint32_t n, std::uint32_t k)
      : n_(n), keys_(CandidateTrackingStrategy::enumerate_subsets(n, k)),
        table_(keys_.size() * 2, 1.0 / (keys_.size() * 2.0)) {
    if (n_ > 16) throw capacity_error("Posterior: n > 16");
  }

  const std::vector<std::uint64_t>& keys() const { return keys_; }
  double prob(std::size_t key_index, GroupElem b) const {
    return table_[key_index * 2 + b];
  }

  // Multiply in the likelihood of observing `out` at `epoch` under each
  // (key, bit) hypothesis, then renormalize.
  void update(const ExtractionStrategy& strategy, const BitOutput& out,
              std::size_t epoch, std::span<const BitOutput> prior_outputs,
              std::span<const Hint> hints) {
    (void)epoch;
    const std::uint64_t num_db = 1ULL << n_;
    std::vector<std::uint64_t> match(table_.size(), 0);
    DbString db = DbString::zeros(GroupModulus(2), n_);
    const ExtractionContext ctx{prior_outputs, hints};
    for (std::uint64_t x = 0; x < num_db; ++x) {
      for (std::uint32_t i = 0; i < n_; ++i) db.set(i, (x >> i) & 1u);
      if (strategy.evaluate(db, ctx) != out) continue;
      for (std::size_t h = 0; h < keys_.size(); ++h)
        ++match[h * 2 + masked_parity(x, keys_[h])];
    }
    double total = 0;
    for (std::size_t i = 0; i < table_.size(); ++i) {
      table_[i] *= static_cast<double>(match[i]) / (num_db / 2.0);
      total += table_[i];
    }
    if (total <= 0)
      throw contract_error("Posterior::update: impossible transcript");
    for (double& v : table_) v /= total;
  }

  // Bayes-optimal key guess (marginal over the bit); ties broken uniformly.
  std::uint64_t argmax_key(RngStream& rng) const {
    std::vector<double> marg(keys_.size(), 0.0);
    for (std::size_t h = 0; h < keys_.size(); ++h)
      marg[h] = table_[h * 2] + table_[h * 2 + 1];
    return keys_[argmax_with_ties(marg, rng)];
  }

  static std::size_t argmax_with_ties(const std::vector<double>& v,
                                      RngStream& rng) {
    double best = -1;
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > best + 1e-15) {
        best = v[i];
        ties.assign(1, i);
      } else if (v[i] > best - 1e-15) {
        ties.push_back(i);
      }
    }
    return ties[rng.next_below(ties.size())];
  }

 private:
  std::uint32_t n_;
  std::vector<std::uint64_t> keys_;
  std::vector<double> table_;
};

// --- experiments ---

struct ExperimentTally {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  double rate() const {
    return trials ? static_cast<double>(successes) / trials : 0.0;
  }
};

// Index-query adversary of Observation 1: run an index-query strategy for t
// epochs (stored bits known to the adversary a priori), then guess the key
// from the Bayes posterior over what the queries revealed. A candidate key
// fully covered by an epoch's query set has its weight doubled when the
// observed parity matches the known bit and zeroed when it contradicts it.
inline ExperimentTally index_query_experiment(std::size_t n, std::size_t k,
                                              std::uint32_t r, std::size_t t,
                                              const std::string& policy,
                                              std::uint64_t trials,
                                              std::uint64_t seed,
                                              std::uint64_t first_trial = 0) {
  const std::vector<std::uint64_t> all_keys =
      CandidateTrackingStrategy::enumerate_subsets(n, k);
  ExperimentTally tally;
  tally.trials = trials;
  for (std::uint64_t trial = first_trial; trial < first_trial + trials; ++trial) {
    RngStream rng(seed, trial);
    RngStream bit_rng = rng.substream(rng.next_u64());
    std::vector<GroupElem> bits(t);
    for (auto& b : bits) b = bit_rng.next_bit() ? 1 : 0;

    StrategyParams p;
    p.n = n;
    p.k = k;
    p.length = r;
    p.seed = rng.next_u64();
    p.known_bits = bits;
    const auto strategy = make_strategy(policy, p);

    AdversaryConfig cfg{n, k, r, 2, bits};
    const AdversaryTranscript tr =
        run_adversary(cfg, *strategy, t, {}, rng.substream(rng.next_u64()));

    std::vector<double> weight(all_keys.size(), 1.0);
    for (std::size_t e = 0; e < tr.outputs.size(); ++e) {
      const std::vector<std::uint32_t> q = strategy->query_set(
          e, std::span<const BitOutput>(tr.outputs.data(), e));
      std::uint64_t qmask = 0, obs = 0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        qmask |= 1ULL << q[j];
        obs |= static_cast<std::uint64_t>((tr.outputs[e].bits >> j) & 1)
               << q[j];
      }
      for (std::size_t h = 0; h < all_keys.size(); ++h) {
        if (all_keys[h] & ~qmask) continue;  // not fully observed
        weight[h] *= masked_parity(obs, all_keys[h]) == bits[e] ? 2.0 : 0.0;
      }
    }
    RngStream tie_rng = rng.substream(rng.next_u64());
    const std::uint64_t guess =
        all_keys[Posterior::argmax_with_ties(weight, tie_rng)];
    if (guess == tr.key.mask()) ++tally.successes;
  }
  return tally;
}

struct AdvantageEstimate {
  ExperimentTally tally;
  double advantage = 0;  // success rate - 1/2
  double sigma = 0;
};

// Everlasting-security experiment: bits b_1..b_{t-1} are known to the
// adversary up front, b_t is uniform; after t epochs the key is revealed
// and the bit is guessed Bayes-optimally from (transcript, key).
inline AdvantageEstimate everlasting_experiment(
    std::size_t n, std::size_t k, std::uint32_t r, std::size_t t,
    const ExtractionStrategy& strategy, std::uint64_t trials,
    std::uint64_t seed, std::uint64_t first_trial = 0) {
  if (n > 16) throw capacity_error("everlasting_experiment: n > 16");
  const std::uint64_t num_db = 1ULL << n;
  AdvantageEstimate est;
  est.tally.trials = trials;
  DbString db = DbString::zeros(GroupModulus(2), n);
  for (std::uint64_t trial = first_trial; trial < first_trial + trials; ++trial) {
    RngStream rng(seed, trial);
    RngStream bit_rng = rng.substream(rng.next_u64());
    std::vector<GroupElem> bits(t);
    for (std::size_t e = 0; e + 1 < t; ++e)
      bits[e] = bit_rng.next_bit() ? 1 : 0;
    bits[t - 1] = bit_rng.next_bit() ? 1 : 0;  // the secret bit

    std::vector<Hint> hints(1);
    for (std::size_t e = 0; e + 1 < t; ++e) hints[0].bits.push_back(bits[e]);

    AdversaryConfig cfg{n, k, r, 2, bits};
    const AdversaryTranscript tr =
        run_adversary(cfg, strategy, t, hints, rng.substream(rng.next_u64()));
    const std::uint64_t smask = tr.key.mask();

    // Likelihood of the observed transcript under each value of b_t, with
    // the key known: product over epochs of the conditioned match count.
    double like[2] = {1.0, 1.0};
    for (unsigned hyp = 0; hyp < 2; ++hyp) {
      for (std::size_t e = 0; e < t; ++e) {
        const GroupElem be =
            e + 1 < t ? bits[e] : static_cast<GroupElem>(hyp);
        const ExtractionContext ctx{
            std::span<const BitOutput>(tr.outputs.data(), e),
            hints_through(hints, e)};
        std::uint64_t cnt = 0;
        for (std::uint64_t x = 0; x < num_db; ++x) {
          if (masked_parity(x, smask) != be) continue;
          for (std::uint32_t i = 0; i < n; ++i) db.set(i, (x >> i) & 1u);
          if (strategy.evaluate(db, ctx) == tr.outputs[e]) ++cnt;
        }
        like[hyp] *= static_cast<double>(cnt) / (num_db / 2.0);
      }
    }
    RngStream tie_rng = rng.substream(rng.next_u64());
    unsigned guess;
    if (like[0] > like[1] * (1 + 1e-12))
      guess = 0;
    else if (like[1] > like[0] * (1 + 1e-12))
      guess = 1;
    else
      guess = tie_rng.next_bit() ? 1 : 0;
    if (guess == bits[t - 1]) ++est.tally.successes;
  }
  est.advantage = est.tally.rate() - 0.5;
  est.sigma = std::sqrt(0.25 / static_cast<double>(trials));
  return est;
}

// GF(2) linear solve: rows are n-bit masks, rhs are bits. Returns all
// weight-k solutions (empty if the system is inconsistent or the solution
// space is too large to scan).
inline std::vector<std::uint64_t> gf2_sparse_solutions(
    std::vector<std::uint64_t> rows, std::vector<GroupElem> rhs,
    std::uint32_t n, std::uint32_t k, std::uint32_t max_nullity = 20) {
  const std::size_t t = rows.size();
  std::vector<int> pivot_of_col(n, -1);
  std::size_t rank = 0;
  for (std::uint32_t col = 0; col < n && rank < t; ++col) {
    std::size_t piv = rank;
    while (piv < t && !(rows[piv] & (1ULL << col))) ++piv;
    if (piv == t) continue;
    std::swap(rows[rank], rows[piv]);
    std::swap(rhs[rank], rhs[piv]);
    for (std::size_t i = 0; i < t; ++i)
      if (i != rank && (rows[i] & (1ULL << col))) {
        rows[i] ^= rows[rank];
        rhs[i] ^= rhs[rank];
      }
    pivot_of_col[col] = static_cast<int>(rank);
    ++rank;
  }
  for (std::size_t i = rank; i < t; ++i)
    if (rhs[i]) return {};  // inconsistent

  std::vector<std::uint32_t> free_cols;
  for (std::uint32_t col = 0; col < n; ++col)
    if (pivot_of_col[col] < 0) free_cols.push_back(col);
  if (free_cols.size() > max_nullity) return {};

  std::vector<std::uint64_t> found;
  for (std::uint64_t assign = 0; assign < (1ULL << free_cols.size());
       ++assign) {
    std::uint64_t sol = 0;
    for (std::size_t j = 0; j < free_cols.size(); ++j)
      if ((assign >> j) & 1) sol |= 1ULL << free_cols[j];
    for (std::uint32_t col = 0; col < n; ++col) {
      const int p = pivot_of_col[col];
      if (p < 0) continue;
      GroupElem v = rhs[p];
      for (std::uint32_t c2 = 0; c2 < n; ++c2)
        if (c2 != col && (rows[p] & (1ULL << c2)) && (sol & (1ULL << c2)))
          v ^= 1;
      if (v) sol |= 1ULL << col;
    }
    if (static_cast<std::uint32_t>(std::popcount(sol)) == k)
      found.push_back(sol);
  }
  return found;
}

// Streaming sparse-parity learning under an r-bit-per-example compressor.
// compressor: "full" passes examples verbatim (requires r >= n) and the
// learner solves by Gaussian elimination; "random-index" / "window" /
// "candidate-tracking" compress to index queries and the learner is the
// covered-candidate posterior; "blind" ignores the stream (r = 0).
inline ExperimentTally stream_parity_experiment(
    std::size_t n, std::size_t k, std::size_t t, std::uint32_t r,
    const std::string& compressor, std::uint64_t trials, std::uint64_t seed,
    std::uint64_t first_trial = 0) {
  if (n > 24) throw capacity_error("stream_parity_experiment: n > 24");
  const std::vector<std::uint64_t> all_keys =
      CandidateTrackingStrategy::enumerate_subsets(n, k);
  ExperimentTally tally;
  tally.trials = trials;
  for (std::uint64_t trial = first_trial; trial < first_trial + trials; ++trial) {
    RngStream rng(seed, trial);
    RngStream key_rng = rng.substream(rng.next_u64());
    const SecretKey key = sample_secret_key(n, k, key_rng);
    const std::uint64_t smask = key.mask();

    std::vector<GroupElem> labels(t);
    std::vector<std::uint64_t> examples(t);
    RngStream ex_rng = rng.substream(rng.next_u64());
    for (std::size_t i = 0; i < t; ++i) {
      labels[i] = ex_rng.next_bit() ? 1 : 0;
      std::uint64_t x =
          n == 64 ? ex_rng.next_u64() : ex_rng.next_u64() & ((1ULL << n) - 1);
      if (masked_parity(x, smask) != labels[i])
        x ^= 1ULL << key.indices[0];  // flip one key position: still uniform
      examples[i] = x;
    }

    std::uint64_t guess = 0;
    RngStream tie_rng = rng.substream(rng.next_u64());
    if (compressor == "blind" || r == 0) {
      guess = all_keys[tie_rng.next_below(all_keys.size())];
    } else if (compressor == "full") {
      if (r < n)
        throw contract_error("stream_parity_experiment: full needs r >= n");
      const auto sols = gf2_sparse_solutions(
          examples, labels, static_cast<std::uint32_t>(n),
          static_cast<std::uint32_t>(k));
      guess = sols.empty() ? all_keys[tie_rng.next_below(all_keys.size())]
                           : sols[tie_rng.next_below(sols.size())];
    } else {
      StrategyParams p;
      p.n = n;
      p.k = k;
      p.length = r;
      p.seed = rng.next_u64();
      p.known_bits = labels;
      const auto strat = make_strategy(compressor, p);
      std::vector<BitOutput> outs;
      std::vector<double> weight(all_keys.size(), 1.0);
      for (std::size_t e = 0; e < t; ++e) {
        const std::vector<std::uint32_t> q = strat->query_set(
            e, std::span<const BitOutput>(outs.data(), outs.size()));
        const DbString db = DbString::from_bits(examples[e], n);
        const ExtractionContext ctx{outs, {}};
        outs.push_back(strat->evaluate(db, ctx));
        std::uint64_t qmask = 0, obs = 0;
        for (std::size_t j = 0; j < q.size(); ++j) {
          qmask |= 1ULL << q[j];
          obs |= static_cast<std::uint64_t>((outs[e].bits >> j) & 1) << q[j];
        }
        for (std::size_t h = 0; h < all_keys.size(); ++h) {
          if (all_keys[h] & ~qmask) continue;
          weight[h] *=
              masked_parity(obs, all_keys[h]) == labels[e] ? 2.0 : 0.0;
        }
      }
      guess = all_keys[Posterior::argmax_with_ties(weight, tie_rng)];
    }
    if (guess == smask) ++tally.successes;
  }
  return tally;
}

}  // namespace rerandb
