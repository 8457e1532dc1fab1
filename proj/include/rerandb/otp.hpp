#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rerandb/adversary.hpp"
#include "rerandb/engine.hpp"
#include "rerandb/errors.hpp"
#include "rerandb/group.hpp"
#include "rerandb/keys.hpp"
#include "rerandb/rng.hpp"
#include "rerandb/strategy.hpp"

namespace rerandb {

// The randomness-serving database of the refreshable one-time pad. Unlike
// the storage engine there is no stored secret: every re-randomization is
// an unconditioned uniform redraw.
class PadDatabase {
 public:
  PadDatabase(std::size_t n, std::uint64_t refresh_rate_r, RngStream rng)
      : budget_(refresh_rate_r), rng_(rng),
        pad_(sample_uniform_string(GroupModulus(2), n, rng_)) {}

  const DbString& pad() const { return pad_; }
  std::uint64_t epoch() const { return budget_.epoch; }
  const TransmissionBudget& budget() const { return budget_; }

  // Metered read, same pre-charge rule as the storage engine.
  std::vector<GroupElem> read(const std::vector<std::uint32_t>& indices) {
    const std::uint64_t cost = indices.size();
    if (cost > budget_.limit)
      throw budget_error("PadDatabase::read: larger than epoch budget");
    if (budget_.spent + cost > budget_.limit) rerandomize();
    budget_.spent += cost;
    std::vector<GroupElem> out;
    out.reserve(indices.size());
    for (std::uint32_t i : indices) {
      if (i >= pad_.size())
        throw contract_error("PadDatabase::read: index out of range");
      out.push_back(pad_[i]);
    }
    return out;
  }

  // Virus-model extraction from the pad, charged like any other release.
  BitOutput extract(std::uint32_t length,
                    const std::function<BitOutput(const DbString&)>& f) {
    if (length > budget_.limit - budget_.spent)
      throw budget_error("PadDatabase::extract: exceeds remaining budget");
    BitOutput out = f(pad_);
    if (out.length != length)
      throw contract_error("PadDatabase::extract: length mismatch");
    budget_.spent += length;
    return out;
  }

  void rerandomize() {
    budget_.spent = 0;
    budget_.epoch += 1;
    pad_ = sample_uniform_string(GroupModulus(2), pad_.size(), rng_);
  }

 private:
  TransmissionBudget budget_;
  RngStream rng_;
  DbString pad_;
};

// Key sets shared by Alice and Bob, with the last pad epoch each set was
// used in. A set never encrypts twice within one pad epoch.
class PadKeyRing {
 public:
  explicit PadKeyRing(std::vector<SecretKey> sets)
      : sets_(std::move(sets)),
        last_used_epoch_(sets_.size(), NO_EPOCH) {}

  std::size_t size() const { return sets_.size(); }
  const SecretKey& set(std::size_t slot) const { return sets_.at(slot); }

  bool fresh(std::size_t slot, std::uint64_t epoch) const {
    return last_used_epoch_.at(slot) != epoch;
  }
  void mark_used(std::size_t slot, std::uint64_t epoch) {
    last_used_epoch_.at(slot) = epoch;
  }

 private:
  static constexpr std::uint64_t NO_EPOCH = ~0ULL;
  std::vector<SecretKey> sets_;
  std::vector<std::uint64_t> last_used_epoch_;
};

// What crosses the insecure channel: the masked bit plus the public slot
// id and a sequence number. The indices themselves never appear.
struct PublicMessage {
  GroupElem ciphertext = 0;
  std::uint32_t slot = 0;
  std::uint64_t sequence = 0;

  std::string to_json_line() const {
    return "{\"ciphertext\":" + std::to_string(ciphertext) +
           ",\"slot\":" + std::to_string(slot) +
           ",\"sequence\":" + std::to_string(sequence) + "}";
  }
};

struct OtpSession {
  PadKeyRing ring;          // shared by Alice and Bob
  PadDatabase database;
  std::uint64_t next_sequence = 0;
};

// num_sets independent uniform k-subsets (overlap across slots permitted;
// the freshness rule is per set, per pad epoch), pad initialized uniform.
inline OtpSession otp_setup(std::size_t n, std::size_t k,
                            std::size_t num_sets, std::uint64_t refresh_rate_r,
                            RngStream rng) {
  std::vector<SecretKey> sets;
  sets.reserve(num_sets);
  RngStream key_rng = rng.substream(rng.next_u64());
  for (std::size_t i = 0; i < num_sets; ++i)
    sets.push_back(sample_secret_key(n, k, key_rng));
  return OtpSession{PadKeyRing(std::move(sets)),
                    PadDatabase(n, refresh_rate_r, rng.substream(1)), 0};
}

// Alice: read the pad at the slot's indices (a metered database read) and
// mask the message bit. Refused if the slot already encrypted this epoch.
inline PublicMessage otp_encrypt(OtpSession& s, std::size_t slot,
                                 GroupElem b) {
  if (b > 1) throw contract_error("otp_encrypt: message must be a bit");
  const SecretKey& key = s.ring.set(slot);
  if (!s.ring.fresh(slot, s.database.epoch()))
    throw freshness_error("otp_encrypt: slot already used this pad epoch");
  const std::vector<GroupElem> pad_bits = s.database.read(key.indices);
  GroupElem mask = 0;
  for (GroupElem v : pad_bits) mask ^= v;
  s.ring.mark_used(slot, s.database.epoch());
  return PublicMessage{static_cast<GroupElem>(b ^ mask),
                       static_cast<std::uint32_t>(slot), s.next_sequence++};
}

// Bob: read the same indices and unmask. Correct only while the pad epoch
// matches the one the message was encrypted under; after a re-randomization
// the decode is a coin flip.
inline GroupElem otp_decrypt(OtpSession& s, const PublicMessage& msg) {
  if (msg.slot >= s.ring.size())
    throw contract_error("otp_decrypt: unknown slot");
  const std::vector<GroupElem> pad_bits =
      s.database.read(s.ring.set(msg.slot).indices);
  GroupElem mask = 0;
  for (GroupElem v : pad_bits) mask ^= v;
  return msg.ciphertext ^ mask;
}

// Eavesdropper experiment: per trial the adversary sees the ciphertext and
// an r-bit extraction from the pad (taken before Alice's read), and guesses
// the message bit Bayes-optimally over pads and key sets. t = 1 epoch.
inline AdvantageEstimate otp_eavesdropper_experiment(
    std::size_t n, std::size_t k, std::uint32_t r, std::uint64_t trials,
    std::uint64_t seed, std::uint64_t first_trial = 0) {
  if (n > 16) throw capacity_error("otp_eavesdropper_experiment: n > 16");
  const std::vector<std::uint64_t> all_keys =
      CandidateTrackingStrategy::enumerate_subsets(n, k);
  const std::uint64_t num_db = 1ULL << n;
  AdvantageEstimate est;
  est.tally.trials = trials;
  DbString buf = DbString::zeros(GroupModulus(2), n);
  for (std::uint64_t trial = first_trial; trial < first_trial + trials; ++trial) {
    RngStream rng(seed, trial);
    // generous budget: one extraction plus both parties' k-bit reads
    OtpSession session = otp_setup(n, k, 1, r + 2 * k + 1,
                                   rng.substream(rng.next_u64()));
    const GroupElem b = rng.next_bit() ? 1 : 0;

    BitOutput out(0, 0);
    std::unique_ptr<ExtractionStrategy> strat;
    if (r > 0) {
      StrategyParams p;
      p.n = n;
      p.length = r;
      p.seed = rng.next_u64();
      strat = make_strategy("random-index", p);
      const ExtractionContext ctx{};
      out = session.database.extract(r, [&](const DbString& pad) {
        return strat->evaluate(pad, ctx);
      });
    }
    const PublicMessage msg = otp_encrypt(session, 0, b);

    // Posterior over the message bit given (OUT, ciphertext), uniform over
    // pads and key sets: count pads matching OUT, split by pad parity.
    const ExtractionContext ctx{};
    double like[2] = {0.0, 0.0};
    for (std::uint64_t x = 0; x < num_db; ++x) {
      if (r > 0) {
        for (std::uint32_t i = 0; i < n; ++i) buf.set(i, (x >> i) & 1u);
        if (strat->evaluate(buf, ctx) != out) continue;
      }
      for (std::uint64_t smask : all_keys) {
        const GroupElem parity = masked_parity(x, smask);
        like[msg.ciphertext ^ parity] += 1.0;
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
    if (guess == b) ++est.tally.successes;
  }
  est.advantage = est.tally.rate() - 0.5;
  est.sigma = std::sqrt(0.25 / static_cast<double>(trials));
  return est;
}

}  // namespace rerandb
