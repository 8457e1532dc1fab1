#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rerandb/bits.hpp"
#include "rerandb/errors.hpp"
#include "rerandb/group.hpp"
#include "rerandb/keys.hpp"
#include "rerandb/rng.hpp"

namespace rerandb {

// Per-epoch meter of bits released to the outside world. `spent` never
// exceeds `limit`; the epoch counter advances exactly when spent resets.
struct TransmissionBudget {
  std::uint64_t limit = 0;
  std::uint64_t spent = 0;
  std::uint64_t epoch = 0;

  explicit TransmissionBudget(std::uint64_t r) : limit(r) {
    if (r == 0) throw contract_error("TransmissionBudget: r must be positive");
  }

  std::uint64_t remaining() const { return limit - spent; }
};

// Fresh database string, uniform conditioned on every slot's encoding
// constraint: for slot i the key positions are uniform on the coset
// {y in Z_m^k : sum(y) = values[i]}, everything else i.i.d. uniform.
inline DbString randomize_conditioned(const KeyRegistry& registry,
                                      const std::vector<GroupElem>& values,
                                      GroupModulus m, RngStream& rng) {
  if (values.size() != registry.slots())
    throw contract_error("randomize_conditioned: values/registry mismatch");
  DbString db = sample_uniform_string(m, registry.n(), rng);
  for (std::size_t slot = 0; slot < registry.slots(); ++slot) {
    const SecretKey& key = registry.key(slot);
    if (values[slot] >= m.m)
      throw contract_error("randomize_conditioned: value out of range");
    // First k-1 key positions stay uniform; the last absorbs the constraint.
    GroupElem partial = 0;
    for (std::size_t j = 0; j + 1 < key.k(); ++j)
      partial = group_add(m, partial, db[key.indices[j]]);
    db.set(key.indices.back(),
           group_add(m, values[slot], group_neg(m, partial)));
  }
  return db;
}

// One release of bits from the database, for budget-safety audits.
struct ReleaseRecord {
  std::uint64_t epoch;
  std::uint64_t bits;
};

// The re-randomizing database. Exclusively owned; Monte Carlo parallelism
// runs one Engine per trial.
class Engine {
 public:
  Engine(KeyRegistry registry, std::vector<GroupElem> values, GroupModulus m,
         std::uint64_t refresh_rate_r, RngStream rng)
      : m_(m),
        registry_(std::move(registry)),
        values_(std::move(values)),
        budget_(refresh_rate_r),
        rng_(rng),
        db_(randomize_conditioned(registry_, values_, m_, rng_)) {
    assert(encoding_invariant_holds());
  }

  GroupModulus modulus() const { return m_; }
  const KeyRegistry& registry() const { return registry_; }
  const std::vector<GroupElem>& values() const { return values_; }
  const TransmissionBudget& budget() const { return budget_; }
  const DbString& db() const { return db_; }
  std::uint64_t epoch() const { return budget_.epoch; }

  void set_release_log(std::vector<ReleaseRecord>* log) { release_log_ = log; }

  // Legitimate access: returns values[slot] by reading the k key positions
  // and summing. Served atomically within one epoch: if the k-symbol charge
  // does not fit the remaining budget, re-randomize first.
  GroupElem access(std::size_t slot) {
    if (slot >= registry_.slots())
      throw contract_error("access: slot out of range");
    const SecretKey& key = registry_.key(slot);
    const std::uint64_t cost = key.k() * m_.bits_per_symbol();
    charge_atomic(cost);
    GroupElem acc = 0;
    for (std::uint32_t i : key.indices) acc = group_add(m_, acc, db_[i]);
    assert(acc == values_[slot]);
    return acc;
  }

  // Index-query interface: current database symbols at `indices`.
  std::vector<GroupElem> raw_read(const std::vector<std::uint32_t>& indices) {
    for (std::uint32_t i : indices)
      if (i >= db_.size()) throw contract_error("raw_read: index out of range");
    const std::uint64_t cost = indices.size() * m_.bits_per_symbol();
    if (cost > 0) charge_atomic(cost);
    std::vector<GroupElem> out;
    out.reserve(indices.size());
    for (std::uint32_t i : indices) out.push_back(db_[i]);
    return out;
  }

  // Virus-model extraction: f sees the FULL database snapshot (never the
  // registry or values) and emits `length` bits, charged against the
  // remaining budget of the current epoch. An extraction that does not fit
  // is refused outright, nothing charged.
  BitOutput extract(std::uint32_t length,
                    const std::function<BitOutput(const DbString&)>& f) {
    if (length > budget_.remaining())
      throw budget_error("extract: output exceeds remaining epoch budget");
    BitOutput out = f(db_);
    if (out.length != length)
      throw contract_error("extract: declared and actual length differ");
    budget_.spent += length;
    log_release(length);
    return out;
  }

  // Budget-triggered refresh: spent resets, epoch advances, db is redrawn
  // conditioned on the current values.
  bool maybe_rerandomize() {
    rerandomize();
    return true;
  }

  // Time increment: install new values and re-randomize unconditionally.
  void tick_time(const std::vector<GroupElem>& new_values) {
    if (new_values.size() != registry_.slots())
      throw contract_error("tick_time: values length mismatch");
    values_ = new_values;
    rerandomize();
  }

  bool encoding_invariant_holds() const {
    for (std::size_t slot = 0; slot < registry_.slots(); ++slot)
      if (subset_sum(db_, registry_.key(slot).indices) != values_[slot])
        return false;
    return true;
  }

 private:
  void rerandomize() {
    budget_.spent = 0;
    budget_.epoch += 1;
    db_ = randomize_conditioned(registry_, values_, m_, rng_);
    assert(encoding_invariant_holds());
  }

  // Pre-charge rule: a request that would push `spent` past the limit
  // triggers re-randomization BEFORE being served, so no epoch ever leaks
  // more than r bits.
  void charge_atomic(std::uint64_t cost) {
    if (cost > budget_.limit)
      throw budget_error("request larger than a whole epoch's budget");
    if (budget_.spent + cost > budget_.limit) rerandomize();
    budget_.spent += cost;
    log_release(cost);
  }

  void log_release(std::uint64_t bits) {
    if (release_log_) release_log_->push_back({budget_.epoch, bits});
  }

  GroupModulus m_;
  KeyRegistry registry_;
  std::vector<GroupElem> values_;
  TransmissionBudget budget_;
  RngStream rng_;
  DbString db_;
  std::vector<ReleaseRecord>* release_log_ = nullptr;
};

}  // namespace rerandb
