#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rerandb/engine.hpp"
#include "rerandb/errors.hpp"
#include "rerandb/group.hpp"
#include "rerandb/keys.hpp"
#include "rerandb/strategy.hpp"

namespace rerandb {

using Rational = boost::multiprecision::cpp_rational;

// Explicit probability table over a finite outcome space (outcomes are the
// vector indices; both tables of a comparison must agree on the indexing).
struct DistTable {
  std::vector<double> probs;

  double total() const {
    double s = 0;
    for (double p : probs) s += p;
    return s;
  }
};

// Total variation distance (1/2) sum |p - q|.
inline double tv_distance(const DistTable& p, const DistTable& q) {
  if (p.probs.size() != q.probs.size())
    throw contract_error("tv_distance: outcome spaces differ");
  double s = 0;
  for (std::size_t i = 0; i < p.probs.size(); ++i)
    s += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * s;
}

// Which conditioning the enumeration applies to the stored bit.
enum class BitMode { fixed_zero, fixed_one, uniform };

// Exact TV distance between the joint distributions
//   <OUT, key, parity>  (database uniform on {0,1}^n)  and
//   <OUT, uniform key, uniform bit>,
// computed by enumerating all 2^n databases. With a fixed-bit mode, the
// real side enumerates databases conditioned on that key parity and the
// compared tuples drop the parity coordinate.
inline double exact_joint_distance(const ExtractionStrategy& strategy,
                                   std::uint32_t n, std::uint32_t k,
                                   std::uint32_t r,
                                   BitMode mode = BitMode::uniform) {
  if (n > 22) throw capacity_error("exact_joint_distance: n > 22");
  if (strategy.output_length() != r)
    throw contract_error("exact_joint_distance: strategy length != r");
  const std::vector<std::uint64_t> keys =
      CandidateTrackingStrategy::enumerate_subsets(n, k);
  const std::uint64_t num_keys = keys.size();
  const std::uint64_t num_out = 1ULL << r;
  const std::uint64_t num_db = 1ULL << n;

  // counts[key][out][b] = #databases with that output and key parity b
  std::vector<std::uint64_t> counts(num_keys * num_out * 2, 0);
  DbString db = DbString::zeros(GroupModulus(2), n);
  const ExtractionContext ctx{};
  for (std::uint64_t x = 0; x < num_db; ++x) {
    for (std::uint32_t i = 0; i < n; ++i) db.set(i, (x >> i) & 1u);
    const BitOutput out = strategy.evaluate(db, ctx);
    for (std::uint64_t h = 0; h < num_keys; ++h)
      ++counts[(h * num_out + out.bits) * 2 + masked_parity(x, keys[h])];
  }

  const double scale = 1.0 / (static_cast<double>(num_keys) *
                              static_cast<double>(num_db));
  double dist = 0;
  for (std::uint64_t h = 0; h < num_keys; ++h)
    for (std::uint64_t o = 0; o < num_out; ++o) {
      const double a0 = static_cast<double>(counts[(h * num_out + o) * 2]);
      const double a1 = static_cast<double>(counts[(h * num_out + o) * 2 + 1]);
      switch (mode) {
        case BitMode::uniform:
          // |a_b - (a0+a1)/2| summed over b equals |a0 - a1|
          dist += std::abs(a0 - a1) * scale;
          break;
        case BitMode::fixed_zero:
          dist += std::abs(2 * a0 - (a0 + a1)) * scale;
          break;
        case BitMode::fixed_one:
          dist += std::abs(2 * a1 - (a0 + a1)) * scale;
          break;
      }
    }
  return 0.5 * dist;
}

// Exact TV distance, averaged over all C(n,k) keys, between the real
// adversary's t-epoch output sequence (each epoch's database uniform
// conditioned on encoding bits[i]) and the simulator's (each epoch's
// database unconditionally uniform). Strategies may depend on prior
// outputs and the supplied hints.
inline double simulator_view_distance(const ExtractionStrategy& strategy,
                                      std::uint32_t n, std::uint32_t k,
                                      std::uint32_t t,
                                      const std::vector<GroupElem>& bits,
                                      const std::vector<Hint>& hints = {}) {
  const std::uint32_t r = strategy.output_length();
  if (bits.size() != t)
    throw contract_error("simulator_view_distance: need one bit per epoch");
  if (static_cast<std::uint64_t>(r) * t > 24 || n > 16)
    throw capacity_error("simulator_view_distance: output space too large");
  const std::uint64_t num_db = 1ULL << n;
  const std::uint64_t num_out = 1ULL << r;

  // Roll one epoch forward: weight[prefix] -> weight[prefix . out], with
  // the database drawn uniformly from {x : popcount(x & cond_mask) has
  // parity cond_bit} (cond_mask = 0 means fully uniform).
  DbString db = DbString::zeros(GroupModulus(2), n);
  auto step = [&](const std::vector<double>& w, std::uint32_t epoch,
                  std::uint64_t cond_mask, GroupElem cond_bit) {
    std::vector<double> next(w.size() * num_out, 0.0);
    std::vector<BitOutput> prior(epoch);
    const std::size_t nhints = std::min<std::size_t>(epoch + 1, hints.size());
    for (std::uint64_t prefix = 0; prefix < w.size(); ++prefix) {
      if (w[prefix] == 0) continue;
      for (std::uint32_t e = 0; e < epoch; ++e)
        prior[e] = BitOutput(r, (prefix >> (e * r)) & (num_out - 1));
      const ExtractionContext ctx{prior, {hints.data(), nhints}};
      std::uint64_t denom = 0;
      std::vector<double> tally(num_out, 0.0);
      for (std::uint64_t x = 0; x < num_db; ++x) {
        if (cond_mask && masked_parity(x, cond_mask) != cond_bit) continue;
        ++denom;
        for (std::uint32_t i = 0; i < n; ++i) db.set(i, (x >> i) & 1u);
        tally[strategy.evaluate(db, ctx).bits] += 1.0;
      }
      for (std::uint64_t o = 0; o < num_out; ++o)
        next[prefix | (o << (epoch * r))] +=
            w[prefix] * tally[o] / static_cast<double>(denom);
    }
    return next;
  };

  std::vector<double> sim{1.0};
  for (std::uint32_t e = 0; e < t; ++e) sim = step(sim, e, 0, 0);

  const std::vector<std::uint64_t> keys =
      CandidateTrackingStrategy::enumerate_subsets(n, k);
  double avg = 0;
  for (std::uint64_t key : keys) {
    std::vector<double> real{1.0};
    for (std::uint32_t e = 0; e < t; ++e) real = step(real, e, key, bits[e]);
    double d = 0;
    for (std::size_t i = 0; i < sim.size(); ++i)
      d += std::abs(real[i] - sim[i]);
    avg += 0.5 * d;
  }
  return avg / static_cast<double>(keys.size());
}

// Exact TV (rational arithmetic, so "identical" means identically zero)
// between (a) the s-slot construction on N positions marginalized onto the
// complement of keys 2..s, and (b) the single-slot construction on
// n = N-(s-1)k positions with the corresponding key. Keys are fixed by the
// supplied registry.
inline Rational multiuser_marginal_check(const KeyRegistry& registry,
                                         const std::vector<GroupElem>& values,
                                         GroupModulus m) {
  const std::size_t N = registry.n();
  const std::size_t s = registry.slots();
  if (s < 1 || values.size() != s)
    throw contract_error("multiuser_marginal_check: bad values");
  double logsize = N * std::log2(static_cast<double>(m.m));
  if (logsize > 24) throw capacity_error("multiuser_marginal_check: m^N too large");

  // Kept positions: everything outside keys 2..s, in increasing order.
  std::vector<bool> dropped(N, false);
  for (std::size_t slot = 1; slot < s; ++slot)
    for (std::uint32_t i : registry.key(slot).indices) dropped[i] = true;
  std::vector<std::uint32_t> kept;
  for (std::uint32_t i = 0; i < N; ++i)
    if (!dropped[i]) kept.push_back(i);
  const std::size_t n1 = kept.size();  // = N - (s-1)k

  std::vector<std::uint32_t> pos_of(N, 0);  // original index -> kept index
  for (std::size_t j = 0; j < n1; ++j) pos_of[kept[j]] = static_cast<std::uint32_t>(j);

  auto pow_sz = [&](std::size_t e) {
    std::size_t p = 1;
    while (e--) p *= m.m;
    return p;
  };

  // (a) enumerate the full construction, marginalize onto kept positions.
  std::vector<std::uint64_t> marg(pow_sz(n1), 0);
  std::vector<GroupElem> str(N, 0);
  const std::size_t totalN = pow_sz(N);
  for (std::size_t code = 0; code < totalN; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < N; ++i) {
      str[i] = static_cast<GroupElem>(c % m.m);
      c /= m.m;
    }
    bool ok = true;
    for (std::size_t slot = 0; slot < s && ok; ++slot) {
      GroupElem acc = 0;
      for (std::uint32_t i : registry.key(slot).indices)
        acc = group_add(m, acc, str[i]);
      ok = acc == values[slot];
    }
    if (!ok) continue;
    std::size_t idx = 0;
    for (std::size_t j = n1; j-- > 0;) idx = idx * m.m + str[kept[j]];
    ++marg[idx];
  }

  // (b) the single-slot construction on the kept positions.
  std::vector<std::uint32_t> key1;
  for (std::uint32_t i : registry.key(0).indices) key1.push_back(pos_of[i]);
  std::vector<std::uint64_t> one(pow_sz(n1), 0);
  std::vector<GroupElem> y(n1, 0);
  const std::size_t total1 = pow_sz(n1);
  for (std::size_t code = 0; code < total1; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n1; ++i) {
      y[i] = static_cast<GroupElem>(c % m.m);
      c /= m.m;
    }
    GroupElem acc = 0;
    for (std::uint32_t i : key1) acc = group_add(m, acc, y[i]);
    if (acc == values[0]) ++one[code];
  }

  std::uint64_t tot_marg = 0, tot_one = 0;
  for (auto v : marg) tot_marg += v;
  for (auto v : one) tot_one += v;

  Rational dist = 0;
  for (std::size_t i = 0; i < marg.size(); ++i) {
    Rational d = Rational(marg[i], tot_marg) - Rational(one[i], tot_one);
    if (d < 0) d = -d;
    dist += d;
  }
  return dist / 2;
}

// Exhaustively verifies, with integer counting, that for every query set Q
// not containing the whole key, the database restricted to Q is exactly
// uniform (m = 2). Returns false on the first non-uniform restriction.
inline bool partial_view_uniform(std::uint32_t n, const SecretKey& key,
                                 GroupElem b) {
  if (n > 16) throw capacity_error("partial_view_uniform: n > 16");
  const std::uint64_t smask = key.mask();
  const std::uint64_t num_db = 1ULL << n;
  std::vector<std::uint32_t> counts;
  for (std::uint64_t q = 0; q < num_db; ++q) {
    if ((q & smask) == smask) continue;  // Q covers the key: excluded
    const std::uint32_t qbits = static_cast<std::uint32_t>(std::popcount(q));
    counts.assign(1ULL << qbits, 0);
    for (std::uint64_t x = 0; x < num_db; ++x) {
      if (masked_parity(x, smask) != b) continue;
      // compress x & q into a dense index
      std::uint64_t idx = 0, bit = 0;
      for (std::uint32_t i = 0; i < n; ++i)
        if (q & (1ULL << i)) {
          idx |= ((x >> i) & 1ULL) << bit;
          ++bit;
        }
      ++counts[idx];
    }
    const std::uint32_t expected =
        static_cast<std::uint32_t>(num_db >> (qbits + 1));
    for (std::uint32_t c : counts)
      if (c != expected) return false;
  }
  return true;
}

}  // namespace rerandb
