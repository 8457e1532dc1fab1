#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "rerandb/errors.hpp"
#include "rerandb/rng.hpp"

namespace rerandb {

// The secret set S: k distinct database positions whose group-sum encodes
// one stored value. Indices are 0-based and kept sorted.
struct SecretKey {
  std::vector<std::uint32_t> indices;

  SecretKey() = default;
  explicit SecretKey(std::vector<std::uint32_t> idx) : indices(std::move(idx)) {
    std::sort(indices.begin(), indices.end());
    for (std::size_t i = 1; i < indices.size(); ++i)
      if (indices[i] == indices[i - 1])
        throw contract_error("SecretKey: duplicate index");
  }

  std::size_t k() const { return indices.size(); }

  bool contains(std::uint32_t i) const {
    return std::binary_search(indices.begin(), indices.end(), i);
  }

  // Packed position mask, for n <= 64 enumeration.
  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (std::uint32_t i : indices) {
      if (i >= 64) throw capacity_error("SecretKey::mask: index >= 64");
      m |= 1ULL << i;
    }
    return m;
  }

  bool operator==(const SecretKey&) const = default;
};

// Uniform over all C(n,k) k-subsets of [0, n). Floyd's sampling.
inline SecretKey sample_secret_key(std::size_t n, std::size_t k,
                                   RngStream& rng) {
  if (k < 1 || k > n)
    throw contract_error("sample_secret_key: need 1 <= k <= n");
  std::vector<std::uint32_t> chosen;
  chosen.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    auto t = static_cast<std::uint32_t>(rng.next_below(j + 1));
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end())
      t = static_cast<std::uint32_t>(j);
    chosen.push_back(t);
  }
  return SecretKey(std::move(chosen));
}

// One key per stored value slot; keys pairwise disjoint so each slot's
// encoding constraint touches its own positions only.
class KeyRegistry {
 public:
  KeyRegistry(std::size_t n, std::vector<SecretKey> keys)
      : n_(n), keys_(std::move(keys)) {
    std::vector<bool> used(n_, false);
    for (const SecretKey& key : keys_) {
      if (key.k() == 0) throw contract_error("KeyRegistry: empty key");
      for (std::uint32_t i : key.indices) {
        if (i >= n_) throw contract_error("KeyRegistry: index out of range");
        if (used[i]) throw contract_error("KeyRegistry: keys not disjoint");
        used[i] = true;
      }
    }
  }

  std::size_t n() const { return n_; }
  std::size_t slots() const { return keys_.size(); }
  const SecretKey& key(std::size_t slot) const { return keys_.at(slot); }
  const std::vector<SecretKey>& keys() const { return keys_; }

 private:
  std::size_t n_;
  std::vector<SecretKey> keys_;
};

// s pairwise-disjoint keys of size k over [0, N): sequential uniform
// sampling without replacement from the remaining index pool.
inline KeyRegistry allocate_disjoint_keys(std::size_t N, std::size_t k,
                                          std::size_t s, RngStream& rng) {
  if (k < 1) throw contract_error("allocate_disjoint_keys: k must be >= 1");
  if (s * k > N)
    throw capacity_error("allocate_disjoint_keys: s*k exceeds N positions");
  std::vector<std::uint32_t> pool(N);
  for (std::size_t i = 0; i < N; ++i) pool[i] = static_cast<std::uint32_t>(i);
  std::vector<SecretKey> keys;
  keys.reserve(s);
  std::size_t remaining = N;
  for (std::size_t slot = 0; slot < s; ++slot) {
    std::vector<std::uint32_t> idx;
    idx.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = rng.next_below(remaining);
      idx.push_back(pool[pick]);
      std::swap(pool[pick], pool[remaining - 1]);
      --remaining;
    }
    keys.emplace_back(std::move(idx));
  }
  return KeyRegistry(N, std::move(keys));
}

}  // namespace rerandb
