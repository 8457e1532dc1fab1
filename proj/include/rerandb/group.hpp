#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "rerandb/errors.hpp"
#include "rerandb/rng.hpp"

namespace rerandb {

// Cyclic group Z_m. m = 2 is the Boolean protocol; larger m stores one
// symbol of log2(m) bits per position.
struct GroupModulus {
  std::uint32_t m;

  explicit GroupModulus(std::uint32_t modulus) : m(modulus) {
    if (m < 2) throw contract_error("GroupModulus: m must be >= 2");
  }

  bool operator==(const GroupModulus&) const = default;

  // Bits charged per transmitted symbol: ceil(log2 m).
  std::uint32_t bits_per_symbol() const {
    return static_cast<std::uint32_t>(std::bit_width(m - 1));
  }
};

// Element of Z_m, stored as a machine integer in [0, m).
using GroupElem = std::uint32_t;

inline GroupElem group_add(GroupModulus m, GroupElem a, GroupElem b) {
  if (a >= m.m || b >= m.m)
    throw contract_error("group_add: element out of range for modulus");
  const std::uint32_t s = a + b;
  return s >= m.m ? s - m.m : s;
}

inline GroupElem group_neg(GroupModulus m, GroupElem a) {
  if (a >= m.m) throw contract_error("group_neg: element out of range");
  return a == 0 ? 0 : m.m - a;
}

// 0/1 protocol convention -> +1/-1 analysis convention. The mapping 0 -> +1
// is a fixed choice; all bias results are invariant under the opposite one.
inline int to_sign(GroupElem bit) {
  if (bit > 1) throw contract_error("to_sign: requires an element of Z_2");
  return bit == 0 ? +1 : -1;
}

// The database's public state: a length-n string over Z_m.
class DbString {
 public:
  DbString(GroupModulus m, std::vector<GroupElem> elems)
      : m_(m), elems_(std::move(elems)) {
    for (GroupElem e : elems_)
      if (e >= m_.m) throw contract_error("DbString: element out of range");
  }

  static DbString zeros(GroupModulus m, std::size_t n) {
    return DbString(m, std::vector<GroupElem>(n, 0));
  }

  // Interpret the low n bits of `bits` as a Z_2 string (bit i -> position i).
  static DbString from_bits(std::uint64_t bits, std::size_t n) {
    if (n > 64) throw capacity_error("DbString::from_bits: n > 64");
    std::vector<GroupElem> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = (bits >> i) & 1u;
    return DbString(GroupModulus(2), std::move(e));
  }

  GroupModulus modulus() const { return m_; }
  std::size_t size() const { return elems_.size(); }
  GroupElem operator[](std::size_t i) const { return elems_[i]; }
  const std::vector<GroupElem>& elems() const { return elems_; }

  void set(std::size_t i, GroupElem v) {
    if (v >= m_.m) throw contract_error("DbString::set: element out of range");
    elems_[i] = v;
  }

  // Packed-bit view for the 2^n enumeration oracles (m = 2, n <= 64 only).
  std::uint64_t packed_bits() const {
    if (m_.m != 2) throw contract_error("packed_bits: requires m = 2");
    if (size() > 64) throw capacity_error("packed_bits: n > 64");
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < size(); ++i)
      out |= static_cast<std::uint64_t>(elems_[i]) << i;
    return out;
  }

  bool operator==(const DbString&) const = default;

 private:
  GroupModulus m_;
  std::vector<GroupElem> elems_;
};

// Sum of the database symbols at `indices`, mod m. XOR for m = 2. Indices
// must be distinct and in range.
inline GroupElem subset_sum(const DbString& db,
                            std::span<const std::uint32_t> indices) {
  std::uint64_t seen_lo = 0;  // duplicate check, bitmask for n <= 64
  std::vector<bool> seen_hi;
  GroupElem acc = 0;
  for (std::uint32_t i : indices) {
    if (i >= db.size()) throw contract_error("subset_sum: index out of range");
    if (db.size() <= 64) {
      if (seen_lo & (1ULL << i))
        throw contract_error("subset_sum: duplicate index");
      seen_lo |= 1ULL << i;
    } else {
      if (seen_hi.empty()) seen_hi.assign(db.size(), false);
      if (seen_hi[i]) throw contract_error("subset_sum: duplicate index");
      seen_hi[i] = true;
    }
    acc = group_add(db.modulus(), acc, db[i]);
  }
  return acc;
}

inline GroupElem subset_sum(const DbString& db,
                            const std::vector<std::uint32_t>& indices) {
  return subset_sum(db, std::span<const std::uint32_t>(indices));
}

// Each position i.i.d. uniform over [0, m).
inline DbString sample_uniform_string(GroupModulus m, std::size_t n,
                                      RngStream& rng) {
  std::vector<GroupElem> e(n);
  for (std::size_t i = 0; i < n; ++i)
    e[i] = static_cast<GroupElem>(rng.next_below(m.m));
  return DbString(m, std::move(e));
}

// Parity of the m=2 string `bits` restricted to `mask` (packed form).
inline GroupElem masked_parity(std::uint64_t bits, std::uint64_t mask) {
  return static_cast<GroupElem>(std::popcount(bits & mask) & 1);
}

}  // namespace rerandb
