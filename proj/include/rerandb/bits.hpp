#pragma once

#include <cstdint>
#include <string>

#include "rerandb/errors.hpp"

namespace rerandb {

// A bit-string of up to 64 bits, the unit of adversary output (OUT) and of
// enumeration over output spaces. Per-epoch extraction budgets beyond 64
// bits are out of range for the exact oracles and refused up front.
struct BitOutput {
  std::uint32_t length = 0;
  std::uint64_t bits = 0;

  BitOutput() = default;
  BitOutput(std::uint32_t len, std::uint64_t b) : length(len), bits(b) {
    if (len > 64) throw capacity_error("BitOutput: length > 64");
    if (len < 64) bits &= (1ULL << len) - 1;
  }

  bool operator==(const BitOutput&) const = default;

  std::string to_string() const {
    std::string s(length, '0');
    for (std::uint32_t i = 0; i < length; ++i)
      if ((bits >> i) & 1) s[i] = '1';
    return s;
  }
};

}  // namespace rerandb
