#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rerandb/bounds.hpp"
#include "rerandb/errors.hpp"
#include "rerandb/rng.hpp"

namespace rerandb {

// Sub-probability table f: {0,1}^n -> [0, 2^{-n}], indexed by the packed
// bit string (bit value 1 corresponds to the -1 vertex of the hypercube).
class FTable {
 public:
  FTable(std::uint32_t n, std::vector<double> values)
      : n_(n), values_(std::move(values)) {
    if (n_ > 24) throw capacity_error("FTable: n > 24");
    if (values_.size() != (std::size_t{1} << n_))
      throw contract_error("FTable: values must have 2^n entries");
    const double cap = std::ldexp(1.0, -static_cast<int>(n_));
    for (double v : values_)
      if (v < 0 || v > cap * (1 + 1e-12))
        throw contract_error("FTable: value outside [0, 2^-n]");
  }

  std::uint32_t n() const { return n_; }
  const std::vector<double>& values() const { return values_; }

  double mass() const {
    double s = 0;
    for (double v : values_) s += v;
    return s;
  }

 private:
  std::uint32_t n_;
  std::vector<double> values_;
};

// bias(h, f) = (1/|f|) sum_x f(x) prod_{i in h} sign(x_i), with the 0 -> +1
// sign convention. `h` is a packed position mask.
inline double bias(std::uint64_t h_mask, const FTable& f) {
  const double m = f.mass();
  if (!(m > 0)) throw std::domain_error("bias: zero-mass table");
  double s = 0;
  const auto& v = f.values();
  for (std::uint64_t x = 0; x < v.size(); ++x)
    s += (std::popcount(x & h_mask) & 1) ? -v[x] : v[x];
  return s / m;
}

// Sum of bias(h,f)^2 over all C(n,k) k-subsets h, via one Walsh-Hadamard
// transform: the transform value at mask h is exactly sum_x f(x) sign_h(x).
inline double bias_sq_sum(const FTable& f, std::uint32_t k) {
  const double m = f.mass();
  if (!(m > 0)) throw std::domain_error("bias_sq_sum: zero-mass table");
  std::vector<double> w = f.values();
  const std::size_t N = w.size();
  for (std::size_t len = 1; len < N; len <<= 1)
    for (std::size_t i = 0; i < N; i += len << 1)
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = w[j], b = w[j + len];
        w[j] = a + b;
        w[j + len] = a - b;
      }
  double s = 0;
  for (std::uint64_t h = 0; h < N; ++h)
    if (static_cast<std::uint32_t>(std::popcount(h)) == k) {
      const double b = w[h] / m;
      s += b * b;
    }
  return s;
}

// --- table generators shared by the property suites and the CLI ---

inline FTable uniform_ftable(std::uint32_t n) {
  const double v = std::ldexp(1.0, -static_cast<int>(n));
  return FTable(n, std::vector<double>(std::size_t{1} << n, v));
}

inline FTable point_mass_ftable(std::uint32_t n, std::uint64_t x) {
  std::vector<double> v(std::size_t{1} << n, 0.0);
  v.at(x) = std::ldexp(1.0, -static_cast<int>(n));
  return FTable(n, std::move(v));
}

// Indicator of the subcube fixing positions in `mask` to the bits of
// `fixed`, scaled to the per-point maximum.
inline FTable subcube_ftable(std::uint32_t n, std::uint64_t mask,
                             std::uint64_t fixed) {
  const double cap = std::ldexp(1.0, -static_cast<int>(n));
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::uint64_t x = 0; x < v.size(); ++x)
    if ((x & mask) == (fixed & mask)) v[x] = cap;
  return FTable(n, std::move(v));
}

// Indicator of one parity class of `mask`.
inline FTable parity_slice_ftable(std::uint32_t n, std::uint64_t mask,
                                  unsigned parity) {
  const double cap = std::ldexp(1.0, -static_cast<int>(n));
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::uint64_t x = 0; x < v.size(); ++x)
    if ((std::popcount(x & mask) & 1u) == (parity & 1u)) v[x] = cap;
  return FTable(n, std::move(v));
}

// Indicator of the Hamming ball of radius `radius` around `center`.
inline FTable hamming_ball_ftable(std::uint32_t n, std::uint64_t center,
                                  std::uint32_t radius) {
  const double cap = std::ldexp(1.0, -static_cast<int>(n));
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::uint64_t x = 0; x < v.size(); ++x)
    if (static_cast<std::uint32_t>(std::popcount(x ^ center)) <= radius)
      v[x] = cap;
  return FTable(n, std::move(v));
}

// Independent uniform values in [0, 2^-n], with a sparsity knob that zeroes
// each point with probability `sparsity` (small masses stress the bound).
inline FTable random_ftable(std::uint32_t n, RngStream& rng,
                            double sparsity = 0.0) {
  const double cap = std::ldexp(1.0, -static_cast<int>(n));
  std::vector<double> v(std::size_t{1} << n, 0.0);
  bool any = false;
  for (auto& x : v) {
    if (rng.next_double() < sparsity) continue;
    x = rng.next_double() * cap;
    any = true;
  }
  if (!any) v[rng.next_below(v.size())] = cap;  // keep the mass positive
  return FTable(n, std::move(v));
}

}  // namespace rerandb
