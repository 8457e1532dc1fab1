#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rerandb {

// ln C(n,k), valid far beyond 64-bit range.
inline double log_binomial(double n, double k) {
  if (k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// Exact C(n,k) for small parameters.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ln c_k where c_k = 4 k^{k+3} / (2e)^k.
inline double log_ck(double k) {
  return std::log(4.0) + (k + 3) * std::log(k) - k * std::log(2 * std::exp(1.0));
}

// Which logarithm "2 - log|f|" uses. Base 2 is the certified choice (it is
// what makes mass 2^{-r} substitute to 2+r); natural log is kept behind a
// flag for sensitivity reporting.
enum class MassLog { base2, natural };

// Bound on the sum of squared biases of any f: {-1,1}^n -> [0, 2^{-n}]:
// 4 k^{k+3} (2 - log|f|)^k / (2e)^k. Certified for even k; for odd k the
// formula is still evaluated but carries no guarantee.
inline double bias_bound(std::uint64_t k, double mass,
                         MassLog lb = MassLog::base2) {
  if (!(mass > 0.0) || mass > 1.0 + 1e-12)
    throw std::domain_error("bias_bound: mass must lie in (0, 1]");
  const double logmass =
      lb == MassLog::base2 ? std::log2(mass) : std::log(mass);
  const double kk = static_cast<double>(k);
  return std::exp(log_ck(kk) + kk * std::log(2.0 - logmass));
}

// Per-epoch statistical-distance bound in its closed form:
// (r/n)^{k/2} * 2 k^{(k+3)/2} / (2e)^{k/2}. Log-space throughout, so the
// headline parameter regime (n ~ 1e12) evaluates without underflow.
inline double epsilon_closed(double n, double k, double r) {
  if (r <= 0) return 0.0;
  return std::exp(0.5 * k * (std::log(r) - std::log(n)) + std::log(2.0) +
                  0.5 * (k + 3) * std::log(k) -
                  0.5 * k * std::log(2 * std::exp(1.0)));
}

// Same quantity written as (r/n)^{k/2} * sqrt(4 k^{k+3} / (2e)^k); kept as
// an independently coded route for the algebraic-identity check.
inline double epsilon_closed_radical(double n, double k, double r) {
  if (r <= 0) return 0.0;
  return std::exp(0.5 * k * (std::log(r) - std::log(n)) + 0.5 * log_ck(k));
}

// The binomial-chain form sqrt(C(n,k)^{-1} c_k (2+r)^k). This is the value
// the exact-distance oracles are certified against: it is what the
// derivation chain actually supports, and it does not always coincide with
// nor dominate the closed form above.
inline double epsilon_exact(double n, double k, double r) {
  return std::exp(0.5 * (-log_binomial(n, k) + log_ck(k) +
                         k * std::log(2.0 + r)));
}

// Index-query adversary success bound: t (r/n)^k.
inline double observation_bound(double t, double r, double n, double k) {
  return t * std::pow(r / n, k);
}

// All bound formulas for one parameter point. Values above 1 are reported
// verbatim (flagged vacuous), never clamped.
struct BoundReport {
  double n = 0, k = 0, r = 0, t = 0;
  std::uint32_t m = 2;
  double epsilon_closed = 0;
  double epsilon_exact = 0;
  double observation_bound = 0;
  double view_bound_closed = 0;   // 2 t eps_closed
  double view_bound_exact = 0;    // 2 t eps_exact
  double guess_bound_closed = 0;  // C(n,k)^{-1} + 2 t eps_closed
  double guess_bound_exact = 0;
  double everlasting_bound_closed = 0;  // 1/2 + 2 t eps_closed
  double everlasting_bound_exact = 0;
  bool vacuous_closed = false;
  bool vacuous_exact = false;
};

inline BoundReport theorem_bounds(double t, double n, double k, double r) {
  BoundReport rep;
  rep.n = n;
  rep.k = k;
  rep.r = r;
  rep.t = t;
  rep.epsilon_closed = epsilon_closed(n, k, r);
  rep.epsilon_exact = epsilon_exact(n, k, r);
  rep.observation_bound = observation_bound(t, r, n, k);
  const double inv_binom = std::exp(-log_binomial(n, k));
  rep.view_bound_closed = 2 * t * rep.epsilon_closed;
  rep.view_bound_exact = 2 * t * rep.epsilon_exact;
  rep.guess_bound_closed = inv_binom + rep.view_bound_closed;
  rep.guess_bound_exact = inv_binom + rep.view_bound_exact;
  rep.everlasting_bound_closed = 0.5 + rep.view_bound_closed;
  rep.everlasting_bound_exact = 0.5 + rep.view_bound_exact;
  rep.vacuous_closed = rep.guess_bound_closed > 1.0;
  rep.vacuous_exact = rep.guess_bound_exact > 1.0;
  return rep;
}

}  // namespace rerandb
