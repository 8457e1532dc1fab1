#pragma once

#include <stdexcept>
#include <string>

namespace rerandb {

// Violated precondition or cross-object consistency rule.
class contract_error : public std::logic_error {
 public:
  explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

// Parameters outside the representable/enumerable range.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Request refused because it would exceed the per-epoch transmission limit.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// One-time-pad key slot reused within a single pad epoch.
class freshness_error : public std::runtime_error {
 public:
  explicit freshness_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace rerandb
