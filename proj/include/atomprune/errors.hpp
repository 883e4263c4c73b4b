#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atomprune {

/// Thrown when a solver's state leaves the finite range (NaN/Inf or any entry
/// above the divergence guard). Carries the annealing level and inner
/// iteration where the blow-up was detected.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t level, std::size_t inner)
      : std::runtime_error(what), level_(level), inner_(inner) {}

  std::size_t level() const noexcept { return level_; }
  std::size_t inner_iteration() const noexcept { return inner_; }

 private:
  std::size_t level_;
  std::size_t inner_;
};

class NotPsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combinatorial search would exceed its enumeration budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No solution exists within the requested search space.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace atomprune
