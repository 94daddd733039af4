#pragma once

#include <algorithm>
#include <cmath>

namespace mgmax {

inline constexpr double kDefaultRelTol = 1e-9;

/// lhs <= rhs (1 + rel_tol) for rhs >= 0.
inline bool leq_rel(double lhs, double rhs, double rel_tol = kDefaultRelTol) {
  return lhs <= rhs + rel_tol * std::abs(rhs);
}

/// |a - b| within rel_tol of the larger magnitude. Two zeros compare equal.
inline bool close_rel(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

/// rhs / lhs, with 0/0 read as 1 and x/0 as +inf. Used for slack columns.
inline double slack_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return rhs == 0.0 ? 1.0 : HUGE_VAL;
  return rhs / lhs;
}

}  // namespace mgmax
