#pragma once

#include <limits>
#include <span>
#include <vector>

namespace wsr {

// Values live in [0, +inf]; IEEE infinity is the +inf element. It absorbs
// addition and dominates max, so no wrapper type is needed.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double x) { return x == kInf; }

/// p-norm on [0,inf]^n. p may be any real >= 1 or infinity; p < 1 throws.
/// Empty input gives 0; any infinite entry gives infinity.
double p_norm(std::span<const double> values, double p);

inline double p_norm(const std::vector<double>& values, double p) {
  return p_norm(std::span<const double>(values), p);
}

/// The constant 2^((1-q)/q) of the closed-form distance formulas,
/// with the convention kappa(inf) = 1/2.
double kappa(double q);

/// Running prefix p-norms of a fixed sequence: norms[r] = p_norm(first r
/// entries). Kept in scaled form so large p does not overflow.
std::vector<double> prefix_p_norms(std::span<const double> values, double p);

}  // namespace wsr
