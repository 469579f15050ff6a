#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsr/wasserstein.hpp"

namespace wsr {

/// Right-continuous non-increasing piecewise constant function with natural
/// values: f(t) = values[i] on [breakpoints[i], breakpoints[i+1]), and
/// values.back() from the last breakpoint on. Construction canonicalizes:
/// equal consecutive values merge, so breakpoints are strictly increasing
/// and values strictly decreasing.
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<uint64_t> values);

  static StepFunction constant(uint64_t value) { return StepFunction({0.0}, {value}); }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<uint64_t>& values() const { return values_; }
  uint64_t limit() const { return values_.back(); }

  uint64_t evaluate(double t) const;
  /// Generalized inverse min{t : f(t) <= y}; requires y >= limit().
  double inverse(uint64_t y) const;

  std::string to_json() const;
  static StepFunction from_json(const std::string& text);

  /// CSV rows "value,t" of the inverse evaluated at every drop value, for
  /// plotting the inverse profile.
  std::string inverse_csv() const;

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<uint64_t> values_;
};

/// Wasserstein stable rank: discontinuities at kappa(q) * prefix p-norms of
/// the sorted finite-bar lifetimes, every value shifted up by the number of
/// infinite bars (which is also the limit value).
StepFunction stable_rank(const Barcode& x, const MetricChoice& m);

/// Interleaving distance between two step functions: infinity when limits
/// differ, otherwise the sup-norm of the difference of inverses.
double interleaving_step(const StepFunction& f, const StepFunction& g);

/// Sorted-lifetime profile of a barcode under a metric choice; caches the
/// scaled prefix norms so pairwise distances are a single linear sweep.
struct LifetimeProfile {
  std::vector<double> prefix;  // kappa(q) * p-norm of the r smallest lifetimes
  size_t infinite_count = 0;
};

LifetimeProfile lifetime_profile(const Barcode& x, const MetricChoice& m);
double interleaving_from_profiles(const LifetimeProfile& f, const LifetimeProfile& g);

/// Closed-form interleaving distance between the stable ranks of x and y:
/// L-infinity over aligned suffix components of the prefix-norm vectors.
double interleaving_fast(const Barcode& x, const Barcode& y, const MetricChoice& m);

}  // namespace wsr
