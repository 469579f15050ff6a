#pragma once

#include <string>
#include <vector>

namespace wsr {

/// Permutation of {0,...,n-1} in one-line notation.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> one_line);

  static Permutation identity(int n);

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int i) const { return map_[i]; }
  const std::vector<int>& one_line() const { return map_; }

  Permutation inverse() const;

  /// Paper-style one-line string, 1-based: [543621] for n <= 9,
  /// [5 4 3 6 2 1] otherwise.
  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> map_;
};

/// True iff sigma is reachable from rho by right-composition with
/// transpositions that each create an inversion (breadth-first search over
/// the symmetric group; rejects n > 7).
bool perm_leq_oracle(const Permutation& rho, const Permutation& sigma);

}  // namespace wsr
