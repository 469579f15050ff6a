#include "wsr/permutation.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace wsr {

Permutation::Permutation(std::vector<int> one_line) : map_(std::move(one_line)) {
  std::vector<char> seen(map_.size(), 0);
  for (int v : map_) {
    if (v < 0 || v >= static_cast<int>(map_.size()) || seen[v])
      throw std::invalid_argument("Permutation: not a bijection");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return Permutation(std::move(v));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (int i = 0; i < size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

std::string Permutation::to_string() const {
  std::ostringstream out;
  out << '[';
  for (int i = 0; i < size(); ++i) {
    if (size() > 9 && i > 0) out << ' ';
    out << map_[i] + 1;
  }
  out << ']';
  return out.str();
}

bool perm_leq_oracle(const Permutation& rho, const Permutation& sigma) {
  if (rho.size() != sigma.size())
    throw std::invalid_argument("perm_leq_oracle: size mismatch");
  int n = rho.size();
  if (n > 7) throw std::invalid_argument("perm_leq_oracle: n > 7 not supported");
  if (rho == sigma) return true;
  std::set<std::vector<int>> visited{rho.one_line()};
  std::queue<std::vector<int>> frontier;
  frontier.push(rho.one_line());
  while (!frontier.empty()) {
    std::vector<int> cur = frontier.front();
    frontier.pop();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (cur[i] >= cur[j]) continue;  // (i j) must create an inversion
        std::vector<int> next = cur;
        std::swap(next[i], next[j]);
        if (next == sigma.one_line()) return true;
        if (visited.insert(next).second) frontier.push(std::move(next));
      }
    }
  }
  return false;
}

}  // namespace wsr
