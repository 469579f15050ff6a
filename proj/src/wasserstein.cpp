#include "wsr/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace wsr {

MetricChoice::MetricChoice(double p, double q, Contour contour)
    : p(p), q(q), contour(std::move(contour)) {
  if (!(p >= 1.0)) throw std::invalid_argument("MetricChoice: p must be >= 1");
  if (!(q >= 1.0)) throw std::invalid_argument("MetricChoice: q must be >= 1");
}

namespace detail {

double min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return 0.0;
  // Jonker-Volgenant style shortest augmenting path with potentials.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j)
    if (p[j]) total += cost[p[j] - 1][j - 1];
  return total;
}

}  // namespace detail

namespace {

struct SplitDiagram {
  std::vector<Bar> finite;
  std::vector<double> infinite_births;
};

SplitDiagram split(const Barcode& d) {
  SplitDiagram out;
  for (const Bar& b : d.bars()) {
    if (b.is_infinite())
      out.infinite_births.push_back(b.birth);
    else
      out.finite.push_back(b);
  }
  std::sort(out.infinite_births.begin(), out.infinite_births.end());
  return out;
}

double pair_cost(const Bar& a, const Bar& b, double p) {
  const double db = std::abs(a.birth - b.birth);
  const double dd = std::abs(a.death - b.death);
  if (is_inf(p)) return std::max(db, dd);
  return p_norm(std::vector<double>{db, dd}, p);
}

double diagonal_cost(const Bar& a, double p) { return kappa(p) * a.length(); }

double finite_matching_sum_p(const std::vector<Bar>& d1, const std::vector<Bar>& d2,
                             double p) {
  const int m = static_cast<int>(d1.size());
  const int n = static_cast<int>(d2.size());
  const int size = m + n;
  if (size == 0) return 0.0;
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  double finite_total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double c = std::pow(pair_cost(d1[i], d2[j], p), p);
      cost[i][j] = c;
      finite_total += c;
    }
  std::vector<double> diag1(m), diag2(n);
  for (int i = 0; i < m; ++i) {
    diag1[i] = std::pow(diagonal_cost(d1[i], p), p);
    finite_total += diag1[i];
  }
  for (int j = 0; j < n; ++j) {
    diag2[j] = std::pow(diagonal_cost(d2[j], p), p);
    finite_total += diag2[j];
  }
  const double forbidden = finite_total + 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = n; j < size; ++j) cost[i][j] = (j == n + i) ? diag1[i] : forbidden;
  for (int i = m; i < size; ++i)
    for (int j = 0; j < n; ++j) cost[i][j] = (i == m + j) ? diag2[j] : forbidden;
  return detail::min_cost_assignment(cost);
}

// Smallest threshold admitting a perfect matching in the diagonally padded
// bipartite graph; the bottleneck (p = inf) case.
double finite_bottleneck(const std::vector<Bar>& d1, const std::vector<Bar>& d2) {
  const int m = static_cast<int>(d1.size());
  const int n = static_cast<int>(d2.size());
  if (m + n == 0) return 0.0;
  std::vector<double> candidates{0.0};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) candidates.push_back(pair_cost(d1[i], d2[j], kInf));
  for (int i = 0; i < m; ++i) candidates.push_back(diagonal_cost(d1[i], kInf));
  for (int j = 0; j < n; ++j) candidates.push_back(diagonal_cost(d2[j], kInf));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const int size = m + n;
  auto feasible = [&](double threshold) {
    auto allowed = [&](int i, int j) {
      if (i < m) {
        if (j < n) return pair_cost(d1[i], d2[j], kInf) <= threshold;
        return j == n + i && diagonal_cost(d1[i], kInf) <= threshold;
      }
      const int k = i - m;
      if (j < n) return j == k && diagonal_cost(d2[k], kInf) <= threshold;
      return true;  // diagonal to diagonal, free
    };
    std::vector<int> match_right(size, -1);
    std::vector<char> visited(size, 0);
    std::function<bool(int)> augment = [&](int i) -> bool {
      for (int j = 0; j < size; ++j) {
        if (visited[j] || !allowed(i, j)) continue;
        visited[j] = 1;
        if (match_right[j] == -1 || augment(match_right[j])) {
          match_right[j] = i;
          return true;
        }
      }
      return false;
    };
    for (int i = 0; i < size; ++i) {
      std::fill(visited.begin(), visited.end(), 0);
      if (!augment(i)) return false;
    }
    return true;
  };

  size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return candidates[lo];
}

}  // namespace

double wasserstein_pp(const Barcode& d1, const Barcode& d2, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_pp: p must be >= 1");
  SplitDiagram a = split(d1), b = split(d2);
  if (a.infinite_births.size() != b.infinite_births.size()) return kInf;
  // Sorted pairing is optimal on the line, for summed powers and for the max.
  if (is_inf(p)) {
    double worst = 0.0;
    for (size_t k = 0; k < a.infinite_births.size(); ++k)
      worst = std::max(worst, std::abs(a.infinite_births[k] - b.infinite_births[k]));
    return std::max(worst, finite_bottleneck(a.finite, b.finite));
  }
  double total = finite_matching_sum_p(a.finite, b.finite, p);
  for (size_t k = 0; k < a.infinite_births.size(); ++k)
    total += std::pow(std::abs(a.infinite_births[k] - b.infinite_births[k]), p);
  return std::pow(total, 1.0 / p);
}

double wasserstein_qp_bruteforce(const Barcode& d1, const Barcode& d2, double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0))
    throw std::invalid_argument("wasserstein_qp_bruteforce: p, q must be >= 1");
  if (d1.rank() + d2.rank() > 8)
    throw std::invalid_argument("wasserstein_qp_bruteforce: at most 8 points total");
  const auto& xs = d1.bars();
  const auto& ys = d2.bars();
  const int m = static_cast<int>(xs.size());
  const int n = static_cast<int>(ys.size());

  auto point_cost = [&](const Bar& x, const Bar& y) {
    if (x.is_infinite() && y.is_infinite()) return std::abs(x.birth - y.birth);
    if (x.is_infinite() || y.is_infinite()) return kInf;
    return pair_cost(x, y, p);
  };
  auto diag = [&](const Bar& x) { return x.is_infinite() ? kInf : diagonal_cost(x, p); };

  double best = kInf;
  std::vector<int> assignment(m, -1);
  std::vector<char> used(n, 0);
  std::function<void(int)> recurse = [&](int i) {
    if (i == m) {
      std::vector<double> costs;
      for (int k = 0; k < m; ++k)
        costs.push_back(assignment[k] == -1 ? diag(xs[k]) : point_cost(xs[k], ys[assignment[k]]));
      for (int j = 0; j < n; ++j)
        if (!used[j]) costs.push_back(diag(ys[j]));
      best = std::min(best, p_norm(costs, q));
      return;
    }
    assignment[i] = -1;
    recurse(i + 1);
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      assignment[i] = j;
      recurse(i + 1);
      assignment[i] = -1;
      used[j] = 0;
    }
  };
  recurse(0);
  return best;
}

double dist_to_zero(const Barcode& x, const MetricChoice& m) {
  return kappa(m.q) * pc_norm(x, m.p, m.contour);
}

std::vector<Bar> bars_by_lifetime(const Barcode& x, const Contour& contour) {
  std::vector<std::pair<double, Bar>> keyed;
  keyed.reserve(x.rank());
  for (const Bar& b : x.bars()) keyed.emplace_back(contour.lifetime(b.birth, b.death), b);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.birth != b.second.birth) return a.second.birth < b.second.birth;
    return a.second.death < b.second.death;
  });
  std::vector<Bar> out;
  out.reserve(keyed.size());
  for (auto& [lifetime, bar] : keyed) out.push_back(bar);
  return out;
}

double dist_delete_shortest(const Barcode& x, size_t j, const MetricChoice& m) {
  if (j > x.rank()) throw std::invalid_argument("dist_delete_shortest: j exceeds rank");
  std::vector<Bar> sorted = bars_by_lifetime(x, m.contour);
  std::vector<double> lifetimes;
  lifetimes.reserve(j);
  for (size_t i = 0; i < j; ++i)
    lifetimes.push_back(m.contour.lifetime(sorted[i].birth, sorted[i].death));
  return kappa(m.q) * p_norm(lifetimes, m.p);
}

}  // namespace wsr
