#pragma once

// Shared test-side generators and oracles. Everything here is independent of
// the library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "wsr/contour.hpp"
#include "wsr/data_harness.hpp"
#include "wsr/presentation.hpp"

namespace wsr::testsupport {

inline Barcode random_barcode(SplitRng& rng, int max_bars, double range = 10.0,
                              int max_infinite = 0) {
  Barcode out;
  const int n = static_cast<int>(rng.uniform_int(0, max_bars));
  for (int i = 0; i < n; ++i) {
    const double birth = rng.uniform_real(0.0, range);
    out.add(birth, birth + rng.uniform_real(0.05, range / 2.0));
  }
  if (max_infinite > 0) {
    const int m = static_cast<int>(rng.uniform_int(0, max_infinite));
    for (int i = 0; i < m; ++i) out.add(rng.uniform_real(0.0, range), kInf);
  }
  return out;
}

// F2 rank of a set of columns given as row-index lists.
inline int f2_rank(std::vector<std::vector<int>> columns, int rows) {
  std::vector<std::vector<char>> dense;
  for (const auto& col : columns) {
    std::vector<char> v(rows, 0);
    for (int r : col) v[r] ^= 1;
    dense.push_back(std::move(v));
  }
  int rank = 0;
  for (int r = 0; r < rows; ++r) {
    int pivot = -1;
    for (size_t c = rank; c < dense.size(); ++c)
      if (dense[c][r]) {
        pivot = static_cast<int>(c);
        break;
      }
    if (pivot == -1) continue;
    std::swap(dense[rank], dense[pivot]);
    for (size_t c = 0; c < dense.size(); ++c) {
      if (static_cast<int>(c) != rank && dense[c][r])
        for (int i = 0; i < rows; ++i) dense[c][i] ^= dense[rank][i];
    }
    ++rank;
  }
  return rank;
}

// Pointwise injectivity of a generator map, checked at every critical degree
// by an F2 rank computation.
inline bool pointwise_injective(const GeneratorMap& f) {
  std::vector<double> criticals;
  for (const Bar& b : f.domain.bars()) {
    criticals.push_back(b.birth);
    if (!b.is_infinite()) criticals.push_back(b.death);
  }
  for (const Bar& b : f.codomain.bars()) {
    criticals.push_back(b.birth);
    if (!b.is_infinite()) criticals.push_back(b.death);
  }
  const int n = static_cast<int>(f.codomain.rank());
  for (double t : criticals) {
    std::vector<std::vector<int>> image_columns;
    for (size_t i = 0; i < f.domain.rank(); ++i) {
      const Bar& z = f.domain.bars()[i];
      if (!(z.birth <= t && t < z.death)) continue;
      std::vector<int> column;
      for (int j : f.images[i]) {
        const Bar& x = f.codomain.bars()[j];
        if (x.birth <= t && t < x.death) column.push_back(j);
      }
      image_columns.push_back(std::move(column));
    }
    const int alive = static_cast<int>(image_columns.size());
    if (f2_rank(std::move(image_columns), n) != alive) return false;
  }
  return true;
}

// Random monomorphism: sample a codomain barcode, give each domain generator
// a nonempty subset of the codomain generators alive at its sampled birth,
// derive its endpoint from the image support, and rejection-sample until the
// map is pointwise injective.
inline GeneratorMap random_monomorphism(SplitRng& rng, int max_codomain_bars = 6) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    GeneratorMap f;
    const int n = static_cast<int>(rng.uniform_int(1, max_codomain_bars));
    for (int j = 0; j < n; ++j) {
      const double birth = rng.uniform_real(0.0, 8.0);
      f.codomain.add(birth, birth + rng.uniform_real(0.3, 6.0));
    }
    const int m = static_cast<int>(rng.uniform_int(0, n));
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      const int anchor = static_cast<int>(rng.uniform_int(0, n - 1));
      const Bar& x = f.codomain.bars()[anchor];
      const double birth = rng.uniform_real(x.birth, x.death);
      std::vector<int> alive;
      for (int j = 0; j < n; ++j) {
        const Bar& c = f.codomain.bars()[j];
        if (c.birth <= birth && birth < c.death) alive.push_back(j);
      }
      std::vector<int> support;
      for (int j : alive)
        if (j == anchor || rng.uniform_int(0, 1) == 1) support.push_back(j);
      double death = 0.0;
      for (int j : support) death = std::max(death, f.codomain.bars()[j].death);
      if (!(death > birth)) {
        ok = false;
        break;
      }
      f.domain.add(birth, death);
      f.images.push_back(std::move(support));
    }
    if (!ok) continue;
    if (pointwise_injective(f)) return f;
  }
  throw std::runtime_error("random_monomorphism: rejection sampling failed");
}

// Mirror a monomorphism into an epimorphism description (time reversal).
inline GeneratorMap mirror_to_epi(const GeneratorMap& mono) {
  double reflection = 0.0;
  for (const Bar& b : mono.domain.bars()) reflection = std::max(reflection, b.death);
  for (const Bar& b : mono.codomain.bars()) reflection = std::max(reflection, b.death);
  GeneratorMap epi;
  for (const Bar& b : mono.codomain.bars())
    epi.domain.add(reflection - b.death, reflection - b.birth);
  for (const Bar& b : mono.domain.bars())
    epi.codomain.add(reflection - b.death, reflection - b.birth);
  epi.images.assign(mono.codomain.rank(), {});
  for (size_t i = 0; i < mono.images.size(); ++i)
    for (int j : mono.images[i]) epi.images[j].push_back(static_cast<int>(i));
  return epi;
}

// Independent reducer: applies valid left-to-right operations in a random
// order until no column's low collides with an earlier column's low.
inline Permutation random_order_reduce(PresentationMatrix m, SplitRng& rng) {
  while (true) {
    std::vector<std::pair<int, int>> moves;  // (src, dst) with low collision
    for (int c = 0; c < m.cols(); ++c) {
      if (m.column_is_zero(c)) continue;
      for (int d = c + 1; d < m.cols(); ++d)
        if (m.low(d) == m.low(c)) moves.emplace_back(c, d);
    }
    if (moves.empty()) break;
    const auto& [src, dst] = moves[rng.uniform_int(0, static_cast<int>(moves.size()) - 1)];
    m.add_column(src, dst);
  }
  std::vector<int> sigma;
  for (int c = 0; c < m.cols(); ++c)
    if (!m.column_is_zero(c)) sigma.push_back(m.low(c));
  return Permutation(std::move(sigma));
}

// Adaptive Simpson quadrature, used as the independent oracle for the
// closed-form Gaussian cumulative.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12) {
  std::function<double(double, double, double, double, double, double)> recurse =
      [&](double lo, double hi, double flo, double fhi, double fmid, double eps) {
        const double mid = 0.5 * (lo + hi);
        const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
        const double flmid = f(lmid), frmid = f(rmid);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flmid + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frmid + fhi);
        if (std::abs(left + right - whole) < 15.0 * eps)
          return left + right + (left + right - whole) / 15.0;
        return recurse(lo, mid, flo, fmid, flmid, eps / 2.0) +
               recurse(mid, hi, fmid, fhi, frmid, eps / 2.0);
      };
  return recurse(a, b, f(a), f(b), f(0.5 * (a + b)), tol);
}

}  // namespace wsr::testsupport
