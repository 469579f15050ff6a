#pragma once

#include <vector>

#include "wsr/barcode.hpp"
#include "wsr/contour.hpp"

namespace wsr {

/// The (p, q, C) triple selecting a pseudometric between persistence modules.
struct MetricChoice {
  double p = kInf;
  double q = 1.0;
  Contour contour;

  MetricChoice() = default;
  MetricChoice(double p, double q, Contour contour = Contour::standard());
};

/// W^p_p between two diagrams: optimal matching with per-point diagonal
/// slots, point costs d_p raised to p and the total root-p'ed; p = inf is
/// the bottleneck variant. Diagrams with different numbers of infinite-death
/// points are infinitely far apart; infinite points match among themselves
/// at cost |birth - birth'|.
double wasserstein_pp(const Barcode& d1, const Barcode& d2, double p);

/// Exact W^q_p by enumerating every partial injection; restricted to
/// |d1| + |d2| <= 8 points.
double wasserstein_qp_bruteforce(const Barcode& d1, const Barcode& d2, double p, double q);

/// Distance to the zero module: kappa(q) * pc_norm(X, p, C).
double dist_to_zero(const Barcode& x, const MetricChoice& m);

/// Distance from X to the module obtained by deleting its j bars of smallest
/// lifetime: kappa(q) * p-norm of those j lifetimes.
double dist_delete_shortest(const Barcode& x, size_t j, const MetricChoice& m);

/// Bars of x sorted non-decreasingly by lifetime under the contour,
/// tie-broken by (lifetime, birth, death).
std::vector<Bar> bars_by_lifetime(const Barcode& x, const Contour& contour);

namespace detail {
/// Exact minimum-cost perfect assignment (shortest augmenting path) on a
/// square cost matrix; returns the optimal total cost.
double min_cost_assignment(const std::vector<std::vector<double>>& cost);
}  // namespace detail

}  // namespace wsr
