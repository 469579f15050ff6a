#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsr/barcode.hpp"

namespace wsr {

struct GaussianComponent {
  double mu;
  double sigma;   // > 0
  double weight;  // > 0; the first component has weight 1 by convention
};

/// Unnormalized Gaussian mixture plus an additive positivity floor:
///   f(x) = floor + sum_i weight_i * N(x | mu_i, sigma_i).
/// The cumulative F(t) = integral of f over [0,t] is evaluated in closed form
/// through the error function. A positive floor keeps F invertible on all of
/// [0,inf); floor = 0 is accepted for evaluation-only densities.
class GaussianMixtureDensity {
 public:
  GaussianMixtureDensity(std::vector<GaussianComponent> components,
                         double floor = 1e-4);

  double value(double x) const;
  double cumulative(double t) const;
  /// Total mass of F on [0,inf); infinite whenever floor > 0.
  double mass() const;

  const std::vector<GaussianComponent>& components() const { return components_; }
  double floor() const { return floor_; }

 private:
  std::vector<GaussianComponent> components_;
  double floor_;
};

/// Regular action contour on the filtration axis: either the standard
/// contour C(a,e) = a + e, or the distance-type contour of a density, with
/// shift C(a,e) defined by e = integral of f over [a, C(a,e)].
class Contour {
 public:
  Contour() : standard_(true) {}  // standard contour
  explicit Contour(GaussianMixtureDensity density)
      : standard_(false), density_(std::move(density)) {}

  static Contour standard() { return Contour(); }
  static Contour distance_type(GaussianMixtureDensity density) {
    return Contour(std::move(density));
  }

  bool is_standard() const { return standard_; }
  const GaussianMixtureDensity& density() const;

  /// Lifetime l(a,b): inverse of the shift in its second argument.
  /// l(a,inf) = inf; throws if a > b.
  double lifetime(double a, double b) const;

  /// C(a, epsilon); for distance-type contours solved to high accuracy by
  /// bracketed Newton (F' >= floor guarantees the bracket [a, a+eps/floor]).
  double shift(double a, double epsilon) const;

  /// T_C: each bar K(a,b) becomes K(l(0,a), l(0,b)).
  Barcode transform(const Barcode& barcode) const;

  std::string to_json() const;
  static Contour from_json(const std::string& text);
  static Contour from_json_file(const std::string& path);

 private:
  bool standard_;
  std::optional<GaussianMixtureDensity> density_;
};

/// (p,C)-norm: p-norm of the bar lifetimes under the contour.
double pc_norm(const Barcode& barcode, double p, const Contour& contour);

}  // namespace wsr
