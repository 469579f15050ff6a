#include "wsr/contour.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wsr {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
}  // namespace

GaussianMixtureDensity::GaussianMixtureDensity(
    std::vector<GaussianComponent> components, double floor)
    : components_(std::move(components)), floor_(floor) {
  if (floor_ < 0.0 || std::isnan(floor_))
    throw std::invalid_argument("density: floor must be >= 0");
  if (floor_ == 0.0 && components_.empty())
    throw std::invalid_argument("density: needs a positive floor or a component");
  for (const GaussianComponent& c : components_) {
    if (!(c.sigma > 0.0)) throw std::invalid_argument("density: sigma must be > 0");
    if (!(c.weight > 0.0)) throw std::invalid_argument("density: weight must be > 0");
  }
}

double GaussianMixtureDensity::value(double x) const {
  double f = floor_;
  for (const GaussianComponent& c : components_) {
    double z = (x - c.mu) / c.sigma;
    f += c.weight * kInvSqrt2Pi / c.sigma * std::exp(-0.5 * z * z);
  }
  return f;
}

double GaussianMixtureDensity::cumulative(double t) const {
  double F = floor_ * t;
  for (const GaussianComponent& c : components_)
    F += c.weight * (normal_cdf((t - c.mu) / c.sigma) - normal_cdf(-c.mu / c.sigma));
  return F;
}

double GaussianMixtureDensity::mass() const {
  if (floor_ > 0.0) return kInf;
  double m = 0.0;
  for (const GaussianComponent& c : components_)
    m += c.weight * (1.0 - normal_cdf(-c.mu / c.sigma));
  return m;
}

const GaussianMixtureDensity& Contour::density() const {
  if (standard_) throw std::logic_error("standard contour has no density");
  return *density_;
}

double Contour::lifetime(double a, double b) const {
  if (std::isnan(a) || std::isnan(b) || a > b)
    throw std::invalid_argument("lifetime: requires a <= b");
  if (is_inf(b)) return kInf;
  if (standard_) return b - a;
  return density_->cumulative(b) - density_->cumulative(a);
}

double Contour::shift(double a, double epsilon) const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("shift: epsilon must be >= 0");
  if (standard_) return a + epsilon;
  if (epsilon == 0.0) return a;
  const GaussianMixtureDensity& d = *density_;
  double fa = d.cumulative(a);
  double target = fa + epsilon;
  double lo = a, hi;
  if (d.floor() > 0.0) {
    hi = a + epsilon / d.floor();
  } else {
    // No floor: expand until the target is bracketed; fails only if the
    // mixture mass on [a,inf) is below epsilon.
    hi = a + epsilon;
    for (int i = 0; i < 200 && d.cumulative(hi) < target; ++i) hi = a + 2.0 * (hi - a);
    if (d.cumulative(hi) < target)
      throw std::domain_error("shift: density has too little mass above a");
  }
  // Newton clipped to the bracket, bisection as fallback.
  double t = std::min(hi, a + epsilon / std::max(d.value(a), 1e-300));
  for (int iter = 0; iter < 200; ++iter) {
    double r = d.cumulative(t) - target;
    if (std::abs(r) <= 1e-13 * std::max(1.0, std::abs(target))) break;
    if (r > 0.0) hi = t; else lo = t;
    double deriv = d.value(t);
    double step = deriv > 0.0 ? t - r / deriv : lo;
    t = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return t;
}

Barcode Contour::transform(const Barcode& barcode) const {
  if (standard_) return barcode;
  Barcode out;
  for (const Bar& b : barcode.bars())
    out.add(lifetime(0.0, b.birth), b.is_infinite() ? kInf : lifetime(0.0, b.death));
  return out;
}

double pc_norm(const Barcode& barcode, double p, const Contour& contour) {
  std::vector<double> lifetimes;
  lifetimes.reserve(barcode.rank());
  for (const Bar& b : barcode.bars())
    lifetimes.push_back(contour.lifetime(b.birth, b.death));
  return p_norm(lifetimes, p);
}

std::string Contour::to_json() const {
  nlohmann::json j;
  if (standard_) {
    j["type"] = "standard";
  } else {
    j["type"] = "gmm";
    j["floor"] = density_->floor();
    nlohmann::json comps = nlohmann::json::array();
    for (const GaussianComponent& c : density_->components())
      comps.push_back({{"mu", c.mu}, {"sigma", c.sigma}, {"lambda", c.weight}});
    j["components"] = comps;
  }
  return j.dump(2);
}

Contour Contour::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("contour JSON: ") + e.what());
  }
  std::string type = j.at("type").get<std::string>();
  if (type == "standard") return Contour::standard();
  if (type != "gmm") throw std::invalid_argument("contour JSON: unknown type '" + type + "'");
  double floor = j.value("floor", 1e-4);
  std::vector<GaussianComponent> comps;
  for (const auto& c : j.at("components")) {
    comps.push_back({c.at("mu").get<double>(), c.at("sigma").get<double>(),
                     c.at("lambda").get<double>()});
  }
  if (!comps.empty()) comps[0].weight = 1.0;  // first lambda is pinned to 1
  return Contour::distance_type(GaussianMixtureDensity(std::move(comps), floor));
}

Contour Contour::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open contour file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace wsr
