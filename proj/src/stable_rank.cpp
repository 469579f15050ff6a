#include "wsr/stable_rank.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wsr {

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<uint64_t> values) {
  if (breakpoints.empty() || breakpoints.size() != values.size())
    throw std::invalid_argument("StepFunction: breakpoints/values size mismatch");
  if (breakpoints.front() != 0.0)
    throw std::invalid_argument("StepFunction: domain must start at 0");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw std::invalid_argument("StepFunction: breakpoints must increase strictly");
    if (values[i] < values[i + 1])
      throw std::invalid_argument("StepFunction: values must be non-increasing");
  }
  // Canonical form: merge equal consecutive values.
  for (size_t i = 0; i < breakpoints.size(); ++i) {
    if (!breakpoints_.empty() && values_.back() == values[i]) continue;
    breakpoints_.push_back(breakpoints[i]);
    values_.push_back(values[i]);
  }
}

uint64_t StepFunction::evaluate(double t) const {
  if (t < 0.0) throw std::invalid_argument("StepFunction: negative argument");
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[(it - breakpoints_.begin()) - 1];
}

double StepFunction::inverse(uint64_t y) const {
  if (y < limit()) throw std::invalid_argument("StepFunction: inverse below limit value");
  for (size_t i = 0; i < values_.size(); ++i)
    if (values_[i] <= y) return breakpoints_[i];
  return breakpoints_.back();
}

std::string StepFunction::to_json() const {
  nlohmann::json j;
  j["breakpoints"] = breakpoints_;
  j["values"] = values_;
  j["limit"] = limit();
  return j.dump(2);
}

StepFunction StepFunction::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return StepFunction(j.at("breakpoints").get<std::vector<double>>(),
                      j.at("values").get<std::vector<uint64_t>>());
}

std::string StepFunction::inverse_csv() const {
  std::ostringstream out;
  out << "value,t\n";
  for (size_t i = 0; i < values_.size(); ++i)
    out << values_[i] << "," << format_double(breakpoints_[i]) << "\n";
  return out.str();
}

LifetimeProfile lifetime_profile(const Barcode& x, const MetricChoice& m) {
  LifetimeProfile out;
  std::vector<double> lifetimes;
  lifetimes.reserve(x.rank());
  for (const Bar& b : x.bars()) {
    if (b.is_infinite()) {
      ++out.infinite_count;
      continue;
    }
    lifetimes.push_back(m.contour.lifetime(b.birth, b.death));
  }
  std::sort(lifetimes.begin(), lifetimes.end());
  out.prefix = prefix_p_norms(lifetimes, m.p);
  const double k = kappa(m.q);
  for (double& v : out.prefix) v *= k;
  return out;
}

StepFunction stable_rank(const Barcode& x, const MetricChoice& m) {
  LifetimeProfile profile = lifetime_profile(x, m);
  const uint64_t shift = profile.infinite_count;
  const size_t finite = profile.prefix.size() - 1;
  std::vector<double> breakpoints;
  std::vector<uint64_t> values;
  breakpoints.push_back(0.0);
  values.push_back(finite + shift);
  for (size_t j = 1; j <= finite; ++j) {
    const double t = profile.prefix[j];
    const uint64_t v = finite - j + shift;
    if (t == breakpoints.back()) {
      values.back() = v;  // p = inf can repeat t_j; keep the largest drop
    } else {
      breakpoints.push_back(t);
      values.push_back(v);
    }
  }
  return StepFunction(std::move(breakpoints), std::move(values));
}

double interleaving_step(const StepFunction& f, const StepFunction& g) {
  if (f.limit() != g.limit()) return kInf;
  std::vector<uint64_t> drops;
  drops.insert(drops.end(), f.values().begin(), f.values().end());
  drops.insert(drops.end(), g.values().begin(), g.values().end());
  double worst = 0.0;
  for (uint64_t y : drops) worst = std::max(worst, std::abs(f.inverse(y) - g.inverse(y)));
  return worst;
}

double interleaving_from_profiles(const LifetimeProfile& f, const LifetimeProfile& g) {
  if (f.infinite_count != g.infinite_count) return kInf;
  const size_t n = f.prefix.size() - 1;
  const size_t m = g.prefix.size() - 1;
  const size_t common = std::min(n, m);
  double worst = 0.0;
  for (size_t i = 0; i <= common; ++i)
    worst = std::max(worst, std::abs(f.prefix[n - i] - g.prefix[m - i]));
  return worst;
}

double interleaving_fast(const Barcode& x, const Barcode& y, const MetricChoice& m) {
  return interleaving_from_profiles(lifetime_profile(x, m), lifetime_profile(y, m));
}

}  // namespace wsr
