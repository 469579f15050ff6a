#include "wsr/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsr {

namespace {

double kahan_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    double y = std::abs(v) - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

double kappa(double q) {
  if (q < 1.0) throw std::invalid_argument("kappa: q must be >= 1");
  if (is_inf(q)) return 0.5;
  return std::pow(2.0, (1.0 - q) / q);
}

double p_norm(std::span<const double> values, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p_norm: p must be >= 1");
  if (values.empty()) return 0.0;
  for (double v : values)
    if (is_inf(v)) return kInf;
  if (is_inf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0) return kahan_sum(values);
  // Scale by the max so v^p cannot overflow for large p.
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += std::pow(std::abs(v) / m, p);
  return m * std::pow(sum, 1.0 / p);
}

std::vector<double> prefix_p_norms(std::span<const double> values, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("prefix_p_norms: p must be >= 1");
  std::vector<double> out(values.size() + 1);
  out[0] = 0.0;
  if (is_inf(p)) {
    double m = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      m = is_inf(values[i]) ? kInf : std::max(m, std::abs(values[i]));
      out[i + 1] = m;
    }
    return out;
  }
  if (p == 1.0) {
    double sum = 0.0, comp = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      if (is_inf(values[i])) {
        for (size_t j = i; j < values.size(); ++j) out[j + 1] = kInf;
        return out;
      }
      double y = std::abs(values[i]) - comp;
      double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      out[i + 1] = sum;
    }
    return out;
  }
  // Incrementally rescale the partial sum by the running max, so each
  // prefix norm is computed as scale * (sum of ratios^p)^(1/p) with all
  // ratios in [0,1].
  double scale = 0.0, sum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    double v = std::abs(values[i]);
    if (is_inf(v)) {
      for (size_t j = i; j < values.size(); ++j) out[j + 1] = kInf;
      return out;
    }
    if (v > scale) {
      if (scale > 0.0) sum *= std::pow(scale / v, p);
      scale = v;
    }
    if (scale > 0.0) sum += std::pow(v / scale, p);
    out[i + 1] = scale == 0.0 ? 0.0 : scale * std::pow(sum, 1.0 / p);
  }
  return out;
}

}  // namespace wsr
