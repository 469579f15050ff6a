#include "wsr/metric_learning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wsr {

Contour MetricParams::contour() const {
  std::vector<GaussianComponent> comps;
  comps.reserve(k());
  for (size_t i = 0; i < k(); ++i) comps.push_back({mu[i], sigma[i], lambda[i]});
  return Contour::distance_type(GaussianMixtureDensity(std::move(comps), floor));
}

std::vector<double> MetricParams::flatten() const {
  std::vector<double> theta;
  theta.insert(theta.end(), mu.begin(), mu.end());
  theta.insert(theta.end(), sigma.begin(), sigma.end());
  theta.insert(theta.end(), lambda.begin() + 1, lambda.end());
  theta.push_back(p);
  return theta;
}

MetricParams MetricParams::unflatten(const std::vector<double>& theta, size_t k,
                                     double floor) {
  if (theta.size() != 3 * k) throw std::invalid_argument("unflatten: expected 3k entries");
  MetricParams out;
  out.mu.assign(theta.begin(), theta.begin() + k);
  out.sigma.assign(theta.begin() + k, theta.begin() + 2 * k);
  out.lambda.assign(1, 1.0);
  out.lambda.insert(out.lambda.end(), theta.begin() + 2 * k, theta.begin() + 3 * k - 1);
  out.p = theta.back();
  out.floor = floor;
  return out;
}

std::string MetricParams::to_json() const {
  nlohmann::json j;
  j["mu"] = mu;
  j["sigma"] = sigma;
  j["lambda"] = lambda;
  j["p"] = p;
  j["floor"] = floor;
  return j.dump(2);
}

MetricParams MetricParams::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MetricParams out;
  out.mu = j.at("mu").get<std::vector<double>>();
  out.sigma = j.at("sigma").get<std::vector<double>>();
  out.lambda = j.at("lambda").get<std::vector<double>>();
  out.p = j.at("p").get<double>();
  out.floor = j.value("floor", 1e-4);
  if (out.mu.size() != out.sigma.size() || out.mu.size() != out.lambda.size())
    throw std::invalid_argument("MetricParams: component count mismatch");
  if (!out.lambda.empty()) out.lambda[0] = 1.0;
  return out;
}

MetricParams FeasibleSet::project(MetricParams params) const {
  for (double& s : params.sigma) s = std::max(s, sigma_min);
  for (size_t i = 1; i < params.lambda.size(); ++i)
    params.lambda[i] = std::max(params.lambda[i], lambda_min);
  params.lambda[0] = 1.0;
  params.p = std::max(params.p, 1.0);
  return params;
}

bool FeasibleSet::contains(const MetricParams& params) const {
  for (double s : params.sigma)
    if (s < sigma_min) return false;
  for (size_t i = 1; i < params.lambda.size(); ++i)
    if (params.lambda[i] < lambda_min) return false;
  return params.p >= 1.0;
}

LabeledDataset to_labeled_dataset(const LabeledBarcodes& data) {
  LabeledDataset out;
  for (size_t i = 0; i < data.barcodes.size(); ++i)
    out.samples.push_back({data.ids[i], data.labels[i], data.barcodes[i]});
  return out;
}

std::vector<Barcode> LabeledDataset::barcodes() const {
  std::vector<Barcode> out;
  out.reserve(samples.size());
  for (const LabeledSample& s : samples) out.push_back(s.barcode);
  return out;
}

double LabeledDataset::filtration_range() const {
  double r = 0.0;
  for (const LabeledSample& s : samples)
    for (const Bar& b : s.barcode.bars()) {
      r = std::max(r, b.birth);
      if (!b.is_infinite()) r = std::max(r, b.death);
    }
  return r > 0.0 ? r : 1.0;
}

std::vector<std::vector<double>> distance_matrix(const LabeledDataset& data,
                                                 const MetricParams& params, int jobs) {
  return interleaving_distance_matrix(data.barcodes(), params.metric(), jobs);
}

double loss_from_matrix(const LabeledDataset& data,
                        const std::vector<std::vector<double>>& matrix) {
  const size_t n = data.samples.size();
  double intra_a = 0.0, intra_b = 0.0, from_a = 0.0, from_b = 0.0;
  bool any_positive = false;
  for (size_t i = 0; i < n; ++i) {
    const bool ia = data.samples[i].label == Label::A;
    for (size_t j = 0; j < n; ++j) {
      if (!std::isfinite(matrix[i][j]))
        throw std::domain_error(
            "loss: non-finite pairwise distance (mismatched infinite-bar counts?)");
      const double d2 = matrix[i][j] * matrix[i][j];
      any_positive = any_positive || d2 > 0.0;
      const bool ja = data.samples[j].label == Label::A;
      (ia ? from_a : from_b) += d2;
      if (ia && ja) intra_a += d2;
      if (!ia && !ja) intra_b += d2;
    }
  }
  if (!any_positive)
    throw std::domain_error("loss: all pairwise distances are zero (degenerate dataset)");
  if (from_a == 0.0 || from_b == 0.0)
    throw std::domain_error("loss: a class has zero inter-class denominator");
  return intra_a / from_a + intra_b / from_b;
}

double loss(const LabeledDataset& data, const MetricParams& params, int jobs) {
  return loss_from_matrix(data, distance_matrix(data, params, jobs));
}

std::vector<double> grad_fd(const LabeledDataset& data, const MetricParams& params,
                            int jobs) {
  const std::vector<double> theta = params.flatten();
  const size_t k = params.k();
  std::vector<double> grad(theta.size(), 0.0);
  auto eval = [&](const std::vector<double>& t) {
    const double value = loss(data, MetricParams::unflatten(t, k, params.floor), jobs);
    if (!std::isfinite(value)) throw std::domain_error("grad_fd: non-finite loss at probe");
    return value;
  };
  for (size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta[i]));
    std::vector<double> plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    // The p coordinate may not cross the p >= 1 boundary; fall back to a
    // forward difference there.
    if (i == theta.size() - 1 && minus[i] < 1.0) {
      grad[i] = (eval(plus) - eval(theta)) / h;
    } else {
      grad[i] = (eval(plus) - eval(minus)) / (2.0 * h);
    }
  }
  return grad;
}

MetricParams random_feasible_start(SplitRng& rng, size_t k, double filtration_range,
                                   double floor) {
  MetricParams out;
  out.floor = floor;
  for (size_t i = 0; i < k; ++i) {
    out.mu.push_back(rng.uniform_real(0.0, filtration_range));
    out.sigma.push_back(rng.uniform_real(filtration_range / 50.0, filtration_range / 5.0));
    out.lambda.push_back(i == 0 ? 1.0 : rng.uniform_real(0.5, 2.0));
  }
  out.p = rng.uniform_real(1.0, 3.0);
  return out;
}

std::string TrainConfig::to_json() const {
  nlohmann::json j;
  j["iters"] = iters;
  j["step"] = step;
  j["momentum"] = momentum;
  j["seed"] = seed;
  j["k"] = k;
  j["sigma_min"] = sigma_min;
  j["lambda_min"] = lambda_min;
  j["floor"] = floor;
  j["jobs"] = jobs;
  if (random_start)
    j["theta0"] = "random";
  else
    j["theta0"] = nlohmann::json::parse(theta0.to_json());
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  TrainConfig c;
  c.iters = j.value("iters", 2000);
  c.step = j.value("step", 1e-2);
  c.momentum = j.value("momentum", 0.9);
  c.seed = j.value("seed", uint64_t{0});
  c.k = j.value("k", size_t{2});
  c.sigma_min = j.value("sigma_min", -1.0);
  c.lambda_min = j.value("lambda_min", 1e-4);
  c.floor = j.value("floor", 1e-4);
  c.jobs = j.value("jobs", 1);
  if (j.contains("theta0") && j["theta0"].is_object()) {
    c.random_start = false;
    c.theta0 = MetricParams::from_json(j["theta0"].dump());
    c.k = c.theta0.k();
  }
  return c;
}

TrainConfig TrainConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open training config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string TrainResult::trace_csv(size_t k) const {
  std::ostringstream out;
  out << "iter,loss";
  for (size_t i = 1; i <= k; ++i) out << ",mu" << i;
  for (size_t i = 1; i <= k; ++i) out << ",sigma" << i;
  for (size_t i = 2; i <= k; ++i) out << ",lambda" << i;
  out << ",p\n";
  for (const TraceRow& row : trace) {
    out << row.iter << "," << format_double(row.loss);
    for (double v : row.theta) out << "," << format_double(v);
    out << "\n";
  }
  return out.str();
}

TrainResult train(const LabeledDataset& data, const TrainConfig& config) {
  const double range = data.filtration_range();
  FeasibleSet feasible;
  feasible.sigma_min = config.sigma_min >= 0.0 ? config.sigma_min : 1e-3 * range;
  feasible.lambda_min = config.lambda_min;

  SplitRng rng = SplitRng(config.seed).stream(0x7261696eULL);
  MetricParams theta =
      config.random_start ? random_feasible_start(rng, config.k, range, config.floor)
                          : config.theta0;
  theta = feasible.project(theta);

  // Per-coordinate step scale: mu and sigma live on the filtration scale.
  std::vector<double> scale(3 * config.k, 1.0);
  for (size_t i = 0; i < 2 * config.k; ++i) scale[i] = range;

  TrainResult result;
  std::vector<double> velocity(3 * config.k, 0.0);
  double current = 0.0;
  try {
    current = loss(data, theta, config.jobs);
  } catch (const std::domain_error&) {
    result.aborted = true;
    result.best = theta;
    return result;
  }
  result.best = theta;
  result.best_loss = current;
  result.trace.push_back({0, current, theta.flatten()});

  for (int iter = 1; iter <= config.iters; ++iter) {
    std::vector<double> grad;
    try {
      grad = grad_fd(data, theta, config.jobs);
    } catch (const std::domain_error&) {
      result.aborted = true;
      return result;
    }
    std::vector<double> flat = theta.flatten();
    for (size_t i = 0; i < flat.size(); ++i) {
      velocity[i] = config.momentum * velocity[i] - config.step * scale[i] * grad[i];
      flat[i] += velocity[i];
    }
    theta = feasible.project(MetricParams::unflatten(flat, config.k, config.floor));
    try {
      current = loss(data, theta, config.jobs);
    } catch (const std::domain_error&) {
      result.aborted = true;
      return result;
    }
    if (!std::isfinite(current)) {
      result.aborted = true;
      return result;
    }
    result.trace.push_back({iter, current, theta.flatten()});
    if (current < result.best_loss) {
      result.best_loss = current;
      result.best = theta;
    }
  }
  return result;
}

}  // namespace wsr
