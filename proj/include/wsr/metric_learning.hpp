#pragma once

#include <string>
#include <vector>

#include "wsr/data_harness.hpp"

namespace wsr {

/// Learnable parameters of the pseudometric: a k-component Gaussian mixture
/// density (first weight pinned to 1) and the norm order p; q is fixed to 1.
struct MetricParams {
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> lambda;  // lambda[0] == 1 always
  double p = 1.0;
  double floor = 1e-4;

  size_t k() const { return mu.size(); }
  Contour contour() const;
  MetricChoice metric() const { return MetricChoice(p, 1.0, contour()); }

  /// Flat view (mu_1..mu_k, sigma_1..sigma_k, lambda_2..lambda_k, p).
  std::vector<double> flatten() const;
  static MetricParams unflatten(const std::vector<double>& theta, size_t k, double floor);

  std::string to_json() const;
  static MetricParams from_json(const std::string& text);
};

struct FeasibleSet {
  double sigma_min = 1e-3;
  double lambda_min = 1e-4;

  MetricParams project(MetricParams params) const;
  bool contains(const MetricParams& params) const;
};

struct LabeledSample {
  std::string id;
  Label label;
  Barcode barcode;
};

struct LabeledDataset {
  std::vector<LabeledSample> samples;

  std::vector<Barcode> barcodes() const;
  /// Largest finite endpoint over all bars; 1 when there is none.
  double filtration_range() const;
};

LabeledDataset to_labeled_dataset(const LabeledBarcodes& data);

/// Pairwise interleaving distances under the parametrized metric.
std::vector<std::vector<double>> distance_matrix(const LabeledDataset& data,
                                                 const MetricParams& params, int jobs = 1);

/// Intra/inter ratio loss over squared distances, both class terms summed
/// over ordered pairs including i = j. Throws when a class denominator
/// vanishes (degenerate dataset).
double loss(const LabeledDataset& data, const MetricParams& params, int jobs = 1);
double loss_from_matrix(const LabeledDataset& data,
                        const std::vector<std::vector<double>>& matrix);

/// Central finite differences with per-coordinate step 1e-5 * max(1,|theta|);
/// one-sided at the p >= 1 boundary. Throws on a non-finite probe.
std::vector<double> grad_fd(const LabeledDataset& data, const MetricParams& params,
                            int jobs = 1);

struct TrainConfig {
  int iters = 2000;
  double step = 1e-2;
  double momentum = 0.9;
  uint64_t seed = 0;
  size_t k = 2;
  double sigma_min = -1.0;   // < 0: default 1e-3 * filtration range
  double lambda_min = 1e-4;
  double floor = 1e-4;
  int jobs = 1;
  bool random_start = true;  // otherwise theta0 is used
  MetricParams theta0;

  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  static TrainConfig from_json_file(const std::string& path);
};

struct TraceRow {
  int iter;
  double loss;
  std::vector<double> theta;
};

struct TrainResult {
  MetricParams best;
  double best_loss = 0.0;
  std::vector<TraceRow> trace;
  bool aborted = false;  // non-finite loss encountered

  std::string trace_csv(size_t k) const;
};

/// Projected heavy-ball gradient descent on the loss; the step is scaled by
/// the filtration range on the mu and sigma coordinates.
TrainResult train(const LabeledDataset& data, const TrainConfig& config);

/// Feasible random initialization used when the config requests one.
MetricParams random_feasible_start(SplitRng& rng, size_t k, double filtration_range,
                                   double floor);

}  // namespace wsr
