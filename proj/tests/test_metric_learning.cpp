#include <doctest.h>

#include <cmath>

#include "support/generators.hpp"
#include "wsr/metric_learning.hpp"

using namespace wsr;
using namespace wsr::testsupport;

namespace {

MetricParams simple_params(double p = 1.5) {
  MetricParams theta;
  theta.mu = {2.0, 5.0};
  theta.sigma = {1.0, 2.0};
  theta.lambda = {1.0, 0.8};
  theta.p = p;
  return theta;
}

LabeledDataset tiny_dataset(uint64_t seed, int per_class, int bars_a, int bars_b) {
  SplitRng rng(seed);
  LabeledDataset data;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      SplitRng r = rng.stream(2 * i + c);
      Barcode barcode;
      const int bars = c == 0 ? bars_a : bars_b;
      for (int b = 0; b < bars; ++b) {
        const double birth = r.uniform_real(0.0, 8.0);
        barcode.add(birth, birth + r.uniform_real(0.1, 1.0));
      }
      barcode.add(0.0, 8.0 + r.uniform_real(0.0, 2.0));
      data.samples.push_back({(c == 0 ? "A" : "B") + std::to_string(i),
                              c == 0 ? Label::A : Label::B, std::move(barcode)});
    }
  }
  return data;
}

}  // namespace

TEST_CASE("distance matrix basics") {
  LabeledDataset one;
  one.samples.push_back({"A0", Label::A, Barcode{}});
  auto m1 = distance_matrix(one, simple_params());
  REQUIRE(m1.size() == 1);
  CHECK(m1[0][0] == 0.0);

  LabeledDataset dup = tiny_dataset(5, 2, 3, 9);
  dup.samples[1].barcode = dup.samples[0].barcode;
  auto m = distance_matrix(dup, simple_params());
  CHECK(m[0][1] == 0.0);
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m.size(); ++j) CHECK(m[i][j] == m[j][i]);

  // jobs > 1 gives the identical matrix.
  auto parallel = distance_matrix(dup, simple_params(), 4);
  CHECK(parallel == m);
}

TEST_CASE("loss closed forms") {
  // Intra distances zero, inter positive -> loss 0.
  LabeledDataset data;
  Barcode small, large;
  small.add(0, 1);
  large.add(0, 5);
  data.samples.push_back({"A0", Label::A, small});
  data.samples.push_back({"A1", Label::A, small});
  data.samples.push_back({"B0", Label::B, large});
  data.samples.push_back({"B1", Label::B, large});
  MetricParams theta = simple_params();
  CHECK(loss(data, theta) == doctest::Approx(0.0).epsilon(1e-15));

  // All off-diagonal distances equal d: loss = (n-2)/(n-1).
  const size_t n_a = 3, n_b = 2, n = n_a + n_b;
  std::vector<std::vector<double>> equal(n, std::vector<double>(n, 2.5));
  for (size_t i = 0; i < n; ++i) equal[i][i] = 0.0;
  LabeledDataset labels_only;
  for (size_t i = 0; i < n_a; ++i)
    labels_only.samples.push_back({"A" + std::to_string(i), Label::A, small});
  for (size_t i = 0; i < n_b; ++i)
    labels_only.samples.push_back({"B" + std::to_string(i), Label::B, small});
  CHECK(loss_from_matrix(labels_only, equal) ==
        doctest::Approx(double(n - 2) / double(n - 1)).epsilon(1e-12));

  // Scale invariance of the loss in the distances.
  auto scaled = equal;
  for (auto& row : scaled)
    for (double& v : row) v *= 17.0;
  CHECK(loss_from_matrix(labels_only, scaled) ==
        doctest::Approx(loss_from_matrix(labels_only, equal)).epsilon(1e-12));

  // Degenerate dataset: all distances zero.
  std::vector<std::vector<double>> zeros(n, std::vector<double>(n, 0.0));
  CHECK_THROWS_AS(loss_from_matrix(labels_only, zeros), std::domain_error);
}

TEST_CASE("label swap symmetry") {
  LabeledDataset data = tiny_dataset(7, 4, 5, 11);
  LabeledDataset swapped = data;
  for (auto& s : swapped.samples) s.label = s.label == Label::A ? Label::B : Label::A;
  MetricParams theta = simple_params();
  CHECK(loss(data, theta) == doctest::Approx(loss(swapped, theta)).epsilon(1e-12));
}

TEST_CASE("loss stays within [0,2] on random parameters") {
  LabeledDataset data = tiny_dataset(9, 4, 4, 12);
  SplitRng rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    SplitRng r = rng.stream(trial);
    MetricParams theta = random_feasible_start(r, 2, data.filtration_range(), 1e-4);
    const double value = loss(data, theta);
    CHECK(value >= 0.0);
    CHECK(value <= 2.0);
  }
}

TEST_CASE("finite differences: flat coordinate and directional consistency") {
  LabeledDataset data = tiny_dataset(13, 3, 4, 10);
  // Mixture component parked far outside the filtration range with minimal
  // weight: the loss cannot see it, so its partials vanish.
  MetricParams theta;
  theta.mu = {4.0, 1e6};
  theta.sigma = {2.0, 0.5};
  theta.lambda = {1.0, 1e-4};
  theta.p = 1.3;
  std::vector<double> grad = grad_fd(data, theta);
  REQUIRE(grad.size() == 6);
  CHECK(std::abs(grad[1]) < 1e-6);  // mu_2
  CHECK(std::abs(grad[3]) < 1e-6);  // sigma_2

  // The p coordinate at the boundary p = 1 uses a one-sided difference.
  MetricParams at_boundary = theta;
  at_boundary.p = 1.0;
  CHECK_NOTHROW(grad_fd(data, at_boundary));

  // Richardson: the directional estimate at h and h/2 agree to O(h^2) and
  // match <grad, u>.
  MetricParams base = simple_params(1.4);
  std::vector<double> g = grad_fd(data, base);
  SplitRng rng(92);
  std::vector<double> u(g.size());
  double norm = 0.0;
  for (double& x : u) {
    x = rng.uniform_real(-1.0, 1.0);
    norm += x * x;
  }
  for (double& x : u) x /= std::sqrt(norm);
  auto eval_dir = [&](double t) {
    std::vector<double> flat = base.flatten();
    for (size_t i = 0; i < flat.size(); ++i) flat[i] += t * u[i];
    return loss(data, MetricParams::unflatten(flat, base.k(), base.floor));
  };
  const double h = 1e-4;
  const double d_h = (eval_dir(h) - eval_dir(-h)) / (2.0 * h);
  const double d_h2 = (eval_dir(h / 2) - eval_dir(-h / 2)) / h;
  double inner = 0.0;
  for (size_t i = 0; i < g.size(); ++i) inner += g[i] * u[i];
  CHECK(d_h == doctest::Approx(inner).epsilon(1e-3));
  CHECK(std::abs(d_h2 - d_h) < 1e-3 * (1.0 + std::abs(d_h)));
}

TEST_CASE("gradient along an approximate global rescale direction vanishes") {
  LabeledDataset data = tiny_dataset(17, 3, 4, 10);
  // First component parked far away, almost-zero floor: scaling the free
  // weights rescales every distance, which the loss ignores.
  MetricParams theta;
  theta.mu = {1e6, 3.0, 6.0};
  theta.sigma = {0.5, 1.5, 2.0};
  theta.lambda = {1.0, 0.9, 1.3};
  theta.p = 1.7;
  theta.floor = 1e-10;
  std::vector<double> grad = grad_fd(data, theta);
  // Direction: d lambda_i = lambda_i on the free weights.
  const double directional = grad[6] * theta.lambda[1] + grad[7] * theta.lambda[2];
  CHECK(std::abs(directional) < 1e-4);
}

TEST_CASE("projection and zero-iteration training") {
  FeasibleSet feasible{0.01, 1e-4};
  MetricParams theta = simple_params();
  theta.sigma[0] = 1e-9;
  theta.lambda[1] = -2.0;
  theta.p = 0.2;
  MetricParams projected = feasible.project(theta);
  CHECK(feasible.contains(projected));
  CHECK(projected.sigma[0] == 0.01);
  CHECK(projected.lambda[1] == 1e-4);
  CHECK(projected.p == 1.0);
  CHECK(feasible.project(projected).flatten() == projected.flatten());

  LabeledDataset data = tiny_dataset(19, 3, 4, 10);
  TrainConfig config;
  config.iters = 0;
  config.seed = 3;
  config.k = 2;
  config.random_start = false;
  config.theta0 = simple_params();
  TrainResult result = train(data, config);
  CHECK_FALSE(result.aborted);
  REQUIRE(result.trace.size() == 1);
  CHECK(result.best.flatten() == config.theta0.flatten());
}

TEST_CASE("short training run decreases the loss") {
  LabeledDataset data = tiny_dataset(23, 5, 4, 14);
  TrainConfig config;
  config.iters = 60;
  config.seed = 11;
  config.k = 2;
  TrainResult result = train(data, config);
  CHECK_FALSE(result.aborted);
  REQUIRE(result.trace.size() == 61);
  CHECK(result.best_loss < result.trace.front().loss);
  // Best-seen channel is genuinely the minimum of the trace.
  double seen = kInf;
  for (const TraceRow& row : result.trace) seen = std::min(seen, row.loss);
  CHECK(result.best_loss == doctest::Approx(seen));
}

TEST_CASE("infinite distances abort training with the partial trace") {
  LabeledDataset data = tiny_dataset(29, 2, 3, 6);
  data.samples[0].barcode.add(0.0, kInf);  // one sample now at infinite distance
  MetricParams theta = simple_params();
  CHECK_THROWS_AS(loss(data, theta), std::domain_error);

  TrainConfig config;
  config.iters = 5;
  config.seed = 2;
  config.k = 2;
  TrainResult result = train(data, config);
  CHECK(result.aborted);
}

TEST_CASE("training is bitwise reproducible across jobs settings") {
  LabeledDataset data = tiny_dataset(31, 3, 4, 9);
  TrainConfig serial;
  serial.iters = 4;
  serial.seed = 8;
  serial.k = 2;
  serial.jobs = 1;
  TrainConfig parallel = serial;
  parallel.jobs = 4;
  TrainResult a = train(data, serial);
  TrainResult b = train(data, parallel);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].loss == b.trace[i].loss);  // exact, not approximate
    CHECK(a.trace[i].theta == b.trace[i].theta);
  }
}

TEST_CASE("training config round trip") {
  TrainConfig config;
  config.iters = 123;
  config.step = 0.05;
  config.momentum = 0.8;
  config.seed = 99;
  config.k = 3;
  config.random_start = false;
  config.theta0 = simple_params();
  config.theta0.mu.push_back(9.0);
  config.theta0.sigma.push_back(1.0);
  config.theta0.lambda.push_back(0.4);
  TrainConfig back = TrainConfig::from_json(config.to_json());
  CHECK(back.iters == 123);
  CHECK(back.step == doctest::Approx(0.05));
  CHECK(back.momentum == doctest::Approx(0.8));
  CHECK(back.seed == 99);
  CHECK(back.k == 3);
  CHECK_FALSE(back.random_start);
  CHECK(back.theta0.flatten() == config.theta0.flatten());

  TrainConfig random_config = TrainConfig::from_json(R"({"iters": 5, "theta0": "random"})");
  CHECK(random_config.random_start);
  CHECK(random_config.iters == 5);
}
