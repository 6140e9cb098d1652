#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pol/prng.hpp"

namespace pol {

/// Row-major design matrix plus targets.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, std::vector<double> x, std::vector<double> y);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return y_.size(); }
  std::span<const double> row(std::size_t i) const { return {x_.data() + i * dim_, dim_}; }
  double target(std::size_t i) const { return y_[i]; }
  const std::vector<double>& features() const { return x_; }
  const std::vector<double>& targets() const { return y_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Synthetic linear-regression data: x ~ U[-1,1]^d, y = <w*, x> + b* + N(0, noise^2),
/// with w*, b* ~ U[-1,1]. Everything is drawn from `seed`.
Dataset make_synthetic_dataset(const Seed& seed, std::size_t dim, std::size_t n,
                               double noise_stddev = 0.1);

/// Model parameters; for the linear model, d weights followed by the bias.
using Weights = std::vector<double>;

enum class ModelKind : std::uint8_t { Linear };
enum class LossKind : std::uint8_t { HalfSquared };
enum class InitRule : std::uint8_t { Zeros };

/// The training environment: learning rate, batch size, epochs and the
/// number of epochs between saved checkpoints.
struct Hyper {
  double learning_rate = 0.01;
  std::size_t batch_size = 1;
  std::size_t epochs = 1;
  std::size_t epochs_per_stage = 1;
  ModelKind model = ModelKind::Linear;
  LossKind loss = LossKind::HalfSquared;
  InitRule init = InitRule::Zeros;

  /// T = E / k.
  std::size_t stages() const { return epochs / epochs_per_stage; }
  /// Throws std::invalid_argument unless k | E, m | n and eta > 0.
  void validate(std::size_t dataset_size) const;

  friend bool operator==(const Hyper&, const Hyper&) = default;
};

std::size_t weight_count(ModelKind model, std::size_t dim);
Weights initial_weights(const Hyper& hyper, std::size_t dim);

double model_predict(std::span<const double> w, std::span<const double> x);

/// Gradient of sum_{i in batch} 1/2 (f(w,x_i) - y_i)^2, accumulated in
/// ascending index order regardless of the order of `batch`.
Weights batch_loss_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                            const Dataset& data);

Weights sgd_step(std::span<const double> w, std::span<const std::size_t> batch,
                 double learning_rate, const Dataset& data);

Weights train_epoch(std::span<const double> w, std::span<const Batch> batches,
                    double learning_rate, const Dataset& data);

/// k epochs; epoch x in 1..k uses draw_batches(stage_seed, x, n, m).
Weights train_stage(std::span<const double> w, const Seed& stage_seed, const Hyper& hyper,
                    const Dataset& data);

/// Same as train_stage but stops after `epochs` epochs (used by fabricated stages).
Weights train_epochs(std::span<const double> w, const Seed& stage_seed, const Hyper& hyper,
                     const Dataset& data, std::size_t epochs);

/// Mean of 1/2 (f - y)^2 over the whole dataset.
double empirical_risk(std::span<const double> w, const Dataset& data);

/// Canonical byte form: LE IEEE-754 doubles in index order.
std::vector<std::uint8_t> serialize_weights(std::span<const double> w);
Weights deserialize_weights(std::span<const std::uint8_t> bytes);

/// Bitwise equality (distinguishes -0.0 from 0.0).
bool bitwise_equal(std::span<const double> a, std::span<const double> b);

}  // namespace pol
