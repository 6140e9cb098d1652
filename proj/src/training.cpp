#include "pol/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace pol {

Dataset::Dataset(std::size_t dim, std::vector<double> x, std::vector<double> y)
    : dim_(dim), x_(std::move(x)), y_(std::move(y)) {
  if (dim_ == 0) throw std::invalid_argument("dataset dimension must be positive");
  if (y_.empty()) throw std::invalid_argument("dataset must contain at least one point");
  if (x_.size() != y_.size() * dim_) {
    throw std::invalid_argument("dataset: x has " + std::to_string(x_.size()) +
                                " entries, expected n*d = " + std::to_string(y_.size() * dim_));
  }
}

Dataset make_synthetic_dataset(const Seed& seed, std::size_t dim, std::size_t n,
                               double noise_stddev) {
  if (dim == 0 || n == 0) throw std::invalid_argument("synthetic dataset needs d, n >= 1");
  RandomStream stream(seed);
  auto signed_unit = [&] { return 2.0 * stream.uniform01() - 1.0; };
  std::vector<double> truth(dim + 1);
  for (auto& v : truth) v = signed_unit();

  std::vector<double> x(n * dim);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = truth[dim];
    for (std::size_t j = 0; j < dim; ++j) {
      x[i * dim + j] = signed_unit();
      acc += truth[j] * x[i * dim + j];
    }
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    double u1 = 1.0 - stream.uniform01();
    double u2 = stream.uniform01();
    double gauss = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    y[i] = acc + noise_stddev * gauss;
  }
  return Dataset(dim, std::move(x), std::move(y));
}

void Hyper::validate(std::size_t dataset_size) const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be positive and finite");
  }
  if (epochs_per_stage == 0 || epochs == 0 || epochs % epochs_per_stage != 0) {
    throw std::invalid_argument("epochs per stage (" + std::to_string(epochs_per_stage) +
                                ") must divide epochs (" + std::to_string(epochs) + ")");
  }
  if (batch_size == 0 || dataset_size % batch_size != 0) {
    throw std::invalid_argument("batch size (" + std::to_string(batch_size) +
                                ") must divide dataset size (" + std::to_string(dataset_size) +
                                ")");
  }
}

std::size_t weight_count(ModelKind model, std::size_t dim) {
  switch (model) {
    case ModelKind::Linear:
      return dim + 1;
  }
  throw std::invalid_argument("unknown model");
}

Weights initial_weights(const Hyper& hyper, std::size_t dim) {
  switch (hyper.init) {
    case InitRule::Zeros:
      return Weights(weight_count(hyper.model, dim), 0.0);
  }
  throw std::invalid_argument("unknown initialization rule");
}

double model_predict(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size() + 1) {
    throw std::invalid_argument("model_predict: weight length " + std::to_string(w.size()) +
                                " does not match input dimension " + std::to_string(x.size()));
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * x[j];
  return acc + w[x.size()];
}

Weights batch_loss_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                            const Dataset& data) {
  if (batch.empty()) throw std::invalid_argument("batch_loss_gradient: empty batch");
  if (w.size() != data.dim() + 1) {
    throw std::invalid_argument("batch_loss_gradient: weight length does not match dataset");
  }
  std::vector<std::size_t> order(batch.begin(), batch.end());
  std::sort(order.begin(), order.end());
  const std::size_t d = data.dim();
  Weights grad(d + 1, 0.0);
  for (auto i : order) {
    if (i >= data.size()) throw std::out_of_range("batch index " + std::to_string(i));
    auto x = data.row(i);
    double residual = model_predict(w, x) - data.target(i);
    for (std::size_t j = 0; j < d; ++j) grad[j] += residual * x[j];
    grad[d] += residual;
  }
  return grad;
}

Weights sgd_step(std::span<const double> w, std::span<const std::size_t> batch,
                 double learning_rate, const Dataset& data) {
  auto grad = batch_loss_gradient(w, batch, data);
  Weights next(w.begin(), w.end());
  for (std::size_t j = 0; j < next.size(); ++j) next[j] -= learning_rate * grad[j];
  return next;
}

Weights train_epoch(std::span<const double> w, std::span<const Batch> batches,
                    double learning_rate, const Dataset& data) {
  Weights cur(w.begin(), w.end());
  for (const auto& b : batches) cur = sgd_step(cur, b, learning_rate, data);
  return cur;
}

Weights train_epochs(std::span<const double> w, const Seed& stage_seed, const Hyper& hyper,
                     const Dataset& data, std::size_t epochs) {
  Weights cur(w.begin(), w.end());
  for (std::size_t e = 1; e <= epochs; ++e) {
    auto batches = draw_batches(stage_seed, e, data.size(), hyper.batch_size);
    cur = train_epoch(cur, batches, hyper.learning_rate, data);
  }
  return cur;
}

Weights train_stage(std::span<const double> w, const Seed& stage_seed, const Hyper& hyper,
                    const Dataset& data) {
  hyper.validate(data.size());
  return train_epochs(w, stage_seed, hyper, data, hyper.epochs_per_stage);
}

double empirical_risk(std::span<const double> w, const Dataset& data) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double r = model_predict(w, data.row(i)) - data.target(i);
    acc += 0.5 * r * r;
  }
  return acc / static_cast<double>(data.size());
}

std::vector<std::uint8_t> serialize_weights(std::span<const double> w) {
  std::vector<std::uint8_t> out;
  out.reserve(w.size() * 8);
  for (double v : w) append_le64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

Weights deserialize_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 8 != 0) {
    throw std::invalid_argument("weight record length must be a multiple of 8 bytes");
  }
  Weights w(bytes.size() / 8);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::bit_cast<double>(read_le64(bytes.subspan(8 * i, 8)));
  }
  return w;
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace pol
