#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lierec/lie_groups.hpp"
#include "lierec/preprocessing.hpp"
#include "lierec/trajectory.hpp"

namespace lierec {

/// Affine map y = W x + b, W stored row-major as out x in.
struct DenseLayer
{
  std::size_t in{0};
  std::size_t out{0};
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0)
  {}

  double & w(std::size_t r, std::size_t c) { return weights[r * in + c]; }
  double w(std::size_t r, std::size_t c) const { return weights[r * in + c]; }

  friend bool operator==(const DenseLayer &, const DenseLayer &) = default;
};

/**
 * @brief Two-hidden-layer ReLU perceptron mapping normalized increments to a generator.
 *
 *   f(x) = W3 relu(W2 relu(W1 x + b1) + b2) + b3
 *
 * The model carries the normalization statistics it was trained with, so a
 * checkpoint is self-sufficient for inference.
 */
struct EncoderModel
{
  GroupKind kind{GroupKind::SE2};
  NormalizationStats stats;
  std::array<DenseLayer, 3> layers;

  std::size_t input_dim() const noexcept { return layers[0].in; }
  std::array<std::size_t, 2> hidden_dims() const noexcept { return {layers[0].out, layers[1].out}; }
  std::size_t output_dim() const noexcept { return layers[2].out; }

  /// Throws DimensionError when layer shapes do not chain or disagree with the group.
  void validate() const;
};

/// Same layout as the model parameters.
using Gradients = std::array<DenseLayer, 3>;

enum class Optimizer { Sgd, Adam };

std::string_view to_string(Optimizer opt) noexcept;
Optimizer parse_optimizer(std::string_view name);

struct TrainConfig
{
  std::array<std::size_t, 2> hidden{64, 64};
  double learning_rate{1e-3};
  std::size_t batch_size{64};
  std::size_t epochs{50};
  Optimizer optimizer{Optimizer::Adam};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
  std::uint64_t seed{1};
  double validation_fraction{0.1};

  void validate() const;
};

struct Sample
{
  FeatureVector features;
  AlgebraVector target;
};

struct EpochStats
{
  std::size_t epoch{0};
  double train_loss{0.0};
  std::optional<double> val_loss;
};

struct TrainReport
{
  double initial_train_loss{0.0};
  std::optional<double> initial_val_loss;
  std::vector<EpochStats> epochs;
};

struct TrainResult
{
  EncoderModel model;
  TrainReport report;
};

/// All-zero weights and biases.
EncoderModel zero_encoder(GroupKind kind, std::size_t input_dim, std::array<std::size_t, 2> hidden,
  NormalizationStats stats);

/// Uniform weights with bound sqrt(6 / (fan_in + fan_out)); zero biases.
EncoderModel init_encoder(GroupKind kind, std::size_t input_dim, std::array<std::size_t, 2> hidden,
  NormalizationStats stats, std::uint64_t seed);

AlgebraVector forward(const EncoderModel & model, std::span<const double> x);

/// Squared Euclidean distance ||pred - target||^2.
double loss_mse(const AlgebraVector & pred, const AlgebraVector & target);

/// Mean of per-sample squared distances.
double loss_mse(std::span<const AlgebraVector> preds, std::span<const AlgebraVector> targets);

/// Mean loss of the model over a sample set.
double dataset_loss(const EncoderModel & model, std::span<const Sample> samples);

/// Exact gradient of ||f(x) - target||^2 with respect to every weight and bias.
Gradients backward(const EncoderModel & model, std::span<const double> x,
  const AlgebraVector & target);

/**
 * @brief Mini-batch training from an initialized model.
 *
 * Samples are reshuffled every epoch from config.seed; per-batch gradients are
 * the mean of per-sample gradients accumulated in batch order. Losses in the
 * report are full-set means evaluated after each epoch. Throws NumericalError
 * when a batch loss becomes non-finite.
 */
TrainResult train(EncoderModel model, std::span<const Sample> train_set,
  std::span<const Sample> val_set, const TrainConfig & config);

/// Trajectories split into training and validation parts.
struct DataSplit
{
  std::vector<Trajectory> train;
  std::vector<Trajectory> validation;
};

/// Seed-pinned shuffle, then the last floor(n * fraction) trajectories form the validation part.
DataSplit split_dataset(std::span<const Trajectory> trajs, double validation_fraction,
  std::uint64_t seed);

std::vector<Sample> make_samples(std::span<const Trajectory> trajs, const NormalizationStats & stats);

/// Full pipeline: split, fit stats on the training part, normalize, initialize, train.
struct EncoderFit
{
  TrainResult result;
  DataSplit split;
};

EncoderFit train_encoder(std::span<const Trajectory> trajs, const TrainConfig & config);

/// forward(model, normalize(to_increments(traj), model.stats))
AlgebraVector predict_generator(const EncoderModel & model, const Trajectory & traj);

}  // namespace lierec
