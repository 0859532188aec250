#include "lierec/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lierec/error.hpp"
#include "lierec/rng.hpp"

namespace lierec {

namespace {

// Activations kept for the backward pass.
struct ForwardTrace
{
  std::vector<double> z1, a1, z2, a2, out;
};

void affine(const DenseLayer & layer, std::span<const double> x, std::vector<double> & y)
{
  y.assign(layer.bias.begin(), layer.bias.end());
  for (std::size_t r = 0; r < layer.out; ++r) {
    const double * row = layer.weights.data() + r * layer.in;
    double acc = 0.0;
    for (std::size_t c = 0; c < layer.in; ++c) { acc += row[c] * x[c]; }
    y[r] += acc;
  }
}

void relu(const std::vector<double> & z, std::vector<double> & a)
{
  a.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) { a[i] = z[i] > 0.0 ? z[i] : 0.0; }
}

void run_forward(const EncoderModel & model, std::span<const double> x, ForwardTrace & tr)
{
  if (x.size() != model.input_dim()) {
    throw DimensionError("forward: input length " + std::to_string(x.size()) + ", model expects "
                         + std::to_string(model.input_dim()));
  }
  affine(model.layers[0], x, tr.z1);
  relu(tr.z1, tr.a1);
  affine(model.layers[1], tr.a1, tr.z2);
  relu(tr.z2, tr.a2);
  affine(model.layers[2], tr.a2, tr.out);
}

Gradients zero_like(const EncoderModel & model)
{
  Gradients g;
  for (std::size_t i = 0; i < 3; ++i) { g[i] = DenseLayer(model.layers[i].in, model.layers[i].out); }
  return g;
}

// Accumulates scale * d||f(x) - y||^2 / d(theta) into grads.
void accumulate_backward(const EncoderModel & model, std::span<const double> x,
  const AlgebraVector & target, double scale, ForwardTrace & tr, Gradients & grads,
  std::vector<double> & d2, std::vector<double> & d1)
{
  run_forward(model, x, tr);
  const std::size_t out = model.output_dim();
  if (target.size() != out) { throw DimensionError("backward: target length mismatch"); }

  std::vector<double> d3(out);
  for (std::size_t i = 0; i < out; ++i) { d3[i] = 2.0 * (tr.out[i] - target[i]) * scale; }

  auto layer_grad = [](const DenseLayer & layer, DenseLayer & g, std::span<const double> delta,
                      std::span<const double> input) {
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double dr = delta[r];
      g.bias[r] += dr;
      if (dr == 0.0) { continue; }
      double * row = g.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) { row[c] += dr * input[c]; }
    }
  };
  // delta_prev = (W^T delta) * relu'(z), relu'(0) = 0
  auto propagate = [](const DenseLayer & layer, std::span<const double> delta,
                     const std::vector<double> & z, std::vector<double> & prev) {
    prev.assign(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double dr = delta[r];
      if (dr == 0.0) { continue; }
      const double * row = layer.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) { prev[c] += row[c] * dr; }
    }
    for (std::size_t c = 0; c < layer.in; ++c) {
      if (!(z[c] > 0.0)) { prev[c] = 0.0; }
    }
  };

  layer_grad(model.layers[2], grads[2], d3, tr.a2);
  propagate(model.layers[2], d3, tr.z2, d2);
  layer_grad(model.layers[1], grads[1], d2, tr.a1);
  propagate(model.layers[1], d2, tr.z1, d1);
  layer_grad(model.layers[0], grads[0], d1, x);
}

class ParameterUpdater
{
public:
  ParameterUpdater(const EncoderModel & model, const TrainConfig & config)
      : config_(config), m_(zero_like(model)), v_(zero_like(model))
  {}

  void step(EncoderModel & model, const Gradients & grads)
  {
    ++t_;
    const double lr = config_.learning_rate;
    if (config_.optimizer == Optimizer::Sgd) {
      for (std::size_t l = 0; l < 3; ++l) {
        apply_sgd(model.layers[l].weights, grads[l].weights, lr);
        apply_sgd(model.layers[l].bias, grads[l].bias, lr);
      }
      return;
    }
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t l = 0; l < 3; ++l) {
      apply_adam(model.layers[l].weights, grads[l].weights, m_[l].weights, v_[l].weights, lr, c1, c2);
      apply_adam(model.layers[l].bias, grads[l].bias, m_[l].bias, v_[l].bias, lr, c1, c2);
    }
  }

private:
  static void apply_sgd(std::vector<double> & p, const std::vector<double> & g, double lr)
  {
    for (std::size_t i = 0; i < p.size(); ++i) { p[i] -= lr * g[i]; }
  }

  void apply_adam(std::vector<double> & p, const std::vector<double> & g, std::vector<double> & m,
    std::vector<double> & v, double lr, double c1, double c2) const
  {
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }

  TrainConfig config_;
  Gradients m_;
  Gradients v_;
  std::uint64_t t_{0};
};

}  // namespace

void EncoderModel::validate() const
{
  auto fail = [](const std::string & msg) { throw DimensionError("encoder model: " + msg); };
  for (std::size_t i = 0; i < 3; ++i) {
    const auto & l = layers[i];
    if (l.in == 0 || l.out == 0) { fail("layer " + std::to_string(i + 1) + " has a zero dim"); }
    if (l.weights.size() != l.in * l.out) {
      fail("W" + std::to_string(i + 1) + " has " + std::to_string(l.weights.size())
           + " entries, expected " + std::to_string(l.in * l.out));
    }
    if (l.bias.size() != l.out) { fail("b" + std::to_string(i + 1) + " has wrong length"); }
    const bool finite = std::all_of(l.weights.begin(), l.weights.end(), [](double v) {
      return std::isfinite(v);
    }) && std::all_of(l.bias.begin(), l.bias.end(), [](double v) { return std::isfinite(v); });
    if (!finite) { fail("layer " + std::to_string(i + 1) + " has non-finite parameters"); }
  }
  if (layers[1].in != layers[0].out || layers[2].in != layers[1].out) {
    fail("layer dims do not chain");
  }
  const std::size_t d = algebra_dim(kind);
  if (layers[2].out != d) { fail("output dim must equal the algebra dim " + std::to_string(d)); }
  if (layers[0].in % d != 0) { fail("input dim must be a multiple of the algebra dim"); }
  if (stats.kind != kind || stats.mean.size() != d || !(stats.sigma > 0.0)) {
    fail("normalization stats missing or inconsistent");
  }
}

std::string_view to_string(Optimizer opt) noexcept
{
  return opt == Optimizer::Adam ? "adam" : "sgd";
}

Optimizer parse_optimizer(std::string_view name)
{
  if (name == "adam") { return Optimizer::Adam; }
  if (name == "sgd") { return Optimizer::Sgd; }
  throw DomainError("unknown optimizer '" + std::string(name) + "' (expected adam|sgd)");
}

void TrainConfig::validate() const
{
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be positive");
  }
  if (batch_size < 1) { throw DomainError("batch size must be >= 1"); }
  if (hidden[0] < 1 || hidden[1] < 1) { throw DomainError("hidden widths must be >= 1"); }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw DomainError("validation fraction must lie in [0, 1)");
  }
}

EncoderModel zero_encoder(GroupKind kind, std::size_t input_dim, std::array<std::size_t, 2> hidden,
  NormalizationStats stats)
{
  EncoderModel model;
  model.kind = kind;
  model.stats = std::move(stats);
  model.layers[0] = DenseLayer(input_dim, hidden[0]);
  model.layers[1] = DenseLayer(hidden[0], hidden[1]);
  model.layers[2] = DenseLayer(hidden[1], algebra_dim(kind));
  return model;
}

EncoderModel init_encoder(GroupKind kind, std::size_t input_dim, std::array<std::size_t, 2> hidden,
  NormalizationStats stats, std::uint64_t seed)
{
  EncoderModel model = zero_encoder(kind, input_dim, hidden, std::move(stats));
  Rng rng(splitmix64(seed));
  for (auto & layer : model.layers) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (double & w : layer.weights) { w = rng.uniform(-bound, bound); }
  }
  return model;
}

AlgebraVector forward(const EncoderModel & model, std::span<const double> x)
{
  ForwardTrace tr;
  run_forward(model, x, tr);
  return AlgebraVector(model.kind, std::span<const double>(tr.out));
}

double loss_mse(const AlgebraVector & pred, const AlgebraVector & target)
{
  if (pred.kind() != target.kind()) { throw DimensionError("loss_mse: kind mismatch"); }
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    s += e * e;
  }
  return s;
}

double loss_mse(std::span<const AlgebraVector> preds, std::span<const AlgebraVector> targets)
{
  if (preds.size() != targets.size()) { throw DimensionError("loss_mse: batch size mismatch"); }
  if (preds.empty()) { throw DimensionError("loss_mse: empty batch"); }
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) { s += loss_mse(preds[i], targets[i]); }
  return s / static_cast<double>(preds.size());
}

double dataset_loss(const EncoderModel & model, std::span<const Sample> samples)
{
  if (samples.empty()) { throw DimensionError("dataset_loss: no samples"); }
  double s = 0.0;
  for (const auto & sample : samples) {
    s += loss_mse(forward(model, sample.features), sample.target);
  }
  return s / static_cast<double>(samples.size());
}

Gradients backward(const EncoderModel & model, std::span<const double> x,
  const AlgebraVector & target)
{
  Gradients g = zero_like(model);
  ForwardTrace tr;
  std::vector<double> d2, d1;
  accumulate_backward(model, x, target, 1.0, tr, g, d2, d1);
  return g;
}

TrainResult train(EncoderModel model, std::span<const Sample> train_set,
  std::span<const Sample> val_set, const TrainConfig & config)
{
  config.validate();
  model.validate();
  if (train_set.empty()) { throw DomainError("train: empty training set"); }
  for (const auto & s : train_set) {
    if (s.features.size() != model.input_dim() || s.target.kind() != model.kind) {
      throw DimensionError("train: sample dims do not match the model");
    }
  }

  TrainResult result;
  TrainReport & report = result.report;
  report.initial_train_loss = dataset_loss(model, train_set);
  if (!val_set.empty()) { report.initial_val_loss = dataset_loss(model, val_set); }

  ParameterUpdater updater(model, config);
  Rng rng(splitmix64(config.seed ^ 0x5EEDULL));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  Gradients grads = zero_like(model);
  ForwardTrace tr;
  std::vector<double> d2, d1;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto & g : grads) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.bias.begin(), g.bias.end(), 0.0);
      }
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const Sample & s = train_set[order[k]];
        accumulate_backward(model, s.features, s.target, scale, tr, grads, d2, d1);
        for (std::size_t j = 0; j < tr.out.size(); ++j) {
          const double e = tr.out[j] - s.target[j];
          batch_loss += e * e * scale;
        }
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << ": batch loss is " << batch_loss
           << "; lower the learning rate (currently " << config.learning_rate << ")";
        throw NumericalError(os.str());
      }
      updater.step(model, grads);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = dataset_loss(model, train_set);
    if (!val_set.empty()) { stats.val_loss = dataset_loss(model, val_set); }
    if (!std::isfinite(stats.train_loss)) {
      throw NumericalError("training diverged at epoch " + std::to_string(epoch)
                           + ": loss is not finite; lower the learning rate");
    }
    report.epochs.push_back(stats);
  }
  result.model = std::move(model);
  return result;
}

DataSplit split_dataset(std::span<const Trajectory> trajs, double validation_fraction,
  std::uint64_t seed)
{
  std::vector<std::size_t> order(trajs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(splitmix64(seed ^ 0x5B117ULL));
  for (std::size_t i = order.size(); i > 1; --i) { std::swap(order[i - 1], order[rng.below(i)]); }
  const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * trajs.size()));
  DataSplit split;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < order.size() - n_val ? split.train : split.validation).push_back(trajs[order[k]]);
  }
  return split;
}

std::vector<Sample> make_samples(std::span<const Trajectory> trajs, const NormalizationStats & stats)
{
  std::vector<Sample> samples;
  samples.reserve(trajs.size());
  for (const auto & t : trajs) { samples.push_back({normalize(to_increments(t), stats), t.true_xi}); }
  return samples;
}

EncoderFit train_encoder(std::span<const Trajectory> trajs, const TrainConfig & config)
{
  config.validate();
  if (trajs.empty()) { throw DomainError("train_encoder: empty dataset"); }
  EncoderFit fit;
  fit.split = split_dataset(trajs, config.validation_fraction, config.seed);

  std::vector<IncrementSequence> train_increments;
  train_increments.reserve(fit.split.train.size());
  for (const auto & t : fit.split.train) { train_increments.push_back(to_increments(t)); }
  const NormalizationStats stats = fit_stats(train_increments);

  const GroupKind kind = trajs.front().kind;
  const std::size_t input_dim = trajs.front().steps() * algebra_dim(kind);
  EncoderModel model = init_encoder(kind, input_dim, config.hidden, stats, config.seed);

  std::vector<Sample> train_samples;
  train_samples.reserve(train_increments.size());
  for (std::size_t i = 0; i < train_increments.size(); ++i) {
    train_samples.push_back({normalize(train_increments[i], stats), fit.split.train[i].true_xi});
  }
  const std::vector<Sample> val_samples = make_samples(fit.split.validation, stats);
  fit.result = train(std::move(model), train_samples, val_samples, config);
  return fit;
}

AlgebraVector predict_generator(const EncoderModel & model, const Trajectory & traj)
{
  if (traj.kind != model.kind) {
    throw DimensionError("trajectory group " + std::string(to_string(traj.kind))
                         + " does not match model group " + std::string(to_string(model.kind)));
  }
  return forward(model, normalize(to_increments(traj), model.stats));
}

}  // namespace lierec
