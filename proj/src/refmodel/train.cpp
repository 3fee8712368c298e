// Copyright 2026 The occlubench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "occlubench/refmodel/train.hpp"

#include <cmath>
#include <string>

#include "occlubench/core/error.hpp"
#include "occlubench/core/parallel.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/simd/kernels.hpp"

namespace occlubench::refmodel {

std::vector<std::string> TrainConfig::problems() const {
  std::vector<std::string> out;
  if (epochs <= 0) out.push_back("epochs must be positive");
  if (batch_size <= 0) out.push_back("batch_size must be positive");
  if (!(learning_rate > 0.0)) out.push_back("learning rate must be positive");
  if (!(learning_rate_after > 0.0)) out.push_back("learning rate after the drop must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) out.push_back("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) out.push_back("weight decay must be non-negative");
  if (!(fourier.decay_power > 0.0)) out.push_back("Fourier decay power must be positive");
  if (!(fourier.alpha > 0.0)) out.push_back("Beta alpha must be positive");
  if (fixed_lambda && !(*fixed_lambda >= 0.0 && *fixed_lambda <= 1.0)) out.push_back("fixed lambda must lie in [0, 1]");
  return out;
}

double TrainConfig::learning_rate_at(int epoch) const {
  const int drop = lr_drop_epoch < 0 ? epochs / 2 : lr_drop_epoch;
  return epoch < drop ? learning_rate : learning_rate_after;
}

std::vector<int> training_labels(const LabeledDataset& data, const TrainConfig& config) {
  std::vector<int> labels = data.labels;
  if (config.label_randomization) {
    Rng rng(derive_seed(config.seed, stream::kLabels));
    rng.shuffle(std::span<int>(labels));
  }
  return labels;
}

namespace {

double clean_accuracy(const TinyCnn& model, const LabeledDataset& data, const std::vector<int>& labels) {
  std::vector<int> hits(data.size(), 0);
  parallel_for(data.size(), [&](std::size_t i) { hits[i] = model.predict(data.images[i]) == labels[i] ? 1 : 0; });
  std::size_t correct = 0;
  for (int h : hits) correct += static_cast<std::size_t>(h);
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

TrainResult train(TinyCnn model, const LabeledDataset& data, const TrainConfig& config, const maskgen::MaskBank* bank,
                  const LabeledDataset* donors) {
  if (data.size() == 0) throw Error("cannot train on an empty dataset");
  data.validate();
  if (auto problems = config.problems(); !problems.empty()) throw Error("invalid training config: " + problems.front());
  using occlude::AugmentationMode;
  if (config.mode == AugmentationMode::kRm || config.mode == AugmentationMode::kRm3) {
    const std::size_t want = config.mode == AugmentationMode::kRm ? 1 : 3;
    if (bank == nullptr || bank->size() != want) {
      throw Error(std::string(occlude::to_string(config.mode)) + " training needs a bank of " + std::to_string(want) +
                  " mask(s)");
    }
    if (bank->height() != data.images[0].height() || bank->width() != data.images[0].width()) {
      throw ShapeError("mask bank shape does not match the images");
    }
  }
  if (donors != nullptr && donors->size() == 0) throw Error("donor dataset is empty");
  model.check_input(data.images[0]);

  TrainResult result{std::move(model), {}, training_labels(data, config)};
  TinyCnn& net = result.model;
  const auto& labels = result.train_labels;
  const std::size_t n = data.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t param_count = net.parameter_count();

  occlude::MixOptions mix;
  mix.mode = config.mode;
  mix.fourier = config.fourier;
  mix.fixed_lambda = config.fixed_lambda;
  mix.bank = bank;

  std::vector<double> grad(param_count);
  std::vector<double> velocity(param_count, 0.0);
  std::vector<double> dlogits(static_cast<std::size_t>(net.shape().num_classes));
  ForwardTrace trace;
  const SeedSequence shuffle_root(derive_seed(config.seed, stream::kShuffle));
  const SeedSequence mix_root(derive_seed(config.seed, stream::kMix));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate_at(epoch);
    Rng order_rng(shuffle_root.derive(static_cast<std::uint64_t>(epoch)));
    const auto order = order_rng.permutation(n);
    const SeedSequence epoch_mix = mix_root.child(static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    std::size_t hits = 0;

    for (std::size_t start = 0, b = 0; start < n; start += batch, ++b) {
      const std::size_t end = std::min(n, start + batch);
      std::vector<const Image*> images;
      std::vector<int> batch_labels;
      for (std::size_t i = start; i < end; ++i) {
        images.push_back(&data.images[order[i]]);
        batch_labels.push_back(labels[order[i]]);
      }
      const std::uint64_t batch_seed = epoch_mix.derive(b);
      std::vector<const Image*> partners;
      if (donors != nullptr && config.mode != AugmentationMode::kBasic) {
        Rng donor_rng(derive_seed(batch_seed, stream::kDonors));
        for (std::size_t i = start; i < end; ++i) partners.push_back(&donors->images[donor_rng.uniform_int(donors->size())]);
      }
      const auto mixed = occlude::mix_batch(images, batch_labels, mix, batch_seed, partners);

      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(images.size());
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < images.size(); ++i) {
        net.forward(mixed.images[i], trace);
        batch_loss += mixed_cross_entropy(trace.logits, mixed.primary_labels[i], mixed.partner_labels[i],
                                          mixed.lambda_eff, scale, dlogits);
        net.backward(trace, dlogits, grad);
        const int dominant = mixed.lambda_eff >= 0.5 || mixed.partner_labels[i] < 0 ? mixed.primary_labels[i]
                                                                                    : mixed.partner_labels[i];
        if (argmax_lowest(trace.logits) == dominant) ++hits;
      }
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(b) + " (learning rate " + std::to_string(lr) + ")");
      }
      loss_sum += batch_loss;

      auto params = net.parameters();
      if (config.weight_decay > 0.0) simd::axpy(config.weight_decay, params, grad);
      simd::scale_add(config.momentum, velocity, grad);
      simd::axpy(-lr, velocity, params);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    stats.mean_loss = loss_sum / static_cast<double>(n);
    stats.batch_accuracy = static_cast<double>(hits) / static_cast<double>(n);
    if (config.track_train_accuracy) stats.train_accuracy = clean_accuracy(net, data, labels);
    result.log.push_back(stats);
  }
  return result;
}

PredictionLog predict_dataset(const TinyCnn& model, const LabeledDataset& data) {
  PredictionLog log(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    log[i] = PredictionRecord{data.split, data.id_of(i), data.labels[i], model.predict(data.images[i])};
  });
  return log;
}

}  // namespace occlubench::refmodel
