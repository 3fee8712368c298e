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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "occlubench/core/error.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/dataio/datasets.hpp"
#include "occlubench/metrics/metrics.hpp"
#include "occlubench/occlude/occlude.hpp"
#include "occlubench/refmodel/checkpoint.hpp"
#include "occlubench/refmodel/grad_cam.hpp"
#include "occlubench/refmodel/tiny_cnn.hpp"
#include "occlubench/refmodel/train.hpp"
#include "../support/gradient_check.hpp"
#include "../support/reference_cnn.hpp"

using namespace occlubench;
using namespace occlubench::refmodel;

namespace {

Image random_image(int c, int h, int w, std::uint64_t seed) {
  Rng r(seed);
  std::vector<double> v(static_cast<std::size_t>(c) * h * w);
  for (auto& x : v) x = r.normal();
  return Image(c, h, w, std::move(v));
}

ModelShape small_shape(int c, int h, int w, std::vector<int> channels, int k, int classes) {
  ModelShape s;
  s.input_channels = c;
  s.input_height = h;
  s.input_width = w;
  s.conv_channels = std::move(channels);
  s.kernel = k;
  s.num_classes = classes;
  return s;
}

// Bilinear resize with half-pixel centres, edges clamped.
std::vector<double> bilinear(const std::vector<double>& v, int h, int w, int oh, int ow) {
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    const double sy = std::clamp((y + 0.5) * h / oh - 0.5, 0.0, h - 1.0);
    const int y0 = static_cast<int>(std::floor(sy)), y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - y0;
    for (int x = 0; x < ow; ++x) {
      const double sx = std::clamp((x + 0.5) * w / ow - 0.5, 0.0, w - 1.0);
      const int x0 = static_cast<int>(std::floor(sx)), x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - x0;
      const double top = v[y0 * w + x0] * (1 - fx) + v[y0 * w + x1] * fx;
      const double bot = v[y1 * w + x0] * (1 - fx) + v[y1 * w + x1] * fx;
      out[y * ow + x] = top * (1 - fy) + bot * fy;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("forward pass on a hand-computed 1x2x2 toy net") {
  TinyCnn model(small_shape(1, 2, 2, {1}, 1, 2));
  auto p = model.parameters();
  // conv 1x1: w = 2, b = -1; dense 1 -> 2: w = [3, -1], b = [0.5, 0].
  p[0] = 2.0;
  p[1] = -1.0;
  p[2] = 3.0;
  p[3] = -1.0;
  p[4] = 0.5;
  p[5] = 0.0;
  const Image img(1, 2, 2, std::vector<double>{1.0, 0.25, -3.0, 0.75});
  // conv: [1, -0.5, -7, 0.5] -> relu [1, 0, 0, 0.5] -> pool 1 -> logits [3.5, -1].
  const auto logits = model.forward(img);
  REQUIRE(logits.size() == 2);
  CHECK(logits[0] == 3.5);
  CHECK(logits[1] == -1.0);
  CHECK(model.predict(img) == 0);
}

TEST_CASE("forward matches a direct-loop oracle") {
  for (int trial = 0; trial < 4; ++trial) {
    const auto shape = small_shape(trial % 2 ? 3 : 1, 8 + 4 * trial, 12, {3, 5}, trial % 2 ? 3 : 5, 4);
    const auto model = TinyCnn::he_initialized(shape, 100 + trial);
    const Image img = random_image(shape.input_channels, shape.input_height, shape.input_width, 7 + trial);
    const auto want = testing::naive_forward(model, img);
    ForwardTrace trace;
    model.forward(img, trace);
    for (std::size_t i = 0; i < want.logits.size(); ++i) {
      CHECK(trace.logits[i] == doctest::Approx(want.logits[i]).epsilon(1e-12));
    }
    for (std::size_t l = 0; l < want.activations.size(); ++l) {
      REQUIRE(trace.layers[l].activation.size() == want.activations[l].size());
      for (std::size_t i = 0; i < want.activations[l].size(); ++i) {
        CHECK(trace.layers[l].activation[i] == doctest::Approx(want.activations[l][i]).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("input shape is checked") {
  const TinyCnn model(small_shape(3, 8, 8, {2}, 3, 2));
  CHECK_THROWS_AS(model.forward(Image(1, 8, 8, 0.0)), ShapeError);
  CHECK_THROWS_AS(TinyCnn(small_shape(3, 8, 8, {2}, 2, 2)), Error);
}

TEST_CASE("argmax ties go to the lowest class") {
  const std::vector<double> v{1.0, 3.0, 3.0, -1.0};
  CHECK(argmax_lowest(v) == 1);
  TinyCnn zero(small_shape(1, 4, 4, {1}, 3, 3));
  CHECK(zero.predict(Image(1, 4, 4, 0.5)) == 0);
}

TEST_CASE("mixed cross-entropy and its logit gradient") {
  const std::vector<double> logits{1.0, 2.0, 0.5};
  std::vector<double> d(3);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(0.5);
  const double loss = mixed_cross_entropy(logits, 0, 1, 0.25, 1.0, d);
  CHECK(loss == doctest::Approx(0.25 * -std::log(std::exp(1.0) / z) + 0.75 * -std::log(std::exp(2.0) / z)));
  CHECK(d[0] == doctest::Approx(std::exp(1.0) / z - 0.25));
  CHECK(d[1] == doctest::Approx(std::exp(2.0) / z - 0.75));
  const double only = mixed_cross_entropy(logits, 2, occlude::kNoLabel, 0.6, 1.0, d);
  CHECK(only == doctest::Approx(0.6 * -std::log(std::exp(0.5) / z)));
}

TEST_CASE("backward matches finite differences on a small net") {
  const auto shape = small_shape(2, 6, 6, {3, 2}, 3, 3);
  const auto model = TinyCnn::he_initialized(shape, 5);
  std::vector<testing::GradSample> batch;
  for (int i = 0; i < 3; ++i) batch.push_back({random_image(2, 6, 6, 50 + i), i % 3, (i + 1) % 3});
  auto perturbed = model;
  Rng r(9);
  for (double& p : perturbed.parameters()) p += 0.05 * r.normal();
  const auto result = testing::gradient_check(perturbed, batch, 0.7);
  CHECK(result.failures == 0);
  CHECK(result.worst_relative < 1e-4);
}

TEST_CASE("activation_gradient agrees with the argmax routing of the last layer") {
  const auto shape = small_shape(1, 8, 8, {2, 3}, 3, 2);
  const auto model = TinyCnn::he_initialized(shape, 3);
  const Image img = random_image(1, 8, 8, 4);
  ForwardTrace trace;
  model.forward(img, trace);
  const std::vector<double> dlogits{0.0, 1.0};
  const auto grad = model.activation_gradient(trace, dlogits, 1);
  const auto& g = model.conv_layers()[1];
  const auto& d = model.dense();
  std::vector<double> want(grad.size(), 0.0);
  const int ph = g.pooled_height(), pw = g.pooled_width();
  for (int k = 0; k < g.out_channels; ++k) {
    for (int y = 0; y < ph; ++y) {
      for (int x = 0; x < pw; ++x) {
        const std::size_t j = (static_cast<std::size_t>(k) * ph + y) * pw + x;
        const double w = model.parameters()[d.weight_offset + d.inputs + j];
        want[static_cast<std::size_t>(k) * g.height * g.width + trace.layers[1].argmax[j]] = w;
      }
    }
  }
  for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == doctest::Approx(want[i]));
}

TEST_CASE("Grad-CAM equals the weighted-activation oracle") {
  const auto shape = small_shape(3, 12, 12, {4, 5}, 3, 3);
  const auto model = TinyCnn::he_initialized(shape, 21);
  for (auto ups : {Upsampling::kBilinear, Upsampling::kNearest}) {
    const Image img = random_image(3, 12, 12, 22);
    GradCamConfig cfg;
    cfg.upsampling = ups;
    const auto map = grad_cam(model, img, cfg);
    REQUIRE(map.height == 12);
    REQUIRE(map.width == 12);

    ForwardTrace trace;
    model.forward(img, trace);
    const int target = argmax_lowest(trace.logits);
    std::vector<double> onehot(3, 0.0);
    onehot[target] = 1.0;
    const auto grads = model.activation_gradient(trace, onehot, 1);
    const auto& g = model.conv_layers()[1];
    const std::size_t hw = static_cast<std::size_t>(g.height) * g.width;
    std::vector<double> cam(hw, 0.0);
    for (int k = 0; k < g.out_channels; ++k) {
      double alpha = 0.0;
      for (std::size_t i = 0; i < hw; ++i) alpha += grads[k * hw + i];
      alpha /= static_cast<double>(hw);
      for (std::size_t i = 0; i < hw; ++i) cam[i] += alpha * trace.layers[1].activation[k * hw + i];
    }
    for (double& v : cam) v = std::max(0.0, v);
    std::vector<double> up;
    if (ups == Upsampling::kBilinear) {
      up = bilinear(cam, g.height, g.width, 12, 12);
    } else {
      up.resize(144);
      for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 12; ++x) up[y * 12 + x] = cam[(y * g.height / 12) * g.width + x * g.width / 12];
      }
    }
    for (std::size_t i = 0; i < up.size(); ++i) CHECK(map.values[i] == doctest::Approx(up[i]).epsilon(1e-5).scale(1.0));
    for (float v : map.values) CHECK(v >= 0.0f);
  }
}

TEST_CASE("Grad-CAM target policy and degenerate inputs") {
  const auto shape = small_shape(1, 8, 8, {2}, 3, 2);
  const TinyCnn zero(shape);
  const auto map = grad_cam(zero, Image(1, 8, 8, 1.0), GradCamConfig{});
  for (float v : map.values) CHECK(v == 0.0f);
  GradCamConfig truth;
  truth.target = CamTarget::kTrue;
  CHECK_THROWS_AS(grad_cam(zero, Image(1, 8, 8, 1.0), truth), Error);
  CHECK_NOTHROW(grad_cam(zero, Image(1, 8, 8, 1.0), truth, 1));
  GradCamConfig bad;
  bad.layer = 3;
  CHECK_THROWS_AS(grad_cam(zero, Image(1, 8, 8, 1.0), bad), Error);
}

TEST_CASE("resize_map keeps constants and nearest copies blocks") {
  const std::vector<double> c(4, 2.5);
  for (double v : resize_map(c, 2, 2, 5, 7, Upsampling::kBilinear)) CHECK(v == doctest::Approx(2.5));
  const std::vector<double> v{1, 2, 3, 4};
  const auto n = resize_map(v, 2, 2, 4, 4, Upsampling::kNearest);
  CHECK(n[0] == 1);
  CHECK(n[3] == 2);
  CHECK(n[15] == 4);
}

namespace {

LabeledDataset toy_dataset(double noise, int per_class, std::uint64_t seed, int classes = 2) {
  dataio::SyntheticSpec spec;
  spec.classes = classes;
  spec.per_class = per_class;
  spec.size = 16;
  spec.channels = 1;
  spec.noise = noise;
  spec.jitter = 2.0;
  spec.seed = seed;
  return dataio::gen_synthetic(spec, Split::kTrain);
}

ModelShape toy_shape(int classes = 2) { return small_shape(1, 16, 16, {4, 4}, 3, classes); }

}  // namespace

TEST_CASE("mixup at lambda 1 trains bit-identically to basic") {
  const auto data = toy_dataset(0.1, 20, 3);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.05;
  cfg.seed = 11;
  const auto init = TinyCnn::he_initialized(toy_shape(), 4);
  const auto basic = train(init, data, cfg);
  cfg.mode = occlude::AugmentationMode::kMixup;
  cfg.fixed_lambda = 1.0;
  const auto mixup = train(init, data, cfg);
  const auto a = basic.model.parameters(), b = mixup.model.parameters();
  CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
}

TEST_CASE("training is deterministic and reaches 100% on a separable toy set") {
  const auto data = toy_dataset(0.0, 30, 8);
  // Oracle: a pixel-space perceptron separates the two classes.
  {
    std::vector<double> w(257, 0.0);
    bool converged = false;
    for (int epoch = 0; epoch < 1000 && !converged; ++epoch) {
      converged = true;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.images[i].data();
        const double y = data.labels[i] == 1 ? 1.0 : -1.0;
        double s = w[256];
        for (int p = 0; p < 256; ++p) s += w[p] * x[p];
        if (y * s <= 0) {
          converged = false;
          for (int p = 0; p < 256; ++p) w[p] += y * x[p];
          w[256] += y;
        }
      }
    }
    REQUIRE(converged);
  }
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 10;
  cfg.learning_rate = 0.05;
  cfg.seed = 2;
  cfg.track_train_accuracy = true;
  const auto init = TinyCnn::he_initialized(toy_shape(), 6);
  const auto r1 = train(init, data, cfg);
  const auto r2 = train(init, data, cfg);
  const auto a = r1.model.parameters(), b = r2.model.parameters();
  CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  CHECK(metrics::accuracy(predict_dataset(r1.model, data)) == 1.0);
  REQUIRE(r1.log.size() == 30);
  CHECK(r1.log.back().train_accuracy.value() == 1.0);
  CHECK(r1.log.front().learning_rate == 0.05);
  CHECK(r1.log.back().learning_rate == cfg.learning_rate_after);
}

TEST_CASE("label randomization permutes the labels once") {
  const auto data = toy_dataset(0.0, 20, 1, 3);
  TrainConfig cfg;
  cfg.label_randomization = true;
  cfg.seed = 4;
  auto labels = training_labels(data, cfg);
  CHECK(labels != data.labels);
  auto sorted_a = labels, sorted_b = data.labels;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  CHECK(sorted_a == sorted_b);
  cfg.label_randomization = false;
  CHECK(training_labels(data, cfg) == data.labels);
}

TEST_CASE("train validation, fixed banks and divergence") {
  const auto data = toy_dataset(0.1, 10, 2);
  const auto init = TinyCnn::he_initialized(toy_shape(), 1);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 5;
  cfg.mode = occlude::AugmentationMode::kRm3;
  CHECK_THROWS_AS(train(init, data, cfg), Error);
  const auto bank = maskgen::MaskBank::sample_fourier(3, 16, 16, {}, 3);
  CHECK_NOTHROW(train(init, data, cfg, &bank));
  cfg.mode = occlude::AugmentationMode::kRm;
  CHECK_THROWS_AS(train(init, data, cfg, &bank), Error);

  TrainConfig bad;
  bad.epochs = 0;
  bad.batch_size = 0;
  bad.momentum = 1.5;
  CHECK(bad.problems().size() >= 3);

  TrainConfig wild;
  wild.epochs = 20;
  wild.batch_size = 5;
  wild.learning_rate = 1e150;
  CHECK_THROWS_AS(train(init, data, wild), DivergenceError);
}

TEST_CASE("predict_dataset records carry dataset ids") {
  auto data = toy_dataset(0.0, 3, 1);
  data.ids = {10, 11, 12, 13, 14, 15};
  data.split = Split::kTest;
  const auto log = predict_dataset(TinyCnn(toy_shape()), data);
  REQUIRE(log.size() == 6);
  CHECK(log[3].index == 13);
  CHECK(log[3].split == Split::kTest);
  CHECK(log[3].predicted_label == 0);
}

TEST_CASE("checkpoints round-trip bit-exactly and reject damage") {
  const auto model = TinyCnn::he_initialized(small_shape(3, 8, 8, {2, 3}, 3, 4), 17);
  const auto bytes = encode_checkpoint(model);
  const auto back = decode_checkpoint(bytes);
  CHECK(back.shape() == model.shape());
  CHECK(encode_checkpoint(back) == bytes);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_checkpoint(truncated), FormatError);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_checkpoint(trailing), FormatError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(magic), FormatError);
}
