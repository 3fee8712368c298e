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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "occlubench/core/types.hpp"

namespace occlubench::refmodel {

/// Architecture: a stack of (conv k x k, same padding) -> ReLU -> 2x2 max-pool
/// blocks followed by one dense layer producing class logits.
struct ModelShape {
  int input_channels = 3;
  int input_height = 32;
  int input_width = 32;
  std::vector<int> conv_channels{8, 16};
  int kernel = 3;
  int num_classes = 10;

  /// Throws Error listing the first inconsistency.
  void validate() const;
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct ConvGeometry {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  /// Spatial size of the layer input (= conv output, before pooling).
  int height = 0;
  int width = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  int pooled_height() const { return height / 2; }
  int pooled_width() const { return width / 2; }
  std::size_t taps() const { return static_cast<std::size_t>(in_channels) * kernel * kernel; }
};

struct DenseGeometry {
  int inputs = 0;
  int outputs = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
};

/// Per-sample intermediate values needed by backward(); reusable across calls.
struct ForwardTrace {
  struct Layer {
    std::vector<double> columns;     // taps x (H*W) im2col matrix
    std::vector<double> activation;  // out x (H*W), post-ReLU
    std::vector<double> pooled;      // out x (H/2*W/2)
    std::vector<std::uint32_t> argmax;
  };
  std::vector<Layer> layers;
  std::vector<double> logits;
};

/// All parameters live in one flat vector; layer geometries index into it.
class TinyCnn {
 public:
  /// Zero-initialized parameters.
  explicit TinyCnn(ModelShape shape);
  /// He-normal weights, zero biases.
  static TinyCnn he_initialized(ModelShape shape, std::uint64_t seed);

  const ModelShape& shape() const { return shape_; }
  const std::vector<ConvGeometry>& conv_layers() const { return convs_; }
  const DenseGeometry& dense() const { return dense_; }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  /// Throws ShapeError if the image does not match the input shape.
  std::vector<double> forward(const Image& image) const;
  void forward(const Image& image, ForwardTrace& trace) const;

  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(logits).
  void backward(const ForwardTrace& trace, std::span<const double> dlogits, std::span<double> grad) const;

  /// Gradient of the scalar with logit gradient `dlogits` with respect to
  /// the post-ReLU activation of conv layer `layer` (out x H x W). Parameter
  /// gradients are not computed.
  std::vector<double> activation_gradient(const ForwardTrace& trace, std::span<const double> dlogits,
                                          int layer) const;

  /// Argmax of the logits, lowest index among ties.
  int predict(const Image& image) const;

  void check_input(const Image& image) const;

 private:
  void backward_impl(const ForwardTrace& trace, std::span<const double> dlogits, std::span<double> grad,
                     int capture_layer, std::vector<double>* captured) const;

  ModelShape shape_;
  std::vector<ConvGeometry> convs_;
  DenseGeometry dense_;
  std::vector<double> params_;
};

int argmax_lowest(std::span<const double> values);

/// Loss lambda * CE(y1) + (1 - lambda) * CE(y2) of softmax(logits), writing its
/// gradient with respect to the logits, scaled by `scale`, into dlogits.
/// y2 == occlude::kNoLabel drops the second term.
double mixed_cross_entropy(std::span<const double> logits, int y1, int y2, double lambda, double scale,
                           std::span<double> dlogits);

}  // namespace occlubench::refmodel
