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

#include "occlubench/refmodel/grad_cam.hpp"

#include <algorithm>
#include <cmath>

#include "occlubench/core/error.hpp"
#include "occlubench/core/parallel.hpp"

namespace occlubench::refmodel {

std::optional<CamTarget> parse_cam_target(std::string_view text) {
  if (text == "predicted") return CamTarget::kPredicted;
  if (text == "true") return CamTarget::kTrue;
  return std::nullopt;
}

std::optional<Upsampling> parse_upsampling(std::string_view text) {
  if (text == "nearest") return Upsampling::kNearest;
  if (text == "bilinear") return Upsampling::kBilinear;
  return std::nullopt;
}

std::vector<double> resize_map(std::span<const double> values, int height, int width, int out_height, int out_width,
                               Upsampling upsampling) {
  if (values.size() != static_cast<std::size_t>(height) * width) throw ShapeError("map size mismatch");
  std::vector<double> out(static_cast<std::size_t>(out_height) * out_width);
  const double sy = static_cast<double>(height) / out_height;
  const double sx = static_cast<double>(width) / out_width;
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      double v;
      if (upsampling == Upsampling::kNearest) {
        const int iy = std::min(height - 1, static_cast<int>(std::floor(y * sy)));
        const int ix = std::min(width - 1, static_cast<int>(std::floor(x * sx)));
        v = values[static_cast<std::size_t>(iy) * width + ix];
      } else {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(height - 1));
        const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(width - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int x0 = static_cast<int>(std::floor(fx));
        const int y1 = std::min(y0 + 1, height - 1);
        const int x1 = std::min(x0 + 1, width - 1);
        const double wy = fy - y0;
        const double wx = fx - x0;
        auto at = [&](int yy, int xx) { return values[static_cast<std::size_t>(yy) * width + xx]; };
        const double top = (1.0 - wx) * at(y0, x0) + wx * at(y0, x1);
        const double bottom = (1.0 - wx) * at(y1, x0) + wx * at(y1, x1);
        v = (1.0 - wy) * top + wy * bottom;
      }
      out[static_cast<std::size_t>(y) * out_width + x] = v;
    }
  }
  return out;
}

SaliencyMap combine_cam(std::span<const double> activations, std::span<const double> gradients, int maps, int height,
                        int width, int out_height, int out_width, Upsampling upsampling) {
  const auto hw = static_cast<std::size_t>(height) * width;
  if (activations.size() != static_cast<std::size_t>(maps) * hw || gradients.size() != activations.size()) {
    throw ShapeError("activation/gradient maps do not match the declared shape");
  }
  std::vector<double> cam(hw, 0.0);
  for (int k = 0; k < maps; ++k) {
    double alpha = 0.0;
    for (std::size_t p = 0; p < hw; ++p) alpha += gradients[static_cast<std::size_t>(k) * hw + p];
    alpha /= static_cast<double>(hw);
    if (alpha == 0.0) continue;
    for (std::size_t p = 0; p < hw; ++p) cam[p] += alpha * activations[static_cast<std::size_t>(k) * hw + p];
  }
  for (double& v : cam) v = v > 0.0 ? v : 0.0;
  const auto resized = resize_map(cam, height, width, out_height, out_width, upsampling);
  SaliencyMap out{out_height, out_width, std::vector<float>(resized.size())};
  // Interpolating non-negative values stays non-negative; the clamp guards rounding only.
  for (std::size_t i = 0; i < resized.size(); ++i) out.values[i] = std::max(0.0f, static_cast<float>(resized[i]));
  return out;
}

SaliencyMap grad_cam(const TinyCnn& model, const Image& image, const GradCamConfig& config,
                     std::optional<int> true_label) {
  const int layers = static_cast<int>(model.conv_layers().size());
  const int layer = config.layer < 0 ? layers + config.layer : config.layer;
  if (layer < 0 || layer >= layers) throw Error("Grad-CAM layer index out of range");
  ForwardTrace trace;
  model.forward(image, trace);
  int target;
  if (config.target == CamTarget::kTrue) {
    if (!true_label) throw Error("Grad-CAM on the true class needs the label");
    target = *true_label;
  } else {
    target = argmax_lowest(trace.logits);
  }
  if (target < 0 || target >= model.shape().num_classes) throw Error("Grad-CAM target class out of range");
  std::vector<double> dlogits(static_cast<std::size_t>(model.shape().num_classes), 0.0);
  dlogits[static_cast<std::size_t>(target)] = 1.0;
  const auto grads = model.activation_gradient(trace, dlogits, layer);
  const auto& g = model.conv_layers()[static_cast<std::size_t>(layer)];
  return combine_cam(trace.layers[static_cast<std::size_t>(layer)].activation, grads, g.out_channels, g.height,
                     g.width, image.height(), image.width(), config.upsampling);
}

std::vector<SaliencyMap> grad_cam_dataset(const TinyCnn& model, const LabeledDataset& data,
                                          const GradCamConfig& config) {
  std::vector<SaliencyMap> maps(data.size());
  parallel_for(data.size(), [&](std::size_t i) { maps[i] = grad_cam(model, data.images[i], config, data.labels[i]); });
  return maps;
}

}  // namespace occlubench::refmodel
