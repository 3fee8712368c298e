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

#include "occlubench/refmodel/tiny_cnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "occlubench/core/error.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/simd/kernels.hpp"

namespace occlubench::refmodel {

void ModelShape::validate() const {
  if (input_channels <= 0 || input_height <= 0 || input_width <= 0) throw Error("model input dimensions must be positive");
  if (num_classes < 1) throw Error("model needs at least one class");
  if (kernel <= 0 || kernel % 2 == 0) throw Error("conv kernel size must be odd and positive");
  if (conv_channels.empty()) throw Error("model needs at least one conv layer");
  int h = input_height;
  int w = input_width;
  for (std::size_t l = 0; l < conv_channels.size(); ++l) {
    if (conv_channels[l] <= 0) throw Error("conv channel counts must be positive");
    if (h < 2 || w < 2) {
      throw Error("input " + std::to_string(input_height) + "x" + std::to_string(input_width) + " too small for " +
                  std::to_string(conv_channels.size()) + " pooling stages");
    }
    h /= 2;
    w /= 2;
  }
}

TinyCnn::TinyCnn(ModelShape shape) : shape_(std::move(shape)) {
  shape_.validate();
  std::size_t offset = 0;
  int in_ch = shape_.input_channels;
  int h = shape_.input_height;
  int w = shape_.input_width;
  for (int out_ch : shape_.conv_channels) {
    ConvGeometry g;
    g.in_channels = in_ch;
    g.out_channels = out_ch;
    g.kernel = shape_.kernel;
    g.height = h;
    g.width = w;
    g.weight_offset = offset;
    offset += static_cast<std::size_t>(out_ch) * g.taps();
    g.bias_offset = offset;
    offset += static_cast<std::size_t>(out_ch);
    convs_.push_back(g);
    in_ch = out_ch;
    h /= 2;
    w /= 2;
  }
  dense_.inputs = in_ch * h * w;
  dense_.outputs = shape_.num_classes;
  dense_.weight_offset = offset;
  offset += static_cast<std::size_t>(dense_.inputs) * dense_.outputs;
  dense_.bias_offset = offset;
  offset += static_cast<std::size_t>(dense_.outputs);
  params_.assign(offset, 0.0);
}

TinyCnn TinyCnn::he_initialized(ModelShape shape, std::uint64_t seed) {
  TinyCnn model(std::move(shape));
  Rng rng(seed);
  for (const auto& g : model.convs_) {
    const double sd = std::sqrt(2.0 / static_cast<double>(g.taps()));
    const std::size_t n = static_cast<std::size_t>(g.out_channels) * g.taps();
    for (std::size_t i = 0; i < n; ++i) model.params_[g.weight_offset + i] = sd * rng.normal();
  }
  const double sd = std::sqrt(1.0 / static_cast<double>(model.dense_.inputs));
  const std::size_t n = static_cast<std::size_t>(model.dense_.inputs) * model.dense_.outputs;
  for (std::size_t i = 0; i < n; ++i) model.params_[model.dense_.weight_offset + i] = sd * rng.normal();
  return model;
}

void TinyCnn::check_input(const Image& image) const {
  if (image.channels() != shape_.input_channels || image.height() != shape_.input_height ||
      image.width() != shape_.input_width) {
    throw ShapeError("image " + std::to_string(image.channels()) + "x" + std::to_string(image.height()) + "x" +
                     std::to_string(image.width()) + " does not match model input " +
                     std::to_string(shape_.input_channels) + "x" + std::to_string(shape_.input_height) + "x" +
                     std::to_string(shape_.input_width));
  }
}

namespace {

void im2col(std::span<const double> input, const ConvGeometry& g, std::vector<double>& cols) {
  const int k = g.kernel;
  const int pad = k / 2;
  const auto hw = static_cast<std::size_t>(g.height) * g.width;
  cols.assign(g.taps() * hw, 0.0);
  std::size_t row = 0;
  for (int c = 0; c < g.in_channels; ++c) {
    const double* plane = input.data() + static_cast<std::size_t>(c) * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        double* dst = cols.data() + row * hw;
        const int dx = kx - pad;
        const int x_begin = std::max(0, -dx);
        const int x_end = std::min(g.width, g.width - dx);
        for (int y = 0; y < g.height; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= g.height) continue;
          const double* src = plane + static_cast<std::size_t>(sy) * g.width;
          double* out = dst + static_cast<std::size_t>(y) * g.width;
          for (int x = x_begin; x < x_end; ++x) out[x] = src[x + dx];
        }
      }
    }
  }
}

void col2im(const std::vector<double>& dcols, const ConvGeometry& g, std::vector<double>& dinput) {
  const int k = g.kernel;
  const int pad = k / 2;
  const auto hw = static_cast<std::size_t>(g.height) * g.width;
  dinput.assign(static_cast<std::size_t>(g.in_channels) * hw, 0.0);
  std::size_t row = 0;
  for (int c = 0; c < g.in_channels; ++c) {
    double* plane = dinput.data() + static_cast<std::size_t>(c) * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        const double* src = dcols.data() + row * hw;
        const int dx = kx - pad;
        const int x_begin = std::max(0, -dx);
        const int x_end = std::min(g.width, g.width - dx);
        for (int y = 0; y < g.height; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= g.height) continue;
          double* dst = plane + static_cast<std::size_t>(sy) * g.width;
          const double* in = src + static_cast<std::size_t>(y) * g.width;
          for (int x = x_begin; x < x_end; ++x) dst[x + dx] += in[x];
        }
      }
    }
  }
}

}  // namespace

void TinyCnn::forward(const Image& image, ForwardTrace& trace) const {
  check_input(image);
  const auto& kern = simd::active();
  trace.layers.resize(convs_.size());
  std::span<const double> input = image.data();
  for (std::size_t l = 0; l < convs_.size(); ++l) {
    const auto& g = convs_[l];
    auto& layer = trace.layers[l];
    const auto hw = static_cast<std::size_t>(g.height) * g.width;
    const std::size_t taps = g.taps();
    im2col(input, g, layer.columns);
    layer.activation.assign(static_cast<std::size_t>(g.out_channels) * hw, 0.0);
    for (int oc = 0; oc < g.out_channels; ++oc) {
      double* z = layer.activation.data() + static_cast<std::size_t>(oc) * hw;
      std::fill(z, z + hw, params_[g.bias_offset + oc]);
      const double* wrow = params_.data() + g.weight_offset + static_cast<std::size_t>(oc) * taps;
      for (std::size_t t = 0; t < taps; ++t) kern.axpy(wrow[t], layer.columns.data() + t * hw, z, hw);
      for (std::size_t p = 0; p < hw; ++p) z[p] = z[p] > 0.0 ? z[p] : 0.0;
    }
    const int ph = g.pooled_height();
    const int pw = g.pooled_width();
    const auto phw = static_cast<std::size_t>(ph) * pw;
    layer.pooled.assign(static_cast<std::size_t>(g.out_channels) * phw, 0.0);
    layer.argmax.assign(layer.pooled.size(), 0);
    for (int oc = 0; oc < g.out_channels; ++oc) {
      const double* a = layer.activation.data() + static_cast<std::size_t>(oc) * hw;
      for (int py = 0; py < ph; ++py) {
        for (int px = 0; px < pw; ++px) {
          // First maximum in row-major window order.
          std::uint32_t best = static_cast<std::uint32_t>((2 * py) * g.width + 2 * px);
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const auto idx = static_cast<std::uint32_t>((2 * py + dy) * g.width + 2 * px + dx);
              if (a[idx] > a[best]) best = idx;
            }
          }
          const std::size_t out = static_cast<std::size_t>(oc) * phw + static_cast<std::size_t>(py) * pw + px;
          layer.pooled[out] = a[best];
          layer.argmax[out] = best;
        }
      }
    }
    input = layer.pooled;
  }
  trace.logits.assign(static_cast<std::size_t>(dense_.outputs), 0.0);
  for (int o = 0; o < dense_.outputs; ++o) {
    const double* wrow = params_.data() + dense_.weight_offset + static_cast<std::size_t>(o) * dense_.inputs;
    trace.logits[o] = params_[dense_.bias_offset + o] + kern.dot(wrow, input.data(), input.size());
  }
}

std::vector<double> TinyCnn::forward(const Image& image) const {
  ForwardTrace trace;
  forward(image, trace);
  return std::move(trace.logits);
}

int TinyCnn::predict(const Image& image) const { return argmax_lowest(forward(image)); }

void TinyCnn::backward(const ForwardTrace& trace, std::span<const double> dlogits, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw ShapeError("gradient buffer does not match parameter count");
  backward_impl(trace, dlogits, grad, -1, nullptr);
}

std::vector<double> TinyCnn::activation_gradient(const ForwardTrace& trace, std::span<const double> dlogits,
                                                 int layer) const {
  if (layer < 0 || static_cast<std::size_t>(layer) >= convs_.size()) throw Error("invalid conv layer index");
  std::vector<double> captured;
  backward_impl(trace, dlogits, {}, layer, &captured);
  return captured;
}

void TinyCnn::backward_impl(const ForwardTrace& trace, std::span<const double> dlogits, std::span<double> grad,
                            int capture_layer, std::vector<double>* captured) const {
  if (dlogits.size() != static_cast<std::size_t>(dense_.outputs)) throw ShapeError("logit gradient size mismatch");
  if (trace.layers.size() != convs_.size()) throw ShapeError("trace does not belong to this model");
  const bool want_params = !grad.empty();
  const auto& kern = simd::active();

  // Dense layer.
  const auto& last = trace.layers.back().pooled;
  std::vector<double> dinput(last.size(), 0.0);
  for (int o = 0; o < dense_.outputs; ++o) {
    const double g = dlogits[o];
    if (g == 0.0) continue;
    const std::size_t wrow = dense_.weight_offset + static_cast<std::size_t>(o) * dense_.inputs;
    if (want_params) {
      kern.axpy(g, last.data(), grad.data() + wrow, last.size());
      grad[dense_.bias_offset + o] += g;
    }
    kern.axpy(g, params_.data() + wrow, dinput.data(), dinput.size());
  }

  std::vector<double> dz;
  std::vector<double> dcols;
  for (int l = static_cast<int>(convs_.size()) - 1; l >= 0; --l) {
    const auto& g = convs_[static_cast<std::size_t>(l)];
    const auto& layer = trace.layers[static_cast<std::size_t>(l)];
    const auto hw = static_cast<std::size_t>(g.height) * g.width;
    const std::size_t taps = g.taps();

    // Unpool into d(activation).
    dz.assign(static_cast<std::size_t>(g.out_channels) * hw, 0.0);
    const auto phw = static_cast<std::size_t>(g.pooled_height()) * g.pooled_width();
    for (int oc = 0; oc < g.out_channels; ++oc) {
      for (std::size_t p = 0; p < phw; ++p) {
        const std::size_t i = static_cast<std::size_t>(oc) * phw + p;
        dz[static_cast<std::size_t>(oc) * hw + layer.argmax[i]] += dinput[i];
      }
    }
    if (l == capture_layer) {
      *captured = dz;
      return;
    }
    // Through ReLU.
    for (std::size_t i = 0; i < dz.size(); ++i) {
      if (!(layer.activation[i] > 0.0)) dz[i] = 0.0;
    }
    if (want_params) {
      for (int oc = 0; oc < g.out_channels; ++oc) {
        const double* d = dz.data() + static_cast<std::size_t>(oc) * hw;
        double* gw = grad.data() + g.weight_offset + static_cast<std::size_t>(oc) * taps;
        for (std::size_t t = 0; t < taps; ++t) gw[t] += kern.dot(d, layer.columns.data() + t * hw, hw);
        grad[g.bias_offset + oc] += kern.sum(d, hw);
      }
    }
    if (l == 0) break;
    dcols.assign(taps * hw, 0.0);
    for (int oc = 0; oc < g.out_channels; ++oc) {
      const double* d = dz.data() + static_cast<std::size_t>(oc) * hw;
      const double* wrow = params_.data() + g.weight_offset + static_cast<std::size_t>(oc) * taps;
      for (std::size_t t = 0; t < taps; ++t) {
        if (wrow[t] != 0.0) kern.axpy(wrow[t], d, dcols.data() + t * hw, hw);
      }
    }
    col2im(dcols, g, dinput);
  }
}

int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw Error("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

double mixed_cross_entropy(std::span<const double> logits, int y1, int y2, double lambda, double scale,
                           std::span<double> dlogits) {
  const std::size_t n = logits.size();
  if (dlogits.size() != n) throw ShapeError("logit gradient buffer size mismatch");
  if (y1 < 0 || static_cast<std::size_t>(y1) >= n) throw Error("label outside the logit range");
  const bool has_second = y2 >= 0;
  if (has_second && static_cast<std::size_t>(y2) >= n) throw Error("partner label outside the logit range");
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  const double log_z = m + std::log(z);
  const double mu = 1.0 - lambda;
  double loss = lambda * (log_z - logits[static_cast<std::size_t>(y1)]);
  if (has_second) loss += mu * (log_z - logits[static_cast<std::size_t>(y2)]);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::exp(logits[i] - log_z);
    // lambda * (p - e_y1) + (1 - lambda) * (p - e_y2): lambda = 1 reduces exactly to p - e_y1.
    double g = lambda * (p - (static_cast<int>(i) == y1 ? 1.0 : 0.0));
    if (has_second) g += mu * (p - (static_cast<int>(i) == y2 ? 1.0 : 0.0));
    dlogits[i] = g * scale;
  }
  return loss;
}

}  // namespace occlubench::refmodel
