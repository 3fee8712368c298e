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

#include "occlubench/metrics/evaluate.hpp"

#include <string>

#include "occlubench/core/error.hpp"
#include "occlubench/core/parallel.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/occlude/occlude.hpp"
#include "occlubench/refmodel/train.hpp"

namespace occlubench::metrics {
namespace {

// Train and test images draw from different streams of one repeat seed.
constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kTestStream = 1;

std::uint64_t stream_of(Split split) { return split == Split::kTrain ? kTrainStream : kTestStream; }

}  // namespace

std::string_view to_string(MaskPolicy policy) {
  switch (policy) {
    case MaskPolicy::kSaliency: return "saliency";
    case MaskPolicy::kRect: return "rect";
    case MaskPolicy::kFourier: return "fourier";
  }
  return "rect";
}

std::optional<MaskPolicy> parse_mask_policy(std::string_view text) {
  for (auto p : {MaskPolicy::kSaliency, MaskPolicy::kRect, MaskPolicy::kFourier}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::string_view to_string(FillMode fill) { return fill == FillMode::kDonor ? "donor" : "uniform"; }

std::optional<FillMode> parse_fill_mode(std::string_view text) {
  if (text == "uniform") return FillMode::kUniform;
  if (text == "donor") return FillMode::kDonor;
  return std::nullopt;
}

Mask occlusion_mask(const OcclusionSpec& spec, int height, int width, double fraction, std::uint64_t item_seed,
                    const SaliencyMap* saliency) {
  const std::uint64_t mask_seed = derive_seed(item_seed, 0);
  switch (spec.policy) {
    case MaskPolicy::kRect: return maskgen::rect_mask(height, width, fraction, mask_seed);
    case MaskPolicy::kFourier: return maskgen::fourier_mask(height, width, fraction, spec.fourier, mask_seed);
    case MaskPolicy::kSaliency:
      if (saliency == nullptr) throw Error("saliency masking needs a saliency map per image");
      if (saliency->height != height || saliency->width != width) throw ShapeError("saliency map does not match image");
      return maskgen::saliency_mask(*saliency, fraction);
  }
  throw Error("unknown mask policy");
}

Image occlude_image(const Image& image, const OcclusionSpec& spec, double fraction, std::uint64_t item_seed,
                    const SaliencyMap* saliency) {
  const Mask mask = occlusion_mask(spec, image.height(), image.width(), fraction, item_seed, saliency);
  if (spec.fill == FillMode::kUniform) return occlude::apply_uniform(image, mask, spec.fill_value);
  if (spec.donors == nullptr || spec.donors->size() == 0) throw Error("donor fill needs a donor dataset");
  Rng rng(derive_seed(item_seed, 1));
  return occlude::apply_donor(image, mask, spec.donors->images[rng.uniform_int(spec.donors->size())]);
}

namespace {

const SaliencyMap* saliency_for(std::span<const SaliencyMap> saliency, std::size_t i, std::size_t n) {
  if (saliency.empty()) return nullptr;
  if (saliency.size() != n) throw ShapeError("saliency count does not match dataset size");
  return &saliency[i];
}

}  // namespace

LabeledDataset occlude_dataset(const LabeledDataset& data, const OcclusionSpec& spec, double fraction,
                               std::uint64_t seed, std::span<const SaliencyMap> saliency) {
  LabeledDataset out = data;
  parallel_for(data.size(), [&](std::size_t i) {
    out.images[i] = occlude_image(data.images[i], spec, fraction, derive_seed(seed, i),
                                  saliency_for(saliency, i, data.size()));
  });
  return out;
}

PredictionLog predict_occluded(const refmodel::TinyCnn& model, const LabeledDataset& data, const OcclusionSpec& spec,
                               double fraction, std::uint64_t seed, std::span<const SaliencyMap> saliency) {
  PredictionLog log(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const Image img = occlude_image(data.images[i], spec, fraction, derive_seed(seed, i),
                                    saliency_for(saliency, i, data.size()));
    log[i] = PredictionRecord{data.split, data.id_of(i), data.labels[i], model.predict(img)};
  });
  return log;
}

std::uint64_t repeat_seed(std::uint64_t base_seed, std::size_t repeat) {
  return derive_seed(derive_seed(base_seed, stream::kEvalSeeds), repeat);
}

MeanStd cut_occlusion(const refmodel::TinyCnn& model, const LabeledDataset& test, double fraction, OcclusionSpec spec,
                      std::size_t repeats, std::uint64_t base_seed, std::vector<double>* per_seed) {
  if (repeats == 0) throw Error("cut_occlusion needs at least one seed");
  maskgen::target_count(test.size() ? test.images[0].height() : 0, test.size() ? test.images[0].width() : 0, fraction);
  spec.policy = MaskPolicy::kRect;
  std::vector<double> values;
  for (std::size_t r = 0; r < repeats; ++r) {
    const std::uint64_t seed = derive_seed(repeat_seed(base_seed, r), kTestStream);
    values.push_back(accuracy(predict_occluded(model, test, spec, fraction, seed)));
  }
  if (per_seed != nullptr) *per_seed = values;
  return aggregate_seeds(values);
}

MeanStd cut_occlusion_from_logs(std::span<const PredictionLog> per_seed) {
  std::vector<double> values;
  for (const auto& log : per_seed) values.push_back(accuracy(log));
  return aggregate_seeds(values);
}

RobustnessCurve i_occlusion_curve(const IOcclusionInputs& in, std::span<const double> fractions, std::size_t repeats,
                                  std::uint64_t base_seed, std::vector<IOcclusionSample>* samples) {
  if (in.model == nullptr || in.train == nullptr || in.test == nullptr) throw Error("i_occlusion_curve: missing inputs");
  if (repeats == 0) throw Error("i_occlusion_curve needs at least one seed");
  const auto& model = *in.model;
  const double a_train = accuracy(refmodel::predict_dataset(model, *in.train));
  const double a_test = accuracy(refmodel::predict_dataset(model, *in.test));
  // Fail before the expensive part if the metric is undefined for this model.
  i_occlusion(SplitAccuracy{a_train, a_test, a_train, a_test});

  std::vector<SaliencyMap> train_maps;
  std::vector<SaliencyMap> test_maps;
  std::span<const SaliencyMap> train_sal = in.train_saliency;
  std::span<const SaliencyMap> test_sal = in.test_saliency;
  if (in.spec.policy == MaskPolicy::kSaliency) {
    if (train_sal.empty()) {
      train_maps = refmodel::grad_cam_dataset(model, *in.train, in.cam);
      train_sal = train_maps;
    }
    if (test_sal.empty()) {
      test_maps = refmodel::grad_cam_dataset(model, *in.test, in.cam);
      test_sal = test_maps;
    }
  } else {
    train_sal = {};
    test_sal = {};
  }

  RobustnessCurve curve;
  curve.kind = MetricKind::kIOcclusion;
  for (double fraction : fractions) {
    std::vector<double> values;
    SplitAccuracy acc{a_train, a_test, a_train, a_test};
    for (std::size_t r = 0; r < repeats; ++r) {
      if (fraction != 0.0 && (r == 0 || !in.spec.seed_free())) {
        const std::uint64_t seed = repeat_seed(base_seed, r);
        acc.a_train_i = accuracy(predict_occluded(model, *in.train, in.spec, fraction,
                                                  derive_seed(seed, stream_of(Split::kTrain)), train_sal));
        acc.a_test_i = accuracy(predict_occluded(model, *in.test, in.spec, fraction,
                                                 derive_seed(seed, stream_of(Split::kTest)), test_sal));
      }
      const double value = i_occlusion(acc);
      values.push_back(value);
      if (samples != nullptr) samples->push_back({fraction, r, acc, value});
    }
    curve.fractions.push_back(fraction);
    curve.values.push_back(aggregate_seeds(values));
  }
  return curve;
}

double i_occlusion_from_logs(const PredictionLog& clean, const PredictionLog& occluded, SplitAccuracy* out) {
  SplitAccuracy acc;
  acc.a_train = accuracy(clean, Split::kTrain);
  acc.a_test = accuracy(clean, Split::kTest);
  acc.a_train_i = accuracy(occluded, Split::kTrain);
  acc.a_test_i = accuracy(occluded, Split::kTest);
  if (out != nullptr) *out = acc;
  return i_occlusion(acc);
}

}  // namespace occlubench::metrics
