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

#include <string>

#include "commands.hpp"
#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/dataio/interchange.hpp"
#include "occlubench/maskgen/maskgen.hpp"
#include "occlubench/metrics/evaluate.hpp"
#include "occlubench/refmodel/checkpoint.hpp"
#include "occlubench/refmodel/grad_cam.hpp"

namespace occlubench::cli {
namespace {

class GenMasksCommand : public Command {
 public:
  explicit GenMasksCommand(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "gen-masks", "Dump masks (OBMK): Fourier banks for rm/rm3, or the per-image masks of an evaluation run");
    sub->add_option("--kind", kind_, "rect, fourier, saliency")->required();
    sub->add_option("--output", output_, "OBMK file")->required();
    sub->add_option("--count", count_, "Masks to generate without a dataset");
    sub->add_option("--height", height_);
    sub->add_option("--width", width_);
    sub->add_option("--fraction", fraction_, "Covered fraction (Fourier banks sample lambda when omitted)")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", seed_);
    sub->add_option("--config", config_, "Run config; masks then follow the eval pipeline per image")
        ->check(CLI::ExistingFile);
    sub->add_option("--checkpoint", checkpoint_, "Model for saliency masks")->check(CLI::ExistingFile);
    sub->add_option("--split", split_, "train or test (default test)");
    sub->add_option("--repeat", repeat_, "Evaluation repeat whose seed stream is reproduced");
    sub->add_option("--saliency-out", saliency_out_, "Also write the Grad-CAM maps (OBSM)");
    sub->add_option("--occluded-out", occluded_out_,
                    "Also write the occluded split: <prefix>.bin (CIFAR) or <prefix>-images/labels.idx (IDX)");
  }

  void run(Streams io) override {
    const auto policy = metrics::parse_mask_policy(kind_);
    if (!policy) throw Error("--kind must be rect, fourier or saliency, not '" + kind_ + "'");
    std::vector<Mask> masks;
    if (config_) {
      masks = from_dataset(*policy, io);
    } else {
      if (*policy == metrics::MaskPolicy::kSaliency) throw Error("saliency masks need --config and --checkpoint");
      if (occluded_out_ || saliency_out_) throw Error("--occluded-out and --saliency-out need --config");
      const std::uint64_t seed = seed_.value_or(0);
      maskgen::FourierMaskParams params;
      if (*policy == metrics::MaskPolicy::kFourier && !fraction_) {
        masks = maskgen::MaskBank::sample_fourier(count_, height_, width_, params, seed).masks();
      } else {
        if (!fraction_) throw Error("--fraction is required for rect masks");
        for (std::size_t i = 0; i < count_; ++i) {
          masks.push_back(*policy == metrics::MaskPolicy::kRect
                              ? maskgen::rect_mask(height_, width_, *fraction_, derive_seed(seed, i))
                              : maskgen::fourier_mask(height_, width_, *fraction_, params, derive_seed(seed, i)));
        }
      }
    }
    if (masks.empty()) throw Error("no masks to write (count is 0)");
    dataio::write_masks(output_, masks);
    double covered = 0.0;
    for (const auto& m : masks) covered += m.covered_fraction();
    io.out << "wrote " << masks.size() << " masks of " << masks.front().height() << "x" << masks.front().width()
           << " to " << output_ << ", mean covered fraction " << format_double("%.4f", covered / masks.size())
           << "\n";
  }

 private:
  std::vector<Mask> from_dataset(metrics::MaskPolicy policy, Streams io) {
    if (!fraction_) throw Error("--fraction is required with --config");
    ConfigOverrides o;
    o.set("seed", seed_);
    const auto cfg = o.load(config_);
    const auto data = dataio::load_data(cfg);
    const Split split = split_ ? parse_split(*split_) : Split::kTest;
    const LabeledDataset& ds = split == Split::kTrain ? data.train : data.test;

    std::vector<SaliencyMap> saliency;
    if (policy == metrics::MaskPolicy::kSaliency || saliency_out_) {
      if (!checkpoint_) throw Error("saliency maps need --checkpoint");
      const auto model = refmodel::load_checkpoint(*checkpoint_);
      saliency = refmodel::grad_cam_dataset(model, ds, cfg.eval.gradcam);
      if (saliency_out_) dataio::write_saliency(*saliency_out_, saliency);
    }
    metrics::OcclusionSpec spec;
    spec.policy = policy;
    spec.fill = cfg.eval.fill;
    spec.fill_value = cfg.eval.fill_value;
    spec.donors = data.donors ? &*data.donors : nullptr;
    spec.fourier = cfg.train.fourier;
    // The stream eval uses for this split and repeat.
    const std::uint64_t seed =
        derive_seed(metrics::repeat_seed(cfg.seed, repeat_), split == Split::kTrain ? 0 : 1);
    const int h = ds.images.front().height(), w = ds.images.front().width();
    std::vector<Mask> masks;
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
      masks.push_back(metrics::occlusion_mask(spec, h, w, *fraction_, derive_seed(seed, i),
                                              saliency.empty() ? nullptr : &saliency[i]));
    }
    if (occluded_out_) {
      const auto occluded = metrics::occlude_dataset(ds, spec, *fraction_, seed, saliency);
      const int c = ds.images.front().channels();
      if (c == 3 && h == 32 && w == 32) {
        const std::string path = *occluded_out_ + ".bin";
        write_file_atomic(path, dataio::encode_cifar10(occluded, data.normalization));
        io.out << "wrote " << path << "\n";
      } else if (c == 1) {
        const auto [images, labels] = dataio::encode_idx(occluded, data.normalization);
        write_file_atomic(*occluded_out_ + "-images.idx", images);
        write_file_atomic(*occluded_out_ + "-labels.idx", labels);
        io.out << "wrote " << *occluded_out_ << "-images.idx and -labels.idx\n";
      } else {
        throw Error("occluded datasets are written as CIFAR (3x32x32) or IDX (1 channel) only");
      }
    }
    return masks;
  }

  std::string kind_, output_;
  std::size_t count_ = 1;
  int height_ = 32, width_ = 32;
  std::optional<double> fraction_;
  std::optional<std::uint64_t> seed_;
  std::optional<std::filesystem::path> config_, checkpoint_;
  std::optional<std::string> split_, saliency_out_, occluded_out_;
  std::size_t repeat_ = 0;
};

}  // namespace

std::unique_ptr<Command> add_gen_masks(CLI::App& app) { return std::make_unique<GenMasksCommand>(app); }

}  // namespace occlubench::cli
