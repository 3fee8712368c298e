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
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/dataio/png.hpp"
#include "occlubench/maskgen/maskgen.hpp"
#include "occlubench/occlude/occlude.hpp"

namespace occlubench::cli {
namespace {

constexpr int kPad = 2;

class GenSamplesCommand : public Command {
 public:
  explicit GenSamplesCommand(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "gen-samples", "PNG grid of mixed samples: rows image1, image2, mixup, cutmix, fmix; one lambda per column");
    sub->add_option("--config", config_, "JSON run config; image2 comes from the donors source when present")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--columns", columns_, "Number of columns")->check(CLI::Range(1, 64));
    sub->add_option("--pairs", pairs_, "Explicit i:j index pairs, one column each")->delimiter(',');
    sub->add_option("--lambda", lambda_, "Fixed lambda for every column (default: Beta(alpha, alpha))")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--scale", scale_, "Integer upscaling of each cell")->check(CLI::Range(1, 16));
    sub->add_option("--seed", seed_);
    sub->add_option("--output", output_, "PNG path; the CSV sidecar uses the same stem");
  }

  void run(Streams io) override {
    ConfigOverrides o;
    o.set("seed", seed_);
    const auto cfg = o.load(config_);
    const auto data = dataio::load_data(cfg);
    const LabeledDataset& first = data.train;
    const LabeledDataset& second = data.donors ? *data.donors : data.train;
    const auto& norm = data.normalization;
    const int h = first.images.front().height();
    const int w = first.images.front().width();
    const int channels = first.images.front().channels();

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& p : pairs_) {
      const auto colon = p.find(':');
      if (colon == std::string::npos) throw Error("--pairs entry '" + p + "' is not i:j");
      pairs.emplace_back(std::stoul(p.substr(0, colon)), std::stoul(p.substr(colon + 1)));
    }
    const std::size_t columns = pairs.empty() ? static_cast<std::size_t>(columns_) : pairs.size();
    for (std::size_t c = pairs.size(); c < columns; ++c) {
      Rng rng(derive_seed(derive_seed(cfg.seed, c), 1));
      const std::size_t i = rng.uniform_int(first.images.size());
      std::size_t j = rng.uniform_int(second.images.size());
      if (&first == &second && second.images.size() > 1) {
        while (j == i) j = rng.uniform_int(second.images.size());
      }
      pairs.emplace_back(i, j);
    }

    const int cell_w = w * scale_ + kPad, cell_h = h * scale_ + kPad;
    const int img_w = static_cast<int>(columns) * cell_w + kPad, img_h = 5 * cell_h + kPad;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(img_w) * img_h * 3, 255);
    auto paint = [&](const Image& img, int row, std::size_t col) {
      for (int y = 0; y < h * scale_; ++y) {
        for (int x = 0; x < w * scale_; ++x) {
          const int py = kPad + row * cell_h + y, px = kPad + static_cast<int>(col) * cell_w + x;
          for (int k = 0; k < 3; ++k) {
            const int ch = channels == 1 ? 0 : k;
            rgb[(static_cast<std::size_t>(py) * img_w + px) * 3 + k] =
                norm.to_byte(ch, img.at(ch, y / scale_, x / scale_));
          }
        }
      }
    };

    std::string csv =
        "column,index1,index2,lambda,mixup_lambda_eff,cutmix_lambda_eff,cutmix_pasted_fraction,fmix_lambda_eff,"
        "fmix_pasted_fraction\n";
    const double cells = static_cast<double>(h) * w;
    for (std::size_t c = 0; c < columns; ++c) {
      const auto [i, j] = pairs[c];
      if (i >= first.images.size() || j >= second.images.size()) throw Error("sample index out of range");
      const Image& x1 = first.images[i];
      const Image& x2 = second.images[j];
      const std::uint64_t col_seed = derive_seed(cfg.seed, c);
      const double lambda = lambda_ ? *lambda_ : maskgen::sample_lambda(cfg.train.fourier, derive_seed(col_seed, 0));
      const auto mixup = occlude::mixup_mix(x1, x2, lambda);
      const auto box = occlude::cutmix_box(h, w, lambda, derive_seed(col_seed, 2));
      const auto cutmix = occlude::mask_mix(x1, x2, box.to_mask(h, w));
      // x1 keeps a lambda share in every row, so the Fourier mask covers 1 - lambda.
      const Mask fmask = maskgen::fourier_mask(h, w, 1.0 - lambda, cfg.train.fourier, derive_seed(col_seed, 3));
      const auto fmix = occlude::mask_mix(x1, x2, fmask);
      paint(x1, 0, c);
      paint(x2, 1, c);
      paint(mixup.image, 2, c);
      paint(cutmix.image, 3, c);
      paint(fmix.image, 4, c);
      csv += std::to_string(c) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
             format_double("%.6f", lambda) + "," + format_double("%.6f", mixup.lambda_eff) + "," +
             format_double("%.6f", cutmix.lambda_eff) + "," + format_double("%.6f", box.clipped_area() / cells) + "," +
             format_double("%.6f", fmix.lambda_eff) + "," +
             format_double("%.6f", static_cast<double>(fmask.covered_count()) / cells) + "\n";
    }
    const std::filesystem::path png =
        output_ ? std::filesystem::path(*output_) : cfg.output / "samples.png";
    write_file_atomic(png, dataio::encode_png_rgb(img_w, img_h, rgb));
    auto sidecar = png;
    sidecar.replace_extension(".csv");
    write_file_atomic(sidecar, csv);
    io.out << "wrote " << png.string() << " and " << sidecar.string() << "\n";
  }

 private:
  std::filesystem::path config_;
  int columns_ = 6;
  int scale_ = 3;
  std::vector<std::string> pairs_;
  std::optional<double> lambda_;
  std::optional<std::uint64_t> seed_;
  std::optional<std::string> output_;
};

}  // namespace

std::unique_ptr<Command> add_gen_samples(CLI::App& app) { return std::make_unique<GenSamplesCommand>(app); }

}  // namespace occlubench::cli
