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
#include "occlubench/metrics/metrics.hpp"
#include "occlubench/refmodel/checkpoint.hpp"
#include "occlubench/refmodel/train.hpp"

namespace occlubench::cli {
namespace {

class TrainCommand : public Command {
 public:
  explicit TrainCommand(CLI::App& app) {
    auto* sub = app.add_subcommand("train", "Train the reference CNN; writes model.obnn and train_log.csv");
    sub->add_option("--config", config_, "JSON run config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed_, "Run seed (init, shuffling, mixing)");
    sub->add_option("--epochs", epochs_);
    sub->add_option("--batch-size", batch_size_);
    sub->add_option("--lr", lr_, "Learning rate before the drop");
    sub->add_option("--mode", mode_, "basic, mixup, cutmix, fmix, rm, rm3");
    sub->add_option("--mask-bank", mask_bank_, "OBMK file with the fixed masks of rm/rm3");
    sub->add_option("--output", output_, "Output directory");
    sub->add_flag("--label-randomization", label_randomization_, "Shuffle the training labels once");
    sub->add_flag("--track-train-accuracy", track_, "Log unaugmented train accuracy per epoch");
  }

  void run(Streams io) override {
    ConfigOverrides o;
    o.set("seed", seed_);
    o.set("train.epochs", epochs_);
    o.set("train.batch_size", batch_size_);
    o.set("train.learning_rate", lr_);
    o.set("train.mode", mode_);
    o.set("mask_bank", mask_bank_);
    o.set("output", output_);
    if (label_randomization_) o.set_json("train.label_randomization", true);
    if (track_) o.set_json("train.track_train_accuracy", true);
    const dataio::RunConfig cfg = o.load(config_);

    const auto data = dataio::load_data(cfg);
    std::optional<maskgen::MaskBank> bank;
    if (cfg.mask_bank) bank.emplace(dataio::read_masks(*cfg.mask_bank));
    const LabeledDataset* donors = cfg.donor_partners && data.donors ? &*data.donors : nullptr;

    auto model = refmodel::TinyCnn::he_initialized(model_shape(cfg, data.train), derive_seed(cfg.seed, stream::kInit));
    const auto result = refmodel::train(std::move(model), data.train, cfg.train, bank ? &*bank : nullptr, donors);

    std::string csv = "epoch,learning_rate,mean_loss,batch_accuracy,train_accuracy\n";
    for (const auto& e : result.log) {
      csv += std::to_string(e.epoch) + "," + format_double("%.6g", e.learning_rate) + "," +
             format_double("%.6f", e.mean_loss) + "," + format_double("%.6f", e.batch_accuracy) + "," +
             (e.train_accuracy ? format_double("%.6f", *e.train_accuracy) : std::string()) + "\n";
    }
    // Final accuracies against the labels actually trained on.
    LabeledDataset trained = data.train;
    trained.labels = result.train_labels;
    const double train_acc = metrics::accuracy(refmodel::predict_dataset(result.model, trained));
    const double test_acc = metrics::accuracy(refmodel::predict_dataset(result.model, data.test));

    refmodel::save_checkpoint(result.model, cfg.output / "model.obnn");
    write_file_atomic(cfg.output / "train_log.csv", csv);
    write_file_atomic(cfg.output / "config.json", dataio::encode_run_config(cfg));
    io.out << "trained " << occlude::to_string(cfg.train.mode) << " model: train accuracy "
           << format_double("%.4f", train_acc) << ", test accuracy " << format_double("%.4f", test_acc) << "\n"
           << "wrote " << (cfg.output / "model.obnn").string() << "\n";
  }

 private:
  std::filesystem::path config_;
  std::optional<std::uint64_t> seed_;
  std::optional<int> epochs_, batch_size_;
  std::optional<double> lr_;
  std::optional<std::string> mode_, mask_bank_, output_;
  bool label_randomization_ = false;
  bool track_ = false;
};

}  // namespace

std::unique_ptr<Command> add_train(CLI::App& app) { return std::make_unique<TrainCommand>(app); }

}  // namespace occlubench::cli
