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
#include "occlubench/dataio/interchange.hpp"
#include "occlubench/refmodel/checkpoint.hpp"

namespace occlubench::cli {
namespace {

class ValidateCommand : public Command {
 public:
  explicit ValidateCommand(CLI::App& app) {
    auto* sub = app.add_subcommand("validate", "Schema-check an interchange file");
    sub->add_option("kind", kind_, "predictions, saliency, masks, subset, config, checkpoint")->required();
    sub->add_option("file", file_)->required()->check(CLI::ExistingFile);
    sub->add_option("--num-classes", num_classes_, "Label range check for predictions");
  }

  void run(Streams io) override {
    std::string summary;
    if (kind_ == "predictions") {
      const auto log = dataio::read_prediction_log(file_);
      if (num_classes_) dataio::check_log_labels(log, *num_classes_);
      std::size_t train = 0;
      for (const auto& r : log) train += r.split == Split::kTrain;
      summary = std::to_string(log.size()) + " records (" + std::to_string(train) + " train, " +
                std::to_string(log.size() - train) + " test)";
    } else if (kind_ == "saliency") {
      const auto maps = dataio::read_saliency(file_);
      summary = std::to_string(maps.size()) + " maps";
      if (!maps.empty()) summary += " of " + std::to_string(maps.front().height) + "x" + std::to_string(maps.front().width);
    } else if (kind_ == "masks") {
      const auto masks = dataio::read_masks(file_);
      summary = std::to_string(masks.size()) + " masks";
      if (!masks.empty()) summary += " of " + std::to_string(masks.front().height()) + "x" + std::to_string(masks.front().width());
    } else if (kind_ == "subset") {
      const auto subset = dataio::read_subset(file_);
      summary = std::to_string(subset.indices.size()) + " " + std::string(to_string(subset.split)) + " indices";
    } else if (kind_ == "config") {
      dataio::read_run_config(file_);
      summary = "valid run config";
    } else if (kind_ == "checkpoint") {
      const auto model = refmodel::load_checkpoint(file_);
      summary = std::to_string(model.parameter_count()) + " parameters, " +
                std::to_string(model.shape().num_classes) + " classes";
    } else {
      throw Error("unknown kind '" + kind_ + "' (predictions, saliency, masks, subset, config, checkpoint)");
    }
    io.out << "ok: " << file_.string() << ": " << summary << "\n";
  }

 private:
  std::string kind_;
  std::filesystem::path file_;
  std::optional<int> num_classes_;
};

}  // namespace

std::unique_ptr<Command> add_validate(CLI::App& app) { return std::make_unique<ValidateCommand>(app); }

}  // namespace occlubench::cli
