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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "occlubench/dataio/config.hpp"
#include "occlubench/refmodel/tiny_cnn.hpp"

namespace occlubench::cli {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// A subcommand: registers its options, then runs after parsing.
class Command {
 public:
  virtual ~Command() = default;
  virtual void run(Streams io) = 0;
};

std::unique_ptr<Command> add_train(CLI::App& app);
std::unique_ptr<Command> add_eval(CLI::App& app);
std::unique_ptr<Command> add_gen_samples(CLI::App& app);
std::unique_ptr<Command> add_gen_masks(CLI::App& app);
std::unique_ptr<Command> add_validate(CLI::App& app);

/// Config file (or an empty object) plus dotted-key overrides; flags win.
class ConfigOverrides {
 public:
  template <typename T>
  void set(const std::string& dotted, const std::optional<T>& value) {
    if (value) set_json(dotted, nlohmann::json(*value));
  }
  void set_json(const std::string& dotted, nlohmann::json value);
  /// Parses the merged config; relative paths in the file resolve against
  /// its directory, relative paths given on the command line against the cwd.
  dataio::RunConfig load(const std::optional<std::filesystem::path>& file) const;

 private:
  std::vector<std::pair<std::string, nlohmann::json>> overrides_;
};

refmodel::ModelShape model_shape(const dataio::RunConfig& config, const LabeledDataset& data);

/// "%.2f", the fraction tag used in log file names.
std::string fraction_tag(double fraction);
std::string format_double(const char* pattern, double value);

}  // namespace occlubench::cli
