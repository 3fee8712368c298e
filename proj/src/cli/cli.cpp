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

#include "occlubench/cli/cli.hpp"

#include <cstdio>

#include "commands.hpp"
#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/error.hpp"

namespace occlubench::cli {
namespace {

bool is_path_key(const std::string& key) { return key == "mask_bank" || key == "output" || key == "subset"; }

}  // namespace

void ConfigOverrides::set_json(const std::string& dotted, nlohmann::json value) {
  overrides_.emplace_back(dotted, std::move(value));
}

dataio::RunConfig ConfigOverrides::load(const std::optional<std::filesystem::path>& file) const {
  nlohmann::json root = nlohmann::json::object();
  std::filesystem::path base;
  if (file) {
    const auto bytes = read_file_bytes(*file);
    try {
      root = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
      throw dataio::ConfigError({file->string() + ": not valid JSON: " + e.what()});
    }
    if (!root.is_object()) throw dataio::ConfigError({file->string() + ": top level must be a JSON object"});
    base = file->parent_path();
    if (base.empty()) base = ".";
  }
  for (const auto& [dotted, value] : overrides_) {
    nlohmann::json* node = &root;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = dotted.find('.', start);
      const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) {
        nlohmann::json v = value;
        // Paths from the command line are relative to the working directory.
        if (v.is_string() && !base.empty() && is_path_key(key)) {
          v = std::filesystem::absolute(v.get<std::string>()).string();
        }
        (*node)[key] = v;
        break;
      }
      if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = nlohmann::json::object();
      node = &(*node)[key];
      start = dot + 1;
    }
  }
  return dataio::parse_run_config(root.dump(), base);
}

refmodel::ModelShape model_shape(const dataio::RunConfig& config, const LabeledDataset& data) {
  refmodel::ModelShape shape;
  const Image& first = data.images.front();
  shape.input_channels = first.channels();
  shape.input_height = first.height();
  shape.input_width = first.width();
  shape.conv_channels = config.conv_channels;
  shape.kernel = config.kernel;
  shape.num_classes = data.num_classes;
  return shape;
}

std::string format_double(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

std::string fraction_tag(double fraction) { return format_double("%.2f", fraction); }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Occlusion robustness toolkit: train, occlude, evaluate.", "occlubench"};
  app.require_subcommand(1);
  std::vector<std::pair<CLI::App*, std::unique_ptr<Command>>> commands;
  auto add = [&](std::unique_ptr<Command> (*factory)(CLI::App&)) {
    const std::size_t before = app.get_subcommands({}).size();
    auto cmd = factory(app);
    commands.emplace_back(app.get_subcommands({}).at(before), std::move(cmd));
  };
  add(add_train);
  add(add_eval);
  add(add_gen_samples);
  add(add_gen_masks);
  add(add_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    for (auto& [sub, cmd] : commands) {
      if (sub->parsed()) cmd->run(Streams{out, err});
    }
  } catch (const dataio::ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace occlubench::cli
