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

#include "occlubench/dataio/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/seed.hpp"

namespace occlubench::dataio {
namespace {

using nlohmann::json;

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out = "invalid config:";
  for (const auto& l : lines) out += "\n  - " + l;
  return out;
}

// Reads the members of one JSON object, remembering which keys were used so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path, std::vector<std::string>& problems)
      : object_(object), path_(std::move(path)), problems_(problems) {}

  ~ObjectReader() {
    if (!object_.is_object()) return;
    for (const auto& [key, value] : object_.items()) {
      if (!used_.count(key)) problems_.push_back(where(key) + ": unknown key");
    }
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    if (!object_.is_object()) return nullptr;
    auto it = object_.find(key);
    return it == object_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void get(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer()) out = v->get<int>();
      else problems_.push_back(where(key) + ": expected an integer");
    }
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) out = v->get<std::uint64_t>();
      else if (v->is_number_integer() && v->get<long long>() >= 0) out = static_cast<std::uint64_t>(v->get<long long>());
      else problems_.push_back(where(key) + ": expected a non-negative integer");
    }
  }
  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) out = v->get<double>();
      else problems_.push_back(where(key) + ": expected a number");
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else problems_.push_back(where(key) + ": expected true or false");
    }
  }
  bool get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
        return true;
      }
      problems_.push_back(where(key) + ": expected a string");
    }
    return false;
  }
  void get(const std::string& key, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    if (get(key, s)) out = resolve(s, base);
  }
  void get(const std::string& key, std::optional<std::filesystem::path>& out, const std::filesystem::path& base) {
    std::string s;
    if (get(key, s)) out = resolve(s, base);
  }
  void get(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      bool ok = v->is_array();
      if (ok) {
        for (const auto& e : *v) ok = ok && e.is_number();
      }
      if (!ok) {
        problems_.push_back(where(key) + ": expected an array of numbers");
        return;
      }
      out.clear();
      for (const auto& e : *v) out.push_back(e.get<double>());
    }
  }
  void get(const std::string& key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      bool ok = v->is_array();
      if (ok) {
        for (const auto& e : *v) ok = ok && e.is_number_integer();
      }
      if (!ok) {
        problems_.push_back(where(key) + ": expected an array of integers");
        return;
      }
      out.clear();
      for (const auto& e : *v) out.push_back(e.get<int>());
    }
  }
  void get(const std::string& key, std::vector<std::filesystem::path>& out, const std::filesystem::path& base) {
    if (const json* v = find(key)) {
      bool ok = v->is_array();
      if (ok) {
        for (const auto& e : *v) ok = ok && e.is_string();
      }
      if (!ok) {
        problems_.push_back(where(key) + ": expected an array of paths");
        return;
      }
      out.clear();
      for (const auto& e : *v) out.push_back(resolve(e.get<std::string>(), base));
    }
  }

  template <typename T, typename Parse>
  void get_enum(const std::string& key, T& out, Parse parse, const char* allowed) {
    std::string s;
    if (!get(key, s)) return;
    if (auto parsed = parse(s)) out = *parsed;
    else problems_.push_back(where(key) + ": '" + s + "' is not one of " + allowed);
  }

  /// A nested object, or nullptr (with a problem recorded) when the key holds something else.
  const json* object(const std::string& key) {
    const json* v = find(key);
    if (v && !v->is_object()) {
      problems_.push_back(where(key) + ": expected an object");
      return nullptr;
    }
    return v;
  }

 private:
  static std::filesystem::path resolve(const std::string& s, const std::filesystem::path& base) {
    std::filesystem::path p(s);
    return p.is_relative() && !base.empty() ? base / p : p;
  }

  const json& object_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> used_;
};

std::optional<SourceKind> parse_source(std::string_view s) {
  if (s == "synthetic") return SourceKind::kSynthetic;
  if (s == "cifar10") return SourceKind::kCifar10;
  if (s == "idx") return SourceKind::kIdx;
  return std::nullopt;
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kSynthetic: return "synthetic";
    case SourceKind::kCifar10: return "cifar10";
    case SourceKind::kIdx: return "idx";
  }
  return "synthetic";
}

void read_source(const json& j, const std::string& path, const std::filesystem::path& base, DataSource& src,
                 std::vector<std::string>& problems) {
  ObjectReader r(j, path, problems);
  r.get_enum("source", src.kind, parse_source, "synthetic, cifar10, idx");
  r.get("num_classes", src.num_classes);
  r.get("train_files", src.train_files, base);
  r.get("test_files", src.test_files, base);
  r.get("train_images", src.train_images, base);
  r.get("train_labels", src.train_labels, base);
  r.get("test_images", src.test_images, base);
  r.get("test_labels", src.test_labels, base);
  r.get("test_per_class", src.test_per_class);
  if (const json* s = r.object("synthetic")) {
    ObjectReader sr(*s, r.where("synthetic"), problems);
    auto& spec = src.synthetic;
    sr.get("classes", spec.classes);
    sr.get("per_class", spec.per_class);
    sr.get("size", spec.size);
    sr.get("channels", spec.channels);
    sr.get("noise", spec.noise);
    sr.get("jitter", spec.jitter);
    sr.get("shape_scale", spec.shape_scale);
    sr.get("tint", spec.tint);
    sr.get("clutter", spec.clutter);
    sr.get("seed", spec.seed);
  }
  if (src.kind == SourceKind::kSynthetic) src.num_classes = src.synthetic.classes;
}

std::optional<metrics::MetricKind> parse_metric_opt(std::string_view s) { return metrics::parse_metric(s); }

void source_problems(const DataSource& src, const std::string& path, std::vector<std::string>& out) {
  switch (src.kind) {
    case SourceKind::kSynthetic: {
      const auto& s = src.synthetic;
      if (s.classes < 2) out.push_back(path + ".synthetic.classes: must be >= 2");
      if (s.per_class < 1) out.push_back(path + ".synthetic.per_class: must be >= 1");
      if (s.size < 8) out.push_back(path + ".synthetic.size: must be >= 8");
      if (s.channels != 1 && s.channels != 3) out.push_back(path + ".synthetic.channels: must be 1 or 3");
      if (!(s.noise >= 0)) out.push_back(path + ".synthetic.noise: must be >= 0");
      if (!(s.jitter >= 0)) out.push_back(path + ".synthetic.jitter: must be >= 0");
      if (!(s.shape_scale > 0)) out.push_back(path + ".synthetic.shape_scale: must be > 0");
      if (!(s.tint >= 0 && s.tint <= 1)) out.push_back(path + ".synthetic.tint: must lie in [0, 1]");
      if (s.clutter < 0) out.push_back(path + ".synthetic.clutter: must be >= 0");
      if (src.test_per_class < 1) out.push_back(path + ".test_per_class: must be >= 1");
      break;
    }
    case SourceKind::kCifar10:
      if (src.train_files.empty()) out.push_back(path + ".train_files: required for cifar10");
      if (src.test_files.empty()) out.push_back(path + ".test_files: required for cifar10");
      break;
    case SourceKind::kIdx:
      if (src.train_images.empty()) out.push_back(path + ".train_images: required for idx");
      if (src.train_labels.empty()) out.push_back(path + ".train_labels: required for idx");
      if (src.test_images.empty()) out.push_back(path + ".test_images: required for idx");
      if (src.test_labels.empty()) out.push_back(path + ".test_labels: required for idx");
      break;
  }
  if (src.kind != SourceKind::kSynthetic && (src.num_classes < 2 || src.num_classes > 256)) {
    out.push_back(path + ".num_classes: must lie in [2, 256]");
  }
}

json source_json(const DataSource& src) {
  json j;
  j["source"] = std::string(to_string(src.kind));
  switch (src.kind) {
    case SourceKind::kSynthetic: {
      const auto& s = src.synthetic;
      j["synthetic"] = {{"classes", s.classes}, {"per_class", s.per_class}, {"size", s.size},
                        {"channels", s.channels}, {"noise", s.noise},     {"jitter", s.jitter}, {"shape_scale", s.shape_scale},
                        {"tint", s.tint},         {"clutter", s.clutter}, {"seed", s.seed}};
      j["test_per_class"] = src.test_per_class;
      break;
    }
    case SourceKind::kCifar10: {
      j["num_classes"] = src.num_classes;
      std::vector<std::string> tr, te;
      for (const auto& p : src.train_files) tr.push_back(p.string());
      for (const auto& p : src.test_files) te.push_back(p.string());
      j["train_files"] = tr;
      j["test_files"] = te;
      break;
    }
    case SourceKind::kIdx:
      j["num_classes"] = src.num_classes;
      j["train_images"] = src.train_images.string();
      j["train_labels"] = src.train_labels.string();
      j["test_images"] = src.test_images.string();
      j["test_labels"] = src.test_labels.string();
      break;
  }
  return j;
}

std::string_view to_string(refmodel::CamTarget t) { return t == refmodel::CamTarget::kTrue ? "true" : "predicted"; }
std::string_view to_string(refmodel::Upsampling u) {
  return u == refmodel::Upsampling::kNearest ? "nearest" : "bilinear";
}

std::pair<LabeledDataset, LabeledDataset> load_source(const DataSource& src) {
  switch (src.kind) {
    case SourceKind::kSynthetic: {
      SyntheticSpec train_spec = src.synthetic;
      train_spec.seed = derive_seed(src.synthetic.seed, 0);
      SyntheticSpec test_spec = src.synthetic;
      test_spec.per_class = src.test_per_class;
      test_spec.seed = derive_seed(src.synthetic.seed, 1);
      return {gen_synthetic(train_spec, Split::kTrain), gen_synthetic(test_spec, Split::kTest)};
    }
    case SourceKind::kCifar10:
      return {load_cifar10(src.train_files, Split::kTrain, src.num_classes),
              load_cifar10(src.test_files, Split::kTest, src.num_classes)};
    case SourceKind::kIdx:
      return {load_idx(src.train_images, src.train_labels, Split::kTrain, src.num_classes),
              load_idx(src.test_images, src.test_labels, Split::kTest, src.num_classes)};
  }
  throw Error("unknown data source");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_lines(problems)), problems_(std::move(problems)) {}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> out;
  source_problems(data, "data", out);
  if (donors) source_problems(*donors, "donors", out);
  if (normalization) {
    const auto& n = *normalization;
    if (n.mean.empty() || n.mean.size() != n.std.size()) {
      out.push_back("normalization: mean and std must be non-empty and of equal length");
    }
    for (double s : n.std) {
      if (!(s > 0) || !std::isfinite(s)) {
        out.push_back("normalization.std: every entry must be positive and finite");
        break;
      }
    }
    for (double m : n.mean) {
      if (!std::isfinite(m)) {
        out.push_back("normalization.mean: every entry must be finite");
        break;
      }
    }
  }
  if (conv_channels.empty()) out.push_back("model.conv_channels: at least one conv layer is required");
  for (int c : conv_channels) {
    if (c < 1) {
      out.push_back("model.conv_channels: every entry must be >= 1");
      break;
    }
  }
  if (kernel < 1 || kernel % 2 == 0) out.push_back("model.kernel: must be a positive odd integer");
  for (auto& p : train.problems()) out.push_back("train." + p);
  using occlude::AugmentationMode;
  if ((train.mode == AugmentationMode::kRm || train.mode == AugmentationMode::kRm3) && !mask_bank) {
    out.push_back(std::string("mask_bank: mode ") + std::string(occlude::to_string(train.mode)) +
                  " needs a mask bank file (" + (train.mode == AugmentationMode::kRm ? "1 mask" : "3 masks") + ")");
  }
  if (eval.fractions.empty()) out.push_back("eval.fractions: at least one fraction is required");
  for (double f : eval.fractions) {
    if (!(f >= 0 && f <= 1)) {
      out.push_back("eval.fractions: every entry must lie in [0, 1]");
      break;
    }
  }
  if (eval.seeds < 1) out.push_back("eval.seeds: must be >= 1");
  if (eval.fill_value.empty()) out.push_back("eval.fill_value: needs one value or one per channel");
  if (donor_partners && !donors) out.push_back("train.partners: donor partners need a donors source");
  if (eval.fill == metrics::FillMode::kDonor && !donors) out.push_back("eval.fill: donor fill needs a donors source");
  return out;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  if (!root.is_object()) throw ConfigError({"top level must be a JSON object"});

  RunConfig cfg;
  {
    ObjectReader r(root, "", problems);
    if (const json* d = r.object("data")) read_source(*d, "data", base, cfg.data, problems);
    if (const json* d = r.object("donors")) {
      cfg.donors.emplace();
      read_source(*d, "donors", base, *cfg.donors, problems);
    }
    if (const json* n = r.object("normalization")) {
      ObjectReader nr(*n, "normalization", problems);
      Normalization norm;
      nr.get("mean", norm.mean);
      nr.get("std", norm.std);
      cfg.normalization = norm;
    }
    if (const json* m = r.object("model")) {
      ObjectReader mr(*m, "model", problems);
      mr.get("conv_channels", cfg.conv_channels);
      mr.get("kernel", cfg.kernel);
    }
    if (const json* t = r.object("train")) {
      ObjectReader tr(*t, "train", problems);
      auto& tc = cfg.train;
      tr.get("epochs", tc.epochs);
      tr.get("batch_size", tc.batch_size);
      tr.get("learning_rate", tc.learning_rate);
      tr.get("learning_rate_after", tc.learning_rate_after);
      tr.get("lr_drop_epoch", tc.lr_drop_epoch);
      tr.get("momentum", tc.momentum);
      tr.get("weight_decay", tc.weight_decay);
      tr.get_enum("mode", tc.mode, occlude::parse_augmentation, "basic, mixup, cutmix, fmix, rm, rm3");
      tr.get("decay_power", tc.fourier.decay_power);
      tr.get("alpha", tc.fourier.alpha);
      double fixed = 0.0;
      if (tr.find("fixed_lambda")) {
        tr.get("fixed_lambda", fixed);
        tc.fixed_lambda = fixed;
      }
      tr.get("label_randomization", tc.label_randomization);
      tr.get("track_train_accuracy", tc.track_train_accuracy);
      std::string partners;
      if (tr.get("partners", partners)) {
        if (partners == "donors") cfg.donor_partners = true;
        else if (partners != "batch") problems.push_back("train.partners: '" + partners + "' is not one of batch, donors");
      }
    }
    r.get("mask_bank", cfg.mask_bank, base);
    if (const json* e = r.object("eval")) {
      ObjectReader er(*e, "eval", problems);
      auto& ec = cfg.eval;
      er.get_enum("metric", ec.metric, parse_metric_opt, "cutocclusion, iocclusion, misclass-delta");
      er.get("fractions", ec.fractions);
      er.get("seeds", ec.seeds);
      er.get_enum("policy", ec.policy, metrics::parse_mask_policy, "saliency, rect, fourier");
      er.get_enum("fill", ec.fill, metrics::parse_fill_mode, "uniform, donor");
      er.get("fill_value", ec.fill_value);
      er.get("subset", ec.subset, base);
      if (const json* g = er.object("gradcam")) {
        ObjectReader gr(*g, "eval.gradcam", problems);
        gr.get("layer", ec.gradcam.layer);
        gr.get_enum("target", ec.gradcam.target, refmodel::parse_cam_target, "predicted, true");
        gr.get_enum("upsampling", ec.gradcam.upsampling, refmodel::parse_upsampling, "nearest, bilinear");
      }
    }
    r.get("seed", cfg.seed);
    r.get("output", cfg.output, base);
  }
  cfg.train.seed = cfg.seed;
  for (auto& p : cfg.problems()) problems.push_back(p);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_run_config(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

std::string encode_run_config(const RunConfig& cfg) {
  json j;
  j["data"] = source_json(cfg.data);
  if (cfg.donors) j["donors"] = source_json(*cfg.donors);
  if (cfg.normalization) j["normalization"] = {{"mean", cfg.normalization->mean}, {"std", cfg.normalization->std}};
  j["model"] = {{"conv_channels", cfg.conv_channels}, {"kernel", cfg.kernel}};
  const auto& t = cfg.train;
  j["train"] = {{"epochs", t.epochs},
                {"batch_size", t.batch_size},
                {"learning_rate", t.learning_rate},
                {"learning_rate_after", t.learning_rate_after},
                {"lr_drop_epoch", t.lr_drop_epoch},
                {"momentum", t.momentum},
                {"weight_decay", t.weight_decay},
                {"mode", std::string(occlude::to_string(t.mode))},
                {"decay_power", t.fourier.decay_power},
                {"alpha", t.fourier.alpha},
                {"label_randomization", t.label_randomization},
                {"track_train_accuracy", t.track_train_accuracy},
                {"partners", cfg.donor_partners ? "donors" : "batch"}};
  if (t.fixed_lambda) j["train"]["fixed_lambda"] = *t.fixed_lambda;
  if (cfg.mask_bank) j["mask_bank"] = cfg.mask_bank->string();
  const auto& e = cfg.eval;
  j["eval"] = {{"metric", std::string(metrics::to_string(e.metric))},
               {"fractions", e.fractions},
               {"seeds", e.seeds},
               {"policy", std::string(metrics::to_string(e.policy))},
               {"fill", std::string(metrics::to_string(e.fill))},
               {"fill_value", e.fill_value},
               {"gradcam",
                {{"layer", e.gradcam.layer},
                 {"target", std::string(to_string(e.gradcam.target))},
                 {"upsampling", std::string(to_string(e.gradcam.upsampling))}}}};
  if (e.subset) j["eval"]["subset"] = e.subset->string();
  j["seed"] = cfg.seed;
  j["output"] = cfg.output.string();
  return j.dump(2) + "\n";
}

LoadedData load_data(const RunConfig& config) {
  auto problems = config.problems();
  if (!problems.empty()) throw ConfigError(std::move(problems));

  LoadedData out;
  std::tie(out.train, out.test) = load_source(config.data);
  if (out.train.images.front().channels() != out.test.images.front().channels() ||
      out.train.images.front().height() != out.test.images.front().height() ||
      out.train.images.front().width() != out.test.images.front().width()) {
    throw ShapeError("train and test images differ in shape");
  }
  out.normalization = config.normalization ? *config.normalization : Normalization::fit(out.train);
  const int channels = out.train.images.front().channels();
  if (static_cast<int>(out.normalization.mean.size()) != channels) {
    throw ConfigError({"normalization: " + std::to_string(out.normalization.mean.size()) +
                       " channel(s) given, images have " + std::to_string(channels)});
  }
  if (config.eval.fill_value.size() != 1 && static_cast<int>(config.eval.fill_value.size()) != channels) {
    throw ConfigError({"eval.fill_value: needs 1 or " + std::to_string(channels) + " values"});
  }
  out.normalization.apply(out.train);
  out.normalization.apply(out.test);
  if (config.donors) {
    // Donor images only need the train split of their source.
    LabeledDataset donors = load_source(*config.donors).first;
    if (!out.train.images.front().same_shape(donors.images.front())) {
      throw ShapeError("donor images differ in shape from the dataset");
    }
    out.normalization.apply(donors);
    out.donors = std::move(donors);
  }
  return out;
}

std::vector<std::string> provenance(const RunConfig& config, const Normalization& norm) {
  std::vector<std::string> lines;
  lines.push_back("data=" + std::string(to_string(config.data.kind)));
  std::string mean = "normalization_mean=", sd = "normalization_std=";
  for (std::size_t c = 0; c < norm.mean.size(); ++c) {
    mean += (c ? ";" : "") + num(norm.mean[c]);
    sd += (c ? ";" : "") + num(norm.std[c]);
  }
  lines.push_back(mean);
  lines.push_back(sd);
  lines.push_back("seed=" + std::to_string(config.seed));
  return lines;
}

}  // namespace occlubench::dataio
