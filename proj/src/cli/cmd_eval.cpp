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

#include <algorithm>
#include <map>
#include <string>

#include "commands.hpp"
#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/dataio/interchange.hpp"
#include "occlubench/metrics/evaluate.hpp"
#include "occlubench/metrics/report.hpp"
#include "occlubench/refmodel/checkpoint.hpp"
#include "occlubench/refmodel/train.hpp"

namespace occlubench::cli {
namespace {

using metrics::MetricKind;

PredictionLog split_only(const PredictionLog& log, Split split) {
  PredictionLog out;
  for (const auto& r : log) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

std::string join_values(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ";" : "") + format_double("%.6g", values[i]);
  return s;
}

class EvalCommand : public Command {
 public:
  explicit EvalCommand(CLI::App& app) {
    auto* sub = app.add_subcommand("eval", "Robustness curves from a checkpoint or from prediction logs");
    sub->add_option("--config", config_, "JSON run config (data, normalization, eval defaults)")
        ->check(CLI::ExistingFile);
    auto* ckpt = sub->add_option("--checkpoint", checkpoint_, "OBNN model file")->check(CLI::ExistingFile);
    auto* logs = sub->add_option("--log-dir", log_dir_,
                                 "Directory with clean.jsonl and occluded_<fraction>_<seed>.jsonl")
                     ->check(CLI::ExistingDirectory);
    ckpt->excludes(logs);
    sub->add_option("--metric", metric_, "cutocclusion, iocclusion, misclass-delta");
    sub->add_option("--fractions", fractions_, "Occluded fractions, comma separated")->delimiter(',');
    sub->add_option("--seeds", seeds_, "Repeats per fraction");
    sub->add_option("--seed", seed_, "Base seed");
    sub->add_option("--policy", policy_, "saliency, rect, fourier");
    sub->add_option("--fill", fill_, "uniform, donor");
    sub->add_option("--fill-value", fill_value_, "Uniform fill in normalized space (1 or C values)")->delimiter(',');
    sub->add_option("--subset", subset_, "Subset index file");
    sub->add_option("--gradcam-layer", cam_layer_);
    sub->add_option("--gradcam-target", cam_target_, "predicted, true");
    sub->add_option("--upsampling", upsampling_, "bilinear, nearest");
    sub->add_option("--output", output_, "Output directory");
    sub->add_option("--model-name", model_name_, "Model column of the CSV");
    sub->add_option("--num-classes", num_classes_, "Class count for misclass-delta on logs");
    sub->add_option("--split", split_, "Split for misclass-delta (default test)");
  }

  void run(Streams io) override {
    if (!checkpoint_ && !log_dir_) throw Error("eval needs exactly one of --checkpoint or --log-dir");
    if (checkpoint_ && !config_) throw Error("eval --checkpoint needs --config for the dataset");
    ConfigOverrides o;
    o.set("seed", seed_);
    o.set("output", output_);
    o.set("eval.metric", metric_);
    o.set("eval.fractions", fractions_);
    o.set("eval.seeds", seeds_);
    o.set("eval.policy", policy_);
    o.set("eval.fill", fill_);
    o.set("eval.fill_value", fill_value_);
    o.set("eval.subset", subset_);
    o.set("eval.gradcam.layer", cam_layer_);
    o.set("eval.gradcam.target", cam_target_);
    o.set("eval.gradcam.upsampling", upsampling_);
    cfg_ = o.load(config_);
    split_kind_ = split_ ? parse_split(*split_) : Split::kTest;
    if (checkpoint_) {
      model_ = model_name_.value_or(checkpoint_->parent_path().filename().string());
      from_checkpoint();
    } else {
      model_ = model_name_.value_or(std::filesystem::path(*log_dir_).lexically_normal().filename().string());
      from_logs();
    }
    if (model_.empty()) model_ = "model";
    write_outputs(io);
  }

 private:
  void base_provenance(const dataio::Normalization* norm, const std::string& source) {
    if (norm) provenance_ = dataio::provenance(cfg_, *norm);
    else provenance_ = {"seed=" + std::to_string(cfg_.seed)};
    provenance_.push_back("source=" + source);
    const auto& e = cfg_.eval;
    provenance_.push_back("metric=" + std::string(metrics::to_string(e.metric)));
    const auto policy = e.metric == MetricKind::kCutOcclusion ? metrics::MaskPolicy::kRect : e.policy;
    provenance_.push_back("policy=" + std::string(metrics::to_string(policy)));
    provenance_.push_back("fill=" + std::string(metrics::to_string(e.fill)));
    provenance_.push_back("fill_value=" + join_values(e.fill_value));
    provenance_.push_back("seeds=" + std::to_string(e.seeds));
    if (e.subset) provenance_.push_back("subset=" + e.subset->filename().string());
  }

  void from_checkpoint() {
    const auto data = dataio::load_data(cfg_);
    const auto model = refmodel::load_checkpoint(*checkpoint_);
    model.check_input(data.train.images.front());
    if (model.shape().num_classes != data.train.num_classes) {
      throw ShapeError("checkpoint has " + std::to_string(model.shape().num_classes) + " classes, dataset " +
                       std::to_string(data.train.num_classes));
    }
    base_provenance(&data.normalization, "checkpoint");

    LabeledDataset train = data.train;
    LabeledDataset test = data.test;
    if (cfg_.eval.subset) {
      const auto subset = dataio::read_subset(*cfg_.eval.subset);
      if (subset.split == Split::kTrain) train = filter_dataset(train, subset);
      else test = filter_dataset(test, subset);
    }
    metrics::OcclusionSpec spec;
    spec.policy = cfg_.eval.policy;
    spec.fill = cfg_.eval.fill;
    spec.fill_value = cfg_.eval.fill_value;
    spec.donors = data.donors ? &*data.donors : nullptr;
    spec.fourier = cfg_.train.fourier;
    const auto& e = cfg_.eval;

    switch (e.metric) {
      case MetricKind::kCutOcclusion: {
        detail_ = "fraction,repeat,accuracy_percent\n";
        for (double f : e.fractions) {
          std::vector<double> per_seed;
          const MeanStd ms = metrics::cut_occlusion(model, test, f, spec, e.seeds, cfg_.seed, &per_seed);
          rows_.push_back({"cutocclusion", model_, f, 100.0 * ms.mean, 100.0 * ms.std, ms.n});
          for (std::size_t r = 0; r < per_seed.size(); ++r) {
            detail_ += fraction_tag(f) + "," + std::to_string(r) + "," + format_double("%.6f", 100.0 * per_seed[r]) +
                       "\n";
          }
        }
        break;
      }
      case MetricKind::kIOcclusion: {
        metrics::IOcclusionInputs in;
        in.model = &model;
        in.train = &train;
        in.test = &test;
        in.spec = spec;
        in.cam = e.gradcam;
        std::vector<metrics::IOcclusionSample> samples;
        const auto curve = metrics::i_occlusion_curve(in, e.fractions, e.seeds, cfg_.seed, &samples);
        for (std::size_t i = 0; i < curve.fractions.size(); ++i) {
          const auto& v = curve.values[i];
          rows_.push_back({"iocclusion", model_, curve.fractions[i], v.mean, v.std, v.n});
        }
        detail_ = "fraction,repeat,a_train,a_test,a_train_i,a_test_i,iocclusion\n";
        for (const auto& s : samples) {
          detail_ += fraction_tag(s.fraction) + "," + std::to_string(s.repeat) + "," +
                     format_double("%.6f", s.accuracy.a_train) + "," + format_double("%.6f", s.accuracy.a_test) + "," +
                     format_double("%.6f", s.accuracy.a_train_i) + "," + format_double("%.6f", s.accuracy.a_test_i) +
                     "," + format_double("%.6f", s.value) + "\n";
        }
        break;
      }
      case MetricKind::kMisclassDelta: {
        const LabeledDataset& ds = split_kind_ == Split::kTrain ? train : test;
        const PredictionLog clean = refmodel::predict_dataset(model, ds);
        std::vector<SaliencyMap> saliency;
        if (spec.policy == metrics::MaskPolicy::kSaliency) saliency = refmodel::grad_cam_dataset(model, ds, e.gradcam);
        // Same per-split stream as the first repeat of the curve metrics.
        const std::uint64_t seed = derive_seed(metrics::repeat_seed(cfg_.seed, 0), split_kind_ == Split::kTrain ? 0 : 1);
        for (double f : e.fractions) {
          const PredictionLog occluded = metrics::predict_occluded(model, ds, spec, f, seed, saliency);
          deltas_.push_back(metrics::misclass_delta(clean, occluded, ds.num_classes, "occlusion_" + fraction_tag(f)));
        }
        break;
      }
    }
  }

  PredictionLog read_log(const std::filesystem::path& path) const {
    if (!std::filesystem::exists(path)) throw Error("missing prediction log " + path.string());
    PredictionLog log = dataio::read_prediction_log(path);
    if (subset_index_) log = filter_log(log, *subset_index_);
    return log;
  }

  /// Occluded log of one fraction and repeat; the clean log stands in for fraction 0.
  PredictionLog occluded_log(double f, std::size_t r, const PredictionLog& clean) const {
    const auto path = std::filesystem::path(*log_dir_) / ("occluded_" + fraction_tag(f) + "_" + std::to_string(r) + ".jsonl");
    if (f == 0.0 && !std::filesystem::exists(path)) return clean;
    return read_log(path);
  }

  void from_logs() {
    const std::filesystem::path dir(*log_dir_);
    const auto& e = cfg_.eval;
    base_provenance(cfg_.normalization ? &*cfg_.normalization : nullptr, "logs");
    if (e.subset) subset_index_ = dataio::read_subset(*e.subset);
    const PredictionLog clean = read_log(dir / "clean.jsonl");

    switch (e.metric) {
      case MetricKind::kCutOcclusion: {
        detail_ = "fraction,repeat,accuracy_percent\n";
        for (double f : e.fractions) {
          std::vector<PredictionLog> per_seed;
          for (std::size_t r = 0; r < e.seeds; ++r) per_seed.push_back(split_only(occluded_log(f, r, clean), Split::kTest));
          const MeanStd ms = metrics::cut_occlusion_from_logs(per_seed);
          rows_.push_back({"cutocclusion", model_, f, 100.0 * ms.mean, 100.0 * ms.std, ms.n});
          for (std::size_t r = 0; r < per_seed.size(); ++r) {
            detail_ += fraction_tag(f) + "," + std::to_string(r) + "," +
                       format_double("%.6f", 100.0 * metrics::accuracy(per_seed[r])) + "\n";
          }
        }
        break;
      }
      case MetricKind::kIOcclusion: {
        if (e.policy == metrics::MaskPolicy::kSaliency) check_saliency_files(dir, clean);
        detail_ = "fraction,repeat,a_train,a_test,a_train_i,a_test_i,iocclusion\n";
        for (double f : e.fractions) {
          std::vector<double> values;
          for (std::size_t r = 0; r < e.seeds; ++r) {
            metrics::SplitAccuracy acc;
            values.push_back(metrics::i_occlusion_from_logs(clean, occluded_log(f, r, clean), &acc));
            detail_ += fraction_tag(f) + "," + std::to_string(r) + "," + format_double("%.6f", acc.a_train) + "," +
                       format_double("%.6f", acc.a_test) + "," + format_double("%.6f", acc.a_train_i) + "," +
                       format_double("%.6f", acc.a_test_i) + "," + format_double("%.6f", values.back()) + "\n";
          }
          const MeanStd ms = aggregate_seeds(values);
          rows_.push_back({"iocclusion", model_, f, ms.mean, ms.std, ms.n});
        }
        break;
      }
      case MetricKind::kMisclassDelta: {
        int classes = num_classes_.value_or(0);
        if (classes == 0 && config_) classes = cfg_.data.num_classes;
        const PredictionLog clean_split = split_only(clean, split_kind_);
        std::vector<PredictionLog> occluded;
        for (double f : e.fractions) occluded.push_back(split_only(occluded_log(f, 0, clean), split_kind_));
        if (classes == 0) {
          for (const auto& r : clean_split) classes = std::max({classes, r.true_label + 1, r.predicted_label + 1});
          for (const auto& log : occluded) {
            for (const auto& r : log) classes = std::max(classes, r.predicted_label + 1);
          }
        }
        for (std::size_t i = 0; i < occluded.size(); ++i) {
          deltas_.push_back(metrics::misclass_delta(clean_split, occluded[i], classes,
                                                    "occlusion_" + fraction_tag(e.fractions[i])));
        }
        break;
      }
    }
  }

  void check_saliency_files(const std::filesystem::path& dir, const PredictionLog& clean) const {
    for (Split split : {Split::kTrain, Split::kTest}) {
      const auto path = dir / (std::string(to_string(split)) + "_saliency.obsm");
      if (!std::filesystem::exists(path)) {
        throw Error("iocclusion from logs needs saliency files: missing " + path.string());
      }
      const auto maps = dataio::read_saliency(path);
      std::size_t records = 0;
      for (const auto& r : clean) records += r.split == split;
      if (!subset_index_ && maps.size() != records) {
        throw FormatError(path.string() + " holds " + std::to_string(maps.size()) + " maps for " +
                          std::to_string(records) + " " + std::string(to_string(split)) + " records");
      }
    }
  }

  void write_outputs(Streams io) const {
    const auto& out_dir = cfg_.output;
    const std::string name(metrics::to_string(cfg_.eval.metric));
    if (cfg_.eval.metric == MetricKind::kMisclassDelta) {
      write_file_atomic(out_dir / (name + ".csv"), metrics::delta_csv(deltas_, model_, provenance_));
      for (const auto& d : deltas_) {
        write_file_atomic(out_dir / (name + "_" + d.distortion + ".svg"),
                          metrics::delta_svg(d, "Misclassification delta, " + model_ + ", " + d.distortion));
        io.out << d.distortion << ": total delta " << d.total() << "\n";
      }
    } else {
      const bool cut = cfg_.eval.metric == MetricKind::kCutOcclusion;
      write_file_atomic(out_dir / (name + ".csv"), metrics::curve_csv(rows_, provenance_));
      write_file_atomic(out_dir / (name + ".svg"),
                        metrics::curve_svg(rows_, cut ? "CutOcclusion" : "iOcclusion",
                                           cut ? "test accuracy (%)" : "iOcclusion"));
      std::string detail;
      for (const auto& p : provenance_) detail += "# " + p + "\n";
      write_file_atomic(out_dir / (name + "_per_seed.csv"), detail + detail_);
      for (const auto& r : rows_) {
        io.out << name << " @ " << fraction_tag(r.fraction) << ": " << format_double("%.4f", r.mean) << " +- "
               << format_double("%.4f", r.std) << "\n";
      }
    }
    io.out << "wrote " << (out_dir / (name + ".csv")).string() << "\n";
  }

  std::optional<std::filesystem::path> config_, checkpoint_;
  std::optional<std::string> log_dir_, metric_, policy_, fill_, subset_, cam_target_, upsampling_, output_,
      model_name_, split_;
  std::optional<std::vector<double>> fractions_, fill_value_;
  std::optional<std::size_t> seeds_;
  std::optional<std::uint64_t> seed_;
  std::optional<int> cam_layer_, num_classes_;

  dataio::RunConfig cfg_;
  Split split_kind_ = Split::kTest;
  std::string model_;
  std::vector<std::string> provenance_;
  std::vector<metrics::CurveRow> rows_;
  std::vector<metrics::MisclassDelta> deltas_;
  std::string detail_;
  std::optional<SubsetIndex> subset_index_;
};

}  // namespace

std::unique_ptr<Command> add_eval(CLI::App& app) { return std::make_unique<EvalCommand>(app); }

}  // namespace occlubench::cli
