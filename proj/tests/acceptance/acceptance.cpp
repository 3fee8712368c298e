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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "occlubench/cli/cli.hpp"
#include "occlubench/core/error.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/dataio/config.hpp"
#include "occlubench/dataio/datasets.hpp"
#include "occlubench/dataio/interchange.hpp"
#include "occlubench/maskgen/maskgen.hpp"
#include "occlubench/metrics/evaluate.hpp"
#include "occlubench/metrics/metrics.hpp"
#include "occlubench/refmodel/train.hpp"
#include "../support/fourier_oracle.hpp"
#include "../support/gradient_check.hpp"
#include "../support/temp_dir.hpp"

using namespace occlubench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- mask generators

Outcome mask_fraction_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kSide = 32;
  constexpr double kCells = kSide * kSide;
  Rng rng(20240601);
  int failures = 0;
  double worst_exact = 0.0, worst_rect_excess = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int generator = static_cast<int>(rng.uniform_int(3));
    const double fraction = rng.uniform();
    const std::uint64_t seed = rng.next_u64();
    Mask m;
    if (generator == 0) {
      SaliencyMap map{kSide, kSide, std::vector<float>(kSide * kSide)};
      Rng values(seed);
      // Coarse values force many ties.
      for (auto& v : map.values) v = static_cast<float>(values.uniform_int(8));
      m = maskgen::saliency_mask(map, fraction);
    } else if (generator == 1) {
      m = maskgen::fourier_mask(kSide, kSide, fraction, maskgen::FourierMaskParams{}, seed);
    } else {
      m = maskgen::rect_mask(kSide, kSide, fraction, seed);
    }
    const double deviation = std::abs(m.covered_fraction() - fraction);
    if (generator < 2) {
      worst_exact = std::max(worst_exact, deviation);
      if (deviation > 1.0 / 1024.0) ++failures;
    } else {
      // Slack: half a cell of rounding on the request plus the distance from
      // the rounded cell count to the closest area a single in-grid
      // rectangle can realize, found by enumeration.
      const long target = std::lround(fraction * kCells);
      long best = target;
      for (int rh = 1; rh <= kSide; ++rh) {
        for (int rw = 1; rw <= kSide; ++rw) best = std::min(best, std::labs(rh * rw - target));
      }
      const double slack = (static_cast<double>(best) + 0.5) / kCells;
      worst_rect_excess = std::max(worst_rect_excess, deviation - slack);
      if (deviation > slack + 1e-12) ++failures;
    }
  }
  const double elapsed = seconds_since(t0);
  return {failures == 0 && elapsed < 10.0,
          "1000 triples, " + std::to_string(failures) + " violations, worst saliency/fourier deviation " +
              fmt("%.6g", worst_exact) + ", worst rect excess over slack " + fmt("%.3g", worst_rect_excess) + ", " +
              fmt("%.2f", elapsed) + " s"};
}

Outcome fourier_oracle() {
  Rng rng(77);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const int h = 1 + static_cast<int>(rng.uniform_int(32));
    const int w = 1 + static_cast<int>(rng.uniform_int(32));
    const double lambda = rng.uniform();
    const maskgen::FourierMaskParams params{1.0 + 3.0 * rng.uniform(), 1.0};
    const std::uint64_t seed = rng.next_u64();
    const Mask m = maskgen::fourier_mask(h, w, lambda, params, seed);
    const auto field = testing::direct_fourier_field(h, w, params, seed);
    const auto want = testing::sorted_top_k(field, maskgen::target_count(h, w, lambda));
    if (testing::covered_indices(m) != want) ++mismatches;
  }
  return {mismatches == 0, "200 cases up to 32x32, " + std::to_string(mismatches) + " mismatches"};
}

// ---- gradients

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    int channels, size, kernel, classes;
    std::vector<int> conv;
  };
  const std::vector<Case> cases{{1, 8, 3, 2, {3}}, {3, 8, 3, 4, {4, 5}}, {2, 12, 5, 3, {3, 4}}, {3, 16, 3, 5, {2, 3, 4}}};
  std::size_t checked = 0, failures = 0;
  double worst = 0.0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& k = cases[c];
    refmodel::ModelShape shape;
    shape.input_channels = k.channels;
    shape.input_height = shape.input_width = k.size;
    shape.conv_channels = k.conv;
    shape.kernel = k.kernel;
    shape.num_classes = k.classes;
    auto model = refmodel::TinyCnn::he_initialized(shape, 1000 + c);
    Rng rng(2000 + c);
    // Non-zero biases so every parameter has a generic gradient.
    for (double& p : model.parameters()) p += 0.05 * rng.normal();
    std::vector<testing::GradSample> batch;
    for (int i = 0; i < 3; ++i) {
      std::vector<double> px(static_cast<std::size_t>(k.channels) * k.size * k.size);
      for (auto& v : px) v = rng.normal();
      batch.push_back({Image(k.channels, k.size, k.size, std::move(px)), static_cast<int>(rng.uniform_int(k.classes)),
                       static_cast<int>(rng.uniform_int(k.classes))});
    }
    const auto r = testing::gradient_check(model, batch, rng.uniform());
    checked += r.checked;
    failures += r.failures;
    worst = std::max(worst, r.worst_relative);
  }
  const double elapsed = seconds_since(t0);
  return {failures == 0 && elapsed < 60.0,
          std::to_string(cases.size()) + " configurations, " + std::to_string(checked) + " parameters, " +
              std::to_string(failures) + " over tolerance, worst relative error " + fmt("%.3g", worst) + ", " +
              fmt("%.2f", elapsed) + " s"};
}

// ---- iOcclusion formula

Outcome iocclusion_identities() {
  Rng rng(5);
  int bad_identity = 0, bad_scale = 0, bad_degenerate = 0;
  double worst_identity = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double a_train = rng.uniform(), a_test = rng.uniform();
    if (std::abs(a_train - a_test) < 1e-3) continue;
    const double v = metrics::i_occlusion({a_train, a_test, a_train, a_test});
    worst_identity = std::max(worst_identity, std::abs(v - 1.0));
    if (std::abs(v - 1.0) > 1e-9) ++bad_identity;

    const metrics::SplitAccuracy acc{a_train, a_test, rng.uniform(), rng.uniform()};
    const double base = metrics::i_occlusion(acc);
    // Power-of-two factors scale every accuracy exactly, so the ratio must not move at all.
    const double k = std::ldexp(1.0, static_cast<int>(rng.uniform_int(13)) - 6);
    const double scaled = metrics::i_occlusion({acc.a_train * k, acc.a_test * k, acc.a_train_i * k, acc.a_test_i * k});
    if (scaled != base) ++bad_scale;

    const double gap = 1e-6 * rng.uniform() * 0.999;
    try {
      const double r = metrics::i_occlusion({a_train, a_train + (t % 2 ? gap : -gap), 0.5, 0.4});
      (void)r;
      ++bad_degenerate;
    } catch (const UndefinedMetricError&) {
    }
  }
  return {bad_identity == 0 && bad_scale == 0 && bad_degenerate == 0,
          "i=0 worst |v-1| " + fmt("%.3g", worst_identity) + "; " + std::to_string(bad_scale) +
              " scale mismatches; " + std::to_string(bad_degenerate) + " degenerate gaps returned a number"};
}

Outcome misclass_conservation() {
  Rng rng(31);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const int classes = 2 + static_cast<int>(rng.uniform_int(9));
    const int n = 1 + static_cast<int>(rng.uniform_int(200));
    PredictionLog clean, distorted;
    long wrong_clean = 0, wrong_distorted = 0;
    for (int i = 0; i < n; ++i) {
      const int truth = static_cast<int>(rng.uniform_int(classes));
      const int p1 = static_cast<int>(rng.uniform_int(classes)), p2 = static_cast<int>(rng.uniform_int(classes));
      const Split split = rng.uniform() < 0.5 ? Split::kTrain : Split::kTest;
      clean.push_back({split, i, truth, p1});
      distorted.push_back({split, i, truth, p2});
      wrong_clean += p1 != truth;
      wrong_distorted += p2 != truth;
    }
    if (metrics::misclass_delta(clean, distorted, classes).total() != wrong_distorted - wrong_clean) ++bad;
  }
  return {bad == 0, "1000 random log pairs, " + std::to_string(bad) + " violations"};
}

// ---- desk-scale replications

struct TrainedRun {
  refmodel::TinyCnn model;
  std::vector<int> train_labels;
};

TrainedRun train_run(const dataio::RunConfig& cfg, const dataio::LoadedData& data) {
  refmodel::ModelShape shape;
  const Image& first = data.train.images.front();
  shape.input_channels = first.channels();
  shape.input_height = first.height();
  shape.input_width = first.width();
  shape.conv_channels = cfg.conv_channels;
  shape.kernel = cfg.kernel;
  shape.num_classes = data.train.num_classes;
  auto init = refmodel::TinyCnn::he_initialized(shape, derive_seed(cfg.seed, stream::kInit));
  auto result = refmodel::train(std::move(init), data.train, cfg.train);
  return {std::move(result.model), std::move(result.train_labels)};
}

double i_occlusion_at(const refmodel::TinyCnn& model, const LabeledDataset& train, const LabeledDataset& test,
                      const dataio::RunConfig& cfg, double fraction) {
  metrics::IOcclusionInputs in;
  in.model = &model;
  in.train = &train;
  in.test = &test;
  in.spec.policy = cfg.eval.policy;
  in.spec.fill = cfg.eval.fill;
  in.spec.fill_value = cfg.eval.fill_value;
  in.spec.fourier = cfg.train.fourier;
  in.cam = cfg.eval.gradcam;
  const std::vector<double> fractions{fraction};
  return metrics::i_occlusion_curve(in, fractions, 1, cfg.seed).values.front().mean;
}

const char* kDirectionData = R"({
  "data": {"source": "synthetic",
           "synthetic": {"classes": 3, "per_class": 300, "size": 32, "channels": 3, "noise": 0.8, "clutter": 6,
                         "tint": 0.5, "jitter": 8, "shape_scale": 2, "seed": 1},
           "test_per_class": 200},
  "model": {"conv_channels": [8, 16], "kernel": 3},
  "train": {"epochs": 40, "batch_size": 32, "learning_rate": 0.01},
  "eval": {"policy": "saliency", "fill": "uniform", "fill_value": [0]}
})";

Outcome direction_a() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = dataio::parse_run_config(kDirectionData);
  const auto data = dataio::load_data(cfg);
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    double value[2];
    for (int m = 0; m < 2; ++m) {
      cfg.seed = cfg.train.seed = seed;
      cfg.train.mode = m == 0 ? occlude::AugmentationMode::kBasic : occlude::AugmentationMode::kFmix;
      const auto run = train_run(cfg, data);
      value[m] = i_occlusion_at(run.model, data.train, data.test, cfg, 0.3);
    }
    wins += value[1] > value[0];
    detail += " seed" + std::to_string(seed) + " basic=" + fmt("%.3f", value[0]) + " fmix=" + fmt("%.3f", value[1]) + ";";
  }
  const double elapsed = seconds_since(t0);
  return {wins >= 4 && elapsed < 600.0,
          "iOcclusion at 0.3, fmix > basic in " + std::to_string(wins) + "/5 pairs (" + fmt("%.0f", elapsed) +
              " s):" + detail};
}

Outcome direction_b() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = dataio::parse_run_config(kDirectionData);
  cfg.data.synthetic.per_class = 100;
  cfg.train.epochs = 80;
  cfg.train.lr_drop_epoch = 60;
  cfg.train.label_randomization = true;
  const auto data = dataio::load_data(cfg);
  const double chance = 1.0 / data.train.num_classes;
  bool ok = true;
  double io[2];
  std::string detail;
  for (int m = 0; m < 2; ++m) {
    cfg.train.mode = m == 0 ? occlude::AugmentationMode::kBasic : occlude::AugmentationMode::kFmix;
    const auto run = train_run(cfg, data);
    LabeledDataset trained = data.train;
    trained.labels = run.train_labels;
    const double train_acc = metrics::accuracy(refmodel::predict_dataset(run.model, trained));
    metrics::OcclusionSpec spec;
    spec.fill_value = cfg.eval.fill_value;
    const double cut = metrics::cut_occlusion(run.model, data.test, 0.5, spec, 5, cfg.seed).mean;
    io[m] = i_occlusion_at(run.model, trained, data.test, cfg, 0.3);
    ok = ok && train_acc >= 0.99 && std::abs(cut - chance) <= 0.05;
    detail += std::string(m == 0 ? " basic" : " fmix") + ": train " + fmt("%.4f", train_acc) + ", CutOcclusion@0.5 " +
              fmt("%.2f", 100.0 * cut) + "%, iOcclusion@0.3 " + fmt("%.3f", io[m]) + ";";
  }
  ok = ok && io[1] > io[0];
  return {ok, "random labels, chance " + fmt("%.1f", 100.0 * chance) + "% (" + fmt("%.0f", seconds_since(t0)) +
                  " s):" + detail};
}

// ---- determinism

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_quiet(std::vector<std::string> args) {
  args.insert(args.begin(), "occlubench");
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome determinism() {
  testing::TempDir dir("acceptance_determinism");
  std::ofstream(dir / "c.json") << R"({
    "data": {"source": "synthetic", "synthetic": {"classes": 3, "per_class": 20, "size": 16, "noise": 0.3, "seed": 4},
             "test_per_class": 15},
    "model": {"conv_channels": [4, 8]},
    "train": {"epochs": 3, "batch_size": 16, "learning_rate": 0.02, "mode": "fmix"},
    "eval": {"seeds": 3, "fractions": [0.1, 0.3, 0.5]}, "seed": 9})";
  const auto cfg = (dir / "c.json").string();
  if (run_quiet({"train", "--config", cfg, "--output", (dir / "model").string()}) != 0) return {false, "train failed"};
  const auto ckpt = (dir / "model" / "model.obnn").string();
  const std::vector<std::vector<std::string>> evals{
      {"--metric", "iocclusion", "--policy", "saliency"},
      {"--metric", "iocclusion", "--policy", "fourier"},
      {"--metric", "cutocclusion"},
      {"--metric", "misclass-delta", "--policy", "rect"}};
  const char* saved = std::getenv("OCCLUBENCH_THREADS");
  const std::string restore = saved ? saved : "";
  std::vector<std::string> runs{"1", "8", "8"};
  int compared = 0, differing = 0;
  std::vector<std::vector<std::string>> outputs(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    setenv("OCCLUBENCH_THREADS", runs[r].c_str(), 1);
    for (std::size_t e = 0; e < evals.size(); ++e) {
      const auto out = dir / ("eval_" + std::to_string(r) + "_" + std::to_string(e));
      std::vector<std::string> args{"eval", "--config", cfg, "--checkpoint", ckpt, "--output", out.string()};
      args.insert(args.end(), evals[e].begin(), evals[e].end());
      if (run_quiet(args) != 0) return {false, "eval failed"};
      std::vector<fs::path> csvs;
      for (const auto& entry : fs::directory_iterator(out)) {
        if (entry.path().extension() == ".csv") csvs.push_back(entry.path());
      }
      std::sort(csvs.begin(), csvs.end());
      for (const auto& p : csvs) outputs[r].push_back(p.filename().string() + "\n" + slurp(p));
    }
  }
  if (saved) {
    setenv("OCCLUBENCH_THREADS", restore.c_str(), 1);
  } else {
    unsetenv("OCCLUBENCH_THREADS");
  }
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (outputs[r].size() != outputs[0].size()) return {false, "different CSV sets"};
    for (std::size_t i = 0; i < outputs[0].size(); ++i) {
      ++compared;
      differing += outputs[r][i] != outputs[0][i];
    }
  }
  return {differing == 0 && compared > 0, std::to_string(compared) + " CSV comparisons across OCCLUBENCH_THREADS 1/8/8, " +
                                              std::to_string(differing) + " differ"};
}

// ---- formats

template <typename F>
bool rejects(F&& f) {
  try {
    f();
  } catch (const FormatError&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

void be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

Outcome format_round_trips() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failed.emplace_back(what);
  };

  std::vector<std::uint8_t> cifar(2 * dataio::kCifarRecordSize, 0);
  cifar[0] = 7;
  cifar[dataio::kCifarRecordSize] = 3;
  cifar[1] = 255;
  const auto c = dataio::parse_cifar10(cifar, Split::kTrain);
  expect(c.size() == 2 && c.labels[0] == 7 && c.labels[1] == 3, "cifar counts/labels");
  expect(c.images[0].at(0, 0, 0) == 1.0 && c.images[0].at(0, 0, 1) == 0.0, "cifar pixel scaling");
  auto cifar_short = cifar;
  cifar_short.pop_back();
  expect(rejects([&] { dataio::parse_cifar10(cifar_short, Split::kTrain); }), "cifar truncation");
  auto cifar_label = cifar;
  cifar_label[0] = 10;
  expect(rejects([&] { dataio::parse_cifar10(cifar_label, Split::kTrain); }), "cifar label >= 10");

  std::vector<std::uint8_t> images, labels;
  be32(images, 0x803);
  be32(images, 3);
  be32(images, 28);
  be32(images, 28);
  for (int i = 0; i < 3 * 784; ++i) images.push_back(static_cast<std::uint8_t>(i % 251));
  be32(labels, 0x801);
  be32(labels, 3);
  labels.insert(labels.end(), {5, 1, 8});
  const auto idx = dataio::parse_idx(images, labels, Split::kTest);
  expect(idx.size() == 3 && idx.labels == std::vector<int>{5, 1, 8}, "idx counts/labels");
  expect(idx.images[1].at(0, 3, 17) == ((784 + 3 * 28 + 17) % 251) / 255.0, "idx (r,c) indexing");
  auto bad_magic = images;
  bad_magic[3] = 0x01;
  expect(rejects([&] { dataio::parse_idx(bad_magic, labels, Split::kTest); }), "idx bad magic");
  auto fewer = labels;
  fewer[7] = 2;
  fewer.pop_back();
  expect(rejects([&] { dataio::parse_idx(images, fewer, Split::kTest); }), "idx count mismatch");

  PredictionLog log;
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    log.push_back({i % 3 ? Split::kTest : Split::kTrain, i, static_cast<int>(rng.uniform_int(10)),
                   static_cast<int>(rng.uniform_int(10))});
  }
  const auto text = dataio::encode_prediction_log(log);
  const auto parsed = dataio::parse_prediction_log(text);
  expect(dataio::encode_prediction_log(parsed) == text && parsed.size() == log.size(), "prediction log round-trip");
  const std::string rec = R"({"split":"test","index":1,"true_label":2,"predicted_label":2})";
  expect(rejects([&] { dataio::parse_prediction_log(rec + "\n" + rec + "\n"); }), "prediction log duplicate");
  expect(rejects([&] { dataio::parse_prediction_log(R"({"split":"test","index":1,"true_label":2})"); }),
         "prediction log missing field");
  expect(rejects([&] { dataio::parse_prediction_log("{"); }), "prediction log malformed line");

  std::vector<SaliencyMap> maps(2, SaliencyMap{4, 4, std::vector<float>(16)});
  for (auto& m : maps) {
    for (auto& v : m.values) v = static_cast<float>(rng.uniform());
  }
  const auto sal = dataio::encode_saliency(maps);
  expect(sal.size() == 16 + 128 && dataio::encode_saliency(dataio::parse_saliency(sal)) == sal,
         "saliency round-trip");
  auto sal_short = sal;
  sal_short.pop_back();
  expect(rejects([&] { dataio::parse_saliency(sal_short); }), "saliency 127-byte body");
  auto sal_nan = sal;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(sal_nan.data() + 20, &nan, 4);
  expect(rejects([&] { dataio::parse_saliency(sal_nan); }), "saliency NaN");
  auto sal_magic = sal;
  sal_magic[1] = 'X';
  expect(rejects([&] { dataio::parse_saliency(sal_magic); }), "saliency magic");

  std::vector<Mask> masks{maskgen::rect_mask(8, 8, 0.25, 1), maskgen::fourier_mask(8, 8, 0.5, {}, 2)};
  const auto mk = dataio::encode_masks(masks);
  expect(dataio::parse_masks(mk) == masks, "mask round-trip");

  std::string detail = "CIFAR, IDX, JSONL, OBSM, OBMK";
  for (const auto& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"mask-fraction-exactness", mask_fraction_exactness},
      {"fourier-oracle-equivalence", fourier_oracle},
      {"gradient-check", gradient_check},
      {"iocclusion-identities", iocclusion_identities},
      {"misclass-delta-conservation", misclass_conservation},
      {"direction-a-fmix-over-basic", direction_a},
      {"direction-b-random-labels", direction_b},
      {"determinism-threads", determinism},
      {"format-round-trips", format_round_trips},
  };
  // Optional filter: only run criteria whose names contain argv[1].
  const std::string filter = argc > 1 ? argv[1] : "";
  int failed = 0;
  for (const auto& c : criteria) {
    if (!filter.empty() && std::string(c.name).find(filter) == std::string::npos) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
