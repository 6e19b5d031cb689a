// Copyright 2026 The PASTA Authors. All Rights Reserved.
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

// pasta_cli: batch workflows over the libpasta C interface.
//
// Exit status is 0 on success, 1 for invalid input or flags and 2 when a
// file could not be read or written.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pasta/pasta.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

struct Failure {
  pasta_status status;
};

void check(pasta_status status) {
  if (status != PASTA_OK) throw Failure{status};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Manifest = std::unique_ptr<pasta_manifest, Deleter<pasta_manifest, pasta_manifest_free>>;
using Codebook = std::unique_ptr<pasta_codebook, Deleter<pasta_codebook, pasta_codebook_free>>;
using Model = std::unique_ptr<pasta_model, Deleter<pasta_model, pasta_model_free>>;
using Bag = std::unique_ptr<pasta_bag, Deleter<pasta_bag, pasta_bag_free>>;

Manifest open_manifest(const std::string& path) {
  pasta_manifest* m = nullptr;
  check(pasta_manifest_read(path.c_str(), &m));
  return Manifest(m);
}

Model open_model(const std::string& path) {
  pasta_model* m = nullptr;
  check(pasta_model_load(path.c_str(), &m));
  return Model(m);
}

std::string fmt_iou(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void add_clustering_flags(CLI::App* cmd, pasta_minibatch_config& cfg) {
  cmd->add_option("--batch-size", cfg.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  cmd->add_option("--max-epochs", cfg.max_epochs, "Maximum passes over the data")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", cfg.tol, "Mean squared centroid shift that ends fitting")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--init-sample-size", cfg.init_sample_size,
                  "Subsample size for k-means++ seeding")
      ->check(CLI::PositiveNumber);
}

int default_threads() {
  if (const char* env = std::getenv("PASTA_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1 && n <= 1024) return static_cast<int>(n);
    std::fprintf(stderr, "pasta: ignoring invalid PASTA_THREADS=%s\n", env);
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised anomaly segmentation from distribution contrast"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pasta_version()));

  int threads = default_threads();
  bool quiet = false;
  app.add_option("--threads", threads, "Worker threads (falls back to PASTA_THREADS)")
      ->check(CLI::Range(1, 1024));
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  std::vector<std::function<void()>> actions;

  // synth
  pasta_synth_config synth = pasta_synth_config_default();
  std::string synth_out;
  std::string preset = "easy";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--preset", preset, "Starting preset")->check(CLI::IsMember({"easy"}));
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--dim", synth.dim, "Embedding dimension");
  synth_cmd->add_option("--grid-rows", synth.grid_rows);
  synth_cmd->add_option("--grid-cols", synth.grid_cols);
  synth_cmd->add_option("--image-height", synth.image_height);
  synth_cmd->add_option("--image-width", synth.image_width);
  synth_cmd->add_option("--background-components", synth.n_background);
  synth_cmd->add_option("--target-components", synth.n_target);
  synth_cmd->add_option("--anomaly-components", synth.n_anomaly);
  synth_cmd->add_option("--lambda", synth.lambda, "Per-blob anomaly probability");
  synth_cmd->add_option("--sigma", synth.sigma, "Within-component noise");
  synth_cmd->add_option("--delta", synth.delta, "Minimum distance between component means");
  synth_cmd->add_option("--blobs-min", synth.blobs_min);
  synth_cmd->add_option("--blobs-max", synth.blobs_max);
  synth_cmd->add_option("--blob-size-min", synth.blob_size_min, "Blob side in patches");
  synth_cmd->add_option("--blob-size-max", synth.blob_size_max, "Blob side in patches");
  synth_cmd->add_option("--images-mixed", synth.images_mixed);
  synth_cmd->add_option("--images-reference", synth.images_reference);
  synth_cmd->add_option("--images-test", synth.images_test);
  synth_cmd->callback([&] {
    actions.push_back([&] {
      check(pasta_synth_generate(&synth, synth_out.c_str()));
      std::printf("wrote %s/{mixed,reference,test}.tsv\n", synth_out.c_str());
    });
  });

  // fit
  pasta_minibatch_config fit_cfg = pasta_minibatch_config_default();
  std::string fit_mixed, fit_out;
  uint32_t fit_k = 20;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the cluster codebook on a mixed corpus");
  fit_cmd->add_option("--mixed", fit_mixed, "Mixed corpus manifest")->required();
  fit_cmd->add_option("--k", fit_k, "Number of clusters")->check(CLI::Range(2u, 1u << 20));
  fit_cmd->add_option("--seed", fit_cfg.seed, "Random seed");
  fit_cmd->add_option("--out", fit_out, "Codebook file")->required();
  add_clustering_flags(fit_cmd, fit_cfg);
  fit_cmd->callback([&] {
    actions.push_back([&] {
      const Manifest mixed = open_manifest(fit_mixed);
      pasta_codebook* cb = nullptr;
      check(pasta_codebook_fit(mixed.get(), fit_k, &fit_cfg, &cb));
      const Codebook codebook(cb);
      check(pasta_codebook_save(codebook.get(), fit_out.c_str()));
      std::printf("fitted %u clusters on %zu images\n", fit_k, pasta_manifest_size(mixed.get()));
    });
  });

  // define-anomalies
  std::string def_codebook, def_mixed, def_reference, def_out, def_hist;
  double def_r = 0.05;
  double def_gamma = 0.1;
  auto* def_cmd =
      app.add_subcommand("define-anomalies", "Flag clusters missing from the reference corpus");
  def_cmd->add_option("--codebook", def_codebook, "Codebook from `fit`")->required();
  def_cmd->add_option("--mixed", def_mixed, "Mixed corpus manifest")->required();
  def_cmd->add_option("--reference", def_reference, "Anomaly-free corpus manifest")->required();
  def_cmd->add_option("--r-threshold", def_r, "Ratio below which a cluster is anomalous")
      ->check(CLI::Range(0.0, 1.0));
  def_cmd->add_option("--gamma", def_gamma, "Mask anomaly-fraction threshold")
      ->check(CLI::Range(0.0, 1.0));
  def_cmd->add_option("--out", def_out, "Model file")->required();
  def_cmd->add_option("--hist", def_hist, "Also write the cluster histogram CSV");
  def_cmd->callback([&] {
    actions.push_back([&] {
      pasta_codebook* cb = nullptr;
      check(pasta_codebook_load(def_codebook.c_str(), &cb));
      const Codebook codebook(cb);
      const Manifest mixed = open_manifest(def_mixed);
      const Manifest reference = open_manifest(def_reference);
      pasta_model* m = nullptr;
      check(pasta_model_build(codebook.get(), mixed.get(), reference.get(), def_r, def_gamma,
                              &m));
      const Model model(m);
      check(pasta_model_save(model.get(), def_out.c_str()));
      if (!def_hist.empty()) check(pasta_model_write_histogram(model.get(), def_hist.c_str()));
      std::string ids;
      for (uint32_t c = 0; c < pasta_model_k(model.get()); ++c) {
        if (pasta_model_is_anomaly(model.get(), c)) ids += (ids.empty() ? "" : ",") + std::to_string(c);
      }
      std::printf("anomaly clusters: %s\n", ids.empty() ? "(none)" : ids.c_str());
    });
  });

  // infer-patch / infer-fused
  std::string inf_model, inf_manifest, inf_out;
  auto add_infer = [&](const char* name, const char* help, bool fused) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--model", inf_model, "Model from `define-anomalies`")->required();
    cmd->add_option("--manifest", inf_manifest, "Corpus to segment")->required();
    cmd->add_option("--out", inf_out, "Output directory for masks")->required();
    cmd->callback([&, fused] {
      actions.push_back([&, fused] {
        const Model model = open_model(inf_model);
        const Manifest manifest = open_manifest(inf_manifest);
        double ms = 0.0;
        check(fused ? pasta_infer_fused_corpus(model.get(), manifest.get(), inf_out.c_str(), &ms)
                    : pasta_infer_patch_corpus(model.get(), manifest.get(), inf_out.c_str(), &ms));
        std::printf("segmented %zu images\n", pasta_manifest_size(manifest.get()));
        std::fprintf(stderr, "%s inference: %.3f ms/image\n", fused ? "fused" : "patch", ms);
      });
    });
  };
  add_infer("infer-patch", "Patch-level anomaly masks", false);
  add_infer("infer-fused", "Tri-class masks from instance-mask fusion", true);

  // baseline fit|infer|sweep
  auto* base_cmd = app.add_subcommand("baseline", "Hypersphere feature-bag baseline");
  base_cmd->require_subcommand(1);
  pasta_baseline_config base_cfg = pasta_baseline_config_default();
  std::string base_mixed, base_out, base_bag, base_manifest, base_test;
  auto* bfit = base_cmd->add_subcommand("fit", "Build the target feature bag");
  bfit->add_option("--mixed", base_mixed, "Corpus whose objects populate the bag")->required();
  bfit->add_option("--k-sphere", base_cfg.k_sphere, "Neighbour rank defining radii")
      ->check(CLI::PositiveNumber);
  bfit->add_option("--bag-fraction", base_cfg.bag_fraction, "Fraction of objects kept")
      ->check(CLI::Range(0.0, 1.0));
  bfit->add_option("--out", base_out, "Bag file")->required();
  bfit->callback([&] {
    actions.push_back([&] {
      const Manifest mixed = open_manifest(base_mixed);
      pasta_bag* b = nullptr;
      check(pasta_bag_fit(mixed.get(), &base_cfg, &b));
      const Bag bag(b);
      check(pasta_bag_save(bag.get(), base_out.c_str()));
      std::printf("bag holds %zu embeddings\n", pasta_bag_size(bag.get()));
    });
  });
  auto* binf = base_cmd->add_subcommand("infer", "Classify instance masks with the bag");
  binf->add_option("--bag", base_bag, "Bag from `baseline fit`")->required();
  binf->add_option("--manifest", base_manifest, "Corpus to segment")->required();
  binf->add_option("--k-vote", base_cfg.k_vote, "Voting neighbours")->check(CLI::PositiveNumber);
  binf->add_option("--out", base_out, "Output directory for masks")->required();
  binf->callback([&] {
    actions.push_back([&] {
      pasta_bag* b = nullptr;
      check(pasta_bag_load(base_bag.c_str(), &b));
      const Bag bag(b);
      const Manifest manifest = open_manifest(base_manifest);
      check(pasta_baseline_infer_corpus(bag.get(), &base_cfg, manifest.get(), base_out.c_str()));
      std::printf("segmented %zu images\n", pasta_manifest_size(manifest.get()));
    });
  });
  std::vector<uint32_t> sweep_spheres{10, 20, 40, 80, 160, 260};
  std::vector<uint32_t> sweep_votes{1, 3, 5, 10, 15};
  auto* bsweep = base_cmd->add_subcommand("sweep", "IoU grid over kSphere x kVote");
  bsweep->add_option("--mixed", base_mixed, "Bag corpus")->required();
  bsweep->add_option("--test", base_test, "Labelled test corpus")->required();
  bsweep->add_option("--k-sphere", sweep_spheres, "Comma-separated list")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bsweep->add_option("--k-vote", sweep_votes, "Comma-separated list")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bsweep->add_option("--bag-fraction", base_cfg.bag_fraction)->check(CLI::Range(0.0, 1.0));
  bsweep->add_option("--out", base_out, "CSV file")->required();
  bsweep->callback([&] {
    actions.push_back([&] {
      const Manifest mixed = open_manifest(base_mixed);
      const Manifest test = open_manifest(base_test);
      check(pasta_baseline_sweep(mixed.get(), test.get(), sweep_spheres.data(),
                                 sweep_spheres.size(), sweep_votes.data(), sweep_votes.size(),
                                 base_cfg.bag_fraction, base_out.c_str()));
      std::printf("wrote %zu rows\n", sweep_spheres.size() * sweep_votes.size());
    });
  });

  // eval
  std::string eval_pred, eval_gt, eval_out;
  pasta_eval_mode eval_mode = PASTA_EVAL_FUSED;
  const std::map<std::string, pasta_eval_mode> eval_modes{{"patch", PASTA_EVAL_PATCH},
                                                          {"fused", PASTA_EVAL_FUSED}};
  auto* eval_cmd = app.add_subcommand("eval", "IoU of predicted masks against ground truth");
  eval_cmd->add_option("--pred", eval_pred, "Directory of predicted masks")->required();
  eval_cmd->add_option("--gt", eval_gt, "Directory of ground-truth masks")->required();
  eval_cmd->add_option("--mode", eval_mode, "patch or fused")
      ->transform(CLI::CheckedTransformer(eval_modes, CLI::ignore_case));
  eval_cmd->add_option("--out", eval_out, "CSV file");
  eval_cmd->callback([&] {
    actions.push_back([&] {
      pasta_iou iou{};
      check(pasta_eval_directories(eval_pred.c_str(), eval_gt.c_str(), eval_mode,
                                   eval_out.empty() ? nullptr : eval_out.c_str(), &iou));
      if (eval_mode == PASTA_EVAL_PATCH) {
        std::printf("anomaly IoU %s\n", fmt_iou(iou.anomaly).c_str());
      } else {
        std::printf("IoU background %s target %s anomaly %s mIoU %s\n",
                    fmt_iou(iou.background).c_str(), fmt_iou(iou.target).c_str(),
                    fmt_iou(iou.anomaly).c_str(), fmt_iou(iou.miou).c_str());
      }
    });
  });

  // sweep
  pasta_sweep_params sweep = pasta_sweep_params_default();
  std::string sw_mixed, sw_reference, sw_test, sw_out, sw_timing;
  std::vector<uint32_t> sw_ks{10, 15, 20, 25};
  std::vector<uint64_t> sw_seeds{0, 1, 2, 3, 4};
  pasta_sweep_mode sw_mode = PASTA_SWEEP_BOTH;
  const std::map<std::string, pasta_sweep_mode> sweep_modes{
      {"patch", PASTA_SWEEP_PATCH}, {"fused", PASTA_SWEEP_FUSED}, {"both", PASTA_SWEEP_BOTH}};
  auto* sweep_cmd = app.add_subcommand("sweep", "Fit and score every (K, seed) cell");
  sweep_cmd->add_option("--mixed", sw_mixed, "Mixed corpus manifest")->required();
  sweep_cmd->add_option("--reference", sw_reference, "Anomaly-free corpus manifest")
      ->required();
  sweep_cmd->add_option("--test", sw_test, "Labelled test corpus manifest")->required();
  sweep_cmd->add_option("--k", sw_ks, "Comma-separated cluster counts")
      ->delimiter(',')
      ->check(CLI::Range(2u, 1u << 20));
  sweep_cmd->add_option("--seeds", sw_seeds, "Comma-separated seeds")->delimiter(',');
  sweep_cmd->add_option("--mode", sw_mode, "patch, fused or both")
      ->transform(CLI::CheckedTransformer(sweep_modes, CLI::ignore_case));
  sweep_cmd->add_option("--r-threshold", sweep.ratio_threshold)->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--gamma", sweep.gamma)->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--out", sw_out, "Result CSV")->required();
  sweep_cmd->add_option("--timing", sw_timing, "Timing CSV");
  add_clustering_flags(sweep_cmd, sweep.clustering);
  sweep_cmd->callback([&] {
    actions.push_back([&] {
      const Manifest mixed = open_manifest(sw_mixed);
      const Manifest reference = open_manifest(sw_reference);
      const Manifest test = open_manifest(sw_test);
      check(pasta_sweep(mixed.get(), reference.get(), test.get(), sw_ks.data(), sw_ks.size(),
                        sw_seeds.data(), sw_seeds.size(), sw_mode, &sweep, sw_out.c_str(),
                        sw_timing.empty() ? nullptr : sw_timing.c_str()));
      std::printf("fitted %zu cells\n", sw_ks.size() * sw_seeds.size());
    });
  });

  // hist
  std::string hist_model, hist_out;
  auto* hist_cmd = app.add_subcommand("hist", "Per-cluster probabilities and ratios");
  hist_cmd->add_option("--model", hist_model, "Model file")->required();
  hist_cmd->add_option("--out", hist_out, "CSV file")->required();
  hist_cmd->callback([&] {
    actions.push_back([&] {
      const Model model = open_model(hist_model);
      check(pasta_model_write_histogram(model.get(), hist_out.c_str()));
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  pasta_set_threads(threads);
  pasta_set_warnings(quiet ? 0 : 1);
  try {
    for (auto& action : actions) action();
  } catch (const Failure& f) {
    std::fprintf(stderr, "pasta: %s: %s\n", pasta_status_name(f.status), pasta_last_error());
    return pasta_status_is_io(f.status) ? kExitIo : kExitInvalid;
  }
  return kExitOk;
}
