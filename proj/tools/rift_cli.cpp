#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rift/evaluate.hpp"
#include "rift/imgproc.hpp"
#include "rift/pipeline.hpp"
#include "rift/render.hpp"
#include "rift/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMatchFailed = 2;

using json = nlohmann::json;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

rift::RiftConfig config_from(const std::string& path) {
  return path.empty() ? rift::RiftConfig{} : rift::load_config(path);
}

std::vector<rift::Keypoint> keypoints_of(const rift::ImageFeatures& f) {
  std::vector<rift::Keypoint> out;
  out.reserve(f.descriptors.size());
  for (const auto& ds : f.descriptors) out.push_back(ds.keypoint);
  return out;
}

std::filesystem::path suffixed(const std::string& prefix, const std::string& what) {
  return prefix + "_" + what + ".png";
}

void dump_intermediates(const rift::ImageFeatures& f, const std::string& what,
                        const std::string& prefix) {
  const auto& im = *f.intermediates;
  if (what == "pc") {
    rift::save_png(suffixed(prefix, "pc"), rift::render_normalized(im.pc.combined));
    for (std::size_t o = 0; o < im.pc.per_orientation.size(); ++o) {
      rift::save_png(suffixed(prefix, "pc_o" + std::to_string(o + 1)),
                     rift::render_normalized(im.pc.per_orientation[o]));
    }
  } else if (what == "mim") {
    rift::save_png(suffixed(prefix, "mim"), rift::render_mim(im.mim));
  } else if (what == "moments") {
    rift::save_png(suffixed(prefix, "min_moment"), rift::render_normalized(im.moments.min_moment));
    rift::save_png(suffixed(prefix, "max_moment"), rift::render_normalized(im.moments.max_moment));
  }
}

struct MatchOptions {
  std::string reference;
  std::string target;
  std::string config;
  std::string out_json = "-";
  std::string render;
  std::vector<std::string> dump;
  std::string dump_prefix = "rift";
  std::string keypoints_csv;
};

int run_match(const MatchOptions& opt) {
  const rift::RiftConfig cfg = config_from(opt.config);
  const rift::RasterF32 ref_img = rift::load_grayscale(opt.reference);
  const rift::RasterF32 tgt_img = rift::load_grayscale(opt.target);
  const bool keep = !opt.dump.empty();
  const auto ref = rift::extract_features(ref_img, cfg, rift::ImageRole::reference, keep);
  const auto tgt = rift::extract_features(tgt_img, cfg, rift::ImageRole::target, keep);
  const rift::MatchResult result = rift::match_features(ref, tgt, cfg);

  json report = rift::to_json(result);
  report["reference"] = rift::summary_json(ref);
  report["target"] = rift::summary_json(tgt);
  write_text(opt.out_json, json_text(report));

  if (!opt.render.empty()) {
    const auto ref_kps = keypoints_of(ref);
    const auto tgt_kps = keypoints_of(tgt);
    rift::save_png(opt.render, rift::render_matches(ref_img, tgt_img, result, ref_kps, tgt_kps).image);
  }
  for (const auto& what : opt.dump) {
    dump_intermediates(ref, what, opt.dump_prefix + "_ref");
    dump_intermediates(tgt, what, opt.dump_prefix + "_tgt");
  }
  if (!opt.keypoints_csv.empty()) {
    write_text(opt.keypoints_csv + ".ref.csv", rift::keypoints_csv(ref));
    write_text(opt.keypoints_csv + ".tgt.csv", rift::keypoints_csv(tgt));
  }
  if (!result.success) std::cerr << "matching failed: " << result.failure_reason << "\n";
  return result.success ? kExitOk : kExitMatchFailed;
}

struct EvalOptions {
  std::string reference;
  std::string target;
  std::string ground_truth;
  std::string config;
  std::string out_json = "-";
};

int run_eval(const EvalOptions& opt) {
  const rift::GroundTruth gt = rift::load_ground_truth(opt.ground_truth);
  const rift::RiftConfig cfg = config_from(opt.config);
  const auto start = std::chrono::steady_clock::now();
  const rift::MatchResult result =
      rift::match_pair(rift::load_grayscale(opt.reference), rift::load_grayscale(opt.target), cfg);
  rift::EvaluationReport report = rift::evaluate(result, gt);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json out = rift::to_json(report);
  out["inlier_count"] = result.inlier_count;
  out["failure_reason"] = result.failure_reason;
  write_text(opt.out_json, json_text(out));
  return report.success ? kExitOk : kExitMatchFailed;
}

struct SweepOptions {
  std::string reference;
  double step = 5.0;
  std::string config;
  std::string out_json = "-";
  bool quiet = false;
};

int run_sweep(const SweepOptions& opt) {
  const rift::RiftConfig cfg = config_from(opt.config);
  const rift::RasterF32 img = rift::load_grayscale(opt.reference);
  auto progress = [&](const rift::SweepEntry& e) {
    if (opt.quiet) return;
    std::fprintf(stderr, "angle %6.1f  ncm %4d  inliers %4d  %s  %.1fs\n", e.angle_degrees,
                 e.report.ncm, e.inlier_count, e.report.success ? "ok" : "FAILED",
                 e.report.runtime_seconds);
  };
  const rift::SweepReport sweep = rift::rotation_sweep(img, cfg, opt.step, progress);
  write_text(opt.out_json, json_text(rift::to_json(sweep)));
  return sweep.success_rate == 1.0 ? kExitOk : kExitMatchFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radiation-invariant feature matching for multi-modal image pairs"};
  app.require_subcommand(1);

  MatchOptions match_opt;
  auto* match = app.add_subcommand("match", "Match a reference image against a target image");
  match->add_option("reference", match_opt.reference, "Reference image")->required()->check(CLI::ExistingFile);
  match->add_option("target", match_opt.target, "Target image")->required()->check(CLI::ExistingFile);
  match->add_option("--config", match_opt.config, "Config file")->check(CLI::ExistingFile);
  match->add_option("--out-json", match_opt.out_json, "Match report path ('-' for stdout)");
  match->add_option("--render", match_opt.render, "Write a side-by-side match overlay PNG");
  match->add_option("--dump", match_opt.dump, "Export intermediate maps as PNG")
      ->check(CLI::IsMember({"pc", "mim", "moments"}));
  match->add_option("--dump-prefix", match_opt.dump_prefix, "Path prefix for --dump outputs");
  match->add_option("--keypoints-csv", match_opt.keypoints_csv,
                    "Write keypoints to PREFIX.ref.csv and PREFIX.tgt.csv");

  EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "Match a pair and score it against ground truth");
  eval->add_option("reference", eval_opt.reference, "Reference image")->required()->check(CLI::ExistingFile);
  eval->add_option("target", eval_opt.target, "Target image")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", eval_opt.ground_truth, "Ground-truth JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--config", eval_opt.config, "Config file")->check(CLI::ExistingFile);
  eval->add_option("--out-json", eval_opt.out_json, "Report path ('-' for stdout)");

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Match an image against rotated copies of itself");
  sweep->add_option("reference", sweep_opt.reference, "Image to rotate")->required()->check(CLI::ExistingFile);
  sweep->add_option("--step", sweep_opt.step, "Angle step in degrees")
      ->check(CLI::Range(0.0, 360.0))
      ->capture_default_str();
  sweep->add_option("--config", sweep_opt.config, "Config file")->check(CLI::ExistingFile);
  sweep->add_option("--out-json", sweep_opt.out_json, "Report path ('-' for stdout)");
  sweep->add_flag("--quiet", sweep_opt.quiet, "No per-angle progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*match) return run_match(match_opt);
    if (*eval) return run_eval(eval_opt);
    if (*sweep) return run_sweep(sweep_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
