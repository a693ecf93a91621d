// Command-line front end for the planogram compliance engine:
//   simulate  generate synthetic planograms, scenes and noisy detections
//   check     run the full compliance pipeline on one scene
//   evaluate  score a dataset manifest per pipeline stage
//
// Exit codes: 0 success (check: compliant), 1 compliance issues found,
// 2 usage or data error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shelfcheck/eval.hpp"
#include "shelfcheck/image.hpp"
#include "shelfcheck/io.hpp"
#include "shelfcheck/pipeline.hpp"
#include "shelfcheck/report.hpp"
#include "shelfcheck/simulator.hpp"
#include "shelfcheck/solver.hpp"
#include "shelfcheck/verify.hpp"
#include "shelfcheck/zncc.hpp"

namespace fs = std::filesystem;
using namespace shelfcheck;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SHELFCHECK_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      // fall through to the fixed default; the flag always wins anyway
    }
  }
  return 7;
}

struct SimulateConfig {
  int rows = 3;
  int cols = 4;
  int products = 8;
  double cell_w = 60.0;
  double cell_h = 60.0;
  double void_rate = 0.0;
  double miss_rate = 0.0;
  double fp_rate = 0.0;
  double confusion_rate = 0.0;
  double jitter_sigma = 0.0;
  int scenes = 1;
  bool images = true;
  std::uint64_t seed = default_seed();
  std::string out = "out";
};

struct PipelineConfig {
  PipelineParams params;
  std::string matcher = "auto";
  std::string ground_truth;
  std::string scene_image;
  std::string templates_dir;
};

std::map<ProductId, ImageGrid> load_templates(const std::string& dir) {
  std::map<ProductId, ImageGrid> templates;
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("templates directory '" + dir + "' not found");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".pgm") {
      templates.emplace(entry.path().stem().string(), load_pgm(entry.path().string()));
    }
  }
  if (templates.empty()) {
    throw std::runtime_error("no .pgm templates in '" + dir + "'");
  }
  return templates;
}

/// The planogram that can resolve every ground-truth node id.
const ReferencePlanogram& resolve_gt_planogram(const std::vector<ReferencePlanogram>& refs,
                                               const GroundTruthFile& gt) {
  for (const ReferencePlanogram& ref : refs) {
    bool all = true;
    for (const auto& [node_id, box] : gt.items) {
      if (!ref.has_node(node_id)) {
        all = false;
        break;
      }
    }
    if (all) return ref;
  }
  throw std::runtime_error("ground truth node ids match none of the planograms");
}

std::unique_ptr<Matcher> make_matcher(const PipelineConfig& cfg,
                                      const std::vector<ReferencePlanogram>& refs) {
  std::string choice = cfg.matcher;
  if (choice == "auto") {
    if (!cfg.ground_truth.empty()) choice = "oracle";
    else if (!cfg.scene_image.empty()) choice = "zncc";
    else choice = "none";
  }
  if (choice == "oracle") {
    if (cfg.ground_truth.empty()) {
      throw std::runtime_error("the oracle matcher requires --ground-truth");
    }
    const GroundTruthFile gt = load_ground_truth(cfg.ground_truth);
    const ReferencePlanogram& ref = resolve_gt_planogram(refs, gt);
    std::vector<std::pair<ProductId, BBox>> items;
    for (const auto& [node_id, box] : gt.items) {
      items.emplace_back(ref.node(node_id).product, box);
    }
    return std::make_unique<KnownItemsMatcher>(std::move(items));
  }
  if (choice == "zncc") {
    if (cfg.scene_image.empty() || cfg.templates_dir.empty()) {
      throw std::runtime_error("the zncc matcher requires --scene and --templates");
    }
    return std::make_unique<ZnccMatcher>(load_pgm(cfg.scene_image),
                                         load_templates(cfg.templates_dir));
  }
  if (choice == "none") return std::make_unique<NullMatcher>();
  throw std::runtime_error("unknown matcher '" + choice + "'");
}

int cmd_simulate(const SimulateConfig& cfg) {
  fs::create_directories(cfg.out);
  const fs::path out(cfg.out);

  const ReferencePlanogram planogram =
      gen_planogram(cfg.rows, cfg.cols, cfg.products, cfg.seed);
  save_planogram(planogram, (out / "planogram.json").string());

  const int canvas_w = static_cast<int>(std::ceil(cfg.cols * cfg.cell_w));
  const int canvas_h = static_cast<int>(std::ceil(cfg.rows * cfg.cell_h));

  json manifest_scenes = json::array();
  for (int k = 0; k < cfg.scenes; ++k) {
    const std::uint64_t scene_seed = cfg.seed + static_cast<std::uint64_t>(k);
    fs::path scene_dir = out;
    if (cfg.scenes > 1) {
      char name[32];
      std::snprintf(name, sizeof(name), "scene_%03d", k);
      scene_dir = out / name;
      fs::create_directories(scene_dir);
    }

    const GroundTruthScene gt =
        gen_scene(planogram, cfg.cell_w, cfg.cell_h, cfg.void_rate, scene_seed);
    save_ground_truth(gt, (scene_dir / "ground_truth.json").string());

    NoiseParams noise;
    noise.miss_rate = cfg.miss_rate;
    noise.fp_rate = cfg.fp_rate;
    noise.confusion_rate = cfg.confusion_rate;
    noise.jitter_sigma = cfg.jitter_sigma;
    noise.seed = scene_seed;
    DetectionFile dets;
    dets.image_width = canvas_w;
    dets.image_height = canvas_h;
    dets.detections = corrupt(gt, noise);
    save_detections(dets, (scene_dir / "detections.json").string());

    json entry{{"detections", fs::relative(scene_dir / "detections.json", out).string()},
               {"ground_truth", fs::relative(scene_dir / "ground_truth.json", out).string()}};
    if (cfg.images) {
      const RenderResult rendered = render_scene(gt, canvas_w, canvas_h);
      save_pgm(rendered.image, (scene_dir / "scene.pgm").string());
      fs::create_directories(scene_dir / "templates");
      for (const auto& [product, img] : rendered.templates) {
        save_pgm(img, (scene_dir / "templates" / (product + ".pgm")).string());
      }
      entry["scene_image"] = fs::relative(scene_dir / "scene.pgm", out).string();
      entry["templates"] = fs::relative(scene_dir / "templates", out).string();
    }
    manifest_scenes.push_back(entry);
  }

  io_detail::save_json_file(json{{"planogram", "planogram.json"}, {"scenes", manifest_scenes}},
                            (out / "manifest.json").string());
  std::cout << "wrote " << cfg.scenes << " scene(s) under " << cfg.out << "\n";
  return 0;
}

struct CheckConfig {
  std::vector<std::string> planograms;
  std::string detections;
  std::string out;
  std::string svg;
  PipelineConfig pipeline;
};

int cmd_check(const CheckConfig& cfg) {
  std::vector<ReferencePlanogram> refs;
  for (const std::string& path : cfg.planograms) refs.push_back(load_planogram(path));
  const DetectionFile dets = load_detections(cfg.detections);

  std::unique_ptr<Matcher> matcher = make_matcher(cfg.pipeline, refs);
  const SceneRun run = run_scene(refs, dets.detections, *matcher, cfg.pipeline.params);

  const json report = report_to_json(run, cfg.planograms[run.planogram_index]);
  if (cfg.out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    io_detail::save_json_file(report, cfg.out);
  }

  if (!cfg.svg.empty()) {
    std::vector<BBox> matched, problem;
    for (const Assignment& a : run.outcome.solution.assignments) {
      matched.push_back(run.outcome.observed.node(a.obs_node).detection.bbox);
    }
    for (const ComplianceIssue& issue : run.outcome.issues) {
      if (issue.expected_roi) problem.push_back(*issue.expected_roi);
    }
    write_svg(cfg.svg, dets.image_width, dets.image_height, matched, problem);
  }
  return run.outcome.issues.empty() ? 0 : 1;
}

struct EvaluateConfig {
  std::string manifest;
  std::string stage = "all";
  std::string out;
  bool per_scene = false;
  PipelineConfig pipeline;
};

int cmd_evaluate(const EvaluateConfig& cfg) {
  const fs::path base = fs::path(cfg.manifest).parent_path();
  const Manifest manifest = load_manifest(cfg.manifest);

  std::vector<ReferencePlanogram> refs;
  for (const std::string& rel : manifest.planograms) {
    refs.push_back(load_planogram((base / rel).string()));
  }

  const std::vector<std::pair<Stage, std::string>> stages = {
      {Stage::kDetection, "detection"},
      {Stage::kConsistency, "consistency"},
      {Stage::kVerification, "verification"}};

  std::map<std::string, std::vector<std::pair<std::vector<Detection>, std::vector<GtItem>>>>
      staged;
  json scene_rows = json::array();

  for (const ManifestScene& scene : manifest.scenes) {
    const DetectionFile dets = load_detections((base / scene.detections).string());
    const GroundTruthFile gt = load_ground_truth((base / scene.ground_truth).string());
    const ReferencePlanogram& gt_ref = resolve_gt_planogram(refs, gt);
    const std::vector<GtItem> truth = eval_items(gt_ref, gt.items);

    PipelineConfig pc = cfg.pipeline;
    pc.ground_truth = (base / scene.ground_truth).string();
    if (!scene.scene_image.empty()) pc.scene_image = (base / scene.scene_image).string();
    if (!scene.templates.empty()) pc.templates_dir = (base / scene.templates).string();
    std::unique_ptr<Matcher> matcher = make_matcher(pc, refs);

    const SceneRun run = run_scene(refs, dets.detections, *matcher, cfg.pipeline.params);

    json row{{"detections", scene.detections}};
    for (const auto& [stage, name] : stages) {
      const auto stage_dets = stage_detections(dets.detections, run, stage);
      staged[name].push_back({stage_dets, truth});
      if (cfg.per_scene) {
        row[name] = eval_to_json(evaluate_scene(stage_dets, truth));
      }
    }
    if (cfg.per_scene) scene_rows.push_back(row);
  }

  json out_stages;
  for (const auto& [stage, name] : stages) {
    if (cfg.stage != "all" && cfg.stage != name) continue;
    out_stages[name] = eval_to_json(evaluate_dataset(staged[name]));
  }
  json result{{"scenes_evaluated", manifest.scenes.size()}, {"stages", out_stages}};
  if (cfg.per_scene) result["per_scene"] = scene_rows;

  if (cfg.out.empty()) {
    std::cout << result.dump(2) << "\n";
  } else {
    io_detail::save_json_file(result, cfg.out);
  }
  return 0;
}

void add_pipeline_options(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--tau", cfg.params.solver.tau, "hypothesis acceptance threshold")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--lambda", cfg.params.solver.lambda_penalty,
                  "disconnected-component penalty weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--alpha", cfg.params.builder.alpha, "neighbor distance multiplier")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--roi-margin", cfg.params.verify.roi_margin,
                  "ROI enlargement per side")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--accept-threshold", cfg.params.verify.accept_threshold,
                  "minimum proposal score for acceptance")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--overlap-iou-max", cfg.params.verify.overlap_iou_max,
                  "IoU above which proposals are discarded")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--matcher", cfg.matcher, "verification matcher")
      ->check(CLI::IsMember({"auto", "oracle", "zncc", "none"}));
  cmd->add_option("--ground-truth", cfg.ground_truth,
                  "ground-truth file for the oracle matcher");
  cmd->add_option("--scene", cfg.scene_image, "scene graymap for the zncc matcher");
  cmd->add_option("--templates", cfg.templates_dir,
                  "directory of per-product graymap templates");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shelfcheck - planogram compliance engine"};
  app.require_subcommand(1);

  SimulateConfig sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic benchmark");
  simulate->add_option("--rows", sim.rows, "planogram rows")->check(CLI::PositiveNumber);
  simulate->add_option("--cols", sim.cols, "planogram columns")->check(CLI::PositiveNumber);
  simulate->add_option("--products", sim.products, "catalog size")->check(CLI::PositiveNumber);
  simulate->add_option("--cell-w", sim.cell_w, "cell width in pixels")->check(CLI::PositiveNumber);
  simulate->add_option("--cell-h", sim.cell_h, "cell height in pixels")->check(CLI::PositiveNumber);
  simulate->add_option("--void-rate", sim.void_rate, "probability a facing is void")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--miss-rate", sim.miss_rate, "probability a present item is missed")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--fp-rate", sim.fp_rate, "expected false detections per item")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--confusion-rate", sim.confusion_rate,
                       "probability of a label swap within the category")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--jitter-sigma", sim.jitter_sigma, "bbox position jitter in pixels")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--scenes", sim.scenes, "number of scenes to generate")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "random seed (SHELFCHECK_SEED overrides default)");
  simulate->add_flag("!--no-images", sim.images, "skip scene/template rendering");
  simulate->add_option("--out", sim.out, "output directory");

  CheckConfig check;
  CLI::App* check_cmd = app.add_subcommand("check", "compliance-check one scene");
  check_cmd->add_option("--planogram", check.planograms, "reference planogram file(s)")
      ->required();
  check_cmd->add_option("--detections", check.detections, "detection file")->required();
  check_cmd->add_option("--out", check.out, "report path (stdout when omitted)");
  check_cmd->add_option("--svg", check.svg, "write an SVG sketch of the result");
  add_pipeline_options(check_cmd, check.pipeline);

  EvaluateConfig eval;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score a dataset manifest");
  eval_cmd->add_option("--manifest", eval.manifest, "dataset manifest file")->required();
  eval_cmd->add_option("--stage", eval.stage, "restrict the report to one stage")
      ->check(CLI::IsMember({"detection", "consistency", "verification", "all"}));
  eval_cmd->add_option("--out", eval.out, "report path (stdout when omitted)");
  eval_cmd->add_flag("--per-scene", eval.per_scene, "include per-scene metric rows");
  add_pipeline_options(eval_cmd, eval.pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (check_cmd->parsed()) return cmd_check(check);
    if (eval_cmd->parsed()) return cmd_evaluate(eval);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
