#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "depthmatch/compare.hpp"
#include "depthmatch/eval.hpp"
#include "depthmatch/io.hpp"
#include "depthmatch/scenesim.hpp"
#include "depthmatch/supervision.hpp"

namespace fs = std::filesystem;
using namespace depthmatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

ExperimentConfig load_experiment(const std::string& config_path,
                                 std::optional<uint64_t> seed_override,
                                 bool normalize_flag) {
  ExperimentConfig cfg = config_path.empty()
                             ? ExperimentConfig{}
                             : experiment_from_config(ConfigDoc::parse_file(config_path));
  if (seed_override) {
    cfg.base_seed = *seed_override;
  }
  if (normalize_flag) {
    cfg.normalize = true;
  }
  cfg.validate();
  return cfg;
}

std::string scene_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%04d", index);
  return buf;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<uint64_t> seed_override) {
  const ExperimentConfig cfg = load_experiment(config_path, seed_override, false);
  fs::create_directories(out_dir);
  for (int i = 0; i < cfg.scene_count; ++i) {
    const Scene scene = cfg.make_scene(i);
    const std::string stem = scene_stem(i);
    save_depth_grid(scene.depth, fs::path(out_dir) / (stem + ".depth"));
    save_scene(scene, fs::path(out_dir) / (stem + ".scene"), stem + ".depth");
  }
  std::cout << "wrote " << cfg.scene_count << " scene(s) to " << out_dir << "\n";
  return kExitOk;
}

int cmd_assign(const std::string& scene_path, const std::string& assigner,
               const std::string& config_path, const std::string& out_dir,
               std::optional<uint64_t> seed_override, bool normalize) {
  const ExperimentConfig cfg = load_experiment(config_path, seed_override, normalize);
  const Scene scene = load_scene(scene_path);
  const AssignmentResult result =
      run_assigner(assigner, scene, cfg.assigner, cfg.normalize);
  fs::create_directories(out_dir);
  const fs::path out =
      fs::path(out_dir) / ("assignment_" + assigner + ".csv");
  write_assignment_csv(result, scene.proposals, out);
  std::cout << "positives " << result.positives.size() << ", negatives "
            << result.negatives.size() << ", pending " << result.pending.size()
            << " -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                std::optional<uint64_t> seed_override, bool fig1,
                bool normalize) {
  const ExperimentConfig cfg = load_experiment(config_path, seed_override, normalize);
  const ComparisonReport report = run_comparison(cfg, fig1);
  write_comparison_outputs(report, cfg, out_dir);
  int failures = 0;
  for (const auto& a : report.aggregates) {
    std::cout << a.assigner << ": mean inconsistency "
              << format_double(a.mean_inconsistency) << ", mean positives "
              << format_double(a.mean_positives) << "\n";
    failures += a.failures;
  }
  if (failures > 0) {
    std::cerr << failures << " scene/assigner run(s) failed; see compare.csv\n";
    return kExitData;
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& gt_path, const std::string& det_path,
                 const std::string& subset, double iou_thr,
                 const std::string& out_dir) {
  const auto anns = load_annotations(gt_path);
  auto dets = load_detections(det_path);

  const SubsetSpec spec = subset_by_name(subset);
  const FilteredAnnotations filtered = filter_subset(anns, spec);
  if (filtered.kept.empty()) {
    throw DataError("no ground truths remain after the '" + subset +
                    "' subset filter");
  }
  if (spec.lhv_threshold) {
    std::set<std::string> keep(filtered.included_images.begin(),
                               filtered.included_images.end());
    std::erase_if(dets, [&](const Detection& d) { return !keep.count(d.image_id); });
  }

  const EvalMatches matches =
      match_detections_for_eval(dets, filtered.kept, iou_thr);
  const MissRateCurve curve = miss_rate_fppi_curve(matches);
  const double mr = log_average_miss_rate(curve);

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "curve.csv");
    out << "threshold,fppi,miss\n";
    for (const auto& pt : curve.points) {
      out << format_double(pt.threshold) << ',' << format_double(pt.fppi)
          << ',' << format_double(pt.miss_rate) << '\n';
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "summary.csv");
    out << "subset,iou_thr,mr2,gts,images,detections\n";
    out << subset << ',' << format_double(iou_thr) << ',' << format_double(mr)
        << ',' << matches.gt_count << ',' << matches.image_count << ','
        << dets.size() << '\n';
  }
  std::cout << "MR-2 (" << subset << ", IoU " << format_double(iou_thr)
            << ") = " << format_double(mr) << "\n";
  return kExitOk;
}

int cmd_rescore(const std::string& det_path, const std::string& costs_path,
                const std::string& out_path) {
  auto dets = load_detections(det_path);

  std::ifstream costs(costs_path);
  if (!costs) {
    throw DataError("cannot open " + costs_path);
  }
  std::string line;
  size_t row = 0;
  int line_no = 0;
  while (std::getline(costs, line)) {
    ++line_no;
    std::istringstream ss(line);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos || line[0] == '#') {
      continue;
    }
    long id;
    double predicted, actual;
    if (!(ss >> id >> predicted >> actual)) {
      throw DataError(costs_path + ":" + std::to_string(line_no) +
                      ": expected 'id predicted actual'");
    }
    if (row >= dets.size() || id != static_cast<long>(row)) {
      throw DataError(costs_path + ":" + std::to_string(line_no) +
                      ": detection id mismatch, expected " + std::to_string(row) +
                      ", got " + std::to_string(id));
    }
    dets[row].score = rescore_confidence(dets[row].score, predicted, actual);
    ++row;
  }
  if (row != dets.size()) {
    throw DataError(costs_path + ": costs cover " + std::to_string(row) +
                    " detections, file has " + std::to_string(dets.size()));
  }

  save_detections(dets, out_path);
  std::cout << "rescored " << dets.size() << " detection(s) -> " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-guided ground-truth/proposal assignment toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", scene_path, assigner = "depth";
  std::string gt_path, det_path, costs_path, out_file, subset = "reasonable";
  double iou_thr = 0.5;
  bool fig1 = false, normalize = false;
  std::optional<uint64_t> seed;

  auto add_common = [&](CLI::App* sub, bool with_config = true) {
    if (with_config) {
      sub->add_option("--config", config_path, "experiment config file");
    }
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the base seed");
    sub->add_flag("--normalize", normalize,
                  "normalize cost terms (distance by image diagonal, depth by range)");
  };

  auto* simulate = app.add_subcommand("simulate", "generate synthetic scene files");
  add_common(simulate);

  auto* assign = app.add_subcommand("assign", "run one assigner on a scene file");
  add_common(assign);
  assign->add_option("--scene", scene_path, "scene file")->required();
  assign->add_option("--assigner", assigner, "iou | depth | depth-per-level");

  auto* compare = app.add_subcommand("compare", "compare assigners over scenes");
  add_common(compare);
  compare->add_flag("--fig1", fig1, "run only the canonical inconsistency fixture");

  auto* evaluate = app.add_subcommand("evaluate", "miss-rate/FPPI evaluation");
  add_common(evaluate);
  evaluate->add_option("--gt", gt_path, "annotation file")->required();
  evaluate->add_option("--det", det_path, "detection file")->required();
  evaluate->add_option("--subset", subset, "reasonable|heavy|partial|bare|lhv|all");
  evaluate->add_option("--iou-thr", iou_thr, "matching IoU threshold");

  auto* rescore = app.add_subcommand("rescore", "apply confidence rescoring");
  rescore->add_option("--det", det_path, "detection file")->required();
  rescore->add_option("--costs", costs_path, "cost file: id predicted actual")->required();
  rescore->add_option("--out", out_file, "rescored detection file")->required();
  rescore->add_option("--config", config_path, "experiment config file");
  rescore->add_option("--seed", seed, "override the base seed");
  rescore->add_flag("--normalize", normalize, "accepted for interface symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(config_path, out_dir, seed);
    }
    if (assign->parsed()) {
      return cmd_assign(scene_path, assigner, config_path, out_dir, seed, normalize);
    }
    if (compare->parsed()) {
      return cmd_compare(config_path, out_dir, seed, fig1, normalize);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(gt_path, det_path, subset, iou_thr, out_dir);
    }
    if (rescore->parsed()) {
      return cmd_rescore(det_path, costs_path, out_file);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::out_of_range& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
