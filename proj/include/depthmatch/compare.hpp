#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "depthmatch/assign.hpp"
#include "depthmatch/io.hpp"
#include "depthmatch/scenesim.hpp"
#include "depthmatch/supervision.hpp"

namespace depthmatch {

struct ExperimentConfig {
  // "generated": sampled scenes from `scene`. "junction": seeded
  // variations of the canonical near/far junction geometry.
  std::string scene_family = "generated";
  SceneConfig scene;
  AssignerConfig assigner;
  LossConfig loss;
  bool loss_kappa_auto = true;  // derive kappa from each scene's grid
  std::vector<std::string> assigners = {"iou", "depth"};
  int scene_count = 1;
  uint64_t base_seed = 0;
  double similarity_thr = 0.3;
  bool normalize = false;

  void validate() const;

  Scene make_scene(int index) const;
};

/// Parses and validates an experiment config document (fails on unknown
/// sections or keys; defaults fill anything omitted).
ExperimentConfig experiment_from_config(const ConfigDoc& doc);

/// Runs one named assigner ("iou", "depth" or "depth-per-level") on a
/// scene. normalize rescales the cost weights against the scene grid.
AssignmentResult run_assigner(const std::string& name, const Scene& scene,
                              const AssignerConfig& cfg, bool normalize);

struct SceneRow {
  int scene_id = 0;
  std::string assigner;
  bool failed = false;
  std::string error;
  double inconsistency = 0.0;
  int positives = 0;
  double mean_total_cost = 0.0;
  double mean_rescore_delta = 0.0;  // mean depth component of positive costs
};

struct AssignerAggregate {
  std::string assigner;
  int scenes = 0;
  int failures = 0;
  double mean_inconsistency = 0.0;
  double median_inconsistency = 0.0;
  double mean_positives = 0.0;
  double mean_total_cost = 0.0;
  double mean_rescore_delta = 0.0;
};

struct CostSample {
  std::string assigner;
  int scene_id;
  int proposal_id;
  int gt_index;
  PathCost cost;
};

struct LossSample {
  std::string assigner;
  int scene_id;
  LossBreakdown losses;
};

struct ComparisonReport {
  std::vector<SceneRow> rows;  // one per (scene, assigner), scene-major
  std::vector<AssignerAggregate> aggregates;
  std::vector<CostSample> cost_samples;  // per-positive costs for plotting
  std::vector<LossSample> loss_samples;  // training-signal diagnostics
};

/// Scene-by-scene comparison across the configured assigners. fig1
/// replaces generated scenes with the canonical fixture (and its assigner
/// thresholds). Per-scene failures are recorded in the row and do not
/// abort the run.
ComparisonReport run_comparison(const ExperimentConfig& cfg, bool fig1);

/// Report emission: compare.csv (per-scene rows), aggregate.csv, and one
/// costs_<assigner>.csv of per-positive cost samples for plotting.
void write_comparison_outputs(const ComparisonReport& report,
                              const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir);

/// Per-proposal assignment report (id, role, gt, d_cost, z_cost, total).
void write_assignment_csv(const AssignmentResult& result,
                          const std::vector<RankedProposal>& proposals,
                          const std::filesystem::path& path);

}  // namespace depthmatch
