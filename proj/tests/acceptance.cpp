// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "depthmatch/compare.hpp"
#include "depthmatch/eval.hpp"
#include "depthmatch/rng.hpp"
#include "depthmatch/scenesim.hpp"
#include "depthmatch/supervision.hpp"
#include "test_support.hpp"

using namespace depthmatch;

namespace {

struct Failure {
  std::string detail;
};

using CriterionFn = std::function<std::string()>;  // empty string = pass

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Point2 cell_center(const DepthGrid& g, int col, int row) {
  return {(col + 0.5) * g.stride(), (row + 0.5) * g.stride()};
}

DepthGrid random_grid(Rng& rng, int w, int h) {
  std::vector<double> values(static_cast<size_t>(w) * h);
  for (auto& v : values) {
    v = rng.uniform(0.5, 50.0);
  }
  return DepthGrid(w, h, 1.0, std::move(values));
}

// --- criteria ----------------------------------------------------------

std::string dp_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(424242);
  for (int it = 0; it < 200; ++it) {
    const int w = 1 + static_cast<int>(rng.uniform_index(5));
    const int h = 1 + static_cast<int>(rng.uniform_index(5));
    const DepthGrid g = random_grid(rng, w, h);
    const Point2 a = cell_center(g, static_cast<int>(rng.uniform_index(w)),
                                 static_cast<int>(rng.uniform_index(h)));
    const Point2 b = cell_center(g, static_cast<int>(rng.uniform_index(w)),
                                 static_cast<int>(rng.uniform_index(h)));
    const double dp = min_variance_path_cost(g, a, b);
    const double oracle = brute_force_path_cost(g, a, b);
    if (dp != oracle) {
      return "case " + std::to_string(it) + ": dp " + std::to_string(dp) +
             " != oracle " + std::to_string(oracle);
    }
  }
  const double t = seconds_since(t0);
  if (t >= 5.0) {
    return "took " + std::to_string(t) + "s (limit 5s)";
  }
  return "";
}

std::string path_cost_invariants() {
  Rng rng(515151);
  for (int it = 0; it < 120; ++it) {
    const int w = 2 + static_cast<int>(rng.uniform_index(6));
    const int h = 2 + static_cast<int>(rng.uniform_index(6));
    const DepthGrid g = random_grid(rng, w, h);
    const Point2 a = cell_center(g, static_cast<int>(rng.uniform_index(w)),
                                 static_cast<int>(rng.uniform_index(h)));
    const Point2 b = cell_center(g, static_cast<int>(rng.uniform_index(w)),
                                 static_cast<int>(rng.uniform_index(h)));
    const double z = min_variance_path_cost(g, a, b);

    if (z != min_variance_path_cost(g, b, a)) {
      return "symmetry violated at case " + std::to_string(it);
    }
    if (z < std::abs(sample_depth(g, a) - sample_depth(g, b)) - 1e-12) {
      return "endpoint lower bound violated at case " + std::to_string(it);
    }
    const DepthGrid flat(w, h, 1.0, std::vector<double>(w * h, 7.25));
    if (min_variance_path_cost(flat, a, b) != 0.0) {
      return "constant grid cost not zero at case " + std::to_string(it);
    }
    const double scale = std::pow(2.0, static_cast<int>(rng.uniform_index(7)) - 3);
    std::vector<double> scaled = g.values();
    for (auto& v : scaled) {
      v *= scale;
    }
    const DepthGrid gs(w, h, 1.0, std::move(scaled));
    if (min_variance_path_cost(gs, a, b) != scale * z) {
      return "exact scaling violated at case " + std::to_string(it);
    }
  }
  return "";
}

std::string figure1_fixture() {
  const Scene s = figure1_scenario();
  std::vector<BBox> gts;
  for (const auto& g : s.gt_boxes) {
    gts.push_back(g.box);
  }
  const AssignerConfig cfg = figure1_assigner_config();

  auto gt_of = [](const AssignmentResult& r, int id) {
    for (const auto& a : r.positives) {
      if (a.proposal_id == id) {
        return a.gt_index;
      }
    }
    return -1;
  };

  const AssignmentResult base = assign_iou(gts, s.proposals, cfg);
  if (gt_of(base, 0) != 0 || gt_of(base, 1) != 1) {
    return "iou baseline did not split P1->G1, P2->G2";
  }
  const double base_rate = inconsistency_rate(base, s.proposals, 0.3);
  if (!(base_rate > 0.0)) {
    return "baseline inconsistency rate not positive";
  }

  const AssignmentResult depth =
      assign_depth_guided(gts, s.proposals, s.depth, cfg);
  if (gt_of(depth, 0) != 1 || gt_of(depth, 1) != 1) {
    return "depth-guided did not unite P1 and P2 on G2";
  }
  const double depth_rate = inconsistency_rate(depth, s.proposals, 0.3);
  if (depth_rate != 0.0) {
    return "depth-guided inconsistency rate not exactly zero";
  }
  return "";
}

ExperimentConfig throughput_experiment() {
  ExperimentConfig cfg;
  cfg.scene_count = 100;
  cfg.base_seed = 20240001;
  cfg.assigners = {"iou", "depth"};
  cfg.similarity_thr = 0.3;
  cfg.normalize = true;

  SceneConfig& s = cfg.scene;
  s.ped_count = 2;
  s.z_min = 4.0;
  s.z_max = 26.0;
  s.min_depth_gap = 10.0;
  s.overlap_adjacent = true;
  s.jitter = 0.18;
  s.jitter_per_gt = 20;  // ~50 proposals per scene with the random boxes
  s.random_proposals = 10;

  AssignerConfig& a = cfg.assigner;
  a.n_pos = 32;
  a.n_neg = 32;
  a.rng_seed = 7;
  return cfg;
}

std::string statistical_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const AssignerConfig cfg = junction_assigner_config();
  const double similarity_thr = 0.3;

  double mean_iou = 0.0;
  double mean_depth = 0.0;
  int depth_not_worse = 0;
  for (int i = 0; i < 100; ++i) {
    const Scene s = junction_scenario(7919ULL * i + 3);
    std::vector<BBox> gts;
    for (const auto& g : s.gt_boxes) {
      gts.push_back(g.box);
    }

    // Scene validity: >= 2 pedestrians, >= 10 m apart, overlapping boxes.
    if (s.pedestrians.size() < 2) {
      return "scene " + std::to_string(i) + " has fewer than 2 pedestrians";
    }
    if (s.pedestrians[1].z - s.pedestrians[0].z < 10.0) {
      return "scene " + std::to_string(i) + " misses the 10 m depth gap";
    }
    if (!(iou(gts[0], gts[1]) > 0.0)) {
      return "scene " + std::to_string(i) + " pedestrians do not overlap";
    }

    const double r_iou = inconsistency_rate(
        assign_iou(gts, s.proposals, cfg), s.proposals, similarity_thr);
    const double r_depth = inconsistency_rate(
        assign_depth_guided(gts, s.proposals, s.depth, cfg), s.proposals,
        similarity_thr);
    mean_iou += r_iou;
    mean_depth += r_depth;
    if (r_depth <= r_iou) {
      ++depth_not_worse;
    }
  }
  mean_iou /= 100.0;
  mean_depth /= 100.0;

  std::ostringstream detail;
  detail << "mean depth " << mean_depth << " vs iou " << mean_iou
         << ", depth<=iou on " << depth_not_worse << "/100";
  if (!(mean_depth < mean_iou)) {
    return "mean inconsistency not improved: " + detail.str();
  }
  if (depth_not_worse < 90) {
    return "improvement not broad enough: " + detail.str();
  }
  const double t = seconds_since(t0);
  if (t >= 60.0) {
    return "took " + std::to_string(t) + "s (limit 60s)";
  }
  std::printf("       (%s, %.1fs)\n", detail.str().c_str(), t);
  return "";
}

std::string algorithm_invariants() {
  Rng rng(616161);
  int evictions_seen = 0;
  for (int it = 0; it < 1000; ++it) {
    const testsupport::Instance inst = testsupport::random_instance(rng);
    AssignmentResult r;
    try {
      r = assign_depth_guided(inst.gts, inst.proposals, inst.grid, inst.cfg);
    } catch (const std::exception& e) {
      return "instance " + std::to_string(it) + " threw: " + e.what();
    }
    std::string err = testsupport::check_partition_and_capacity(
        r, inst.gts.size(), inst.cfg.n_pos, inst.cfg.n_neg);
    if (!err.empty()) {
      return "instance " + std::to_string(it) + ": " + err;
    }
    err = testsupport::check_eviction_dominance(r);
    if (!err.empty()) {
      return "instance " + std::to_string(it) + ": " + err;
    }
    evictions_seen += static_cast<int>(r.evictions.size());

    const AssignmentResult r2 =
        assign_depth_guided(inst.gts, inst.proposals, inst.grid, inst.cfg);
    if (!testsupport::results_equal(r, r2)) {
      return "instance " + std::to_string(it) + ": nondeterministic result";
    }
  }
  if (evictions_seen == 0) {
    return "eviction path never exercised across 1000 instances";
  }
  std::printf("       (1000 instances, %d evictions logged)\n", evictions_seen);
  return "";
}

std::string evaluation_micro_cases() {
  // Perfect detector.
  {
    const std::vector<Annotation> gts{{{0, 0, 10, 60}, 1.0, "a"},
                                      {{50, 0, 60, 60}, 1.0, "b"}};
    const std::vector<Detection> dets{{{0, 0, 10, 60}, 1.0, "a"},
                                      {{50, 0, 60, 60}, 1.0, "b"}};
    const double mr = log_average_miss_rate(
        miss_rate_fppi_curve(match_detections_for_eval(dets, gts, 0.5)));
    if (!(mr <= 1e-9)) {
      return "perfect detector MR-2 " + std::to_string(mr) + " > 1e-9";
    }
  }
  // Empty detections.
  {
    const std::vector<Annotation> gts{{{0, 0, 10, 60}, 1.0, "a"}};
    const double mr = log_average_miss_rate(
        miss_rate_fppi_curve(match_detections_for_eval({}, gts, 0.5)));
    if (mr != 1.0) {
      return "empty detections MR-2 " + std::to_string(mr) + " != 1.0";
    }
  }
  // Hand-derived 2-GT case: one TP at 0.9, one FP at 0.8.
  {
    const std::vector<Annotation> gts{{{0, 0, 10, 60}, 1.0, "a"},
                                      {{50, 0, 60, 60}, 1.0, "a"}};
    const std::vector<Detection> dets{{{0, 0, 10, 60}, 0.9, "a"},
                                      {{500, 0, 510, 60}, 0.8, "a"}};
    const double mr = log_average_miss_rate(
        miss_rate_fppi_curve(match_detections_for_eval(dets, gts, 0.5)));
    if (std::abs(mr - 0.5) > 1e-9) {
      return "2-GT case MR-2 " + std::to_string(mr) + " != 0.5";
    }
  }
  return "";
}

std::string rescoring_criterion() {
  if (rescore_confidence(1.0, 4.0, 4.0) != 1.0) {
    return "factor at zero gap is not exactly 1";
  }
  double prev = 2.0;
  for (int i = 0; i <= 200; ++i) {
    const double delta = 0.1 * i;
    const double factor = rescore_confidence(1.0, 0.0, delta);
    if (!(factor > 0.5 && factor <= 1.0)) {
      return "factor outside (0.5, 1] at gap " + std::to_string(delta);
    }
    if (!(factor < prev)) {
      return "factor not strictly decreasing at gap " + std::to_string(delta);
    }
    prev = factor;
  }
  const double worked = rescore_confidence(0.8, 0.0, std::log(3.0));
  if (std::abs(worked - 0.6) > 1e-9) {
    return "worked example gave " + std::to_string(worked);
  }
  return "";
}

std::string level_binning() {
  const LevelRanges ranges = LevelRanges::standard();
  const std::pair<double, std::string> cases[] = {
      {64.0, "C3"}, {65.0, "C4"}, {128.0, "C4"},
      {129.0, "C5"}, {512.0, "C6"}, {513.0, "C7"},
  };
  for (const auto& [scale, want] : cases) {
    const std::string got = ranges.label(assign_level(scale, ranges));
    if (got != want) {
      return "scale " + std::to_string(scale) + " -> " + got + ", want " + want;
    }
  }
  return "";
}

std::string performance_criterion() {
  // matching_cost on a 512x256-cell grid, worst-case corner-to-corner.
  Rng rng(717171);
  std::vector<double> values(512 * 256);
  for (auto& v : values) {
    v = rng.uniform(1.0, 60.0);
  }
  const DepthGrid grid(512, 256, 4.0, std::move(values));
  const BBox a{2, 2, 10, 10};
  const BBox b{2030, 1010, 2045, 1022};
  const CostWeights w{1.0, 1.0};
  const auto t0 = std::chrono::steady_clock::now();
  const int reps = 20;
  double acc = 0.0;
  for (int i = 0; i < reps; ++i) {
    acc += matching_cost(a, b, grid, w).total;
  }
  const double per_pair_ms = seconds_since(t0) * 1000.0 / reps;
  if (per_pair_ms >= 50.0) {
    return "matching_cost took " + std::to_string(per_pair_ms) + " ms per pair";
  }

  // Full comparison over 100 scenes with ~50 proposals each.
  const auto t1 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = throughput_experiment();
  const ComparisonReport report = run_comparison(cfg, false);
  const double compare_s = seconds_since(t1);
  if (compare_s >= 60.0) {
    return "compare over 100 scenes took " + std::to_string(compare_s) + "s";
  }
  int rows = 0;
  for (const auto& row : report.rows) {
    rows += row.failed ? 0 : 1;
  }
  if (rows != 200) {
    return "expected 200 clean rows, got " + std::to_string(rows);
  }
  std::printf("       (cost %.2f ms/pair, compare %.1fs, checksum %.3f)\n",
              per_pair_ms, compare_s, acc);
  return "";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, CriterionFn>> criteria = {
      {"dp-oracle-equivalence", dp_oracle_equivalence},
      {"path-cost-invariants", path_cost_invariants},
      {"figure1-fixture", figure1_fixture},
      {"statistical-consistency", statistical_consistency},
      {"algorithm-invariants", algorithm_invariants},
      {"evaluation-micro-cases", evaluation_micro_cases},
      {"rescoring", rescoring_criterion},
      {"level-binning", level_binning},
      {"performance", performance_criterion},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    std::string err;
    try {
      err = fn();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    if (err.empty()) {
      std::printf("[PASS] %s\n", name.c_str());
    } else {
      std::printf("[FAIL] %s: %s\n", name.c_str(), err.c_str());
      ++failures;
    }
  }
  std::printf("%d/%zu acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
