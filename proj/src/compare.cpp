#include "depthmatch/compare.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "depthmatch/eval.hpp"

namespace depthmatch {

void ExperimentConfig::validate() const {
  if (scene_family != "generated" && scene_family != "junction") {
    throw ConfigError("experiment: unknown scene family '" + scene_family + "'");
  }
  scene.validate();
  assigner.validate();
  loss.validate();
  if (scene_count < 1) {
    throw ConfigError("experiment: scene count must be >= 1");
  }
  if (assigners.empty()) {
    throw ConfigError("experiment: assigner list must not be empty");
  }
  const std::set<std::string> known{"iou", "depth", "depth-per-level"};
  for (const auto& a : assigners) {
    if (!known.count(a)) {
      throw ConfigError("experiment: unknown assigner '" + a + "'");
    }
  }
  if (!(similarity_thr > 0.0 && similarity_thr < 1.0)) {
    throw ConfigError("experiment: similarity_thr must be in (0,1)");
  }
}

Scene ExperimentConfig::make_scene(int index) const {
  if (scene_family == "junction") {
    return junction_scenario(base_seed + index);
  }
  return generate_scene(scene, base_seed + index);
}

ExperimentConfig experiment_from_config(const ConfigDoc& doc) {
  doc.require_known({
      {"scene",
       {"family", "count", "pedestrians", "z_min", "z_max", "height_mean",
        "height_std", "height_lo", "height_hi", "aspect", "background_depth",
        "ground_plane", "depth_stride", "min_depth_gap", "overlap_adjacent",
        "jitter_per_gt", "random_proposals", "jitter", "random_box_height_lo",
        "random_box_height_hi", "random_box_focus", "focal", "image_width",
        "image_height", "camera_height", "seed"}},
      {"assigner",
       {"n_pos", "n_neg", "lambda_d", "lambda_z", "max_cost", "iou_pos_thr",
        "iou_neg_thr", "rng_seed", "level_boundaries"}},
      {"loss", {"alpha", "beta", "gamma", "kappa"}},
      {"compare", {"assigners", "similarity_thr", "normalize"}},
  });

  ExperimentConfig cfg;
  cfg.scene_family = doc.text("scene", "family", cfg.scene_family);
  SceneConfig& s = cfg.scene;
  s.camera.focal = doc.number("scene", "focal", s.camera.focal);
  s.camera.image_width = doc.number("scene", "image_width", s.camera.image_width);
  s.camera.image_height = doc.number("scene", "image_height", s.camera.image_height);
  s.camera.height = doc.number("scene", "camera_height", s.camera.height);
  cfg.scene_count = doc.integer("scene", "count", cfg.scene_count);
  s.ped_count = doc.integer("scene", "pedestrians", s.ped_count);
  s.z_min = doc.number("scene", "z_min", s.z_min);
  s.z_max = doc.number("scene", "z_max", s.z_max);
  s.height_mean = doc.number("scene", "height_mean", s.height_mean);
  s.height_std = doc.number("scene", "height_std", s.height_std);
  s.height_lo = doc.number("scene", "height_lo", s.height_lo);
  s.height_hi = doc.number("scene", "height_hi", s.height_hi);
  s.aspect = doc.number("scene", "aspect", s.aspect);
  s.background_depth = doc.number("scene", "background_depth", s.background_depth);
  s.ground_plane = doc.boolean("scene", "ground_plane", s.ground_plane);
  s.depth_stride = doc.number("scene", "depth_stride", s.depth_stride);
  s.min_depth_gap = doc.number("scene", "min_depth_gap", s.min_depth_gap);
  s.overlap_adjacent = doc.boolean("scene", "overlap_adjacent", s.overlap_adjacent);
  s.jitter_per_gt = doc.integer("scene", "jitter_per_gt", s.jitter_per_gt);
  s.random_proposals = doc.integer("scene", "random_proposals", s.random_proposals);
  s.jitter = doc.number("scene", "jitter", s.jitter);
  s.random_box_height_lo =
      doc.number("scene", "random_box_height_lo", s.random_box_height_lo);
  s.random_box_height_hi =
      doc.number("scene", "random_box_height_hi", s.random_box_height_hi);
  s.random_box_focus = doc.number("scene", "random_box_focus", s.random_box_focus);
  cfg.base_seed = static_cast<uint64_t>(doc.number("scene", "seed", 0));

  AssignerConfig& a = cfg.assigner;
  a.n_pos = doc.integer("assigner", "n_pos", a.n_pos);
  a.n_neg = doc.integer("assigner", "n_neg", a.n_neg);
  a.cost_weights.lambda_d = doc.number("assigner", "lambda_d", a.cost_weights.lambda_d);
  a.cost_weights.lambda_z = doc.number("assigner", "lambda_z", a.cost_weights.lambda_z);
  a.max_cost = doc.number("assigner", "max_cost", a.max_cost);
  a.iou_pos_thr = doc.number("assigner", "iou_pos_thr", a.iou_pos_thr);
  a.iou_neg_thr = doc.number("assigner", "iou_neg_thr", a.iou_neg_thr);
  a.rng_seed = static_cast<uint64_t>(doc.number("assigner", "rng_seed", 0));
  if (doc.has("assigner", "level_boundaries")) {
    // Ascending finite upper bounds; the last level extends to +inf.
    std::vector<LevelRanges::Range> ranges;
    double lower = 0.0;
    for (const auto& tok : doc.list("assigner", "level_boundaries", {})) {
      char* end = nullptr;
      const double upper = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0' || upper <= lower) {
        throw ConfigError("level_boundaries must be ascending positive numbers");
      }
      ranges.push_back({lower, upper});
      lower = upper;
    }
    ranges.push_back({lower, std::numeric_limits<double>::infinity()});
    a.level_ranges = LevelRanges(std::move(ranges));
  }

  cfg.loss.alpha = doc.number("loss", "alpha", cfg.loss.alpha);
  cfg.loss.beta = doc.number("loss", "beta", cfg.loss.beta);
  cfg.loss.gamma = doc.number("loss", "gamma", cfg.loss.gamma);
  cfg.loss_kappa_auto = !doc.has("loss", "kappa");
  cfg.loss.kappa = doc.number("loss", "kappa", cfg.loss.kappa);

  cfg.assigners = doc.list("compare", "assigners", cfg.assigners);
  cfg.similarity_thr = doc.number("compare", "similarity_thr", cfg.similarity_thr);
  cfg.normalize = doc.boolean("compare", "normalize", cfg.normalize);

  cfg.validate();
  return cfg;
}

AssignmentResult run_assigner(const std::string& name, const Scene& scene,
                              const AssignerConfig& cfg, bool normalize) {
  std::vector<BBox> gts;
  gts.reserve(scene.gt_boxes.size());
  for (const auto& g : scene.gt_boxes) {
    gts.push_back(g.box);
  }

  AssignerConfig effective = cfg;
  if (normalize) {
    effective.cost_weights = normalized_weights(scene.depth, cfg.cost_weights);
  }

  if (name == "iou") {
    return assign_iou(gts, scene.proposals, effective);
  }
  if (name == "depth") {
    return assign_depth_guided(gts, scene.proposals, scene.depth, effective);
  }
  if (name == "depth-per-level") {
    return assign_per_level(gts, scene.proposals, scene.depth, effective);
  }
  throw ConfigError("unknown assigner '" + name + "'");
}

namespace {

SceneRow make_row(int scene_id, const std::string& assigner,
                  const Scene& scene, const AssignmentResult& result,
                  double similarity_thr, const CostWeights& weights) {
  SceneRow row;
  row.scene_id = scene_id;
  row.assigner = assigner;
  row.inconsistency = inconsistency_rate(result, scene.proposals, similarity_thr);
  row.positives = static_cast<int>(result.positives.size());
  double total = 0.0;
  double zpart = 0.0;
  for (const auto& p : result.positives) {
    total += p.cost.total;
    zpart += weights.lambda_z * p.cost.z_cost;
  }
  if (!result.positives.empty()) {
    row.mean_total_cost = total / result.positives.size();
    row.mean_rescore_delta = zpart / result.positives.size();
  }
  return row;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double median_of(std::vector<double> v) {
  if (v.empty()) {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ComparisonReport run_comparison(const ExperimentConfig& cfg, bool fig1) {
  cfg.validate();
  ComparisonReport report;

  const int count = fig1 ? 1 : cfg.scene_count;
  for (int i = 0; i < count; ++i) {
    Scene scene = fig1 ? figure1_scenario() : cfg.make_scene(i);
    const AssignerConfig& acfg =
        fig1 ? figure1_assigner_config() : cfg.assigner;
    for (const auto& name : cfg.assigners) {
      SceneRow row;
      try {
        const AssignmentResult result =
            run_assigner(name, scene, acfg, cfg.normalize);
        CostWeights w = cfg.normalize
                            ? normalized_weights(scene.depth, acfg.cost_weights)
                            : acfg.cost_weights;
        row = make_row(i, name, scene, result, cfg.similarity_thr, w);
        for (const auto& p : result.positives) {
          report.cost_samples.push_back({name, i, p.proposal_id, p.gt_index, p.cost});
        }

        // Training-signal diagnostics with identity predictions: each
        // proposal predicts itself (own box, RPN confidence as the class
        // score, the assignment-time target as the cost estimate).
        std::vector<ProposalPrediction> preds;
        preds.reserve(scene.proposals.size());
        std::map<int, double> target_cost;
        for (const auto& p : result.positives) {
          target_cost[p.proposal_id] = p.cost.total;
        }
        for (const auto& p : scene.proposals) {
          auto it = target_cost.find(p.id);
          preds.push_back({p.id, p.confidence, p.box,
                           it == target_cost.end() ? 0.0 : it->second});
        }
        std::vector<BBox> gts;
        for (const auto& g : scene.gt_boxes) {
          gts.push_back(g.box);
        }
        LossConfig lc = cfg.loss;
        if (cfg.loss_kappa_auto) {
          lc.kappa = cost_squash_scale(scene.depth);
        }
        report.loss_samples.push_back(
            {name, i, assignment_losses(preds, result, gts, lc)});
      } catch (const std::exception& e) {
        row.scene_id = i;
        row.assigner = name;
        row.failed = true;
        row.error = e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }

  for (const auto& name : cfg.assigners) {
    AssignerAggregate agg;
    agg.assigner = name;
    std::vector<double> inc, pos, cost, delta;
    for (const auto& row : report.rows) {
      if (row.assigner != name) {
        continue;
      }
      ++agg.scenes;
      if (row.failed) {
        ++agg.failures;
        continue;
      }
      inc.push_back(row.inconsistency);
      pos.push_back(row.positives);
      cost.push_back(row.mean_total_cost);
      delta.push_back(row.mean_rescore_delta);
    }
    agg.mean_inconsistency = mean_of(inc);
    agg.median_inconsistency = median_of(inc);
    agg.mean_positives = mean_of(pos);
    agg.mean_total_cost = mean_of(cost);
    agg.mean_rescore_delta = mean_of(delta);
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

void write_comparison_outputs(const ComparisonReport& report,
                              const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream out(out_dir / "compare.csv");
    out << "scene_id,assigner,status,inconsistency_rate,positives,"
           "mean_total_cost,mean_rescore_delta\n";
    for (const auto& r : report.rows) {
      out << r.scene_id << ',' << r.assigner << ','
          << (r.failed ? "failed" : "ok") << ','
          << format_double(r.inconsistency) << ',' << r.positives << ','
          << format_double(r.mean_total_cost) << ','
          << format_double(r.mean_rescore_delta) << '\n';
    }
  }
  {
    std::ofstream out(out_dir / "aggregate.csv");
    out << "assigner,scenes,failures,mean_inconsistency,median_inconsistency,"
           "mean_positives,mean_total_cost,mean_rescore_delta\n";
    for (const auto& a : report.aggregates) {
      out << a.assigner << ',' << a.scenes << ',' << a.failures << ','
          << format_double(a.mean_inconsistency) << ','
          << format_double(a.median_inconsistency) << ','
          << format_double(a.mean_positives) << ','
          << format_double(a.mean_total_cost) << ','
          << format_double(a.mean_rescore_delta) << '\n';
    }
  }

  // Raw per-positive cost samples, one file per assigner, for plotting.
  for (const auto& name : cfg.assigners) {
    std::ofstream out(out_dir / ("costs_" + name + ".csv"));
    out << "scene_id,proposal_id,gt,d_cost,z_cost,total_cost\n";
    for (const auto& s : report.cost_samples) {
      if (s.assigner != name) {
        continue;
      }
      out << s.scene_id << ',' << s.proposal_id << ',' << s.gt_index << ','
          << format_double(s.cost.d_cost) << ',' << format_double(s.cost.z_cost)
          << ',' << format_double(s.cost.total) << '\n';
    }
  }

  {
    std::ofstream out(out_dir / "losses.csv");
    out << "scene_id,assigner,reg_loss,cls_loss,cost_loss,total\n";
    for (const auto& s : report.loss_samples) {
      out << s.scene_id << ',' << s.assigner << ','
          << format_double(s.losses.reg_loss) << ','
          << format_double(s.losses.cls_loss) << ','
          << format_double(s.losses.cost_loss) << ','
          << format_double(s.losses.total) << '\n';
    }
  }
}

void write_assignment_csv(const AssignmentResult& result,
                          const std::vector<RankedProposal>& proposals,
                          const std::filesystem::path& path) {
  std::map<int, std::string> role;
  std::map<int, const Assignment*> pos_of;
  for (const auto& p : result.positives) {
    role[p.proposal_id] = "pos";
    pos_of[p.proposal_id] = &p;
  }
  for (int id : result.negatives) {
    role[id] = "neg";
  }
  std::map<int, const Eviction*> evict_of;
  for (const auto& e : result.evictions) {
    evict_of[e.proposal_id] = &e;  // keeps the last eviction per proposal
  }
  for (int id : result.pending) {
    role[id] = "pend";
  }

  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  out << "proposal_id,role,gt,d_cost,z_cost,total_cost\n";
  for (const auto& p : proposals) {
    auto it = role.find(p.id);
    const std::string r = it == role.end() ? "ignored" : it->second;
    int gt = -1;
    PathCost cost;
    if (r == "pos") {
      const Assignment* a = pos_of[p.id];
      gt = a->gt_index;
      cost = a->cost;
    } else if (r == "pend") {
      auto ev = evict_of.find(p.id);
      if (ev != evict_of.end()) {
        gt = ev->second->gt_index;
        cost.total = ev->second->cost;
      }
    }
    out << p.id << ',' << r << ',' << gt << ',' << format_double(cost.d_cost)
        << ',' << format_double(cost.z_cost) << ','
        << format_double(cost.total) << '\n';
  }
}

}  // namespace depthmatch
