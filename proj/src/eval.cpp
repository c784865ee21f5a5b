#include "depthmatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace depthmatch {

bool SubsetSpec::visibility_ok(double v) const {
  const bool above = lo_open ? v > vis_lo : v >= vis_lo;
  const bool below = hi_open ? v < vis_hi : v <= vis_hi;
  return above && below;
}

SubsetSpec subset_by_name(const std::string& name) {
  SubsetSpec s;
  s.name = name;
  if (name == "reasonable") {
    s.vis_lo = 0.65;
    s.vis_hi = 1.0;
    s.lo_open = true;
    s.min_height = 50.0;
  } else if (name == "heavy") {
    s.vis_lo = 0.0;
    s.vis_hi = 0.65;
    s.lo_open = true;
    s.hi_open = true;
    s.min_height = 50.0;
  } else if (name == "partial") {
    s.vis_lo = 0.65;
    s.vis_hi = 1.0;
    s.lo_open = true;
    s.hi_open = true;
    s.min_height = 50.0;
  } else if (name == "bare") {
    s.vis_lo = 0.9;
    s.vis_hi = 1.0;
    s.lo_open = true;
    s.min_height = 50.0;
  } else if (name == "lhv") {
    s.vis_lo = 0.2;
    s.vis_hi = 0.9;
    s.min_height = 50.0;
    s.lhv_threshold = 50.0;
  } else if (name == "all") {
    // keep everything
  } else {
    throw std::invalid_argument("subset_by_name: unknown subset '" + name + "'");
  }
  return s;
}

FilteredAnnotations filter_subset(const std::vector<Annotation>& anns,
                                  const SubsetSpec& spec) {
  FilteredAnnotations out;

  std::set<std::string> images;
  for (const auto& a : anns) {
    images.insert(a.image_id);
  }

  std::set<std::string> included(images);
  if (spec.lhv_threshold) {
    included.clear();
    for (const auto& img : images) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& a : anns) {
        if (a.image_id != img) {
          continue;
        }
        lo = std::min(lo, a.height());
        hi = std::max(hi, a.height());
      }
      if (hi - lo > *spec.lhv_threshold) {
        included.insert(img);
      }
    }
  }

  for (const auto& a : anns) {
    if (!included.count(a.image_id)) {
      continue;
    }
    if (!spec.visibility_ok(a.visibility)) {
      continue;
    }
    if (!(a.height() > spec.min_height)) {
      continue;
    }
    out.kept.push_back(a);
  }
  out.included_images.assign(included.begin(), included.end());
  return out;
}

EvalMatches match_detections_for_eval(const std::vector<Detection>& dets,
                                      const std::vector<Annotation>& gts,
                                      double iou_thr) {
  EvalMatches out;
  out.det_is_tp.assign(dets.size(), false);
  out.gt_matched_score.assign(gts.size(), -1.0);
  out.gt_count = static_cast<int>(gts.size());
  out.det_scores.reserve(dets.size());
  for (const auto& d : dets) {
    out.det_scores.push_back(d.score);
  }

  std::set<std::string> images;
  for (const auto& d : dets) {
    images.insert(d.image_id);
  }
  for (const auto& g : gts) {
    images.insert(g.image_id);
  }
  out.image_count = static_cast<int>(images.size());

  std::unordered_map<std::string, std::vector<int>> gt_of_image;
  for (size_t g = 0; g < gts.size(); ++g) {
    gt_of_image[gts[g].image_id].push_back(static_cast<int>(g));
  }

  // Detections in descending score order (stable on the input order).
  std::vector<int> det_order(dets.size());
  for (size_t i = 0; i < dets.size(); ++i) {
    det_order[i] = static_cast<int>(i);
  }
  std::stable_sort(det_order.begin(), det_order.end(), [&](int a, int b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<bool> gt_taken(gts.size(), false);
  for (int di : det_order) {
    const auto it = gt_of_image.find(dets[di].image_id);
    if (it == gt_of_image.end()) {
      continue;  // no GT in this image: FP
    }
    int best_gt = -1;
    double best_iou = 0.0;
    for (int g : it->second) {
      if (gt_taken[g]) {
        continue;
      }
      const double v = iou(dets[di].box, gts[g].box);
      if (v >= iou_thr && v > best_iou) {
        best_iou = v;
        best_gt = g;
      }
    }
    if (best_gt >= 0) {
      gt_taken[best_gt] = true;
      out.det_is_tp[di] = true;
      out.gt_matched_score[best_gt] = dets[di].score;
    }
  }
  return out;
}

MissRateCurve miss_rate_fppi_curve(const EvalMatches& matches) {
  if (matches.gt_count < 1) {
    throw std::invalid_argument("miss_rate_fppi_curve: no ground truths, miss rate undefined");
  }
  if (matches.image_count < 1) {
    throw std::invalid_argument("miss_rate_fppi_curve: no images");
  }

  // Distinct thresholds, swept from strict to permissive. The +inf
  // sentinel is the reject-everything operating point.
  std::set<double, std::greater<double>> thresholds;
  thresholds.insert(std::numeric_limits<double>::infinity());
  for (double s : matches.det_scores) {
    thresholds.insert(s);
  }

  MissRateCurve curve;
  for (double thr : thresholds) {
    int fp = 0;
    for (size_t i = 0; i < matches.det_scores.size(); ++i) {
      if (matches.det_scores[i] >= thr && !matches.det_is_tp[i]) {
        ++fp;
      }
    }
    int matched = 0;
    for (double s : matches.gt_matched_score) {
      if (s >= thr) {
        ++matched;
      }
    }
    OperatingPoint pt;
    pt.threshold = thr;
    pt.fppi = static_cast<double>(fp) / matches.image_count;
    pt.miss_rate = 1.0 - static_cast<double>(matched) / matches.gt_count;
    curve.points.push_back(pt);
  }
  return curve;
}

double log_average_miss_rate(const MissRateCurve& curve) {
  double log_sum = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double ref = std::pow(10.0, -2.0 + 0.25 * i);
    double miss = 1.0;
    bool found = false;
    for (const auto& pt : curve.points) {
      if (pt.fppi <= ref && (!found || pt.miss_rate < miss)) {
        miss = pt.miss_rate;
        found = true;
      }
    }
    log_sum += std::log(std::max(miss, 1e-10));
  }
  return std::exp(log_sum / 9.0);
}

double inconsistency_rate(const AssignmentResult& result,
                          const std::vector<RankedProposal>& proposals,
                          double similarity_thr) {
  if (!(similarity_thr > 0.0 && similarity_thr < 1.0)) {
    throw std::invalid_argument("inconsistency_rate: similarity_thr must be in (0,1)");
  }

  std::unordered_map<int, const BBox*> box_of;
  for (const auto& p : proposals) {
    box_of[p.id] = &p.box;
  }

  long similar = 0;
  long split = 0;
  for (size_t i = 0; i < result.positives.size(); ++i) {
    for (size_t j = i + 1; j < result.positives.size(); ++j) {
      const auto& a = result.positives[i];
      const auto& b = result.positives[j];
      const auto ba = box_of.find(a.proposal_id);
      const auto bb = box_of.find(b.proposal_id);
      if (ba == box_of.end() || bb == box_of.end()) {
        throw std::invalid_argument("inconsistency_rate: positive id not in proposal list");
      }
      if (iou(*ba->second, *bb->second) >= similarity_thr) {
        ++similar;
        if (a.gt_index != b.gt_index) {
          ++split;
        }
      }
    }
  }
  return similar == 0 ? 0.0 : static_cast<double>(split) / similar;
}

}  // namespace depthmatch
