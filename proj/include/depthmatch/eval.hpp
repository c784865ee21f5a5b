#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depthmatch/assign.hpp"
#include "depthmatch/geometry.hpp"

namespace depthmatch {

struct Annotation {
  BBox box;
  double visibility = 1.0;
  std::string image_id;

  double height() const { return box.height(); }
};

struct Detection {
  BBox box;
  double score = 0.0;
  std::string image_id;
};

/// Ground-truth subset filter: a visibility interval with open/closed
/// bounds, a minimum pixel height, and an optional per-image large-height-
/// variation predicate (max pairwise GT height difference threshold).
struct SubsetSpec {
  std::string name;
  double vis_lo = 0.0;
  double vis_hi = 1.0;
  bool lo_open = false;
  bool hi_open = false;
  double min_height = 0.0;  // kept when height > min_height
  std::optional<double> lhv_threshold;

  bool visibility_ok(double v) const;
};

/// Named subsets: reasonable, heavy, partial, bare, lhv, all.
SubsetSpec subset_by_name(const std::string& name);

struct FilteredAnnotations {
  std::vector<Annotation> kept;
  std::vector<std::string> included_images;  // images passing the LHV predicate
};

/// Applies the subset filter. For LHV specs, images whose max pairwise GT
/// height difference does not exceed the threshold are dropped entirely
/// (their ids are omitted from included_images); the visibility/height
/// rules then apply to the surviving annotations. Order-preserving and
/// idempotent.
FilteredAnnotations filter_subset(const std::vector<Annotation>& anns,
                                  const SubsetSpec& spec);

/// Greedy score-ordered matching outcome over a full detection set.
struct EvalMatches {
  std::vector<bool> det_is_tp;           // aligned with the input detections
  std::vector<double> gt_matched_score;  // per GT: matching det score, or -1
  int image_count = 0;
  int gt_count = 0;
  std::vector<double> det_scores;  // aligned with the input detections
};

/// Per-image greedy evaluation matching: detections in descending score
/// order each claim the highest-IoU unmatched GT with IoU >= iou_thr
/// (ties to the lower GT index). Matched detections are true positives.
EvalMatches match_detections_for_eval(const std::vector<Detection>& dets,
                                      const std::vector<Annotation>& gts,
                                      double iou_thr);

struct OperatingPoint {
  double threshold;  // detections with score >= threshold are kept
  double fppi;
  double miss_rate;
};

struct MissRateCurve {
  std::vector<OperatingPoint> points;  // descending threshold
};

/// Sweeps the distinct score set (plus the reject-everything sentinel at
/// +inf). Throws when there are no ground truths.
MissRateCurve miss_rate_fppi_curve(const EvalMatches& matches);

/// Log-average miss rate: geometric mean of the miss rates at 9 log-spaced
/// FPPI references in [1e-2, 1], taking at each reference the lowest miss
/// among operating points with fppi <= reference (1.0 when none qualifies).
/// Misses are floored at 1e-10 before the log.
double log_average_miss_rate(const MissRateCurve& curve);

/// Fraction of high-overlap positive pairs (IoU >= similarity_thr) that
/// are assigned to different GTs; 0 when no such pair exists. Quantifies
/// inconsistent supervision.
double inconsistency_rate(const AssignmentResult& result,
                          const std::vector<RankedProposal>& proposals,
                          double similarity_thr);

}  // namespace depthmatch
