#pragma once

#include <cstdint>
#include <vector>

#include "depthmatch/depth_grid.hpp"
#include "depthmatch/geometry.hpp"

namespace depthmatch {

struct AssignerConfig {
  int n_pos = 256;  // total positive budget N_p
  int n_neg = 256;  // total negative budget N_e
  CostWeights cost_weights;
  double max_cost = std::numeric_limits<double>::infinity();
  double iou_pos_thr = 0.5;
  double iou_neg_thr = 0.3;
  LevelRanges level_ranges = LevelRanges::standard();
  uint64_t rng_seed = 0;

  void validate() const;
};

struct RankedProposal {
  BBox box;
  double confidence = 0.0;  // RPN-style objectness in [0,1]
  int id = 0;               // stable caller-provided index
};

struct Assignment {
  int proposal_id;
  int gt_index;
  PathCost cost;
  int step;  // global claim-sequence number, shared with evictions
};

struct Eviction {
  int proposal_id;
  int gt_index;
  double cost;
  int step;           // when the proposal left the positive set
  int assigned_step;  // when it had been claimed
};

/// One assignment run. positives/negatives/pending are pairwise disjoint
/// sets of proposal ids; evictions is the ordered log of proposals pushed
/// out of a full GT (they end up in pending).
struct AssignmentResult {
  std::vector<Assignment> positives;  // in claim order
  std::vector<int> negatives;
  std::vector<int> pending;
  std::vector<Eviction> evictions;
  std::vector<int> per_gt_capacity;
  std::vector<int> per_gt_count;
  std::vector<int> unassigned_gts;  // GTs that received no positive
};

/// Cost-guided search assignment. Proposals are ranked by descending
/// confidence (ties to the lower id). Each GT may hold at most
/// max(1, floor(n_pos / M)) proposals and the positive set never exceeds
/// n_pos overall. Assignment proceeds in rounds over the GTs in index
/// order: a GT below capacity claims the cheapest unassigned proposal
/// whose cost is within max_cost (ties broken by higher confidence, then
/// lower id); a GT at capacity re-compares the claimed candidate against
/// its assigned set and the largest-cost member is evicted to the pending
/// set. Rounds stop once every GT is full, the budget is spent, or no
/// below-capacity GT can claim anything. Negatives are then filled by
/// fill_negatives.
AssignmentResult assign_depth_guided(const std::vector<BBox>& gts,
                                     const std::vector<RankedProposal>& proposals,
                                     const DepthGrid& grid,
                                     const AssignerConfig& cfg);

/// IoU-threshold baseline: every proposal goes to its argmax-IoU GT
/// (ties to the lower GT index); positive when IoU >= iou_pos_thr,
/// negative candidate when max IoU < iou_neg_thr, ignored otherwise.
/// Positives are truncated per GT to the shared capacity and globally to
/// n_pos by descending IoU; negatives are a seeded uniform sample of at
/// most n_neg candidates. Pending is always empty. The stored pair cost
/// is 1 - IoU (d_cost and z_cost are zero).
AssignmentResult assign_iou(const std::vector<BBox>& gts,
                            const std::vector<RankedProposal>& proposals,
                            const AssignerConfig& cfg);

/// Scale-partitioned assignment: GTs and proposals are split by
/// assign_level(box_scale(.)), the search assignment runs independently
/// per level that has both GTs and proposals (capacity recomputed from
/// the level's GT count), and the merged result is completed with one
/// global negative fill. Levels whose GTs see no proposals contribute
/// their GTs to unassigned_gts rather than failing.
AssignmentResult assign_per_level(const std::vector<BBox>& gts,
                                  const std::vector<RankedProposal>& proposals,
                                  const DepthGrid& grid,
                                  const AssignerConfig& cfg);

/// Completes `partial` with up to n_neg negatives: at most ceil(n_neg/2)
/// seeded uniform picks move from the pending set into negatives, the
/// remainder comes from unassigned proposals whose max IoU over the GTs
/// is below iou_neg_thr. Pools short of the target are returned as-is,
/// never padded.
AssignmentResult fill_negatives(AssignmentResult partial,
                                const std::vector<BBox>& gts,
                                const std::vector<RankedProposal>& proposals,
                                const AssignerConfig& cfg);

}  // namespace depthmatch
