#include "depthmatch/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "depthmatch/rng.hpp"

namespace depthmatch {

void AssignerConfig::validate() const {
  if (n_pos < 1) {
    throw std::invalid_argument("AssignerConfig: n_pos must be >= 1");
  }
  if (n_neg < 0) {
    throw std::invalid_argument("AssignerConfig: n_neg must be >= 0");
  }
  if (!(iou_neg_thr >= 0.0 && iou_neg_thr <= iou_pos_thr && iou_pos_thr <= 1.0)) {
    throw std::invalid_argument(
        "AssignerConfig: need 0 <= iou_neg_thr <= iou_pos_thr <= 1");
  }
  if (cost_weights.lambda_d < 0.0 || cost_weights.lambda_z < 0.0 ||
      (cost_weights.lambda_d == 0.0 && cost_weights.lambda_z == 0.0)) {
    throw std::invalid_argument(
        "AssignerConfig: cost weights must be >= 0 and not both zero");
  }
}

namespace {

void check_inputs(const std::vector<BBox>& gts,
                  const std::vector<RankedProposal>& proposals,
                  const AssignerConfig& cfg) {
  cfg.validate();
  if (gts.empty()) {
    throw std::invalid_argument("assignment: empty ground-truth list");
  }
  if (proposals.empty()) {
    throw std::invalid_argument("assignment: empty proposal list");
  }
  std::unordered_set<int> ids;
  for (const auto& p : proposals) {
    if (!ids.insert(p.id).second) {
      throw std::invalid_argument("assignment: duplicate proposal id " +
                                  std::to_string(p.id));
    }
    if (p.confidence < 0.0 || p.confidence > 1.0) {
      throw std::invalid_argument("assignment: proposal " + std::to_string(p.id) +
                                  " confidence outside [0,1]");
    }
  }
}

int shared_capacity(int n_pos, int gt_count) {
  return std::max(1, n_pos / gt_count);
}

/// Confidence-ranked processing order (ties to the lower id).
std::vector<int> ranked_order(const std::vector<RankedProposal>& proposals) {
  std::vector<int> order(proposals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (proposals[a].confidence != proposals[b].confidence) {
      return proposals[a].confidence > proposals[b].confidence;
    }
    return proposals[a].id < proposals[b].id;
  });
  return order;
}

struct Member {
  int prop_index;
  PathCost cost;
  int assigned_step;
};

/// Core of the search assignment: positives, pending set and eviction log.
/// `gt_subset` / `prop_subset` select the instance (used by the per-level
/// variant); capacity is per GT, `budget` caps total positives and is
/// shared across levels. step_counter threads the global claim sequence.
void assign_positives_core(const std::vector<BBox>& gts,
                           const std::vector<RankedProposal>& proposals,
                           const DepthGrid& grid, const AssignerConfig& cfg,
                           const std::vector<int>& gt_subset,
                           const std::vector<int>& prop_subset, int capacity,
                           int& budget, int& step_counter,
                           AssignmentResult& out) {
  const int m = static_cast<int>(gt_subset.size());

  // Pairwise matching costs for this instance.
  std::vector<std::vector<PathCost>> costs(m);
  for (int gi = 0; gi < m; ++gi) {
    costs[gi].reserve(prop_subset.size());
    for (int pj : prop_subset) {
      costs[gi].push_back(
          matching_cost(gts[gt_subset[gi]], proposals[pj].box, grid,
                        cfg.cost_weights));
    }
  }

  std::vector<RankedProposal> local;
  local.reserve(prop_subset.size());
  for (int pj : prop_subset) {
    local.push_back(proposals[pj]);
  }
  const std::vector<int> order = ranked_order(local);

  std::vector<std::vector<Member>> assigned(m);

  // Proposals are consumed in confidence order. Each pairs with its
  // cheapest admissible GT; a full GT re-compares the candidate against
  // its assigned set and keeps the cheaper members, evicting the largest
  // cost to the pending set.
  for (int lp : order) {
    int best_gt = -1;
    for (int gi = 0; gi < m; ++gi) {
      const double total = costs[gi][lp].total;
      if (!(total <= cfg.max_cost)) {
        continue;
      }
      if (best_gt < 0 || total < costs[best_gt][lp].total) {
        best_gt = gi;
      }
    }
    if (best_gt < 0) {
      continue;  // no admissible GT; the proposal stays ignored
    }

    const PathCost cand_cost = costs[best_gt][lp];
    auto& members = assigned[best_gt];

    if (static_cast<int>(members.size()) < capacity && budget > 0) {
      members.push_back({lp, cand_cost, step_counter});
      out.positives.push_back({local[lp].id, gt_subset[best_gt], cand_cost,
                               step_counter++});
      --budget;
      continue;
    }

    if (members.empty()) {
      continue;  // budget exhausted before this GT received anything
    }

    // Largest-cost member; ties prefer evicting the lower-confidence,
    // then higher-id member.
    int worst = 0;
    for (int k = 1; k < static_cast<int>(members.size()); ++k) {
      const auto& a = members[k];
      const auto& w = members[worst];
      if (a.cost.total > w.cost.total ||
          (a.cost.total == w.cost.total &&
           (local[a.prop_index].confidence < local[w.prop_index].confidence ||
            (local[a.prop_index].confidence == local[w.prop_index].confidence &&
             local[a.prop_index].id > local[w.prop_index].id)))) {
        worst = k;
      }
    }

    if (!(cand_cost.total < members[worst].cost.total)) {
      continue;  // candidate would itself be the largest; leave it unassigned
    }

    const Member removed = members[worst];
    members[worst] = {lp, cand_cost, step_counter};
    out.positives.push_back({local[lp].id, gt_subset[best_gt], cand_cost,
                             step_counter++});
    // Drop the displaced member from the positive log and record the eviction.
    for (auto it = out.positives.begin(); it != out.positives.end(); ++it) {
      if (it->proposal_id == local[removed.prop_index].id &&
          it->gt_index == gt_subset[best_gt]) {
        out.positives.erase(it);
        break;
      }
    }
    out.pending.push_back(local[removed.prop_index].id);
    out.evictions.push_back({local[removed.prop_index].id, gt_subset[best_gt],
                             removed.cost.total, step_counter++,
                             removed.assigned_step});
  }
}

void finalize_counts(const std::vector<BBox>& gts, AssignmentResult& r) {
  r.per_gt_count.assign(gts.size(), 0);
  for (const auto& a : r.positives) {
    ++r.per_gt_count[a.gt_index];
  }
  r.unassigned_gts.clear();
  for (size_t g = 0; g < gts.size(); ++g) {
    if (r.per_gt_count[g] == 0) {
      r.unassigned_gts.push_back(static_cast<int>(g));
    }
  }
}

}  // namespace

AssignmentResult assign_depth_guided(const std::vector<BBox>& gts,
                                     const std::vector<RankedProposal>& proposals,
                                     const DepthGrid& grid,
                                     const AssignerConfig& cfg) {
  check_inputs(gts, proposals, cfg);

  AssignmentResult result;
  const int m = static_cast<int>(gts.size());
  const int capacity = shared_capacity(cfg.n_pos, m);
  result.per_gt_capacity.assign(m, capacity);

  std::vector<int> gt_subset(m);
  std::iota(gt_subset.begin(), gt_subset.end(), 0);
  std::vector<int> prop_subset(proposals.size());
  std::iota(prop_subset.begin(), prop_subset.end(), 0);

  int budget = cfg.n_pos;
  int step = 0;
  assign_positives_core(gts, proposals, grid, cfg, gt_subset, prop_subset,
                        capacity, budget, step, result);
  finalize_counts(gts, result);
  return fill_negatives(std::move(result), gts, proposals, cfg);
}

AssignmentResult assign_iou(const std::vector<BBox>& gts,
                            const std::vector<RankedProposal>& proposals,
                            const AssignerConfig& cfg) {
  check_inputs(gts, proposals, cfg);

  const int m = static_cast<int>(gts.size());
  const int capacity = shared_capacity(cfg.n_pos, m);

  struct Candidate {
    int prop_index;
    int gt_index;
    double iou;
  };
  std::vector<Candidate> candidates;

  for (size_t p = 0; p < proposals.size(); ++p) {
    int best_gt = -1;
    double best = 0.0;
    for (int g = 0; g < m; ++g) {
      const double v = iou(proposals[p].box, gts[g]);
      if (best_gt < 0 || v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best >= cfg.iou_pos_thr) {
      candidates.push_back({static_cast<int>(p), best_gt, best});
    }
  }

  // Keep the best candidates first: descending IoU, ties to the lower id.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const Candidate& a, const Candidate& b) {
                     if (a.iou != b.iou) {
                       return a.iou > b.iou;
                     }
                     return proposals[a.prop_index].id < proposals[b.prop_index].id;
                   });

  AssignmentResult result;
  result.per_gt_capacity.assign(m, capacity);
  std::vector<int> used(m, 0);
  int budget = cfg.n_pos;
  int step = 0;
  for (const auto& c : candidates) {
    if (budget == 0) {
      break;
    }
    if (used[c.gt_index] >= capacity) {
      continue;
    }
    ++used[c.gt_index];
    --budget;
    PathCost cost;
    cost.total = 1.0 - c.iou;
    result.positives.push_back({proposals[c.prop_index].id, c.gt_index, cost,
                                step++});
  }

  finalize_counts(gts, result);
  return fill_negatives(std::move(result), gts, proposals, cfg);
}

AssignmentResult assign_per_level(const std::vector<BBox>& gts,
                                  const std::vector<RankedProposal>& proposals,
                                  const DepthGrid& grid,
                                  const AssignerConfig& cfg) {
  check_inputs(gts, proposals, cfg);

  const int levels = cfg.level_ranges.level_count();
  std::vector<std::vector<int>> gt_by_level(levels);
  std::vector<std::vector<int>> prop_by_level(levels);
  for (size_t g = 0; g < gts.size(); ++g) {
    gt_by_level[assign_level(box_scale(gts[g]), cfg.level_ranges)].push_back(
        static_cast<int>(g));
  }
  for (size_t p = 0; p < proposals.size(); ++p) {
    prop_by_level[assign_level(box_scale(proposals[p].box), cfg.level_ranges)]
        .push_back(static_cast<int>(p));
  }

  AssignmentResult result;
  result.per_gt_capacity.assign(gts.size(), 0);
  int budget = cfg.n_pos;
  int step = 0;
  for (int lvl = 0; lvl < levels; ++lvl) {
    const auto& lvl_gts = gt_by_level[lvl];
    if (lvl_gts.empty()) {
      continue;
    }
    const int capacity = shared_capacity(cfg.n_pos, static_cast<int>(lvl_gts.size()));
    for (int g : lvl_gts) {
      result.per_gt_capacity[g] = capacity;
    }
    if (prop_by_level[lvl].empty()) {
      continue;  // GTs on a proposal-less level stay unassigned
    }
    assign_positives_core(gts, proposals, grid, cfg, lvl_gts,
                          prop_by_level[lvl], capacity, budget, step, result);
  }

  finalize_counts(gts, result);
  return fill_negatives(std::move(result), gts, proposals, cfg);
}

AssignmentResult fill_negatives(AssignmentResult partial,
                                const std::vector<BBox>& gts,
                                const std::vector<RankedProposal>& proposals,
                                const AssignerConfig& cfg) {
  if (!partial.negatives.empty()) {
    throw std::invalid_argument(
        "fill_negatives: partial result already has negatives");
  }

  std::unordered_set<int> taken;
  for (const auto& a : partial.positives) {
    taken.insert(a.proposal_id);
  }
  for (int id : partial.pending) {
    taken.insert(id);
  }

  Rng rng(cfg.rng_seed);

  // Half of the target comes from the pending set, which holds the hard
  // negatives mined during assignment.
  const int pending_target = (cfg.n_neg + 1) / 2;
  const int pending_take =
      std::min(pending_target, static_cast<int>(partial.pending.size()));
  std::vector<int> chosen;
  if (pending_take > 0) {
    const auto picks = rng.sample_without_replacement(
        static_cast<int>(partial.pending.size()), pending_take);
    std::vector<bool> moved(partial.pending.size(), false);
    for (int k : picks) {
      moved[k] = true;
      chosen.push_back(partial.pending[k]);
    }
    std::vector<int> remaining;
    for (size_t k = 0; k < partial.pending.size(); ++k) {
      if (!moved[k]) {
        remaining.push_back(partial.pending[k]);
      }
    }
    partial.pending = std::move(remaining);
  }

  // The remainder is a uniform draw from unassigned proposals that look
  // like background (max IoU below the negative threshold).
  std::vector<int> pool;
  for (const auto& p : proposals) {
    if (taken.count(p.id)) {
      continue;
    }
    double best = 0.0;
    for (const auto& g : gts) {
      best = std::max(best, iou(p.box, g));
    }
    if (best < cfg.iou_neg_thr) {
      pool.push_back(p.id);
    }
  }
  std::sort(pool.begin(), pool.end());

  const int pool_take = std::min(cfg.n_neg - pending_take,
                                 static_cast<int>(pool.size()));
  if (pool_take > 0) {
    const auto picks =
        rng.sample_without_replacement(static_cast<int>(pool.size()), pool_take);
    for (int k : picks) {
      chosen.push_back(pool[k]);
    }
  }

  std::sort(chosen.begin(), chosen.end());
  partial.negatives = std::move(chosen);
  return partial;
}

}  // namespace depthmatch
