#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "depthmatch/assign.hpp"
#include "depthmatch/eval.hpp"
#include "depthmatch/rng.hpp"
#include "depthmatch/scenesim.hpp"
#include "test_support.hpp"

using namespace depthmatch;

namespace {

DepthGrid flat_grid(int w, int h, double stride, double depth) {
  return DepthGrid(w, h, stride, std::vector<double>(w * h, depth));
}

BBox box_at(double cx, double cy, double w, double h) {
  return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

std::vector<int> gt_of_positive(const AssignmentResult& r, int proposal_id) {
  std::vector<int> out;
  for (const auto& a : r.positives) {
    if (a.proposal_id == proposal_id) {
      out.push_back(a.gt_index);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("input validation") {
  const DepthGrid g = flat_grid(10, 10, 4.0, 8.0);
  AssignerConfig cfg;
  const std::vector<RankedProposal> props{{box_at(10, 10, 4, 4), 0.5, 0}};
  const std::vector<BBox> gts{box_at(12, 12, 6, 6)};

  CHECK_THROWS_AS(assign_depth_guided({}, props, g, cfg), std::invalid_argument);
  CHECK_THROWS_AS(assign_depth_guided(gts, {}, g, cfg), std::invalid_argument);
  CHECK_THROWS_AS(assign_iou({}, props, cfg), std::invalid_argument);

  std::vector<RankedProposal> dup = props;
  dup.push_back({box_at(11, 11, 4, 4), 0.4, 0});
  CHECK_THROWS_AS(assign_depth_guided(gts, dup, g, cfg), std::invalid_argument);

  AssignerConfig bad = cfg;
  bad.iou_neg_thr = 0.9;  // above the positive threshold
  CHECK_THROWS_AS(assign_depth_guided(gts, props, g, bad), std::invalid_argument);
}

TEST_CASE("single GT with capacity two keeps the two cheapest proposals") {
  const DepthGrid g = flat_grid(30, 30, 4.0, 10.0);
  const std::vector<BBox> gts{box_at(60, 60, 20, 40)};

  // Costs are pure center distances: 1, 2 and 3 pixels.
  std::vector<RankedProposal> props{
      {box_at(61, 60, 20, 40), 0.9, 0},
      {box_at(60, 62, 20, 40), 0.8, 1},
      {box_at(100, 100, 4, 4), 0.7, 2},  // cost 80, low IoU
  };
  // Make the third clearly the most expensive and a negative candidate.
  AssignerConfig cfg;
  cfg.n_pos = 2;  // capacity = max(1, 2/1) = 2
  cfg.n_neg = 4;

  const AssignmentResult r = assign_depth_guided(gts, props, g, cfg);
  REQUIRE(r.positives.size() == 2);
  std::set<int> ids;
  for (const auto& a : r.positives) {
    ids.insert(a.proposal_id);
    CHECK(a.gt_index == 0);
  }
  CHECK(ids == std::set<int>{0, 1});
  CHECK(r.pending.empty());
  CHECK(r.evictions.empty());
  // The leftover proposal is background-like and lands in the negatives.
  CHECK(r.negatives == std::vector<int>{2});
}

TEST_CASE("improving late proposal evicts the worst member to pending") {
  const DepthGrid g = flat_grid(30, 30, 4.0, 10.0);
  const std::vector<BBox> gts{box_at(60, 60, 30, 50)};

  // High-confidence distant proposal claims first; the cheaper
  // low-confidence one displaces it.
  std::vector<RankedProposal> props{
      {box_at(80, 60, 30, 50), 0.9, 0},  // cost 20
      {box_at(62, 60, 30, 50), 0.4, 1},  // cost 2
  };
  AssignerConfig cfg;
  cfg.n_pos = 1;
  cfg.n_neg = 2;

  const AssignmentResult r = assign_depth_guided(gts, props, g, cfg);
  REQUIRE(r.positives.size() == 1);
  CHECK(r.positives[0].proposal_id == 1);
  REQUIRE(r.evictions.size() == 1);
  CHECK(r.evictions[0].proposal_id == 0);
  CHECK(r.evictions[0].gt_index == 0);
  CHECK(r.evictions[0].cost == 20.0);
  // The displaced proposal is either still pending or mined as a negative.
  const bool in_pending =
      std::find(r.pending.begin(), r.pending.end(), 0) != r.pending.end();
  const bool in_negatives =
      std::find(r.negatives.begin(), r.negatives.end(), 0) != r.negatives.end();
  CHECK((in_pending || in_negatives));
  CHECK(testsupport::check_eviction_dominance(r).empty());
}

TEST_CASE("distinct plateaus dominate small center offsets") {
  // Left half depth 5, right half depth 35; a GT on each plateau.
  std::vector<double> values;
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 40; ++c) {
      values.push_back(c < 20 ? 5.0 : 35.0);
    }
  }
  const DepthGrid g(40, 20, 4.0, std::move(values));

  const std::vector<BBox> gts{box_at(40, 40, 30, 60), box_at(120, 40, 30, 60)};
  // Proposals on each plateau, including ones whose centers lean toward
  // the midline (slightly closer to the wrong GT in pure distance).
  std::vector<RankedProposal> props{
      {box_at(44, 40, 30, 60), 0.9, 0},   // left plateau
      {box_at(74, 40, 30, 60), 0.8, 1},   // left plateau, closer to GT2's x
      {box_at(116, 40, 30, 60), 0.9, 2},  // right plateau
      {box_at(86, 40, 30, 60), 0.8, 3},   // right plateau, closer to GT1's x
  };
  AssignerConfig cfg;
  cfg.n_pos = 8;
  cfg.n_neg = 0;

  const AssignmentResult r = assign_depth_guided(gts, props, g, cfg);
  CHECK(gt_of_positive(r, 0) == std::vector<int>{0});
  CHECK(gt_of_positive(r, 1) == std::vector<int>{0});
  CHECK(gt_of_positive(r, 2) == std::vector<int>{1});
  CHECK(gt_of_positive(r, 3) == std::vector<int>{1});
}

TEST_CASE("constant depth degenerates to nearest-center matching") {
  Rng rng(7);
  for (int it = 0; it < 40; ++it) {
    const DepthGrid g = flat_grid(25, 25, 4.0, 12.0);
    const int m = 1 + static_cast<int>(rng.uniform_index(3));
    const int n = 1 + static_cast<int>(rng.uniform_index(8));
    std::vector<BBox> gts;
    std::vector<RankedProposal> props;
    for (int i = 0; i < m; ++i) {
      gts.push_back(box_at(rng.uniform(10, 90), rng.uniform(10, 90), 10, 10));
    }
    for (int p = 0; p < n; ++p) {
      props.push_back({box_at(rng.uniform(10, 90), rng.uniform(10, 90), 10, 10),
                       rng.uniform01(), p});
    }
    AssignerConfig cfg;
    cfg.n_pos = 1 + static_cast<int>(rng.uniform_index(6));
    cfg.n_neg = 0;
    const AssignmentResult got = assign_depth_guided(gts, props, g, cfg);

    // Independent oracle: the same ranked greedy process with plain
    // Manhattan center distances (no grid involved).
    struct Slot {
      int id;
      double cost;
    };
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (props[a].confidence != props[b].confidence)
        return props[a].confidence > props[b].confidence;
      return props[a].id < props[b].id;
    });
    const int cap = std::max(1, cfg.n_pos / m);
    int budget = cfg.n_pos;
    std::vector<std::vector<Slot>> held(m);
    std::vector<std::pair<int, int>> expected;  // (proposal id, gt)
    for (int pi : order) {
      int best = 0;
      double bc = manhattan_center_distance(gts[0], props[pi].box);
      for (int gi = 1; gi < m; ++gi) {
        const double c = manhattan_center_distance(gts[gi], props[pi].box);
        if (c < bc) {
          bc = c;
          best = gi;
        }
      }
      auto& slots = held[best];
      if (static_cast<int>(slots.size()) < cap && budget > 0) {
        slots.push_back({props[pi].id, bc});
        --budget;
        continue;
      }
      if (slots.empty()) continue;
      size_t worst = 0;
      for (size_t k = 1; k < slots.size(); ++k) {
        if (slots[k].cost > slots[worst].cost) worst = k;
      }
      if (bc < slots[worst].cost) {
        slots[worst] = {props[pi].id, bc};
      }
    }
    for (int gi = 0; gi < m; ++gi) {
      for (const auto& s : held[gi]) {
        expected.emplace_back(s.id, gi);
      }
    }
    std::sort(expected.begin(), expected.end());
    std::vector<std::pair<int, int>> actual;
    for (const auto& a : got.positives) {
      actual.emplace_back(a.proposal_id, a.gt_index);
    }
    std::sort(actual.begin(), actual.end());
    CHECK(actual == expected);
  }
}

TEST_CASE("iou baseline examples") {
  AssignerConfig cfg;
  cfg.n_neg = 8;

  SUBCASE("identical proposal is a positive with IoU 1") {
    const std::vector<BBox> gts{box_at(50, 50, 20, 40)};
    const std::vector<RankedProposal> props{{box_at(50, 50, 20, 40), 0.9, 0}};
    const AssignmentResult r = assign_iou(gts, props, cfg);
    REQUIRE(r.positives.size() == 1);
    CHECK(r.positives[0].gt_index == 0);
    CHECK(r.positives[0].cost.total == 0.0);  // stored as 1 - IoU
  }

  SUBCASE("max IoU below the negative threshold is a negative") {
    const std::vector<BBox> gts{box_at(50, 50, 20, 40)};
    const std::vector<RankedProposal> props{
        {box_at(200, 200, 20, 40), 0.9, 0},  // IoU 0 -> negative
        {box_at(58, 50, 20, 40), 0.8, 1},    // IoU 0.43 -> ignore band
    };
    const AssignmentResult r = assign_iou(gts, props, cfg);
    CHECK(r.positives.empty());
    CHECK(r.negatives == std::vector<int>{0});
    CHECK(r.pending.empty());
  }

  SUBCASE("argmax rule picks the higher IoU") {
    // Two equal-size GTs; the proposal overlaps one slightly more.
    const std::vector<BBox> gts{{0, 0, 20, 40}, {22, 0, 42, 40}};
    // Proposal straddling both, biased left.
    const std::vector<RankedProposal> props{{{4, 0, 24, 40}, 0.9, 0}};
    const double i0 = iou(props[0].box, gts[0]);
    const double i1 = iou(props[0].box, gts[1]);
    CHECK(i0 > i1);
    CHECK(i0 >= 0.5);
    const AssignmentResult r = assign_iou(gts, props, cfg);
    REQUIRE(r.positives.size() == 1);
    CHECK(r.positives[0].gt_index == 0);
  }
}

TEST_CASE("iou baseline truncates by descending IoU") {
  const std::vector<BBox> gts{box_at(50, 50, 20, 40)};
  std::vector<RankedProposal> props;
  for (int i = 0; i < 6; ++i) {
    props.push_back({box_at(50.0 + i, 50, 20, 40), 0.5, i});
  }
  AssignerConfig cfg;
  cfg.n_pos = 3;
  cfg.n_neg = 0;
  const AssignmentResult r = assign_iou(gts, props, cfg);
  REQUIRE(r.positives.size() == 3);
  std::set<int> ids;
  for (const auto& a : r.positives) {
    ids.insert(a.proposal_id);
  }
  CHECK(ids == std::set<int>{0, 1, 2});  // the least-shifted boxes
}

TEST_CASE("per-level assignment") {
  AssignerConfig cfg;
  cfg.n_neg = 0;

  SUBCASE("single-level instances match the plain assigner") {
    const DepthGrid g = flat_grid(40, 40, 4.0, 9.0);
    const std::vector<BBox> gts{box_at(40, 40, 20, 40), box_at(100, 100, 24, 44)};
    std::vector<RankedProposal> props;
    for (int i = 0; i < 8; ++i) {
      props.push_back({box_at(30.0 + 12 * i, 40.0 + 8 * i, 20, 40),
                       0.9 - 0.05 * i, i});
    }
    // all scales well under 64
    const AssignmentResult a = assign_depth_guided(gts, props, g, cfg);
    const AssignmentResult b = assign_per_level(gts, props, g, cfg);
    CHECK(testsupport::results_equal(a, b));
  }

  SUBCASE("GT and proposal on different levels never match") {
    const DepthGrid g = flat_grid(100, 100, 4.0, 9.0);
    const std::vector<BBox> gts{box_at(100, 100, 60, 60)};       // scale 60 -> C3
    const std::vector<RankedProposal> props{{box_at(100, 100, 70, 70), 0.9, 0}};  // 70 -> C4
    const AssignmentResult r = assign_per_level(gts, props, g, cfg);
    CHECK(r.positives.empty());
    CHECK(r.unassigned_gts == std::vector<int>{0});
  }

  SUBCASE("mixed scales claim only same-level proposals") {
    const DepthGrid g = flat_grid(200, 150, 4.0, 9.0);
    const std::vector<BBox> gts{box_at(100, 100, 60, 60),     // C3
                                box_at(400, 300, 300, 300)};  // C5
    std::vector<RankedProposal> props{
        {box_at(104, 100, 58, 58), 0.9, 0},    // C3
        {box_at(396, 300, 290, 290), 0.9, 1},  // C5
        {box_at(110, 104, 62, 62), 0.8, 2},    // C3
    };
    const AssignmentResult r = assign_per_level(gts, props, g, cfg);
    CHECK(gt_of_positive(r, 0) == std::vector<int>{0});
    CHECK(gt_of_positive(r, 1) == std::vector<int>{1});
    CHECK(gt_of_positive(r, 2) == std::vector<int>{0});
  }
}

TEST_CASE("fill_negatives pools") {
  const std::vector<BBox> gts{box_at(50, 50, 20, 40)};

  SUBCASE("single-pool case: seeded picks from the low-IoU pool") {
    std::vector<RankedProposal> props;
    for (int i = 0; i < 10; ++i) {
      props.push_back({box_at(200.0 + 30 * i, 300, 10, 20), 0.1, i});
    }
    AssignmentResult partial;
    partial.per_gt_capacity = {4};
    partial.per_gt_count = {0};
    AssignerConfig cfg;
    cfg.n_neg = 4;
    cfg.rng_seed = 42;
    const AssignmentResult r = fill_negatives(partial, gts, props, cfg);
    CHECK(r.negatives.size() == 4);
    const AssignmentResult again = fill_negatives(partial, gts, props, cfg);
    CHECK(again.negatives == r.negatives);
  }

  SUBCASE("half-and-half: 4 from pending, 4 from the pool") {
    std::vector<RankedProposal> props;
    for (int i = 0; i < 12; ++i) {
      props.push_back({box_at(200.0 + 30 * i, 300, 10, 20), 0.1, i});
    }
    AssignmentResult partial;
    partial.pending = {0, 1, 2, 3, 4, 5};  // 6 pending, pool = {6..11}
    partial.per_gt_capacity = {4};
    partial.per_gt_count = {0};
    AssignerConfig cfg;
    cfg.n_neg = 8;
    cfg.rng_seed = 7;
    const AssignmentResult r = fill_negatives(partial, gts, props, cfg);
    CHECK(r.negatives.size() == 8);
    int from_pending = 0;
    for (int id : r.negatives) {
      if (id <= 5) {
        ++from_pending;
      }
    }
    CHECK(from_pending == 4);
    CHECK(r.pending.size() == 2);  // the unselected pending ids remain
    // moved ids are no longer pending
    for (int id : r.negatives) {
      CHECK(std::find(r.pending.begin(), r.pending.end(), id) == r.pending.end());
    }
  }

  SUBCASE("no candidates yields an empty negative set") {
    const std::vector<RankedProposal> props{{box_at(50, 50, 20, 40), 0.9, 0}};
    AssignmentResult partial;
    partial.positives.push_back({0, 0, {}, 0});
    partial.per_gt_capacity = {4};
    partial.per_gt_count = {1};
    AssignerConfig cfg;
    cfg.n_neg = 8;
    const AssignmentResult r = fill_negatives(partial, gts, props, cfg);
    CHECK(r.negatives.empty());
  }
}

TEST_CASE("figure-1 fixture: baseline splits, depth-guided unites") {
  const Scene s = figure1_scenario();
  std::vector<BBox> gts;
  for (const auto& g : s.gt_boxes) {
    gts.push_back(g.box);
  }
  const AssignerConfig cfg = figure1_assigner_config();

  const AssignmentResult base = assign_iou(gts, s.proposals, cfg);
  CHECK(gt_of_positive(base, 0) == std::vector<int>{0});  // P1 -> G1
  CHECK(gt_of_positive(base, 1) == std::vector<int>{1});  // P2 -> G2

  const AssignmentResult depth = assign_depth_guided(gts, s.proposals, s.depth, cfg);
  CHECK(gt_of_positive(depth, 0) == std::vector<int>{1});  // P1 -> G2
  CHECK(gt_of_positive(depth, 1) == std::vector<int>{1});  // P2 -> G2

  CHECK(inconsistency_rate(base, s.proposals, 0.3) > 0.0);
  CHECK(inconsistency_rate(depth, s.proposals, 0.3) == 0.0);
}

TEST_CASE("fuzzed invariants over random instances") {
  Rng rng(1234);
  for (int it = 0; it < 150; ++it) {
    const testsupport::Instance inst = testsupport::random_instance(rng);

    const AssignmentResult r =
        assign_depth_guided(inst.gts, inst.proposals, inst.grid, inst.cfg);
    CHECK(testsupport::check_partition_and_capacity(r, inst.gts.size(),
                                                    inst.cfg.n_pos,
                                                    inst.cfg.n_neg) == "");
    CHECK(testsupport::check_eviction_dominance(r) == "");

    const AssignmentResult r2 =
        assign_depth_guided(inst.gts, inst.proposals, inst.grid, inst.cfg);
    CHECK(testsupport::results_equal(r, r2));

    const AssignmentResult ri = assign_iou(inst.gts, inst.proposals, inst.cfg);
    CHECK(testsupport::check_partition_and_capacity(ri, inst.gts.size(),
                                                    inst.cfg.n_pos,
                                                    inst.cfg.n_neg) == "");
    CHECK(ri.pending.empty());

    const AssignmentResult rl =
        assign_per_level(inst.gts, inst.proposals, inst.grid, inst.cfg);
    CHECK(testsupport::check_partition_and_capacity(rl, inst.gts.size(),
                                                    inst.cfg.n_pos,
                                                    inst.cfg.n_neg) == "");
    CHECK(testsupport::check_eviction_dominance(rl) == "");
  }
}
