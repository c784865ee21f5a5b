#pragma once

#include <array>
#include <vector>

#include "depthmatch/assign.hpp"
#include "depthmatch/geometry.hpp"

namespace depthmatch {

struct LossConfig {
  double alpha = 1.0;   // regression weight
  double beta = 1.0;    // classification weight
  double gamma = 0.01;  // cost-prediction weight
  double kappa = 1.0;   // squash scale applied to costs before the sigmoid

  void validate() const;
};

struct ProposalPrediction {
  int proposal_id = 0;
  double class_score = 0.0;
  BBox regressed_box;
  double predicted_cost = 0.0;
};

struct LossBreakdown {
  double reg_loss = 0.0;
  double cls_loss = 0.0;
  double cost_loss = 0.0;
  double total = 0.0;
};

/// Standard center/log-size deltas mapping `proposal` onto `gt`:
/// (dcx/w_p, dcy/h_p, ln(w_g/w_p), ln(h_g/h_p)).
/// Throws when either box has non-positive width or height.
std::array<double, 4> regression_targets(const BBox& proposal, const BBox& gt);

/// Forward evaluation of the training losses for one assignment:
/// smooth-L1 on the positive regression deltas, binary cross-entropy on
/// positive/negative scores, and a logistic term tying the predicted
/// matching cost to the assignment-time target (both squashed through
/// sigmoid(kappa * cost)). total = alpha*reg + beta*cls + gamma*cost.
/// Every positive and negative proposal id must have a prediction.
LossBreakdown assignment_losses(const std::vector<ProposalPrediction>& preds,
                                const AssignmentResult& result,
                                const std::vector<BBox>& gts,
                                const LossConfig& cfg);

/// Confidence refinement: score * (1.5 - sigmoid(|actual - predicted|)).
/// The factor is 1 when the costs agree and decays toward 0.5 as they
/// diverge.
double rescore_confidence(double score, double predicted_cost,
                          double actual_cost);

double sigmoid(double x);

/// Squash scale for the cost logistic term: 1 / (grid diagonal in cells).
double cost_squash_scale(const class DepthGrid& grid);

}  // namespace depthmatch
