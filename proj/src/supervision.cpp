#include "depthmatch/supervision.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "depthmatch/depth_grid.hpp"

namespace depthmatch {

void LossConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0 || kappa <= 0.0) {
    throw std::invalid_argument(
        "LossConfig: weights must be >= 0 and kappa > 0");
  }
}

std::array<double, 4> regression_targets(const BBox& proposal, const BBox& gt) {
  const double wp = proposal.width();
  const double hp = proposal.height();
  if (!(wp > 0.0) || !(hp > 0.0)) {
    throw std::invalid_argument("regression_targets: degenerate proposal box");
  }
  const double wg = gt.width();
  const double hg = gt.height();
  if (!(wg > 0.0) || !(hg > 0.0)) {
    throw std::invalid_argument("regression_targets: degenerate target box");
  }
  const Point2 cp = center(proposal);
  const Point2 cg = center(gt);
  return {(cg.x - cp.x) / wp, (cg.y - cp.y) / hp, std::log(wg / wp),
          std::log(hg / hp)};
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

double smooth_l1(double x) {
  const double ax = std::abs(x);
  return ax < 1.0 ? 0.5 * ax * ax : ax - 0.5;
}

double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

/// Cross-entropy with a (possibly soft) target t against probability p.
double cross_entropy(double t, double p) {
  return -(t * safe_log(p) + (1.0 - t) * safe_log(1.0 - p));
}

}  // namespace

LossBreakdown assignment_losses(const std::vector<ProposalPrediction>& preds,
                                const AssignmentResult& result,
                                const std::vector<BBox>& gts,
                                const LossConfig& cfg) {
  cfg.validate();

  std::unordered_map<int, const ProposalPrediction*> by_id;
  for (const auto& p : preds) {
    by_id[p.proposal_id] = &p;
  }
  auto lookup = [&](int id) -> const ProposalPrediction& {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw std::invalid_argument("assignment_losses: no prediction for proposal " +
                                  std::to_string(id));
    }
    return *it->second;
  };

  LossBreakdown out;

  for (const auto& a : result.positives) {
    const ProposalPrediction& pred = lookup(a.proposal_id);

    // Regression gap between the regressed box and the assigned GT,
    // measured in delta space anchored on the regressed box. Zero exactly
    // when the regressed box equals the GT.
    const BBox& gt = gts.at(a.gt_index);
    const auto deltas = regression_targets(pred.regressed_box, gt);
    for (double d : deltas) {
      out.reg_loss += smooth_l1(d);
    }

    out.cls_loss += cross_entropy(1.0, std::min(1.0, std::max(0.0, pred.class_score)));

    const double t = sigmoid(cfg.kappa * a.cost.total);
    const double p = sigmoid(cfg.kappa * pred.predicted_cost);
    out.cost_loss += cross_entropy(t, p);
  }

  for (int id : result.negatives) {
    const ProposalPrediction& pred = lookup(id);
    out.cls_loss += cross_entropy(0.0, std::min(1.0, std::max(0.0, pred.class_score)));
  }

  out.total = cfg.alpha * out.reg_loss + cfg.beta * out.cls_loss +
              cfg.gamma * out.cost_loss;
  return out;
}

double rescore_confidence(double score, double predicted_cost,
                          double actual_cost) {
  const double delta = std::abs(actual_cost - predicted_cost);
  return score * (1.5 - sigmoid(delta));
}

double cost_squash_scale(const DepthGrid& grid) {
  return 1.0 / std::hypot(static_cast<double>(grid.width()),
                          static_cast<double>(grid.height()));
}

}  // namespace depthmatch
