#include "depthmatch/geometry.hpp"

#include <algorithm>
#include <limits>

namespace depthmatch {

Point2 center(const BBox& b) {
  return {(b.x1 + b.x2) * 0.5, (b.y1 + b.y2) * 0.5};
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (ix <= 0.0 || iy <= 0.0) {
    return 0.0;
  }
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return inter / uni;
}

double manhattan_center_distance(const BBox& a, const BBox& b) {
  const Point2 ca = center(a);
  const Point2 cb = center(b);
  return std::abs(ca.x - cb.x) + std::abs(ca.y - cb.y);
}

double box_scale(const BBox& b) {
  return std::sqrt(b.area());
}

LevelRanges::LevelRanges(std::vector<Range> ranges, int first_level)
    : ranges_(std::move(ranges)), first_level_(first_level) {
  if (ranges_.empty()) {
    throw std::invalid_argument("LevelRanges: need at least one interval");
  }
  if (ranges_.front().lower != 0.0) {
    throw std::invalid_argument("LevelRanges: first interval must start at 0");
  }
  for (size_t i = 0; i + 1 < ranges_.size(); ++i) {
    if (ranges_[i].upper != ranges_[i + 1].lower) {
      throw std::invalid_argument("LevelRanges: intervals must be contiguous");
    }
    if (!(ranges_[i].lower < ranges_[i].upper)) {
      throw std::invalid_argument("LevelRanges: empty interval");
    }
  }
  if (ranges_.back().upper != std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("LevelRanges: last upper bound must be +inf");
  }
}

LevelRanges LevelRanges::standard() {
  const double inf = std::numeric_limits<double>::infinity();
  return LevelRanges(
      {{0.0, 64.0}, {64.0, 128.0}, {128.0, 256.0}, {256.0, 512.0}, {512.0, inf}},
      /*first_level=*/3);
}

std::string LevelRanges::label(int index) const {
  return "C" + std::to_string(first_level_ + index);
}

int assign_level(double scale, const LevelRanges& ranges) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("assign_level: degenerate box, scale " +
                                std::to_string(scale) + " is not positive");
  }
  for (int i = 0; i < ranges.level_count(); ++i) {
    const auto& r = ranges.range(i);
    if (scale > r.lower && scale <= r.upper) {
      return i;
    }
  }
  // Unreachable for a valid partition of (0, +inf).
  throw std::logic_error("assign_level: ranges do not cover scale");
}

}  // namespace depthmatch
