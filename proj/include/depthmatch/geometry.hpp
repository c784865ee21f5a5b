#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthmatch {

/// Axis-aligned box in continuous pixel coordinates, origin top-left.
/// Corner-exclusive area convention: width = x2 - x1, height = y2 - y1.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const { return x1 <= x2 && y1 <= y2; }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

Point2 center(const BBox& b);

/// Intersection over union. Degenerate boxes (zero union) yield 0.
double iou(const BBox& a, const BBox& b);

/// |dcx| + |dcy| between the two box centers, in pixels.
double manhattan_center_distance(const BBox& a, const BBox& b);

/// sqrt(area), the scale measure used for level binning.
double box_scale(const BBox& b);

/// Contiguous (lower, upper] scale intervals, one per pyramid level.
/// The intervals partition (0, +inf): each upper equals the next lower,
/// the last upper is +inf.
class LevelRanges {
 public:
  struct Range {
    double lower;  // exclusive
    double upper;  // inclusive (+inf for the last)
  };

  explicit LevelRanges(std::vector<Range> ranges, int first_level = 3);

  /// C3..C7 with bounds (0,64], (64,128], (128,256], (256,512], (512,+inf].
  static LevelRanges standard();

  int level_count() const { return static_cast<int>(ranges_.size()); }
  int first_level() const { return first_level_; }
  const Range& range(int index) const { return ranges_.at(index); }

  /// Label for the index-th level, e.g. "C3".
  std::string label(int index) const;

 private:
  std::vector<Range> ranges_;
  int first_level_;
};

/// Maps a positive scale to the unique level whose interval contains it.
/// Returns the 0-based level index into `ranges`. Throws on scale <= 0.
int assign_level(double scale, const LevelRanges& ranges);

}  // namespace depthmatch
