#pragma once

#include <vector>

#include "depthmatch/geometry.hpp"

namespace depthmatch {

/// Dense row-major grid of scene depth (meters, > 0). One cell covers
/// `stride` x `stride` pixels; cell (0, 0) is the image's top-left corner.
class DepthGrid {
 public:
  DepthGrid(int width, int height, double stride, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  double stride() const { return stride_; }

  double at(int col, int row) const { return values_[row * width_ + col]; }
  double& at(int col, int row) { return values_[row * width_ + col]; }
  const std::vector<double>& values() const { return values_; }

  /// Pixel extent covered by the grid.
  double extent_x() const { return width_ * stride_; }
  double extent_y() const { return height_ * stride_; }
  double extent_diagonal() const;

  bool contains(const Point2& p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < extent_x() && p.y < extent_y();
  }

  /// Cell column/row containing a pixel position (no bounds check).
  int col_of(double px) const { return static_cast<int>(px / stride_); }
  int row_of(double py) const { return static_cast<int>(py / stride_); }

  double min_depth() const;
  double max_depth() const;

 private:
  int width_;
  int height_;
  double stride_;
  std::vector<double> values_;
};

/// Depth of the cell containing p (nearest cell, no interpolation).
/// Throws std::out_of_range naming the offending coordinate when p lies
/// outside the grid extent.
double sample_depth(const DepthGrid& grid, const Point2& p);

/// Z term of the matching cost: minimum, over all monotone 4-connected
/// lattice paths between the cells containing `start` and `end`, of the
/// accumulated absolute depth change between adjacent cells. Monotone
/// means every step moves toward the end cell in x or y, so all candidate
/// paths share the minimal Manhattan cell length. Dynamic programming over
/// the rectangle spanned by the two cells, O(cells in rectangle).
double min_variance_path_cost(const DepthGrid& grid, const Point2& start,
                              const Point2& end);

/// Exhaustive path enumeration used as an oracle for
/// min_variance_path_cost. Throws when the spanned rectangle exceeds
/// 7x7 cells.
double brute_force_path_cost(const DepthGrid& grid, const Point2& start,
                             const Point2& end);

struct CostWeights {
  double lambda_d = 1.0;
  double lambda_z = 1.0;
};

struct PathCost {
  double d_cost = 0.0;  // pixels
  double z_cost = 0.0;  // depth units
  double total = 0.0;   // lambda_d * d_cost + lambda_z * z_cost
};

/// Combined matching cost between a ground-truth box and a proposal:
/// Manhattan center distance plus the minimum-variance path cost between
/// the two centers, weighted by `w`.
PathCost matching_cost(const BBox& gt, const BBox& proposal,
                       const DepthGrid& grid, const CostWeights& w);

/// Weights rescaled so the distance term is measured in image diagonals
/// and the depth term in units of the grid's depth range. Makes the two
/// heterogeneous terms commensurate (`--normalize` mode).
CostWeights normalized_weights(const DepthGrid& grid, const CostWeights& w);

}  // namespace depthmatch
