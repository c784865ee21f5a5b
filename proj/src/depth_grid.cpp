#include "depthmatch/depth_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace depthmatch {

DepthGrid::DepthGrid(int width, int height, double stride,
                     std::vector<double> values)
    : width_(width), height_(height), stride_(stride), values_(std::move(values)) {
  if (width_ < 1 || height_ < 1) {
    throw std::invalid_argument("DepthGrid: width and height must be >= 1");
  }
  if (!(stride_ > 0.0)) {
    throw std::invalid_argument("DepthGrid: stride must be > 0");
  }
  if (values_.size() != static_cast<size_t>(width_) * height_) {
    throw std::invalid_argument("DepthGrid: value count does not match dimensions");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument("DepthGrid: depth values must be finite and > 0");
    }
  }
}

double DepthGrid::extent_diagonal() const {
  return std::hypot(extent_x(), extent_y());
}

double DepthGrid::min_depth() const {
  return *std::min_element(values_.begin(), values_.end());
}

double DepthGrid::max_depth() const {
  return *std::max_element(values_.begin(), values_.end());
}

namespace {

void check_in_extent(const DepthGrid& grid, const Point2& p, const char* what) {
  if (!grid.contains(p)) {
    throw std::out_of_range(std::string(what) + ": point (" +
                            std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") outside grid extent " +
                            std::to_string(grid.extent_x()) + " x " +
                            std::to_string(grid.extent_y()));
  }
}

struct CellPair {
  int sc, sr, ec, er;
};

/// Endpoint cells in canonical orientation. Reversing a monotone path
/// keeps its depth-change sum in exact arithmetic but not in floats, so
/// both the DP and the oracle accumulate from the same canonical end to
/// make Z(a, b) and Z(b, a) bit-identical.
CellPair canonical_cells(const DepthGrid& grid, const Point2& a, const Point2& b) {
  CellPair c{grid.col_of(a.x), grid.row_of(a.y), grid.col_of(b.x), grid.row_of(b.y)};
  if (c.ec < c.sc || (c.ec == c.sc && c.er < c.sr)) {
    std::swap(c.sc, c.ec);
    std::swap(c.sr, c.er);
  }
  return c;
}

}  // namespace

double sample_depth(const DepthGrid& grid, const Point2& p) {
  check_in_extent(grid, p, "sample_depth");
  return grid.at(grid.col_of(p.x), grid.row_of(p.y));
}

double min_variance_path_cost(const DepthGrid& grid, const Point2& start,
                              const Point2& end) {
  check_in_extent(grid, start, "min_variance_path_cost");
  check_in_extent(grid, end, "min_variance_path_cost");

  const auto [sc, sr, ec, er] = canonical_cells(grid, start, end);

  const int nx = std::abs(ec - sc) + 1;
  const int ny = std::abs(er - sr) + 1;
  const int dx = ec >= sc ? 1 : -1;
  const int dy = er >= sr ? 1 : -1;

  // dp[i][j] = min accumulated |ddepth| from the start cell to the cell
  // i monotone steps along x and j along y.
  std::vector<double> dp(static_cast<size_t>(nx) * ny);
  auto cell_depth = [&](int i, int j) {
    return grid.at(sc + i * dx, sr + j * dy);
  };
  auto dpv = [&](int i, int j) -> double& {
    return dp[static_cast<size_t>(j) * nx + i];
  };

  dpv(0, 0) = 0.0;
  for (int i = 1; i < nx; ++i) {
    dpv(i, 0) = dpv(i - 1, 0) + std::abs(cell_depth(i, 0) - cell_depth(i - 1, 0));
  }
  for (int j = 1; j < ny; ++j) {
    dpv(0, j) = dpv(0, j - 1) + std::abs(cell_depth(0, j) - cell_depth(0, j - 1));
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const double from_x = dpv(i - 1, j) + std::abs(cell_depth(i, j) - cell_depth(i - 1, j));
      const double from_y = dpv(i, j - 1) + std::abs(cell_depth(i, j) - cell_depth(i, j - 1));
      dpv(i, j) = std::min(from_x, from_y);
    }
  }
  return dpv(nx - 1, ny - 1);
}

namespace {

void enumerate_paths(const DepthGrid& grid, int col, int row, int ec, int er,
                     int dx, int dy, double acc, double& best) {
  if (col == ec && row == er) {
    best = std::min(best, acc);
    return;
  }
  if (col != ec) {
    const double step = std::abs(grid.at(col + dx, row) - grid.at(col, row));
    enumerate_paths(grid, col + dx, row, ec, er, dx, dy, acc + step, best);
  }
  if (row != er) {
    const double step = std::abs(grid.at(col, row + dy) - grid.at(col, row));
    enumerate_paths(grid, col, row + dy, ec, er, dx, dy, acc + step, best);
  }
}

}  // namespace

double brute_force_path_cost(const DepthGrid& grid, const Point2& start,
                             const Point2& end) {
  check_in_extent(grid, start, "brute_force_path_cost");
  check_in_extent(grid, end, "brute_force_path_cost");

  const auto [sc, sr, ec, er] = canonical_cells(grid, start, end);

  const int nx = std::abs(ec - sc) + 1;
  const int ny = std::abs(er - sr) + 1;
  if (nx > 7 || ny > 7) {
    throw std::invalid_argument(
        "brute_force_path_cost: rectangle " + std::to_string(nx) + "x" +
        std::to_string(ny) + " exceeds the 7x7 oracle guard");
  }

  double best = std::numeric_limits<double>::infinity();
  enumerate_paths(grid, sc, sr, ec, er, ec >= sc ? 1 : -1, er >= sr ? 1 : -1,
                  0.0, best);
  return best;
}

PathCost matching_cost(const BBox& gt, const BBox& proposal,
                       const DepthGrid& grid, const CostWeights& w) {
  PathCost c;
  c.d_cost = manhattan_center_distance(gt, proposal);
  c.z_cost = min_variance_path_cost(grid, center(gt), center(proposal));
  c.total = w.lambda_d * c.d_cost + w.lambda_z * c.z_cost;
  return c;
}

CostWeights normalized_weights(const DepthGrid& grid, const CostWeights& w) {
  const double diag = grid.extent_diagonal();
  const double range = grid.max_depth() - grid.min_depth();
  CostWeights out;
  out.lambda_d = w.lambda_d / diag;
  out.lambda_z = range > 0.0 ? w.lambda_z / range : w.lambda_z;
  return out;
}

}  // namespace depthmatch
