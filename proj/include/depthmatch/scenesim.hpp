#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depthmatch/assign.hpp"
#include "depthmatch/depth_grid.hpp"
#include "depthmatch/geometry.hpp"

namespace depthmatch {

struct CameraModel {
  double focal = 800.0;        // pixels
  double image_width = 640.0;  // pixels
  double image_height = 480.0;
  double height = 1.4;  // camera height above ground, meters

  void validate() const;
};

struct Pedestrian3D {
  double x = 0.0;       // lateral ground position, meters
  double z = 1.0;       // depth, meters (> 0)
  double height = 1.7;  // meters
  double width = 0.697;
  double visibility = 1.0;
};

struct SceneConfig {
  CameraModel camera;
  int ped_count = 3;
  double z_min = 5.0;
  double z_max = 40.0;
  double height_mean = 1.7;
  double height_std = 0.1;
  double height_lo = 1.4;
  double height_hi = 2.0;
  double aspect = 0.41;  // width / height
  double background_depth = 80.0;
  bool ground_plane = false;  // per-row ground depth instead of a constant
  double depth_stride = 4.0;  // pixels per depth cell
  // Placement constraints used by consistency experiments: force at least
  // min_depth_gap meters between the first two pedestrians and make each
  // pedestrian's box overlap the previous one laterally.
  double min_depth_gap = 0.0;
  bool overlap_adjacent = false;
  // Proposal synthesis.
  int jitter_per_gt = 8;
  int random_proposals = 8;
  double jitter = 0.15;
  double random_box_height_lo = 30.0;
  double random_box_height_hi = 300.0;
  // 0: random-box centers uniform over the image. > 0: centers uniform
  // over the GT cluster's bounding region dilated by this fraction, which
  // concentrates ambiguous boxes around the objects.
  double random_box_focus = 0.0;

  void validate() const;
};

struct GtBox {
  BBox box;
  double visibility = 1.0;
};

struct Scene {
  CameraModel camera;
  std::vector<Pedestrian3D> pedestrians;
  std::vector<GtBox> gt_boxes;
  DepthGrid depth;
  std::vector<RankedProposal> proposals;
  uint64_t seed = 0;
  double background_depth = 80.0;
  bool ground_plane = false;
};

/// Pinhole projection of a pedestrian standing on the ground plane:
/// box height = focal * height / z, centered on the projected position,
/// feet at the ground's image row.
BBox project_pedestrian(const CameraModel& cam, const Pedestrian3D& ped);

/// Deterministic synthetic scene: pedestrian sizes from a clamped normal
/// prior, depths uniform (optionally gap/overlap constrained), projected
/// GT boxes, rendered depth grid, and jittered proposals.
Scene generate_scene(const SceneConfig& cfg, uint64_t seed);

/// Rasterizes scene depth at the given cell stride: each cell takes the
/// depth of the nearest pedestrian whose box covers the cell center,
/// otherwise the background depth (per-row ground depth in ground-plane
/// mode).
DepthGrid render_depth_map(const CameraModel& cam,
                           const std::vector<Pedestrian3D>& peds,
                           const std::vector<GtBox>& gt_boxes, double stride,
                           double background_depth, bool ground_plane);

/// Proposal synthesis: jitter_per_gt noisy copies of every GT box plus
/// random background boxes; confidence is the max IoU against any GT
/// perturbed by N(0, 0.05) and clamped to [0, 1]. jitter = 0 reproduces
/// the GT boxes exactly.
std::vector<RankedProposal> generate_proposals(const CameraModel& cam,
                                               const std::vector<GtBox>& gt_boxes,
                                               const SceneConfig& cfg,
                                               uint64_t seed);

/// Canonical two-pedestrian inconsistency fixture: a near pedestrian G1
/// (z = 5 m) and a far one G2 (z = 20 m) with adjacent, overlapping image
/// regions, plus four hard-coded proposals. The IoU baseline assigns the
/// high-overlap pair P1/P2 to different GTs while the depth-guided
/// assignment places both on G2, whose depth plateau holds P1's center.
Scene figure1_scenario();

/// Assigner settings under which the fixture exhibits the canonical
/// behavior (the scale gap between G1 and G2 keeps every cross IoU well
/// under 0.5, so the positive threshold sits lower than the defaults).
AssignerConfig figure1_assigner_config();

/// Seeded variation of the canonical junction geometry: a near and a far
/// pedestrian at least 10 m apart with adjacent, slightly overlapping
/// boxes, a wide proposal straddling the junction with its center on the
/// far plateau, a nested twin, two proposals tight on the near
/// pedestrian, and a few jittered/anchored noise proposals.
Scene junction_scenario(uint64_t seed);

/// Assigner settings for junction scenes (figure1 thresholds relaxed to
/// admit the straddling proposal across the whole seeded family).
AssignerConfig junction_assigner_config();

}  // namespace depthmatch
