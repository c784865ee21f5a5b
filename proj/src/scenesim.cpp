#include "depthmatch/scenesim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "depthmatch/rng.hpp"

namespace depthmatch {

void CameraModel::validate() const {
  if (!(focal > 0.0 && image_width > 0.0 && image_height > 0.0 && height > 0.0)) {
    throw std::invalid_argument("CameraModel: all parameters must be > 0");
  }
}

void SceneConfig::validate() const {
  camera.validate();
  if (ped_count < 1) {
    throw std::invalid_argument("SceneConfig: ped_count must be >= 1");
  }
  if (!(z_min > 0.0 && z_min < z_max)) {
    throw std::invalid_argument("SceneConfig: need 0 < z_min < z_max");
  }
  if (!(depth_stride >= 1.0)) {
    throw std::invalid_argument("SceneConfig: depth_stride must be >= 1");
  }
  if (jitter < 0.0) {
    throw std::invalid_argument("SceneConfig: jitter must be >= 0");
  }
  if (jitter_per_gt < 0 || random_proposals < 0) {
    throw std::invalid_argument("SceneConfig: proposal counts must be >= 0");
  }
  if (min_depth_gap < 0.0 || min_depth_gap >= z_max - z_min) {
    if (min_depth_gap != 0.0) {
      throw std::invalid_argument("SceneConfig: min_depth_gap must fit inside [z_min, z_max]");
    }
  }
  if (!(background_depth > 0.0)) {
    throw std::invalid_argument("SceneConfig: background_depth must be > 0");
  }
}

BBox project_pedestrian(const CameraModel& cam, const Pedestrian3D& ped) {
  const double cx = cam.image_width * 0.5;
  const double cy = cam.image_height * 0.5;
  const double u = cx + cam.focal * ped.x / ped.z;
  const double feet = cy + cam.focal * cam.height / ped.z;
  const double h = cam.focal * ped.height / ped.z;
  const double w = cam.focal * ped.width / ped.z;
  return {u - w * 0.5, feet - h, u + w * 0.5, feet};
}

namespace {

/// Area of `target` covered by the union of `covers` (exact x-sweep).
double covered_area(const BBox& target, const std::vector<BBox>& covers) {
  std::vector<BBox> clipped;
  std::set<double> xs;
  for (const auto& c : covers) {
    BBox b{std::max(c.x1, target.x1), std::max(c.y1, target.y1),
           std::min(c.x2, target.x2), std::min(c.y2, target.y2)};
    if (b.x1 < b.x2 && b.y1 < b.y2) {
      clipped.push_back(b);
      xs.insert(b.x1);
      xs.insert(b.x2);
    }
  }
  if (clipped.empty()) {
    return 0.0;
  }
  double area = 0.0;
  double prev_x = *xs.begin();
  for (double x : xs) {
    if (x > prev_x) {
      // Union of y-intervals active in this x slab.
      std::vector<std::pair<double, double>> spans;
      for (const auto& b : clipped) {
        if (b.x1 <= prev_x && b.x2 >= x) {
          spans.emplace_back(b.y1, b.y2);
        }
      }
      std::sort(spans.begin(), spans.end());
      double y_cov = 0.0;
      double cur_lo = 0.0;
      double cur_hi = -1.0;
      for (const auto& [lo, hi] : spans) {
        if (cur_hi < cur_lo || lo > cur_hi) {
          if (cur_hi > cur_lo) {
            y_cov += cur_hi - cur_lo;
          }
          cur_lo = lo;
          cur_hi = hi;
        } else {
          cur_hi = std::max(cur_hi, hi);
        }
      }
      if (cur_hi > cur_lo) {
        y_cov += cur_hi - cur_lo;
      }
      area += y_cov * (x - prev_x);
    }
    prev_x = x;
  }
  return area;
}

/// Occlusion-derived visibility: fraction of the GT box not covered by
/// strictly nearer pedestrians' boxes.
std::vector<double> compute_visibilities(const std::vector<Pedestrian3D>& peds,
                                         const std::vector<BBox>& boxes) {
  std::vector<double> vis(peds.size(), 1.0);
  for (size_t i = 0; i < peds.size(); ++i) {
    std::vector<BBox> nearer;
    for (size_t j = 0; j < peds.size(); ++j) {
      if (j != i && peds[j].z < peds[i].z) {
        nearer.push_back(boxes[j]);
      }
    }
    const double a = boxes[i].area();
    if (a > 0.0 && !nearer.empty()) {
      vis[i] = 1.0 - covered_area(boxes[i], nearer) / a;
    }
  }
  return vis;
}

BBox clamp_box_to_image(BBox b, const CameraModel& cam) {
  b.x1 = std::max(0.0, std::min(b.x1, cam.image_width - 1.0));
  b.x2 = std::max(b.x1 + 1.0 <= cam.image_width ? b.x1 + 1.0 : cam.image_width,
                  std::min(b.x2, cam.image_width));
  b.y1 = std::max(0.0, std::min(b.y1, cam.image_height - 1.0));
  b.y2 = std::max(b.y1 + 1.0 <= cam.image_height ? b.y1 + 1.0 : cam.image_height,
                  std::min(b.y2, cam.image_height));
  return b;
}

}  // namespace

DepthGrid render_depth_map(const CameraModel& cam,
                           const std::vector<Pedestrian3D>& peds,
                           const std::vector<GtBox>& gt_boxes, double stride,
                           double background_depth, bool ground_plane) {
  if (!(stride >= 1.0)) {
    throw std::invalid_argument("render_depth_map: stride must be >= 1");
  }
  const int w = static_cast<int>(std::ceil(cam.image_width / stride));
  const int h = static_cast<int>(std::ceil(cam.image_height / stride));
  const double cy = cam.image_height * 0.5;

  std::vector<double> values(static_cast<size_t>(w) * h, background_depth);
  for (int r = 0; r < h; ++r) {
    const double py = (r + 0.5) * stride;
    double bg = background_depth;
    if (ground_plane && py > cy + 1e-9) {
      bg = std::min(background_depth, cam.focal * cam.height / (py - cy));
    }
    for (int c = 0; c < w; ++c) {
      const double px = (c + 0.5) * stride;
      double depth = bg;
      for (size_t i = 0; i < peds.size(); ++i) {
        const BBox& b = gt_boxes[i].box;
        if (px >= b.x1 && px <= b.x2 && py >= b.y1 && py <= b.y2) {
          depth = std::min(depth, peds[i].z);
        }
      }
      values[static_cast<size_t>(r) * w + c] = depth;
    }
  }
  return DepthGrid(w, h, stride, std::move(values));
}

std::vector<RankedProposal> generate_proposals(const CameraModel& cam,
                                               const std::vector<GtBox>& gt_boxes,
                                               const SceneConfig& cfg,
                                               uint64_t seed) {
  Rng rng(seed);
  std::vector<RankedProposal> out;
  int next_id = 0;

  auto confidence_for = [&](const BBox& b) {
    double best = 0.0;
    for (const auto& g : gt_boxes) {
      best = std::max(best, iou(b, g.box));
    }
    return std::min(1.0, std::max(0.0, best + rng.normal(0.0, 0.05)));
  };

  for (const auto& g : gt_boxes) {
    for (int k = 0; k < cfg.jitter_per_gt; ++k) {
      BBox b = g.box;
      if (cfg.jitter > 0.0) {
        const Point2 c = center(g.box);
        const double w = g.box.width();
        const double h = g.box.height();
        const double ncx = c.x + rng.normal(0.0, cfg.jitter * w);
        const double ncy = c.y + rng.normal(0.0, cfg.jitter * h);
        const double nw = w * std::exp(rng.normal(0.0, 0.1));
        const double nh = h * std::exp(rng.normal(0.0, 0.1));
        b = {ncx - nw * 0.5, ncy - nh * 0.5, ncx + nw * 0.5, ncy + nh * 0.5};
        b = clamp_box_to_image(b, cam);
      }
      out.push_back({b, confidence_for(b), next_id++});
    }
  }

  const double h_hi = std::min(cfg.random_box_height_hi, cam.image_height * 0.9);
  const double h_lo = std::min(cfg.random_box_height_lo, h_hi);

  for (int k = 0; k < cfg.random_proposals; ++k) {
    // Log-uniform heights cover small and large boxes evenly.
    const double h = h_lo * std::exp(rng.uniform01() * std::log(h_hi / h_lo));
    const double w = cfg.aspect * h;
    double cx, cyy;
    if (cfg.random_box_focus > 0.0 && !gt_boxes.empty()) {
      // Anchor-style placement: multi-scale boxes fire on the objects.
      // The center lands in the central `focus` fraction of a uniformly
      // chosen GT box.
      const BBox& g = gt_boxes[rng.uniform_index(gt_boxes.size())].box;
      const Point2 c = center(g);
      const double dx = cfg.random_box_focus * g.width() * 0.5;
      const double dy = cfg.random_box_focus * g.height() * 0.5;
      cx = rng.uniform(c.x - dx, c.x + dx);
      cyy = rng.uniform(c.y - dy, c.y + dy);
    } else {
      cx = rng.uniform(w * 0.5, cam.image_width - w * 0.5);
      cyy = rng.uniform(h * 0.5, cam.image_height - h * 0.5);
    }
    BBox b{cx - w * 0.5, cyy - h * 0.5, cx + w * 0.5, cyy + h * 0.5};
    b = clamp_box_to_image(b, cam);
    out.push_back({b, confidence_for(b), next_id++});
  }
  return out;
}

Scene generate_scene(const SceneConfig& cfg, uint64_t seed) {
  cfg.validate();
  Rng master(seed);
  const uint64_t ped_seed = master.next_u64();
  const uint64_t prop_seed = master.next_u64();

  Rng rng(ped_seed);
  const CameraModel& cam = cfg.camera;
  const double cx = cam.image_width * 0.5;

  std::vector<Pedestrian3D> peds;
  std::vector<BBox> boxes;
  for (int i = 0; i < cfg.ped_count; ++i) {
    Pedestrian3D p;
    p.height = std::min(cfg.height_hi,
                        std::max(cfg.height_lo,
                                 rng.normal(cfg.height_mean, cfg.height_std)));
    p.width = cfg.aspect * p.height;

    if (cfg.min_depth_gap > 0.0) {
      // Constrained mode: pedestrian 1 sits at least min_depth_gap behind
      // pedestrian 0; later pedestrians are near-depth companions of the
      // base, which keeps their scales similar.
      if (i == 0) {
        p.z = rng.uniform(cfg.z_min, cfg.z_max - cfg.min_depth_gap);
      } else if (i == 1) {
        const double lo = peds[0].z + cfg.min_depth_gap;
        p.z = lo >= cfg.z_max ? lo : rng.uniform(lo, cfg.z_max);
      } else {
        p.z = peds[0].z + rng.uniform(2.0, 5.0);
      }
    } else {
      p.z = rng.uniform(cfg.z_min, cfg.z_max);
    }

    const double w_px = cam.focal * p.width / p.z;
    double u;
    if (cfg.overlap_adjacent && i > 0) {
      // Land beside the previous pedestrian with a slight x overlap: the
      // new box keeps 60-90% of its width (and its center) clear of the
      // previous box, so its own plateau stays visible. Every box
      // straddles the horizon row, so x overlap implies box overlap.
      const BBox& prev = boxes[i - 1];
      const double prev_u = (prev.x1 + prev.x2) * 0.5;
      const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      const double visible = rng.uniform(0.6, 0.9);
      u = prev_u + sign * (prev.width() * 0.5 + w_px * (visible - 0.5));
      u = std::max(w_px * 0.5, std::min(u, cam.image_width - w_px * 0.5));
    } else {
      const double lo = cfg.overlap_adjacent ? cam.image_width * 0.3 : w_px * 0.5;
      const double hi = cfg.overlap_adjacent ? cam.image_width * 0.7
                                             : cam.image_width - w_px * 0.5;
      u = rng.uniform(std::min(lo, hi), std::max(lo, hi));
    }
    p.x = (u - cx) * p.z / cam.focal;

    peds.push_back(p);
    boxes.push_back(project_pedestrian(cam, p));
  }

  const auto vis = compute_visibilities(peds, boxes);
  std::vector<GtBox> gt_boxes;
  for (size_t i = 0; i < peds.size(); ++i) {
    peds[i].visibility = vis[i];
    gt_boxes.push_back({boxes[i], vis[i]});
  }

  DepthGrid depth = render_depth_map(cam, peds, gt_boxes, cfg.depth_stride,
                                     cfg.background_depth, cfg.ground_plane);
  Scene scene{cam,           std::move(peds), gt_boxes,
              std::move(depth), {}, seed,
              cfg.background_depth, cfg.ground_plane};
  scene.proposals = generate_proposals(cam, scene.gt_boxes, cfg, prop_seed);
  return scene;
}

Scene figure1_scenario() {
  CameraModel cam;
  cam.focal = 800.0;
  cam.image_width = 640.0;
  cam.image_height = 480.0;
  cam.height = 1.4;

  // Near pedestrian G1 and far pedestrian G2, horizontally adjacent with
  // slightly overlapping image regions. G2's plateau starts just right of
  // G1's box edge.
  std::vector<Pedestrian3D> peds;
  peds.push_back({-0.4375, 5.0, 1.7, 0.697, 1.0});  // G1: box x [194.24, 305.76]
  peds.push_back({-0.1, 20.0, 1.7, 0.697, 1.0});    // G2: box x [302.06, 329.94]

  std::vector<BBox> boxes;
  for (const auto& p : peds) {
    boxes.push_back(project_pedestrian(cam, p));
  }
  const auto vis = compute_visibilities(peds, boxes);
  std::vector<GtBox> gt_boxes;
  for (size_t i = 0; i < peds.size(); ++i) {
    peds[i].visibility = vis[i];
    gt_boxes.push_back({boxes[i], vis[i]});
  }

  DepthGrid depth = render_depth_map(cam, peds, gt_boxes, 4.0, 80.0, false);
  Scene scene{cam, std::move(peds), gt_boxes, std::move(depth),
              {},  0,               80.0,     false};

  // P1/P2 share the center (310, 262), a cell on G2's plateau; P1 overlaps
  // G1 the most among the GTs, P2 nests inside P1 with IoU(P1, P2) > 0.3.
  // P3/P4 sit tightly on G1 and soak up its cheap assignments.
  scene.proposals = {
      {{250.0, 162.0, 370.0, 362.0}, 0.90, 0},  // P1
      {{265.0, 217.0, 355.0, 307.0}, 0.85, 1},  // P2
      {{215.0, 240.0, 285.0, 416.0}, 0.95, 2},  // P3
      {{217.0, 242.0, 287.0, 418.0}, 0.90, 3},  // P4
  };
  return scene;
}

AssignerConfig figure1_assigner_config() {
  AssignerConfig cfg;
  cfg.n_pos = 256;
  cfg.n_neg = 256;
  cfg.iou_pos_thr = 0.2;
  cfg.iou_neg_thr = 0.1;
  cfg.rng_seed = 0;
  return cfg;
}

Scene junction_scenario(uint64_t seed) {
  Rng rng(seed);
  CameraModel cam;  // 800 px focal, 640x480, height 1.4 m

  const double z0 = rng.uniform(4.5, 6.5);
  const double z1 = z0 + rng.uniform(10.0, 16.0);
  const double h0 = rng.uniform(1.55, 1.85);
  const double h1 = rng.uniform(1.55, 1.85);

  Pedestrian3D near{0.0, z0, h0, 0.41 * h0, 1.0};
  Pedestrian3D far{0.0, z1, h1, 0.41 * h1, 1.0};

  const double u1 = rng.uniform(230.0, 270.0);
  near.x = (u1 - cam.image_width * 0.5) * z0 / cam.focal;
  const BBox b0 = project_pedestrian(cam, near);

  // The far pedestrian overlaps the near one's right edge by 5-25% of its
  // own width, leaving its center and plateau visible.
  const double w2 = cam.focal * far.width / z1;
  const double overlap = rng.uniform(0.05, 0.25);
  const double u2 = b0.x2 - overlap * w2 + w2 * 0.5;
  far.x = (u2 - cam.image_width * 0.5) * z1 / cam.focal;
  const BBox b1 = project_pedestrian(cam, far);

  std::vector<Pedestrian3D> peds{near, far};
  std::vector<BBox> boxes{b0, b1};
  const auto vis = compute_visibilities(peds, boxes);
  std::vector<GtBox> gt_boxes;
  for (size_t i = 0; i < peds.size(); ++i) {
    peds[i].visibility = vis[i];
    gt_boxes.push_back({boxes[i], vis[i]});
  }

  DepthGrid depth = render_depth_map(cam, peds, gt_boxes, 4.0, 80.0, false);
  Scene scene{cam, std::move(peds), gt_boxes, std::move(depth),
              {},  seed,            80.0,     false};

  const double w1 = b0.width();
  const double hh1 = b0.height();
  const double wg2 = b1.width();
  const double hg2 = b1.height();
  const double c2y = 0.5 * (b1.y1 + b1.y2);

  // P1 straddles the junction; its center stays on the far plateau with
  // one depth cell of margin.
  BBox p1{b0.x1 + rng.uniform(0.45, 0.55) * w1, 0.0,
          b1.x2 + rng.uniform(1.2, 1.7) * wg2, 0.0};
  const double p1h = rng.uniform(2.6, 3.2) * hg2;
  const double p1cy = c2y + rng.uniform(-0.1, 0.1) * hg2;
  p1.y1 = p1cy - 0.5 * p1h;
  p1.y2 = p1cy + 0.5 * p1h;
  {
    const double cx = 0.5 * (p1.x1 + p1.x2);
    const double lo = b0.x2 + 4.5;
    const double hi = b1.x2 - 1.0;
    double shift = 0.0;
    if (cx < lo) {
      shift = lo - cx;
    } else if (cx > hi) {
      shift = hi - cx;
    }
    p1.x1 += shift;
    p1.x2 += shift;
  }

  // P2 nests inside P1 around the shared center.
  const Point2 c1 = center(p1);
  const double p2w = p1.width() * rng.uniform(0.65, 0.78);
  const double p2h = p1.height() * rng.uniform(0.5, 0.58);
  const BBox p2{c1.x - 0.5 * p2w, c1.y - 0.5 * p2h, c1.x + 0.5 * p2w,
                c1.y + 0.5 * p2h};

  // P3/P4 sit tight on the near pedestrian.
  const Point2 g1c = center(b0);
  const double p3w = 0.63 * w1;
  const double p3h = 0.65 * hh1;
  const double j3a = rng.uniform(-4.0, 4.0);
  const double j3b = rng.uniform(-4.0, 4.0);
  const BBox p3{g1c.x - 0.5 * p3w, g1c.y - 0.5 * p3h + j3a,
                g1c.x + 0.5 * p3w, g1c.y + 0.5 * p3h + j3b};
  const double d4 = rng.uniform(1.0, 4.0);
  const BBox p4{p3.x1 + d4, g1c.y - 0.5 * p3h + d4, p3.x2 + d4,
                g1c.y + 0.5 * p3h + d4};

  scene.proposals = {
      {p1, 0.90, 0},
      {p2, 0.85, 1},
      {p3, 0.95, 2},
      {p4, 0.90, 3},
  };

  SceneConfig noise;
  noise.jitter = 0.05;
  noise.jitter_per_gt = 2;
  noise.random_proposals = 3;
  noise.random_box_focus = 0.3;
  noise.random_box_height_lo = 0.9 * hg2;
  noise.random_box_height_hi = 1.1 * hh1;
  for (const auto& e :
       generate_proposals(cam, scene.gt_boxes, noise, seed ^ 0xABCDEFULL)) {
    scene.proposals.push_back({e.box, e.confidence, 4 + e.id});
  }
  return scene;
}

AssignerConfig junction_assigner_config() {
  AssignerConfig cfg = figure1_assigner_config();
  cfg.iou_pos_thr = 0.12;
  cfg.iou_neg_thr = 0.1;
  return cfg;
}

}  // namespace depthmatch
