#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "depthmatch/assign.hpp"
#include "depthmatch/compare.hpp"
#include "depthmatch/depth_grid.hpp"
#include "depthmatch/eval.hpp"
#include "depthmatch/geometry.hpp"
#include "depthmatch/io.hpp"
#include "depthmatch/scenesim.hpp"
#include "depthmatch/supervision.hpp"

namespace py = pybind11;
using namespace depthmatch;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Depth-guided ground-truth/proposal assignment toolkit";

  py::class_<BBox>(m, "BBox")
      .def(py::init<>())
      .def(py::init<double, double, double, double>(), py::arg("x1"),
           py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_readwrite("x1", &BBox::x1)
      .def_readwrite("y1", &BBox::y1)
      .def_readwrite("x2", &BBox::x2)
      .def_readwrite("y2", &BBox::y2)
      .def("width", &BBox::width)
      .def("height", &BBox::height)
      .def("area", &BBox::area)
      .def("__repr__", [](const BBox& b) {
        return "BBox(" + format_double(b.x1) + ", " + format_double(b.y1) +
               ", " + format_double(b.x2) + ", " + format_double(b.y2) + ")";
      });

  py::class_<Point2>(m, "Point2")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point2::x)
      .def_readwrite("y", &Point2::y);

  m.def("iou", &iou, py::arg("a"), py::arg("b"));
  m.def("center", &center);
  m.def("manhattan_center_distance", &manhattan_center_distance);
  m.def("box_scale", &box_scale);

  py::class_<LevelRanges>(m, "LevelRanges")
      .def_static("standard", &LevelRanges::standard)
      .def("level_count", &LevelRanges::level_count)
      .def("label", &LevelRanges::label);
  m.def("assign_level", &assign_level, py::arg("scale"), py::arg("ranges"));

  py::class_<DepthGrid>(m, "DepthGrid")
      .def(py::init<int, int, double, std::vector<double>>(), py::arg("width"),
           py::arg("height"), py::arg("stride"), py::arg("values"))
      .def_property_readonly("width", &DepthGrid::width)
      .def_property_readonly("height", &DepthGrid::height)
      .def_property_readonly("stride", &DepthGrid::stride)
      .def("at", py::overload_cast<int, int>(&DepthGrid::at, py::const_),
           py::arg("col"), py::arg("row"))
      .def("values", [](const DepthGrid& g) { return g.values(); });

  m.def("sample_depth", &sample_depth);
  m.def("min_variance_path_cost", &min_variance_path_cost, py::arg("grid"),
        py::arg("start"), py::arg("end"));
  m.def("brute_force_path_cost", &brute_force_path_cost, py::arg("grid"),
        py::arg("start"), py::arg("end"));

  py::class_<CostWeights>(m, "CostWeights")
      .def(py::init<>())
      .def_readwrite("lambda_d", &CostWeights::lambda_d)
      .def_readwrite("lambda_z", &CostWeights::lambda_z);

  py::class_<PathCost>(m, "PathCost")
      .def(py::init<>())
      .def_readwrite("d_cost", &PathCost::d_cost)
      .def_readwrite("z_cost", &PathCost::z_cost)
      .def_readwrite("total", &PathCost::total);

  m.def("matching_cost", &matching_cost, py::arg("gt"), py::arg("proposal"),
        py::arg("grid"), py::arg("weights"));
  m.def("normalized_weights", &normalized_weights);

  py::class_<AssignerConfig>(m, "AssignerConfig")
      .def(py::init<>())
      .def_readwrite("n_pos", &AssignerConfig::n_pos)
      .def_readwrite("n_neg", &AssignerConfig::n_neg)
      .def_readwrite("cost_weights", &AssignerConfig::cost_weights)
      .def_readwrite("max_cost", &AssignerConfig::max_cost)
      .def_readwrite("iou_pos_thr", &AssignerConfig::iou_pos_thr)
      .def_readwrite("iou_neg_thr", &AssignerConfig::iou_neg_thr)
      .def_readwrite("rng_seed", &AssignerConfig::rng_seed);

  py::class_<RankedProposal>(m, "RankedProposal")
      .def(py::init<>())
      .def(py::init([](const BBox& box, double confidence, int id) {
             return RankedProposal{box, confidence, id};
           }),
           py::arg("box"), py::arg("confidence"), py::arg("id"))
      .def_readwrite("box", &RankedProposal::box)
      .def_readwrite("confidence", &RankedProposal::confidence)
      .def_readwrite("id", &RankedProposal::id);

  py::class_<Assignment>(m, "Assignment")
      .def_readonly("proposal_id", &Assignment::proposal_id)
      .def_readonly("gt_index", &Assignment::gt_index)
      .def_readonly("cost", &Assignment::cost)
      .def_readonly("step", &Assignment::step);

  py::class_<Eviction>(m, "Eviction")
      .def_readonly("proposal_id", &Eviction::proposal_id)
      .def_readonly("gt_index", &Eviction::gt_index)
      .def_readonly("cost", &Eviction::cost)
      .def_readonly("step", &Eviction::step)
      .def_readonly("assigned_step", &Eviction::assigned_step);

  py::class_<AssignmentResult>(m, "AssignmentResult")
      .def_readonly("positives", &AssignmentResult::positives)
      .def_readonly("negatives", &AssignmentResult::negatives)
      .def_readonly("pending", &AssignmentResult::pending)
      .def_readonly("evictions", &AssignmentResult::evictions)
      .def_readonly("per_gt_capacity", &AssignmentResult::per_gt_capacity)
      .def_readonly("per_gt_count", &AssignmentResult::per_gt_count)
      .def_readonly("unassigned_gts", &AssignmentResult::unassigned_gts);

  m.def("assign_depth_guided", &assign_depth_guided, py::arg("gts"),
        py::arg("proposals"), py::arg("grid"), py::arg("config"));
  m.def("assign_iou", &assign_iou, py::arg("gts"), py::arg("proposals"),
        py::arg("config"));
  m.def("assign_per_level", &assign_per_level, py::arg("gts"),
        py::arg("proposals"), py::arg("grid"), py::arg("config"));
  m.def("fill_negatives", &fill_negatives, py::arg("partial"), py::arg("gts"),
        py::arg("proposals"), py::arg("config"));

  py::class_<LossConfig>(m, "LossConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &LossConfig::alpha)
      .def_readwrite("beta", &LossConfig::beta)
      .def_readwrite("gamma", &LossConfig::gamma)
      .def_readwrite("kappa", &LossConfig::kappa);

  py::class_<ProposalPrediction>(m, "ProposalPrediction")
      .def(py::init<>())
      .def_readwrite("proposal_id", &ProposalPrediction::proposal_id)
      .def_readwrite("class_score", &ProposalPrediction::class_score)
      .def_readwrite("regressed_box", &ProposalPrediction::regressed_box)
      .def_readwrite("predicted_cost", &ProposalPrediction::predicted_cost);

  py::class_<LossBreakdown>(m, "LossBreakdown")
      .def_readonly("reg_loss", &LossBreakdown::reg_loss)
      .def_readonly("cls_loss", &LossBreakdown::cls_loss)
      .def_readonly("cost_loss", &LossBreakdown::cost_loss)
      .def_readonly("total", &LossBreakdown::total);

  m.def("regression_targets", &regression_targets, py::arg("proposal"),
        py::arg("gt"));
  m.def("assignment_losses", &assignment_losses, py::arg("predictions"),
        py::arg("result"), py::arg("gts"), py::arg("config"));
  m.def("rescore_confidence", &rescore_confidence, py::arg("score"),
        py::arg("predicted_cost"), py::arg("actual_cost"));
  m.def("sigmoid", &sigmoid);

  py::class_<Annotation>(m, "Annotation")
      .def(py::init<>())
      .def(py::init([](const BBox& box, double visibility, const std::string& image_id) {
             return Annotation{box, visibility, image_id};
           }),
           py::arg("box"), py::arg("visibility"), py::arg("image_id"))
      .def_readwrite("box", &Annotation::box)
      .def_readwrite("visibility", &Annotation::visibility)
      .def_readwrite("image_id", &Annotation::image_id);

  py::class_<Detection>(m, "Detection")
      .def(py::init<>())
      .def(py::init([](const BBox& box, double score, const std::string& image_id) {
             return Detection{box, score, image_id};
           }),
           py::arg("box"), py::arg("score"), py::arg("image_id"))
      .def_readwrite("box", &Detection::box)
      .def_readwrite("score", &Detection::score)
      .def_readwrite("image_id", &Detection::image_id);

  py::class_<SubsetSpec>(m, "SubsetSpec")
      .def(py::init<>())
      .def_readwrite("name", &SubsetSpec::name)
      .def_readwrite("vis_lo", &SubsetSpec::vis_lo)
      .def_readwrite("vis_hi", &SubsetSpec::vis_hi)
      .def_readwrite("lo_open", &SubsetSpec::lo_open)
      .def_readwrite("hi_open", &SubsetSpec::hi_open)
      .def_readwrite("min_height", &SubsetSpec::min_height)
      .def_readwrite("lhv_threshold", &SubsetSpec::lhv_threshold);
  m.def("subset_by_name", &subset_by_name);

  py::class_<FilteredAnnotations>(m, "FilteredAnnotations")
      .def_readonly("kept", &FilteredAnnotations::kept)
      .def_readonly("included_images", &FilteredAnnotations::included_images);
  m.def("filter_subset", &filter_subset, py::arg("annotations"), py::arg("spec"));

  py::class_<EvalMatches>(m, "EvalMatches")
      .def_readonly("det_is_tp", &EvalMatches::det_is_tp)
      .def_readonly("gt_matched_score", &EvalMatches::gt_matched_score)
      .def_readonly("image_count", &EvalMatches::image_count)
      .def_readonly("gt_count", &EvalMatches::gt_count);

  py::class_<OperatingPoint>(m, "OperatingPoint")
      .def_readonly("threshold", &OperatingPoint::threshold)
      .def_readonly("fppi", &OperatingPoint::fppi)
      .def_readonly("miss_rate", &OperatingPoint::miss_rate);

  py::class_<MissRateCurve>(m, "MissRateCurve")
      .def_readonly("points", &MissRateCurve::points);

  m.def("match_detections_for_eval", &match_detections_for_eval,
        py::arg("detections"), py::arg("gts"), py::arg("iou_thr"));
  m.def("miss_rate_fppi_curve", &miss_rate_fppi_curve);
  m.def("log_average_miss_rate", &log_average_miss_rate);
  m.def("inconsistency_rate", &inconsistency_rate, py::arg("result"),
        py::arg("proposals"), py::arg("similarity_thr"));

  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("focal", &CameraModel::focal)
      .def_readwrite("image_width", &CameraModel::image_width)
      .def_readwrite("image_height", &CameraModel::image_height)
      .def_readwrite("height", &CameraModel::height);

  py::class_<Pedestrian3D>(m, "Pedestrian3D")
      .def(py::init<>())
      .def_readwrite("x", &Pedestrian3D::x)
      .def_readwrite("z", &Pedestrian3D::z)
      .def_readwrite("height", &Pedestrian3D::height)
      .def_readwrite("width", &Pedestrian3D::width)
      .def_readwrite("visibility", &Pedestrian3D::visibility);

  py::class_<SceneConfig>(m, "SceneConfig")
      .def(py::init<>())
      .def_readwrite("camera", &SceneConfig::camera)
      .def_readwrite("ped_count", &SceneConfig::ped_count)
      .def_readwrite("z_min", &SceneConfig::z_min)
      .def_readwrite("z_max", &SceneConfig::z_max)
      .def_readwrite("min_depth_gap", &SceneConfig::min_depth_gap)
      .def_readwrite("overlap_adjacent", &SceneConfig::overlap_adjacent)
      .def_readwrite("jitter_per_gt", &SceneConfig::jitter_per_gt)
      .def_readwrite("random_proposals", &SceneConfig::random_proposals)
      .def_readwrite("jitter", &SceneConfig::jitter)
      .def_readwrite("ground_plane", &SceneConfig::ground_plane)
      .def_readwrite("depth_stride", &SceneConfig::depth_stride)
      .def_readwrite("background_depth", &SceneConfig::background_depth)
      .def_readwrite("random_box_height_lo", &SceneConfig::random_box_height_lo)
      .def_readwrite("random_box_height_hi", &SceneConfig::random_box_height_hi)
      .def_readwrite("random_box_focus", &SceneConfig::random_box_focus);

  py::class_<GtBox>(m, "GtBox")
      .def(py::init<>())
      .def(py::init([](const BBox& box, double visibility) {
             return GtBox{box, visibility};
           }),
           py::arg("box"), py::arg("visibility") = 1.0)
      .def_readwrite("box", &GtBox::box)
      .def_readwrite("visibility", &GtBox::visibility);

  py::class_<Scene>(m, "Scene")
      .def_readonly("camera", &Scene::camera)
      .def_readonly("pedestrians", &Scene::pedestrians)
      .def_readonly("gt_boxes", &Scene::gt_boxes)
      .def_readonly("depth", &Scene::depth)
      .def_readonly("proposals", &Scene::proposals)
      .def_readonly("seed", &Scene::seed);

  m.def("project_pedestrian", &project_pedestrian);
  m.def("generate_scene", &generate_scene, py::arg("config"), py::arg("seed"));
  m.def("render_depth_map", &render_depth_map, py::arg("camera"),
        py::arg("pedestrians"), py::arg("gt_boxes"), py::arg("stride"),
        py::arg("background_depth"), py::arg("ground_plane") = false);
  m.def("generate_proposals", &generate_proposals, py::arg("camera"),
        py::arg("gt_boxes"), py::arg("config"), py::arg("seed"));
  m.def("figure1_scenario", &figure1_scenario);
  m.def("figure1_assigner_config", &figure1_assigner_config);
  m.def("junction_scenario", &junction_scenario, py::arg("seed"));
  m.def("junction_assigner_config", &junction_assigner_config);

  m.def("save_depth_grid", &save_depth_grid);
  m.def("load_depth_grid", &load_depth_grid);
  m.def("save_scene", &save_scene, py::arg("scene"), py::arg("scene_path"),
        py::arg("depth_file_name"));
  m.def("load_scene", &load_scene);
  m.def("save_annotations", &save_annotations);
  m.def("load_annotations", &load_annotations);
  m.def("save_detections", &save_detections);
  m.def("load_detections", &load_detections);

  m.def("run_assigner", &run_assigner, py::arg("name"), py::arg("scene"),
        py::arg("config"), py::arg("normalize") = false);
}
