#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depthmatch/depth_grid.hpp"
#include "depthmatch/eval.hpp"
#include "depthmatch/scenesim.hpp"

namespace depthmatch {

/// Configuration or CLI usage problem (exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data file (exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

// --- depth grid files -------------------------------------------------
// First line: "width height stride"; then height rows of width depths,
// row 0 at the top. Round-trips bit-exactly.

void save_depth_grid(const DepthGrid& grid, const std::filesystem::path& path);
DepthGrid load_depth_grid(const std::filesystem::path& path);

// --- scene files ------------------------------------------------------
// Sectioned text document: camera parameters, pedestrian records, GT
// boxes, proposal records, and the name of the companion depth file.

void save_scene(const Scene& scene, const std::filesystem::path& scene_path,
                const std::string& depth_file_name);
Scene load_scene(const std::filesystem::path& scene_path);

// --- detection / annotation records ------------------------------------
// One record per line: image-id x1 y1 x2 y2 visibility-or-score.

void save_annotations(const std::vector<Annotation>& anns,
                      const std::filesystem::path& path);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);
void save_detections(const std::vector<Detection>& dets,
                     const std::filesystem::path& path);
std::vector<Detection> load_detections(const std::filesystem::path& path);

// --- config files -------------------------------------------------------
// "[section]" headers with "key = value" entries; '#' starts a comment.
// Unknown sections or keys are errors.

class ConfigDoc {
 public:
  static ConfigDoc parse_file(const std::filesystem::path& path);
  static ConfigDoc parse_string(const std::string& text, const std::string& origin);

  bool has(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  int integer(const std::string& section, const std::string& key, int fallback) const;
  bool boolean(const std::string& section, const std::string& key, bool fallback) const;
  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  std::vector<std::string> list(const std::string& section, const std::string& key,
                                const std::vector<std::string>& fallback) const;

  /// Fail-fast validation: every present (section, key) must be declared.
  void require_known(const std::map<std::string, std::vector<std::string>>& schema) const;

 private:
  std::map<std::pair<std::string, std::string>, std::string> entries_;
  std::string origin_;
};

}  // namespace depthmatch
