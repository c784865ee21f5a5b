#include "depthmatch/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace depthmatch {

std::string format_double(double v) {
  // Shortest representation that parses back to the same bits, preferring
  // plain decimal over scientific notation on equal length.
  std::string best;
  bool best_sci = false;
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) != v) {
      continue;
    }
    const std::string cand = buf;
    const bool sci = cand.find('e') != std::string::npos;
    if (best.empty() || cand.size() < best.size() ||
        (cand.size() == best.size() && best_sci && !sci)) {
      best = cand;
      best_sci = sci;
    }
  }
  if (best.empty()) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    best = buf;
  }
  return best;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  return out;
}

double parse_double(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw DataError(where + ": bad number '" + tok + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) {
    return "";
  }
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void save_depth_grid(const DepthGrid& grid, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << grid.width() << ' ' << grid.height() << ' ' << format_double(grid.stride())
      << '\n';
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (c) {
        out << ' ';
      }
      out << format_double(grid.at(c, r));
    }
    out << '\n';
  }
}

DepthGrid load_depth_grid(const std::filesystem::path& path) {
  auto in = open_input(path);
  int w = 0;
  int h = 0;
  double stride = 0.0;
  if (!(in >> w >> h >> stride)) {
    throw DataError(path.string() + ": bad depth-grid header");
  }
  std::vector<double> values;
  values.reserve(static_cast<size_t>(w) * h);
  double v;
  while (in >> v) {
    values.push_back(v);
  }
  if (values.size() != static_cast<size_t>(w) * h) {
    throw DataError(path.string() + ": expected " + std::to_string(w * h) +
                    " depth values, got " + std::to_string(values.size()));
  }
  try {
    return DepthGrid(w, h, stride, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& scene_path,
                const std::string& depth_file_name) {
  auto out = open_output(scene_path);
  out << "[camera]\n";
  out << "focal = " << format_double(scene.camera.focal) << '\n';
  out << "image_width = " << format_double(scene.camera.image_width) << '\n';
  out << "image_height = " << format_double(scene.camera.image_height) << '\n';
  out << "height = " << format_double(scene.camera.height) << '\n';
  out << "[meta]\n";
  out << "seed = " << scene.seed << '\n';
  out << "background_depth = " << format_double(scene.background_depth) << '\n';
  out << "ground_plane = " << (scene.ground_plane ? "true" : "false") << '\n';
  out << "depth_file = " << depth_file_name << '\n';
  out << "[pedestrians]\n";
  for (const auto& p : scene.pedestrians) {
    out << "p " << format_double(p.x) << ' ' << format_double(p.z) << ' '
        << format_double(p.height) << ' ' << format_double(p.width) << ' '
        << format_double(p.visibility) << '\n';
  }
  out << "[gt]\n";
  for (const auto& g : scene.gt_boxes) {
    out << "g " << format_double(g.box.x1) << ' ' << format_double(g.box.y1)
        << ' ' << format_double(g.box.x2) << ' ' << format_double(g.box.y2)
        << ' ' << format_double(g.visibility) << '\n';
  }
  out << "[proposals]\n";
  for (const auto& b : scene.proposals) {
    out << "b " << b.id << ' ' << format_double(b.box.x1) << ' '
        << format_double(b.box.y1) << ' ' << format_double(b.box.x2) << ' '
        << format_double(b.box.y2) << ' ' << format_double(b.confidence)
        << '\n';
  }
}

Scene load_scene(const std::filesystem::path& scene_path) {
  auto in = open_input(scene_path);

  CameraModel cam;
  uint64_t seed = 0;
  double background_depth = 80.0;
  bool ground_plane = false;
  std::string depth_file;
  std::vector<Pedestrian3D> peds;
  std::vector<GtBox> gts;
  std::vector<RankedProposal> proposals;

  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = scene_path.string() + ":" + std::to_string(line_no);
    line = trim(line);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    std::istringstream ss(line);
    if (section == "camera" || section == "meta") {
      std::string key, eq, value;
      ss >> key >> eq;
      std::getline(ss, value);
      value = trim(value);
      if (eq != "=") {
        throw DataError(where + ": expected 'key = value'");
      }
      if (section == "camera") {
        if (key == "focal") cam.focal = parse_double(value, where);
        else if (key == "image_width") cam.image_width = parse_double(value, where);
        else if (key == "image_height") cam.image_height = parse_double(value, where);
        else if (key == "height") cam.height = parse_double(value, where);
        else throw DataError(where + ": unknown camera key '" + key + "'");
      } else {
        if (key == "seed") seed = std::strtoull(value.c_str(), nullptr, 10);
        else if (key == "background_depth") background_depth = parse_double(value, where);
        else if (key == "ground_plane") ground_plane = value == "true";
        else if (key == "depth_file") depth_file = value;
        else throw DataError(where + ": unknown meta key '" + key + "'");
      }
    } else if (section == "pedestrians") {
      std::string tag;
      Pedestrian3D p;
      if (!(ss >> tag >> p.x >> p.z >> p.height >> p.width >> p.visibility) ||
          tag != "p") {
        throw DataError(where + ": bad pedestrian record");
      }
      peds.push_back(p);
    } else if (section == "gt") {
      std::string tag;
      GtBox g;
      if (!(ss >> tag >> g.box.x1 >> g.box.y1 >> g.box.x2 >> g.box.y2 >>
            g.visibility) ||
          tag != "g") {
        throw DataError(where + ": bad gt record");
      }
      gts.push_back(g);
    } else if (section == "proposals") {
      std::string tag;
      RankedProposal b;
      if (!(ss >> tag >> b.id >> b.box.x1 >> b.box.y1 >> b.box.x2 >> b.box.y2 >>
            b.confidence) ||
          tag != "b") {
        throw DataError(where + ": bad proposal record");
      }
      proposals.push_back(b);
    } else {
      throw DataError(where + ": record outside a known section");
    }
  }

  if (depth_file.empty()) {
    throw DataError(scene_path.string() + ": missing depth_file reference");
  }
  DepthGrid depth = load_depth_grid(scene_path.parent_path() / depth_file);
  return Scene{cam,  std::move(peds),   std::move(gts), std::move(depth),
               std::move(proposals), seed, background_depth, ground_plane};
}

namespace {

template <typename Rec>
std::vector<Rec> load_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Rec> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ss(line);
    Rec r;
    double last;
    if (!(ss >> r.image_id >> r.box.x1 >> r.box.y1 >> r.box.x2 >> r.box.y2 >> last)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 'image-id x1 y1 x2 y2 value'");
    }
    if constexpr (requires { r.visibility; }) {
      r.visibility = last;
    } else {
      r.score = last;
    }
    out.push_back(r);
  }
  return out;
}

template <typename Rec>
void save_records(const std::vector<Rec>& recs, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& r : recs) {
    double last;
    if constexpr (requires { r.visibility; }) {
      last = r.visibility;
    } else {
      last = r.score;
    }
    out << r.image_id << ' ' << format_double(r.box.x1) << ' '
        << format_double(r.box.y1) << ' ' << format_double(r.box.x2) << ' '
        << format_double(r.box.y2) << ' ' << format_double(last) << '\n';
  }
}

}  // namespace

void save_annotations(const std::vector<Annotation>& anns,
                      const std::filesystem::path& path) {
  save_records(anns, path);
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  return load_records<Annotation>(path);
}

void save_detections(const std::vector<Detection>& dets,
                     const std::filesystem::path& path) {
  save_records(dets, path);
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  return load_records<Detection>(path);
}

ConfigDoc ConfigDoc::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path.string());
}

ConfigDoc ConfigDoc::parse_string(const std::string& text, const std::string& origin) {
  ConfigDoc doc;
  doc.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (!doc.entries_.emplace(std::make_pair(section, key), value).second) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
  }
  return doc;
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  return entries_.count({section, key}) > 0;
}

double ConfigDoc::number(const std::string& section, const std::string& key,
                         double fallback) const {
  auto it = entries_.find({section, key});
  if (it == entries_.end()) {
    return fallback;
  }
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    throw ConfigError(origin_ + ": [" + section + "] " + key +
                      ": bad number '" + it->second + "'");
  }
  return v;
}

int ConfigDoc::integer(const std::string& section, const std::string& key,
                       int fallback) const {
  const double v = number(section, key, fallback);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError(origin_ + ": [" + section + "] " + key +
                      ": expected an integer");
  }
  return i;
}

bool ConfigDoc::boolean(const std::string& section, const std::string& key,
                        bool fallback) const {
  auto it = entries_.find({section, key});
  if (it == entries_.end()) {
    return fallback;
  }
  if (it->second == "true" || it->second == "1") {
    return true;
  }
  if (it->second == "false" || it->second == "0") {
    return false;
  }
  throw ConfigError(origin_ + ": [" + section + "] " + key +
                    ": expected true/false");
}

std::string ConfigDoc::text(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto it = entries_.find({section, key});
  return it == entries_.end() ? fallback : it->second;
}

std::vector<std::string> ConfigDoc::list(const std::string& section,
                                         const std::string& key,
                                         const std::vector<std::string>& fallback) const {
  auto it = entries_.find({section, key});
  if (it == entries_.end()) {
    return fallback;
  }
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(it->second);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  if (out.empty()) {
    throw ConfigError(origin_ + ": [" + section + "] " + key + ": empty list");
  }
  return out;
}

void ConfigDoc::require_known(
    const std::map<std::string, std::vector<std::string>>& schema) const {
  for (const auto& [sk, value] : entries_) {
    const auto& [section, key] = sk;
    auto sec = schema.find(section);
    if (sec == schema.end()) {
      throw ConfigError(origin_ + ": unknown section [" + section + "]");
    }
    if (std::find(sec->second.begin(), sec->second.end(), key) == sec->second.end()) {
      throw ConfigError(origin_ + ": unknown key '" + key + "' in [" + section + "]");
    }
  }
}

}  // namespace depthmatch
