#include "bopeval/bop_io.hpp"

#include "bopeval/depth_png.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <system_error>

namespace bopeval {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string fixed_shortest(double v) {
  std::array<char, 1200> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  if (res.ec != std::errc()) throw InvariantError("number formatting failed");
  return std::string(buf.data(), res.ptr);
}

std::string fixed_digits(double v, int precision) {
  std::array<char, 1200> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, precision);
  if (res.ec != std::errc()) throw InvariantError("number formatting failed");
  return std::string(buf.data(), res.ptr);
}

// Accepts a rotation within `tol` of orthonormal and snaps it onto SO(3).
// Rotations already exact to machine precision are kept bit for bit.
std::optional<Mat3> accept_rotation(const Mat3& r, double tol) {
  if (!r.allFinite() || !is_rotation(r, tol)) return std::nullopt;
  if (is_rotation(r, 1e-14)) return r;
  return nearest_rotation(r);
}

[[noreturn]] void fail_row(SubmissionErrorKind kind, std::size_t line, const std::string& source,
                           const std::string& what) {
  throw SubmissionError(kind, line, source + ":" + std::to_string(line) + ": " + what);
}

const std::string kSubmissionHeader = "scene_id,im_id,obj_id,score,R,t,time";

}  // namespace

// ---------------------------------------------------------------------------
// Submission

std::string to_string(SubmissionErrorKind kind) {
  switch (kind) {
    case SubmissionErrorKind::Io: return "io";
    case SubmissionErrorKind::Header: return "header";
    case SubmissionErrorKind::FieldCount: return "field-count";
    case SubmissionErrorKind::NonNumeric: return "non-numeric";
    case SubmissionErrorKind::RotationArity: return "rotation-arity";
    case SubmissionErrorKind::TranslationArity: return "translation-arity";
    case SubmissionErrorKind::NonFinite: return "non-finite";
    case SubmissionErrorKind::NotOrthonormal: return "not-orthonormal";
    case SubmissionErrorKind::InvalidId: return "invalid-id";
    case SubmissionErrorKind::InvalidTime: return "invalid-time";
  }
  return "unknown";
}

SubmissionError::SubmissionError(SubmissionErrorKind kind, std::size_t line,
                                 const std::string& message)
    : InputError(message), kind_(kind), line_(line) {}

std::vector<PoseEstimate> read_submission(std::istream& in, const std::string& source) {
  std::vector<PoseEstimate> out;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kSubmissionHeader) {
        fail_row(SubmissionErrorKind::Header, line_no, source,
                 "expected header '" + kSubmissionHeader + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 7) {
      fail_row(SubmissionErrorKind::FieldCount, line_no, source,
               "expected 7 fields, found " + std::to_string(fields.size()));
    }

    PoseEstimate e;
    const char* id_names[] = {"scene_id", "im_id", "obj_id"};
    int* ids[] = {&e.scene_id, &e.im_id, &e.obj_id};
    for (int k = 0; k < 3; ++k) {
      const auto v = parse_number<int>(fields[k]);
      if (!v) {
        fail_row(SubmissionErrorKind::NonNumeric, line_no, source,
                 std::string(id_names[k]) + " is not an integer");
      }
      if (*v < 0 || (k == 2 && *v == 0)) {
        fail_row(SubmissionErrorKind::InvalidId, line_no, source,
                 std::string(id_names[k]) + " is out of range");
      }
      *ids[k] = *v;
    }

    auto number = [&](std::string_view s, const std::string& what) {
      const auto v = parse_number<double>(s);
      if (!v) fail_row(SubmissionErrorKind::NonNumeric, line_no, source, what + " is not a number");
      if (!std::isfinite(*v)) fail_row(SubmissionErrorKind::NonFinite, line_no, source, what + " is not finite");
      return *v;
    };

    e.score = number(fields[3], "score");

    const auto r_tokens = split_ws(fields[4]);
    if (r_tokens.size() != 9) {
      fail_row(SubmissionErrorKind::RotationArity, line_no, source,
               "R needs 9 values, found " + std::to_string(r_tokens.size()));
    }
    const auto t_tokens = split_ws(fields[5]);
    if (t_tokens.size() != 3) {
      fail_row(SubmissionErrorKind::TranslationArity, line_no, source,
               "t needs 3 values, found " + std::to_string(t_tokens.size()));
    }
    Mat3 r;
    for (int k = 0; k < 9; ++k) r(k / 3, k % 3) = number(r_tokens[k], "R");
    Vec3 t;
    for (int k = 0; k < 3; ++k) t[k] = number(t_tokens[k], "t");

    const double time = number(fields[6], "time");
    if (time == -1.0) {
      e.time = std::nullopt;
    } else if (time >= 0.0) {
      e.time = time;
    } else {
      fail_row(SubmissionErrorKind::InvalidTime, line_no, source,
               "time must be non-negative or -1");
    }

    const auto rot = accept_rotation(r, kSubmissionRotationTolerance);
    if (!rot) {
      fail_row(SubmissionErrorKind::NotOrthonormal, line_no, source,
               "R is not a rotation within 1e-3");
    }
    e.pose = RigidTransform(*rot, t, kSubmissionRotationTolerance);
    e.row = out.size();
    out.push_back(e);
  }
  if (in.bad()) throw SubmissionError(SubmissionErrorKind::Io, 0, source + ": read failed");
  if (!have_header) {
    throw SubmissionError(SubmissionErrorKind::Header, 0, source + ": missing header");
  }
  return out;
}

std::vector<PoseEstimate> read_submission(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SubmissionError(SubmissionErrorKind::Io, 0, path.string() + ": cannot open file");
  }
  return read_submission(in, path.string());
}

void write_submission(std::ostream& out, std::span<const PoseEstimate> estimates) {
  out << kSubmissionHeader << '\n';
  for (const PoseEstimate& e : estimates) {
    out << e.scene_id << ',' << e.im_id << ',' << e.obj_id << ',' << fixed_shortest(e.score)
        << ',';
    const Mat3& r = e.pose.rotation();
    for (int k = 0; k < 9; ++k) out << (k ? " " : "") << fixed_shortest(r(k / 3, k % 3));
    out << ',';
    const Vec3& t = e.pose.translation();
    for (int k = 0; k < 3; ++k) out << (k ? " " : "") << fixed_shortest(t[k]);
    out << ',' << (e.time ? fixed_shortest(*e.time) : std::string("-1")) << '\n';
  }
}

void save_submission(const fs::path& path, std::span<const PoseEstimate> estimates) {
  std::ostringstream ss;
  write_submission(ss, estimates);
  write_text_file(path, ss.str());
}

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError(path.string() + ": read failed");
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << text;
  out.close();
  if (!out) throw InputError(path.string() + ": write failed");
}

namespace {

json load_json(const fs::path& path) {
  if (!fs::exists(path)) throw InputError(path.string() + ": file not found");
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
}

// Indented like dump(2), but arrays of scalars stay on one line.
void dump_pretty(const ojson& j, std::string& out, int indent) {
  const auto scalar = [](const ojson& e) { return !e.is_object() && !e.is_array(); };
  const std::string pad(indent + 2, ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (const auto& [key, value] : j.items()) {
      out += pad + ojson(key).dump() + ": ";
      dump_pretty(value, out, indent + 2);
      out += ++i < j.size() ? ",\n" : "\n";
    }
    out += std::string(indent, ' ') + "}";
  } else if (j.is_array() && !j.empty() && !std::all_of(j.begin(), j.end(), scalar)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      dump_pretty(j[i], out, indent + 2);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += std::string(indent, ' ') + "]";
  } else if (j.is_array()) {
    out += "[";
    for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
    out += "]";
  } else {
    out += j.dump();
  }
}

std::string pretty(const ojson& doc) {
  std::string out;
  dump_pretty(doc, out, 0);
  return out + "\n";
}

void save_json(const fs::path& path, const ojson& doc) { write_text_file(path, pretty(doc)); }

// Runs `fn`, translating JSON access errors into InputError naming `path`.
template <typename Fn>
auto with_context(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string id6(int id) {
  std::ostringstream ss;
  ss << std::setw(6) << std::setfill('0') << id;
  return ss.str();
}

int parse_key(const std::string& key, const fs::path& path) {
  const auto v = parse_number<int>(key);
  if (!v || *v < 0) throw InputError(path.string() + ": invalid id key '" + key + "'");
  return *v;
}

template <std::size_t N>
std::array<double, N> number_array(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw InputError(std::string(what) + " needs " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + " holds a non-number");
    out[i] = j[i].get<double>();
    if (!std::isfinite(out[i])) throw InputError(std::string(what) + " holds a non-finite value");
  }
  return out;
}

Vec3 vec3_from(const json& j, const char* what) {
  const auto a = number_array<3>(j, what);
  return {a[0], a[1], a[2]};
}

RigidTransform pose_from(const json& rj, const json& tj) {
  const auto r = number_array<9>(rj, "cam_R_m2c");
  Mat3 m;
  for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = r[k];
  const auto rot = accept_rotation(m, kSubmissionRotationTolerance);
  if (!rot) throw InputError("cam_R_m2c is not a rotation within 1e-3");
  return RigidTransform(*rot, vec3_from(tj, "cam_t_m2c"), kSubmissionRotationTolerance);
}

ojson mat3_json(const Mat3& m) {
  ojson a = ojson::array();
  for (int k = 0; k < 9; ++k) a.push_back(m(k / 3, k % 3));
  return a;
}

ojson vec3_json(const Vec3& v) { return ojson::array({v.x(), v.y(), v.z()}); }

}  // namespace

// ---------------------------------------------------------------------------
// Dataset layout

fs::path scene_dir(const fs::path& root, const std::string& split, int scene_id) {
  return root / split / id6(scene_id);
}

fs::path depth_path(const fs::path& dir, int im_id) {
  return dir / "depth" / (id6(im_id) + ".png");
}

fs::path model_path(const fs::path& root, int obj_id) {
  return root / "models" / ("obj_" + id6(obj_id) + ".ply");
}

fs::path models_info_path(const fs::path& root) { return root / "models" / "models_info.json"; }

ImageSize read_dataset_camera(const fs::path& root) {
  const fs::path path = root / "camera.json";
  const json doc = load_json(path);
  return with_context(path, [&] {
    ImageSize s{doc.at("width").get<int>(), doc.at("height").get<int>()};
    if (s.width <= 0 || s.height <= 0) throw InputError(path.string() + ": invalid image size");
    return s;
  });
}

void write_dataset_camera(const fs::path& root, ImageSize size) {
  ojson doc;
  doc["width"] = size.width;
  doc["height"] = size.height;
  save_json(root / "camera.json", doc);
}

SceneGroundTruth read_scene_gt(const fs::path& dir, ImageSize default_size) {
  const fs::path gt_path = dir / "scene_gt.json";
  const fs::path cam_path = dir / "scene_camera.json";
  const json gt_doc = load_json(gt_path);
  const json cam_doc = load_json(cam_path);
  if (!gt_doc.is_object()) throw InputError(gt_path.string() + ": expected an object");
  if (!cam_doc.is_object()) throw InputError(cam_path.string() + ": expected an object");

  SceneGroundTruth scene;
  scene.scene_id = parse_number<int>(dir.filename().string()).value_or(0);

  for (const auto& [key, entry] : cam_doc.items()) {
    const int im_id = parse_key(key, cam_path);
    SceneImage img;
    img.im_id = im_id;
    try {
      const auto k = number_array<9>(entry.at("cam_K"), "cam_K");
      img.camera = {k[0], k[4], k[2], k[5], entry.value("width", default_size.width),
                    entry.value("height", default_size.height)};
      img.depth_scale = entry.value("depth_scale", 1.0);
      img.camera.validate();
      if (!(img.depth_scale > 0.0)) throw InputError("depth_scale must be positive");
    } catch (const json::exception& e) {
      throw InputError(cam_path.string() + ": image " + key + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(cam_path.string() + ": image " + key + ": " + e.what());
    }
    scene.images.emplace(im_id, img);
  }

  std::size_t gt_images = 0;
  for (const auto& [key, entry] : gt_doc.items()) {
    const int im_id = parse_key(key, gt_path);
    ++gt_images;
    auto it = scene.images.find(im_id);
    if (it == scene.images.end()) {
      throw InputError(gt_path.string() + ": image " + key + " is missing from " +
                       cam_path.string());
    }
    try {
      for (const json& g : entry) {
        it->second.gts.push_back({g.at("obj_id").get<int>(),
                                  pose_from(g.at("cam_R_m2c"), g.at("cam_t_m2c"))});
      }
    } catch (const json::exception& e) {
      throw InputError(gt_path.string() + ": image " + key + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(gt_path.string() + ": image " + key + ": " + e.what());
    }
  }
  if (gt_images != scene.images.size()) {
    throw InputError(cam_path.string() + ": lists images that are missing from " +
                     gt_path.string());
  }
  return scene;
}

void write_scene_gt(const fs::path& dir, const SceneGroundTruth& scene) {
  fs::create_directories(dir);
  ojson gt_doc = ojson::object();
  ojson cam_doc = ojson::object();
  for (const auto& [im_id, img] : scene.images) {
    ojson list = ojson::array();
    for (const GroundTruthPose& g : img.gts) {
      ojson entry;
      entry["cam_R_m2c"] = mat3_json(g.pose.rotation());
      entry["cam_t_m2c"] = vec3_json(g.pose.translation());
      entry["obj_id"] = g.obj_id;
      list.push_back(entry);
    }
    gt_doc[std::to_string(im_id)] = list;
    const CameraIntrinsics& c = img.camera;
    ojson cam;
    cam["cam_K"] = ojson::array({c.fx, 0.0, c.cx, 0.0, c.fy, c.cy, 0.0, 0.0, 1.0});
    cam["depth_scale"] = img.depth_scale;
    cam["width"] = c.width;
    cam["height"] = c.height;
    cam_doc[std::to_string(im_id)] = cam;
  }
  save_json(dir / "scene_gt.json", gt_doc);
  save_json(dir / "scene_camera.json", cam_doc);
}

std::optional<DepthMap> load_scene_depth(const fs::path& dir, const SceneImage& image) {
  const fs::path path = depth_path(dir, image.im_id);
  if (!fs::exists(path)) {
    warn(path.string() + ": depth image missing; treating every pixel as unmeasured");
    return std::nullopt;
  }
  DepthMap depth = read_depth_png(path, image.depth_scale);
  if (!depth.same_shape(image.camera.width, image.camera.height)) {
    throw InputError(path.string() + ": size does not match the camera");
  }
  return depth;
}

// ---------------------------------------------------------------------------
// Targets

TargetCounts read_targets(const fs::path& path) {
  const json doc = load_json(path);
  return with_context(path, [&] {
    if (!doc.is_array()) throw InputError(path.string() + ": expected a list of targets");
    TargetCounts out;
    for (const json& t : doc) {
      const TargetKey key{t.at("scene_id").get<int>(), t.at("im_id").get<int>(),
                          t.at("obj_id").get<int>()};
      const int n = t.at("inst_count").get<int>();
      if (n < 1) throw InputError(path.string() + ": inst_count must be at least 1");
      const auto [it, inserted] = out.emplace(key, n);
      if (!inserted && it->second != n) {
        throw InputError(path.string() + ": conflicting inst_count for scene " +
                         std::to_string(key.scene_id) + " image " + std::to_string(key.im_id) +
                         " object " + std::to_string(key.obj_id));
      }
    }
    if (out.empty()) throw InputError(path.string() + ": no targets to evaluate");
    return out;
  });
}

void write_targets(const fs::path& path, const TargetCounts& targets) {
  ojson doc = ojson::array();
  for (const auto& [key, n] : targets) {
    ojson t;
    t["im_id"] = key.im_id;
    t["inst_count"] = n;
    t["obj_id"] = key.obj_id;
    t["scene_id"] = key.scene_id;
    doc.push_back(t);
  }
  save_json(path, doc);
}

// ---------------------------------------------------------------------------
// models_info

ModelsInfo read_models_info(const fs::path& path) {
  const json doc = load_json(path);
  if (!doc.is_object()) throw InputError(path.string() + ": expected an object");
  ModelsInfo out;
  for (const auto& [key, entry] : doc.items()) {
    const int obj_id = parse_key(key, path);
    ObjectInfo info;
    try {
      if (entry.contains("diameter")) {
        info.diameter = entry.at("diameter").get<double>();
        if (!(*info.diameter > 0.0) || !std::isfinite(*info.diameter)) {
          throw InputError("diameter must be positive");
        }
      }
      info.has_symmetries =
          entry.contains("symmetries_discrete") || entry.contains("symmetries_continuous");
      for (const json& m : entry.value("symmetries_discrete", json::array())) {
        const auto a = number_array<16>(m, "symmetries_discrete");
        Mat4 mat;
        for (int k = 0; k < 16; ++k) mat(k / 4, k % 4) = a[k];
        const auto rot = accept_rotation(mat.topLeftCorner<3, 3>(), kSubmissionRotationTolerance);
        if (!rot || mat.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) {
          throw InputError("symmetries_discrete entry is not a rigid transform");
        }
        info.discrete.emplace_back(*rot, mat.topRightCorner<3, 1>(),
                                   kSubmissionRotationTolerance);
      }
      for (const json& c : entry.value("symmetries_continuous", json::array())) {
        ContinuousSymmetry s;
        const Vec3 axis = vec3_from(c.at("axis"), "axis");
        if (!(axis.norm() > 0.0)) throw InputError("continuous axis has zero length");
        s.axis = axis.normalized();
        s.offset = c.contains("offset") ? vec3_from(c.at("offset"), "offset") : Vec3::Zero();
        info.continuous.push_back(s);
      }
      for (const json& p : entry.value("symmetries_provenance", json::array())) {
        info.provenance.push_back(provenance_from_string(p.get<std::string>()));
      }
      if (info.provenance.empty()) {
        info.provenance.assign(info.discrete.size(), SymmetryProvenance::Annotated);
      } else if (info.provenance.size() != info.discrete.size()) {
        throw InputError("symmetries_provenance does not match symmetries_discrete");
      }
      info.review_notice = entry.value("symmetries_review", std::string());
    } catch (const json::exception& e) {
      throw InputError(path.string() + ": object " + key + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(path.string() + ": object " + key + ": " + e.what());
    }
    out.emplace(obj_id, std::move(info));
  }
  return out;
}

void write_models_info(const fs::path& path, const ModelsInfo& info) {
  ojson doc = ojson::object();
  for (const auto& [obj_id, o] : info) {
    ojson entry = ojson::object();
    if (o.diameter) entry["diameter"] = *o.diameter;
    if (o.has_symmetries || !o.discrete.empty() || !o.continuous.empty()) {
      ojson discrete = ojson::array();
      for (const RigidTransform& s : o.discrete) {
        const Mat4 m = s.matrix();
        ojson a = ojson::array();
        for (int k = 0; k < 16; ++k) a.push_back(m(k / 4, k % 4));
        discrete.push_back(a);
      }
      entry["symmetries_discrete"] = discrete;
      ojson continuous = ojson::array();
      for (const ContinuousSymmetry& c : o.continuous) {
        ojson cj;
        cj["axis"] = vec3_json(c.axis);
        cj["offset"] = vec3_json(c.offset);
        continuous.push_back(cj);
      }
      entry["symmetries_continuous"] = continuous;
      ojson prov = ojson::array();
      for (SymmetryProvenance p : o.provenance) prov.push_back(to_string(p));
      entry["symmetries_provenance"] = prov;
    }
    if (!o.review_notice.empty()) entry["symmetries_review"] = o.review_notice;
    doc[std::to_string(obj_id)] = entry;
  }
  save_json(path, doc);
}

std::map<int, std::vector<std::size_t>> read_texture_filter(const fs::path& path) {
  const json doc = load_json(path);
  if (!doc.is_object()) throw InputError(path.string() + ": expected an object");
  std::map<int, std::vector<std::size_t>> out;
  with_context(path, [&] {
    for (const auto& [key, list] : doc.items()) {
      out[parse_key(key, path)] = list.get<std::vector<std::size_t>>();
    }
    return 0;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

ojson grid_json(const RecallGrid& g) {
  ojson cells = ojson::array();
  for (const RecallCell& c : g.cells) {
    ojson cj;
    if (c.tau) cj["tau"] = *c.tau;
    cj["theta"] = c.theta;
    cj["recall"] = c.recall;
    cells.push_back(cj);
  }
  ojson out;
  out["function"] = to_string(g.function);
  out["expected_cells"] = g.expected_cells;
  out["cells"] = cells;
  return out;
}

ErrorFunction function_from(const std::string& s) {
  if (s == "vsd") return ErrorFunction::Vsd;
  if (s == "mssd") return ErrorFunction::Mssd;
  if (s == "mspd") return ErrorFunction::Mspd;
  throw InputError("unknown error function '" + s + "'");
}

RecallGrid grid_from(const json& j) {
  RecallGrid g;
  g.function = function_from(j.at("function").get<std::string>());
  g.expected_cells = j.at("expected_cells").get<std::size_t>();
  for (const json& c : j.at("cells")) {
    RecallCell cell;
    if (c.contains("tau")) cell.tau = c.at("tau").get<double>();
    cell.theta = c.at("theta").get<double>();
    cell.recall = c.at("recall").get<double>();
    g.cells.push_back(cell);
  }
  return g;
}

ojson optional_number(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string format_time(const std::optional<double>& t) {
  return t ? fixed_digits(*t, 3) : std::string("-");
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  ojson doc;
  doc["schema"] = report.schema;
  doc["method"] = report.method;
  doc["ar_core"] = report.ar_core;
  doc["mean_time"] = optional_number(report.mean_time);
  ojson datasets = ojson::array();
  for (const DatasetResult& d : report.datasets) {
    ojson dj;
    dj["name"] = d.name;
    dj["ar_vsd"] = d.ar_vsd;
    dj["ar_mssd"] = d.ar_mssd;
    dj["ar_mspd"] = d.ar_mspd;
    dj["ar_d"] = d.ar_d;
    dj["num_gt"] = d.num_gt;
    dj["num_estimates"] = d.num_estimates;
    dj["timed_images"] = d.timed_images;
    dj["mean_time"] = optional_number(d.mean_time);
    dj["grids"] = {{"vsd", grid_json(d.vsd)}, {"mssd", grid_json(d.mssd)},
                   {"mspd", grid_json(d.mspd)}};
    dj["diagnostics"] = d.diagnostics;
    datasets.push_back(dj);
  }
  doc["datasets"] = datasets;
  return pretty(doc);
}

EvaluationReport report_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    EvaluationReport r;
    r.schema = doc.at("schema").get<int>();
    if (r.schema != 1) throw InputError("unsupported report schema " + std::to_string(r.schema));
    r.method = doc.at("method").get<std::string>();
    r.ar_core = doc.at("ar_core").get<double>();
    r.mean_time = optional_from(doc, "mean_time");
    for (const json& dj : doc.at("datasets")) {
      DatasetResult d;
      d.name = dj.at("name").get<std::string>();
      d.ar_vsd = dj.at("ar_vsd").get<double>();
      d.ar_mssd = dj.at("ar_mssd").get<double>();
      d.ar_mspd = dj.at("ar_mspd").get<double>();
      d.ar_d = dj.at("ar_d").get<double>();
      d.num_gt = dj.at("num_gt").get<std::size_t>();
      d.num_estimates = dj.at("num_estimates").get<std::size_t>();
      d.timed_images = dj.at("timed_images").get<std::size_t>();
      d.mean_time = optional_from(dj, "mean_time");
      const json& grids = dj.at("grids");
      d.vsd = grid_from(grids.at("vsd"));
      d.mssd = grid_from(grids.at("mssd"));
      d.mspd = grid_from(grids.at("mspd"));
      d.diagnostics = dj.at("diagnostics").get<std::vector<std::string>>();
      r.datasets.push_back(std::move(d));
    }
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid report: ") + e.what());
  }
}

EvaluationReport read_report(const fs::path& path) {
  try {
    return report_from_json(read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string format_percent(double value) { return fixed_digits(100.0 * value, 1); }

std::string report_table(const EvaluationReport& report) {
  std::size_t name_width = 7;
  for (const DatasetResult& d : report.datasets) name_width = std::max(name_width, d.name.size());
  name_width += 2;

  std::ostringstream out;
  if (!report.method.empty()) out << "Method: " << report.method << "\n\n";
  out << pad_right("Dataset", name_width) << pad_left("AR_VSD", 8) << pad_left("AR_MSSD", 9)
      << pad_left("AR_MSPD", 9) << pad_left("AR_D", 8) << pad_left("Time (s)", 10) << '\n';
  for (const DatasetResult& d : report.datasets) {
    out << pad_right(d.name, name_width) << pad_left(format_percent(d.ar_vsd), 8)
        << pad_left(format_percent(d.ar_mssd), 9) << pad_left(format_percent(d.ar_mspd), 9)
        << pad_left(format_percent(d.ar_d), 8) << pad_left(format_time(d.mean_time), 10) << '\n';
  }
  out << pad_right("Avg.", name_width) << pad_left("", 26)
      << pad_left(format_percent(report.ar_core), 8) << pad_left(format_time(report.mean_time), 10)
      << '\n';
  return out.str();
}

void write_report(const EvaluationReport& report, const fs::path& dir) {
  if (report.datasets.empty()) throw InputError("cannot write a report without datasets");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError(dir.string() + ": cannot create directory: " + ec.message());
  write_text_file(dir / "report.json", report_to_json(report));
  write_text_file(dir / "report.txt", report_table(report));
}

// ---------------------------------------------------------------------------
// Config

void EvalConfig::validate() const {
  if (!(vsd_delta > 0.0) || !std::isfinite(vsd_delta)) {
    throw InputError("config: vsd_delta must be positive");
  }
  if (!(visib_threshold > 0.0 && visib_threshold <= 1.0)) {
    throw InputError("config: visib_threshold must lie in (0, 1]");
  }
  if (split.empty()) throw InputError("config: split must not be empty");
  thresholds.validate();
}

EvalConfig read_config(const fs::path& path) {
  const json doc = load_json(path);
  if (!doc.is_object()) throw InputError(path.string() + ": expected an object");
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  EvalConfig cfg;
  with_context(path, [&] {
    cfg.method = doc.value("method", cfg.method);
    cfg.split = doc.value("split", cfg.split);
    if (doc.contains("datasets")) {
      for (const auto& [name, root] : doc.at("datasets").items()) {
        cfg.datasets.push_back({name, resolve(root.get<std::string>())});
      }
    }
    if (doc.contains("targets")) cfg.targets = resolve(doc.at("targets").get<std::string>());
    if (doc.contains("symmetries")) {
      cfg.symmetries = resolve(doc.at("symmetries").get<std::string>());
    }
    if (doc.contains("texture_filter")) {
      cfg.texture_filter = resolve(doc.at("texture_filter").get<std::string>());
    }
    cfg.vsd_delta = doc.value("vsd_delta", cfg.vsd_delta);
    cfg.visib_threshold = doc.value("visib_threshold", cfg.visib_threshold);
    cfg.est_mask_extension = doc.value("est_mask_extension", cfg.est_mask_extension);
    cfg.workers = doc.value("workers", cfg.workers);
    if (doc.contains("thresholds")) {
      const json& t = doc.at("thresholds");
      ThresholdGrid& g = cfg.thresholds;
      g.vsd_taus = t.value("vsd_taus", g.vsd_taus);
      g.vsd_thetas = t.value("vsd_thetas", g.vsd_thetas);
      g.mssd_thetas = t.value("mssd", g.mssd_thetas);
      g.mspd_thetas = t.value("mspd", g.mspd_thetas);
    }
    return 0;
  });
  try {
    cfg.validate();
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return cfg;
}

}  // namespace bopeval
