#include "markcut/jobsvc.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>

#include "markcut/depthmap.h"
#include "markcut/image_io.h"
#include "markcut/millsim.h"
#include "markcut/registration.h"
#include "markcut/scanio.h"
#include "markcut/surface.h"

namespace fs = std::filesystem;

namespace markcut {

const char* job_state_name(JobState s) {
  switch (s) {
    case JobState::kIngested: return "ingested";
    case JobState::kInterpreted: return "interpreted";
    case JobState::kPlanned: return "planned";
    case JobState::kConfirmed: return "confirmed";
  }
  return "ingested";
}

JobState job_state_from_name(const std::string& s) {
  if (s == "ingested") return JobState::kIngested;
  if (s == "interpreted") return JobState::kInterpreted;
  if (s == "planned") return JobState::kPlanned;
  if (s == "confirmed") return JobState::kConfirmed;
  throw FormatError("unknown job state '" + s + "'");
}

namespace {

class FileLock {
 public:
  FileLock(const fs::path& path, bool exclusive) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open lock " + path.string());
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw IoError("cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::string now_iso() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 12 && std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Json read_record(const fs::path& dir) {
  try {
    return Json::parse(io::read_file(dir / "job.json"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("job.json: ") + e.what());
  }
}

void write_record(const fs::path& dir, Json& record) {
  record["updated_at"] = now_iso();
  // write-then-rename so readers never see a partial record
  const fs::path tmp = dir / "job.json.tmp";
  io::write_file(tmp, record.dump(2) + "\n");
  fs::rename(tmp, dir / "job.json");
}

JobState state_of(const Json& r) { return job_state_from_name(r.at("state").get<std::string>()); }

template <typename Fn>
auto run_stage(const char* stage, const fs::path& dir, Json& record, Fn&& fn) -> decltype(fn()) {
  auto fail = [&](ErrorCode code, const std::string& msg) {
    record["error"] = {{"stage", stage}, {"code", error_code_name(code)}, {"message", msg}};
    write_record(dir, record);
    return StageError(stage, code, msg);
  };
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw fail(e.code(), e.what());
  } catch (const std::exception& e) {
    throw fail(ErrorCode::kInternal, e.what());
  }
}

bool has_error_diagnostics(const Json& diags) {
  for (const auto& d : diags)
    if (d.value("severity", "") == "error") return true;
  return false;
}

std::string frame_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "anim_%02d", k);
  return buf;
}

}  // namespace

JobStore::JobStore(fs::path root, SubmitOptions options) : root_(std::move(root)), options_(options) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create job store at " + root_.string() + ": " + ec.message());
}

fs::path JobStore::job_dir(const std::string& id) const {
  if (!valid_id(id)) throw NotFoundError("no job '" + id + "'");
  fs::path dir = root_ / id;
  if (!fs::exists(dir / "job.json")) throw NotFoundError("no job '" + id + "'");
  return dir;
}

std::vector<std::string> JobStore::list() const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(root_)) {
    std::string name = e.path().filename().string();
    if (e.is_directory() && valid_id(name) && fs::exists(e.path() / "job.json")) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string JobStore::latest() const {
  auto ids = list();
  if (ids.empty()) throw NotFoundError("the job store is empty");
  return ids.back();
}

Json JobStore::get(const std::string& id) const {
  fs::path dir = job_dir(id);
  FileLock lock(dir / "job.lock", false);
  return read_record(dir);
}

FrameFit register_bundle(const ScanBundle& bundle, const DepthMap& depth) {
  auto centers = detect_fiducials(bundle.color_frames.front(), bundle.fiducials);
  auto pts = marker_points(centers, depth, bundle.intrinsics);
  return fit_workspace_frame(pts, bundle.fiducials.nominal_centers_mm);
}

SurfaceRaster surface_from_bundle(const ScanBundle& bundle, const DepthMap& depth, const FrameFit& fit,
                                  double base_resolution_mm) {
  PointCloud cloud = depth_to_pointcloud(depth, bundle.color_frames.front(), bundle.intrinsics);
  for (Vec3& p : cloud.points) p = fit.camera_to_workspace.apply(p);
  // crop to the fiducial hull's bounding box
  SurfaceConfig cfg;
  cfg.x_min = cfg.y_min = 1e300;
  cfg.x_max = cfg.y_max = -1e300;
  for (const Vec2& c : bundle.fiducials.nominal_centers_mm) {
    cfg.x_min = std::min(*cfg.x_min, c.x);
    cfg.x_max = std::max(*cfg.x_max, c.x);
    cfg.y_min = std::min(*cfg.y_min, c.y);
    cfg.y_max = std::max(*cfg.y_max, c.y);
  }
  double z = extract_surface(cloud, cfg);
  return rasterize_surface(cloud, z, base_resolution_mm, cfg);
}

Json JobStore::submit(const fs::path& bundle_dir) {
  std::string id;
  fs::path dir;
  {
    FileLock store_lock(root_ / "store.lock", true);
    long next = 1;
    for (const auto& e : fs::directory_iterator(root_)) {
      std::string name = e.path().filename().string();
      if (e.is_directory() && valid_id(name)) next = std::max(next, std::stol(name) + 1);
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06ld", next);
    id = buf;
    dir = root_ / id;
    fs::create_directories(dir);
  }
  FileLock lock(dir / "job.lock", true);
  Json record;
  record["job_id"] = id;
  record["state"] = job_state_name(JobState::kIngested);
  record["created_at"] = now_iso();
  record["scan"] = fs::absolute(bundle_dir).lexically_normal().string();
  record["parameters"] = {{"base_resolution_mm", options_.base_resolution_mm},
                          {"tool", tool_json(ToolConfig{})},
                          {"items", Json::object()}};
  record["diagnostics"] = Json::array();
  record["error"] = nullptr;
  record["artifacts"] = Json::object();
  write_record(dir, record);

  ScanBundle bundle = run_stage("scanio", dir, record, [&] { return load_scan_bundle(bundle_dir); });
  DepthMap depth = run_stage("scanio", dir, record, [&] {
    return average_depth_frames(std::span<const DepthImage>(bundle.depth_frames), bundle.depth_scale_mm);
  });
  FrameFit fit = run_stage("registration", dir, record, [&] { return register_bundle(bundle, depth); });
  record["registration"] = {{"fiducials", bundle.fiducials.count},
                            {"residual_rms_mm", fit.residual_rms_mm},
                            {"plane_rms_mm", fit.plane_rms_mm},
                            {"plane_normal", {fit.plane_normal.x, fit.plane_normal.y, fit.plane_normal.z}}};

  SurfaceRaster surface = run_stage("surface", dir, record, [&] {
    return surface_from_bundle(bundle, depth, fit, options_.base_resolution_mm);
  });
  record["surface_z_mm"] = surface.surface_z;

  CutProgram program = run_stage("marklang", dir, record, [&] { return compile_marks(surface); });
  if (program.items.empty())
    program.diagnostics.push_back({"EmptyProgramNote", Severity::kWarning, "no cut marks were found", -1, -1});

  save_surface(surface, dir, "surface");
  io::write_file(dir / "program.json", program_json(program).dump(2) + "\n");
  record["state"] = job_state_name(JobState::kInterpreted);
  record["diagnostics"] = diagnostics_json(program.diagnostics);
  record["items"] = Json::array();
  for (const auto& it : program.items)
    record["items"].push_back({{"item_id", it.item_id},
                               {"kind", kind_name(it.kind)},
                               {"wall_profile", wall_name(it.wall_profile)},
                               {"depth_limit_mm", it.depth_limit_mm},
                               {"slope", it.slope},
                               {"smooth_window_mm", it.smooth_window_mm}});
  record["artifacts"] = {{"surface", "surface.ppm"}, {"program", "program.json"}};
  write_record(dir, record);
  return record;
}

Json JobStore::update_parameters(const std::string& id, const Json& patch) {
  fs::path dir = job_dir(id);
  FileLock lock(dir / "job.lock", true);
  return plan_locked(dir, read_record(dir), patch);
}

Json JobStore::plan_locked(const fs::path& dir, Json record, const Json& patch) {
  if (state_of(record) == JobState::kIngested) throw ValidationError("job has not been interpreted");
  if (!patch.is_object() && !patch.is_null()) throw ArgumentError("parameter patch must be a JSON object");
  CutProgram program = program_from_json(Json::parse(io::read_file(dir / "program.json")));
  Json params = record.at("parameters");

  // merge the patch
  if (patch.is_object()) {
    for (const auto& [key, value] : patch.items())
      if (key != "items" && key != "tool") throw ArgumentError("unknown parameter group '" + key + "'");
    if (patch.contains("items")) {
      if (!patch["items"].is_object()) throw ArgumentError("items patch must be an object");
      for (const auto& [key, value] : patch["items"].items()) {
        int item_id = -1;
        try {
          std::size_t used = 0;
          item_id = std::stoi(key, &used);
          if (used != key.size()) item_id = -1;
        } catch (const std::exception&) {
          item_id = -1;
        }
        if (item_id < 0 || !program.item(item_id)) throw ArgumentError("unknown item id '" + key + "'");
        Json& slot = params["items"][key];
        if (slot.is_null()) slot = Json::object();
        for (const auto& [field, v] : value.items()) {
          if (!v.is_number()) throw ValidationError(field + " must be a number");
          double x = v.get<double>();
          if (field == "depth_limit_mm" || field == "slope") {
            if (!(x > 0) || !std::isfinite(x)) throw ValidationError(field + " must be positive");
          } else if (field == "smooth_window_mm") {
            if (!(x >= 0) || !std::isfinite(x)) throw ValidationError("smooth_window_mm must be non-negative");
          } else {
            throw ArgumentError("unknown item parameter '" + field + "'");
          }
          slot[field] = x;
        }
      }
    }
    if (patch.contains("tool")) {
      ToolConfig t = tool_from_json(patch["tool"], tool_from_json(params["tool"]));
      t.validate();
      params["tool"] = tool_json(t);
    }
  }
  const ToolConfig tool = tool_from_json(params["tool"]);
  tool.validate();
  const double surface_z = record.at("surface_z_mm");

  // apply per-item parameters and smoothing
  std::vector<Stroke> strokes = program.strokes;
  for (CutItem& it : program.items) {
    const Json& p = params["items"].value(std::to_string(it.item_id), Json::object());
    it.depth_limit_mm = p.value("depth_limit_mm", it.depth_limit_mm);
    it.slope = p.value("slope", it.slope);
    it.smooth_window_mm = p.value("smooth_window_mm", it.smooth_window_mm);
    if (it.smooth_window_mm > 0) {
      std::set<int> ids(it.boundary.begin(), it.boundary.end());
      ids.insert(it.preserve.begin(), it.preserve.end());
      for (Stroke& s : strokes)
        if (ids.count(s.id)) s = auto_smooth(s, it.smooth_window_mm);
    }
  }
  for (CutItem& it : program.items) it.region_mask = item_region_mask(it, strokes, program.geometry);

  std::vector<Diagnostic> diags = program.diagnostics;
  TargetDepthMap target;
  try {
    target = build_target_depthmap(program, program.geometry);
  } catch (const GeometryError&) {
    CutProgram kept = program;
    kept.items.clear();
    for (const CutItem& it : program.items) {
      CutProgram one = program;
      one.items = {it};
      try {
        build_target_depthmap(one, program.geometry);
        kept.items.push_back(it);
      } catch (const GeometryError& e) {
        diags.push_back({"GeometryError", Severity::kError, e.what(), it.item_id, -1});
      }
    }
    target = build_target_depthmap(kept, program.geometry);
  }

  PlanResult plan = plan_toolpath(target, tool, surface_z);
  diags.insert(diags.end(), plan.diagnostics.begin(), plan.diagnostics.end());
  GCodeDocument doc = emit_gcode(plan.trajectory);
  io::write_file(dir / "gcode.nc", doc.text);
  std::error_code ec;
  fs::remove(dir / "final.nc", ec);

  const Heightfield stock = make_stock(program.geometry, surface_z);
  const Heightfield sim = markcut::simulate(stock, plan.trajectory);
  const HeightfieldComparison cmp = compare_heightfields(sim, surface_z, target, tool);
  Heightfield tgt = stock;
  for (std::size_t k = 0; k < tgt.z.size(); ++k) tgt.z[k] = surface_z - target.depths[k];

  save_depthmap(target, dir, "depthmap");
  save_heightfield(sim, dir, "simulated");
  const int longest = std::max(program.geometry.width, program.geometry.height);
  const int factor = std::max(1, (longest + options_.preview_max_px - 1) / options_.preview_max_px);
  SurfaceRaster surface = load_surface(dir, "surface");
  const std::pair<const char*, const Heightfield*> meshes[] = {{"origin", &stock}, {"target", &tgt}, {"simulated", &sim}};
  for (const auto& [name, field] : meshes) {
    Heightfield small = downsample(*field, factor);
    if (small.geometry.width >= 2 && small.geometry.height >= 2)
      io::write_file(dir / (std::string("mesh_") + name + ".obj"), mesh_to_obj(heightfield_to_mesh(small, &surface)));
  }
  auto frames = animation_frames(stock, plan.trajectory, options_.animation_frames);
  for (std::size_t k = 0; k < frames.size(); ++k)
    save_heightfield(downsample(frames[k], factor), dir, frame_name(static_cast<int>(k)));

  record["parameters"] = params;
  record["state"] = job_state_name(JobState::kPlanned);
  record["diagnostics"] = diagnostics_json(diags);
  record["error"] = nullptr;
  record["items"] = Json::array();
  for (const auto& it : program.items)
    record["items"].push_back({{"item_id", it.item_id},
                               {"kind", kind_name(it.kind)},
                               {"wall_profile", wall_name(it.wall_profile)},
                               {"depth_limit_mm", it.depth_limit_mm},
                               {"slope", it.slope},
                               {"smooth_window_mm", it.smooth_window_mm}});
  record["plan"] = {{"layer_depths_mm", plan.layer_depths},
                    {"moves", plan.trajectory.moves.size()},
                    {"target_max_depth_mm", target.max_depth()}};
  record["gcode_checksum"] = doc.checksum_hex();
  record.erase("confirmed_gcode_checksum");
  record["simulation"] = {{"overcut_max_mm", cmp.overcut_max_mm},
                          {"undercut_max_mm", cmp.undercut_max_mm},
                          {"rms_mm", cmp.rms_mm},
                          {"scallop_bound_mm", cmp.scallop_bound_mm},
                          {"interior_pixels", cmp.interior_pixels}};
  record["artifacts"] = {{"surface", "surface.ppm"},
                         {"program", "program.json"},
                         {"depthmap", "depthmap.pgm"},
                         {"simulated", "simulated.pgm"},
                         {"mesh_origin", "mesh_origin.obj"},
                         {"mesh_target", "mesh_target.obj"},
                         {"mesh_simulated", "mesh_simulated.obj"},
                         {"animation_frames", frames.size()},
                         {"gcode", "gcode.nc"}};
  write_record(dir, record);
  return record;
}

Json JobStore::simulate(const std::string& id) {
  fs::path dir = job_dir(id);
  FileLock lock(dir / "job.lock", true);
  Json record = read_record(dir);
  if (state_of(record) < JobState::kPlanned) record = plan_locked(dir, record, Json::object());
  return record.at("simulation");
}

std::string JobStore::confirm(const std::string& id) {
  fs::path dir = job_dir(id);
  FileLock lock(dir / "job.lock", true);
  Json record = read_record(dir);
  const JobState st = state_of(record);
  if (st == JobState::kConfirmed) return io::read_file(dir / "final.nc");
  if (st != JobState::kPlanned) throw ValidationError("job must be planned before confirmation");
  if (has_error_diagnostics(record["diagnostics"])) {
    std::string codes;
    for (const auto& d : record["diagnostics"])
      if (d.value("severity", "") == "error")
        codes += (codes.empty() ? "" : ", ") + d.value("code", std::string("?")) + " (item " +
                 std::to_string(d.value("item_id", -1)) + ")";
    throw ConfirmBlockedError("unresolved error diagnostics: " + codes);
  }
  std::string text = io::read_file(dir / "gcode.nc");
  io::write_file(dir / "final.nc", text);
  GCodeDocument doc{text, fnv1a64(text)};
  record["state"] = job_state_name(JobState::kConfirmed);
  record["confirmed_gcode_checksum"] = doc.checksum_hex();
  record["artifacts"]["final_gcode"] = "final.nc";
  write_record(dir, record);
  return text;
}

std::string JobStore::gcode(const std::string& id) const {
  fs::path dir = job_dir(id);
  FileLock lock(dir / "job.lock", false);
  const JobState st = state_of(read_record(dir));
  if (st == JobState::kConfirmed) return io::read_file(dir / "final.nc");
  if (st == JobState::kPlanned) return io::read_file(dir / "gcode.nc");
  throw NotFoundError("job " + id + " has no G-code yet");
}

std::string JobStore::artifact(const std::string& id, const std::string& name) const {
  if (name == "gcode") return gcode(id);
  fs::path dir = job_dir(id);
  FileLock lock(dir / "job.lock", false);
  fs::path file;
  if (name == "surface") file = "surface.ppm";
  else if (name == "program") file = "program.json";
  else if (name == "depthmap") file = "depthmap.pgm";
  else if (name == "mesh/origin" || name == "mesh/target" || name == "mesh/simulated")
    file = "mesh_" + name.substr(5) + ".obj";
  else if (name.rfind("animation/", 0) == 0) {
    const std::string k = name.substr(10);
    if (!valid_id(k) || k.size() > 3) throw NotFoundError("no artifact '" + name + "'");
    file = frame_name(std::stoi(k)) + ".pgm";
  } else {
    throw NotFoundError("no artifact '" + name + "'");
  }
  if (!fs::exists(dir / file)) throw NotFoundError("artifact '" + name + "' is not available for job " + id);
  return io::read_file(dir / file);
}

}  // namespace markcut
