#include "markcut/markcut.h"

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "markcut/error.h"
#include "markcut/fixtures.h"
#include "markcut/http_api.h"
#include "markcut/image_io.h"
#include "markcut/jobsvc.h"
#include "markcut/registration.h"

using namespace markcut;

struct mc_store {
  std::unique_ptr<JobStore> store;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_stage;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

template <typename Fn>
mc_status guarded(Fn&& fn) {
  g_error.clear();
  g_stage.clear();
  try {
    fn();
    return MC_OK;
  } catch (const StageError& e) {
    g_error = e.what();
    g_stage = e.stage();
    return static_cast<mc_status>(e.code());
  } catch (const Error& e) {
    g_error = e.what();
    return static_cast<mc_status>(e.code());
  } catch (const std::exception& e) {
    g_error = e.what();
    return MC_ERR_INTERNAL;
  } catch (...) {
    g_error = "unknown failure";
    return MC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw ArgumentError(std::string(what) + " must not be NULL");
}

std::vector<Vec2> read_points(const char* path) {
  std::istringstream in(io::read_file(path));
  std::vector<Vec2> pts;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    Vec2 p;
    if (!(ls >> p.x >> p.y)) {
      if (pts.empty() && n == 1) continue;  // header row
      throw FormatError(std::string(path) + ": bad point on line " + std::to_string(n));
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

extern "C" {

const char* mc_version(void) { return "1.0.0"; }

const char* mc_status_name(mc_status s) {
  if (s == MC_OK) return "OK";
  return error_code_name(static_cast<ErrorCode>(s));
}

const char* mc_last_error(void) { return g_error.c_str(); }
const char* mc_last_error_stage(void) { return g_stage.c_str(); }

void mc_string_free(char* s) { std::free(s); }

mc_status mc_store_open(const char* root, const char* options_json, mc_store** out) {
  return guarded([&] {
    need(root, "root");
    need(out, "out");
    SubmitOptions opt;
    if (options_json) {
      Json j;
      try {
        j = Json::parse(options_json);
      } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("store options: ") + e.what());
      }
      opt.base_resolution_mm = j.value("base_resolution_mm", opt.base_resolution_mm);
      opt.animation_frames = j.value("animation_frames", opt.animation_frames);
      opt.preview_max_px = j.value("preview_max_px", opt.preview_max_px);
      if (!(opt.base_resolution_mm > 0) || opt.animation_frames < 1 || opt.preview_max_px < 2)
        throw ValidationError("invalid store options");
    }
    auto s = std::make_unique<mc_store>();
    s->store = std::make_unique<JobStore>(root, opt);
    *out = s.release();
  });
}

void mc_store_close(mc_store* store) { delete store; }

mc_status mc_job_submit(mc_store* s, const char* dir, char** out) {
  return guarded([&] {
    need(s, "store");
    need(dir, "bundle_dir");
    need(out, "out");
    *out = dup(s->store->submit(dir).dump(2));
  });
}

mc_status mc_job_get(mc_store* s, const char* id, char** out) {
  return guarded([&] {
    need(s, "store");
    need(id, "job_id");
    need(out, "out");
    *out = dup(s->store->get(id).dump(2));
  });
}

mc_status mc_job_latest(mc_store* s, char** out) {
  return guarded([&] {
    need(s, "store");
    need(out, "out");
    *out = dup(s->store->latest());
  });
}

mc_status mc_job_update_params(mc_store* s, const char* id, const char* patch, char** out) {
  return guarded([&] {
    need(s, "store");
    need(id, "job_id");
    need(out, "out");
    Json p = Json::object();
    if (patch && *patch) {
      try {
        p = Json::parse(patch);
      } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("parameter patch: ") + e.what());
      }
    }
    *out = dup(s->store->update_parameters(id, p).dump(2));
  });
}

mc_status mc_job_simulate(mc_store* s, const char* id, char** out) {
  return guarded([&] {
    need(s, "store");
    need(id, "job_id");
    need(out, "out");
    *out = dup(s->store->simulate(id).dump(2));
  });
}

mc_status mc_job_confirm(mc_store* s, const char* id, char** out) {
  return guarded([&] {
    need(s, "store");
    need(id, "job_id");
    need(out, "out");
    *out = dup(s->store->confirm(id));
  });
}

mc_status mc_job_gcode(mc_store* s, const char* id, char** out) {
  return guarded([&] {
    need(s, "store");
    need(id, "job_id");
    need(out, "out");
    *out = dup(s->store->gcode(id));
  });
}

mc_status mc_job_artifact(mc_store* s, const char* id, const char* name, char** data, size_t* size) {
  return guarded([&] {
    need(s, "store");
    need(id, "job_id");
    need(name, "name");
    need(data, "data");
    need(size, "size");
    std::string bytes = s->store->artifact(id, name);
    *data = dup(bytes);
    *size = bytes.size();
  });
}

mc_status mc_serve(mc_store* s, const char* host, int port) {
  return guarded([&] {
    need(s, "store");
    if (port < 0 || port > 65535) throw ArgumentError("port out of range");
    ApiServer server(*s->store);
    server.run(host ? host : "127.0.0.1", port);
  });
}

mc_status mc_eval_align(const char* truth_path, const char* measured_path, const char* out_dir, double scale,
                        char** out) {
  return guarded([&] {
    need(truth_path, "truth_path");
    need(measured_path, "measured_path");
    need(out, "out");
    auto truth = read_points(truth_path);
    auto measured = read_points(measured_path);
    AlignmentReport r = evaluate_alignment(truth, measured, 200, 200);
    if (out_dir) export_alignment(r, out_dir, scale);
    *out = dup(alignment_json(r));
  });
}

mc_status mc_render_scene(const char* spec_json, const char* out_dir, char** out) {
  return guarded([&] {
    need(spec_json, "spec_json");
    need(out_dir, "out_dir");
    SceneSpec spec = parse_scene_spec(spec_json);
    RenderedScene scene = render_scene(spec);
    save_scan_bundle(scene.bundle, out_dir);
    const auto& t = scene.truth.camera_to_workspace;
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r) rot.push_back({t.rotation(r, 0), t.rotation(r, 1), t.rotation(r, 2)});
    Json j = {{"camera_to_workspace",
               {{"rotation", rot}, {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}}},
              {"surface_z_mm", scene.truth.surface_z},
              {"fiducial_count", scene.truth.fiducials.size()},
              {"stroke_count", scene.truth.strokes.size()}};
    std::string text = j.dump(2);
    io::write_file(std::filesystem::path(out_dir) / "truth.json", text + "\n");
    *out = dup(text);
  });
}

}  // extern "C"
