#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "markcut/error.h"
#include "markcut/registration.h"
#include "markcut/scanio.h"
#include "markcut/serialize.h"
#include "markcut/surface.h"

namespace markcut {

// A pipeline failure tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorCode code, const std::string& message)
      : Error(code, message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// The in-memory front half of submit.
FrameFit register_bundle(const ScanBundle& bundle, const DepthMap& depth);
SurfaceRaster surface_from_bundle(const ScanBundle& bundle, const DepthMap& depth, const FrameFit& fit,
                                  double base_resolution_mm = 2.0);

enum class JobState { kIngested, kInterpreted, kPlanned, kConfirmed };
const char* job_state_name(JobState s);
JobState job_state_from_name(const std::string& s);

struct SubmitOptions {
  double base_resolution_mm = 2.0;  // working raster is a tenth of this
  int animation_frames = 8;
  int preview_max_px = 200;         // longest side of preview meshes
};

// One directory per job under `root`, holding job.json plus artifacts.
// Writers take an exclusive advisory lock on the job, readers a shared one.
class JobStore {
 public:
  explicit JobStore(std::filesystem::path root, SubmitOptions options = {});

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path job_dir(const std::string& id) const;

  // scanio -> registration -> surface -> marklang. Returns the record.
  Json submit(const std::filesystem::path& bundle_dir);
  Json get(const std::string& id) const;
  std::vector<std::string> list() const;
  // Most recent job id; NotFoundError when the store is empty.
  std::string latest() const;

  // Patch: {"items": {"<id>": {depth_limit_mm, slope, smooth_window_mm}}, "tool": {...}}.
  // Re-plans the job: depth map, toolpath, G-code, simulation and previews.
  Json update_parameters(const std::string& id, const Json& patch);
  // Comparison of the simulated result with the target (plans when needed).
  Json simulate(const std::string& id);
  // Freezes and returns the G-code; idempotent once confirmed.
  std::string confirm(const std::string& id);

  // Current G-code (frozen when confirmed).
  std::string gcode(const std::string& id) const;
  // Raw artifact bytes: surface, program, depthmap, mesh/<origin|target|simulated>, animation/<k>, gcode.
  std::string artifact(const std::string& id, const std::string& name) const;

 private:
  Json plan_locked(const std::filesystem::path& dir, Json record, const Json& patch);

  std::filesystem::path root_;
  SubmitOptions options_;
};

}  // namespace markcut
