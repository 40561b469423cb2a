#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "markcut/depthmap.h"
#include "markcut/marklang.h"
#include "markcut/millsim.h"
#include "markcut/surface.h"
#include "markcut/toolpath.h"

namespace markcut {

using Json = nlohmann::ordered_json;

Json geometry_json(const RasterGeometry& g);
RasterGeometry geometry_from_json(const Json& j);

Json diagnostics_json(const std::vector<Diagnostic>& diagnostics);
std::vector<Diagnostic> diagnostics_from_json(const Json& j);

Json stroke_json(const Stroke& s);
Stroke stroke_from_json(const Json& j);

// Items, strokes (mm polylines), diagnostics and geometry. Region masks are
// not stored; program_from_json rebuilds them from the strokes.
Json program_json(const CutProgram& program);
CutProgram program_from_json(const Json& j);

Json tool_json(const ToolConfig& tool);
ToolConfig tool_from_json(const Json& j, ToolConfig base = {});

// PPM color + PGM validity + JSON sidecar.
void save_surface(const SurfaceRaster& surface, const std::filesystem::path& dir, const std::string& stem);
SurfaceRaster load_surface(const std::filesystem::path& dir, const std::string& stem);

// 16-bit PGM at 0.01 mm per unit plus a JSON sidecar.
inline constexpr double kDepthPgmScale = 0.01;
void save_depthmap(const TargetDepthMap& map, const std::filesystem::path& dir, const std::string& stem);
DepthImage encode_depths(const RealRaster& depths);
// Heights are stored relative to the bed (z = 0).
void save_heightfield(const Heightfield& field, const std::filesystem::path& dir, const std::string& stem);
Heightfield load_heightfield(const std::filesystem::path& dir, const std::string& stem);

}  // namespace markcut
