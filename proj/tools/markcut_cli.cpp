// Command-line front end over the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "markcut/markcut.h"

namespace {

using nlohmann::ordered_json;

struct Owned {
  char* p = nullptr;
  ~Owned() { mc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int exit_code(mc_status s) {
  if (s == MC_OK) return 0;
  if (s == MC_ERR_VALIDATION || s == MC_ERR_ARGUMENT || s == MC_ERR_CONFIRM_BLOCKED) return 2;
  return 1;
}

int report(mc_status s) {
  if (s == MC_OK) return 0;
  ordered_json err = {{"stage", mc_last_error_stage()}, {"code", mc_status_name(s)}, {"message", mc_last_error()}};
  std::cerr << err.dump() << "\n";
  return exit_code(s);
}

// ITEM=VALUE pairs into the items patch under `field`.
void add_item_values(ordered_json& patch, const std::vector<std::string>& pairs, const char* field) {
  for (const std::string& kv : pairs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError(std::string("expected ITEM=VALUE, got '") + kv + "'");
    std::string item = kv.substr(0, eq);
    double v = 0;
    try {
      size_t used = 0;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad number in '" + kv + "'");
    }
    patch["items"][item][field] = v;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"markcut: pen marks on wood to milling programs"};
  app.require_subcommand(1);
  std::string store_dir = "markcut_jobs";
  if (const char* env = std::getenv("MARKCUT_STORE")) store_dir = env;
  double base_res = 2.0;
  app.add_option("--store", store_dir, "job store directory");
  app.add_option("--base-res", base_res, "base scan resolution, mm per cell");

  std::string bundle;
  auto* ingest = app.add_subcommand("ingest", "load a scan bundle and interpret its marks");
  ingest->add_option("dir", bundle, "scan bundle directory")->required();

  std::string job;
  auto* interpret = app.add_subcommand("interpret", "print the cut program of a job");
  interpret->add_option("--job", job, "job id (default: latest)");

  std::vector<std::string> depths, slopes, smooths;
  double stepover = 0, pass = 0, radius = 0;
  std::string shape;
  auto* plan = app.add_subcommand("plan", "set parameters and plan toolpaths");
  plan->add_option("--job", job, "job id (default: latest)");
  plan->add_option("--depth", depths, "ITEM=MM depth limit");
  plan->add_option("--slope", slopes, "ITEM=V wall slope");
  plan->add_option("--smooth", smooths, "ITEM=MM smoothing window");
  plan->add_option("--stepover", stepover, "stepover as a fraction of the tool diameter");
  plan->add_option("--pass", pass, "max depth per pass, mm");
  plan->add_option("--radius", radius, "tool radius, mm");
  plan->add_option("--shape", shape, "ball_nose or flat_end");

  auto* simulate = app.add_subcommand("simulate", "simulate the planned program against the target");
  simulate->add_option("--job", job, "job id (default: latest)");

  std::string out_path;
  bool no_confirm = false;
  auto* gcode = app.add_subcommand("gcode", "confirm the job and write its G-code");
  gcode->add_option("--job", job, "job id (default: latest)");
  gcode->add_option("-o,--output", out_path, "output .nc file")->required();
  gcode->add_flag("--no-confirm", no_confirm, "write the current program without confirming");

  std::string truth, measured, align_out;
  double scale = 40;
  auto* align = app.add_subcommand("eval-align", "alignment accuracy report");
  align->add_option("--truth", truth, "truth points, x,y per line")->required();
  align->add_option("--measured", measured, "measured points, x,y per line")->required();
  align->add_option("-o,--output", align_out, "directory for alignment.json, heatmap.pgm, vectors.csv");
  align->add_option("--scale", scale, "display scale for exported vectors");

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "serve the HTTP API");
  serve->add_option("--port", port, "port");
  serve->add_option("--host", host, "bind address");

  std::string spec_path, scene_out;
  auto* render = app.add_subcommand("render-scene", "render a synthetic scan bundle from a scene spec");
  render->add_option("--spec", spec_path, "SceneSpec JSON file")->required();
  render->add_option("-o,--output", scene_out, "bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*align) {
    Owned r;
    mc_status s = mc_eval_align(truth.c_str(), measured.c_str(), align_out.empty() ? nullptr : align_out.c_str(), scale, &r.p);
    if (s != MC_OK) return report(s);
    std::cout << r.str() << "\n";
    return 0;
  }
  if (*render) {
    std::ifstream in(spec_path, std::ios::binary);
    if (!in) {
      std::cerr << "cannot read " << spec_path << "\n";
      return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    Owned r;
    mc_status s = mc_render_scene(ss.str().c_str(), scene_out.c_str(), &r.p);
    if (s != MC_OK) return report(s);
    std::cout << r.str() << "\n";
    return 0;
  }

  mc_store* store = nullptr;
  ordered_json opts = {{"base_resolution_mm", base_res}};
  mc_status s = mc_store_open(store_dir.c_str(), opts.dump().c_str(), &store);
  if (s != MC_OK) return report(s);
  struct Closer {
    mc_store* s;
    ~Closer() { mc_store_close(s); }
  } closer{store};

  auto resolve_job = [&]() -> mc_status {
    if (!job.empty()) return MC_OK;
    Owned id;
    mc_status st = mc_job_latest(store, &id.p);
    if (st == MC_OK) job = id.str();
    return st;
  };

  if (*ingest) {
    Owned r;
    s = mc_job_submit(store, bundle.c_str(), &r.p);
    if (s != MC_OK) return report(s);
    std::cout << r.str() << "\n";
    return 0;
  }
  if (*serve) {
    std::cerr << "serving on http://" << host << ":" << port << "\n";
    return report(mc_serve(store, host.c_str(), port));
  }
  if ((s = resolve_job()) != MC_OK) return report(s);

  if (*interpret) {
    Owned data;
    size_t size = 0;
    s = mc_job_artifact(store, job.c_str(), "program", &data.p, &size);
    if (s != MC_OK) return report(s);
    std::cout << std::string(data.p, size);
    return 0;
  }
  if (*plan) {
    ordered_json patch = ordered_json::object();
    try {
      add_item_values(patch, depths, "depth_limit_mm");
      add_item_values(patch, slopes, "slope");
      add_item_values(patch, smooths, "smooth_window_mm");
    } catch (const CLI::ValidationError& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    if (plan->count("--stepover")) patch["tool"]["stepover_fraction"] = stepover;
    if (plan->count("--pass")) patch["tool"]["max_depth_per_pass_mm"] = pass;
    if (plan->count("--radius")) patch["tool"]["radius_mm"] = radius;
    if (plan->count("--shape")) patch["tool"]["shape"] = shape;
    Owned r;
    s = mc_job_update_params(store, job.c_str(), patch.dump().c_str(), &r.p);
    if (s != MC_OK) return report(s);
    std::cout << r.str() << "\n";
    return 0;
  }
  if (*simulate) {
    Owned r;
    s = mc_job_simulate(store, job.c_str(), &r.p);
    if (s != MC_OK) return report(s);
    std::cout << r.str() << "\n";
    return 0;
  }
  if (*gcode) {
    Owned text;
    s = no_confirm ? mc_job_gcode(store, job.c_str(), &text.p) : mc_job_confirm(store, job.c_str(), &text.p);
    if (s != MC_OK) return report(s);
    std::ofstream out(out_path, std::ios::binary);
    out << text.str();
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    std::cout << out_path << "\n";
    return 0;
  }
  return 1;
}
