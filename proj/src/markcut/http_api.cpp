#include "markcut/http_api.h"

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>

#include "markcut/error.h"
#include "markcut/image_io.h"

namespace fs = std::filesystem;

namespace markcut {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '?') break;
    if (c == '/') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

ApiResponse json_response(const Json& j, int status = 200) { return {status, "application/json", j.dump(2)}; }

ApiResponse error_response(int status, const std::string& stage, const std::string& code, const std::string& msg) {
  return json_response({{"stage", stage}, {"code", code}, {"message", msg}}, status);
}

int status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConfirmBlocked: return 409;
    case ErrorCode::kArgument:
    case ErrorCode::kValidation:
    case ErrorCode::kParse:
    case ErrorCode::kFormat: return 400;
    case ErrorCode::kInternal:
    case ErrorCode::kIo: return 500;
    default: return 422;
  }
}

std::string content_type_for(const std::string& artifact) {
  if (artifact == "surface") return "image/x-portable-pixmap";
  if (artifact == "depthmap" || artifact.rfind("animation/", 0) == 0) return "image/x-portable-graymap";
  if (artifact == "program") return "application/json";
  if (artifact.rfind("mesh/", 0) == 0) return "model/obj";
  return "text/plain";
}

fs::path stash_upload(JobStore& store, const std::vector<std::pair<std::string, std::string>>& files) {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  fs::path dir = store.root() / "uploads" / (std::to_string(stamp) + "_" + std::to_string(counter++));
  fs::create_directories(dir);
  for (const auto& [name, content] : files) {
    std::string base = fs::path(name).filename().string();
    if (base.empty() || base == "." || base == "..") throw ArgumentError("invalid upload file name '" + name + "'");
    io::write_file(dir / base, content);
  }
  return dir;
}

ApiResponse route(JobStore& store, const ApiRequest& req, std::string& stage) {
  const auto parts = split_path(req.path);
  if (parts.empty() || parts[0] != "jobs") throw NotFoundError("no route " + req.method + " " + req.path);
  if (parts.size() == 1) {
    if (req.method == "GET") return json_response({{"jobs", store.list()}});
    if (req.method == "POST") {
      stage = "submit";
      fs::path bundle;
      if (!req.files.empty()) {
        bundle = stash_upload(store, req.files);
      } else {
        Json body;
        try {
          body = Json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
          throw ArgumentError(std::string("request body: ") + e.what());
        }
        if (!body.is_object() || !body.contains("path") || !body["path"].is_string())
          throw ArgumentError("expected multipart bundle files or {\"path\": <bundle dir>}");
        bundle = body["path"].get<std::string>();
      }
      return json_response(store.submit(bundle), 201);
    }
    throw NotFoundError("no route " + req.method + " " + req.path);
  }
  const std::string& id = parts[1];
  if (parts.size() == 2 && req.method == "GET") return json_response(store.get(id));
  if (parts.size() == 3 && parts[2] == "params" && req.method == "PATCH") {
    stage = "parameters";
    Json patch;
    try {
      patch = req.body.empty() ? Json::object() : Json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(std::string("request body: ") + e.what());
    }
    return json_response(store.update_parameters(id, patch));
  }
  if (parts.size() == 3 && parts[2] == "confirm" && req.method == "POST") {
    stage = "confirm";
    std::string text = store.confirm(id);
    return json_response({{"job_id", id},
                          {"state", "confirmed"},
                          {"checksum", GCodeDocument{text, fnv1a64(text)}.checksum_hex()},
                          {"gcode", text}});
  }
  if (parts.size() == 3 && parts[2] == "simulate" && req.method == "POST") {
    stage = "simulate";
    return json_response(store.simulate(id));
  }
  if (req.method == "GET" && parts.size() >= 3) {
    std::string name = parts[2];
    for (std::size_t k = 3; k < parts.size(); ++k) name += "/" + parts[k];
    return {200, content_type_for(name), store.artifact(id, name)};
  }
  throw NotFoundError("no route " + req.method + " " + req.path);
}

}  // namespace

ApiResponse handle_request(JobStore& store, const ApiRequest& req) {
  std::string stage = "jobsvc";
  try {
    return route(store, req, stage);
  } catch (const StageError& e) {
    return error_response(status_for(e.code()) == 500 ? 500 : 422, e.stage(), error_code_name(e.code()), e.what());
  } catch (const Error& e) {
    return error_response(status_for(e.code()), stage, error_code_name(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, stage, error_code_name(ErrorCode::kInternal), e.what());
  }
}

struct ApiServer::Impl {
  JobStore& store;
  httplib::Server server;
  std::thread thread;
  explicit Impl(JobStore& s) : store(s) {}
};

ApiServer::ApiServer(JobStore& store) : impl_(std::make_unique<Impl>(store)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r{req.method, req.path, req.body, {}};
    for (const auto& [field, file] : req.files) r.files.emplace_back(file.filename.empty() ? field : file.filename, file.content);
    ApiResponse out = handle_request(impl_->store, r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  const char* any = R"(/.*)";
  impl_->server.Get(any, handler);
  impl_->server.Post(any, handler);
  impl_->server.Patch(any, handler);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace markcut
