#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "markcut/jobsvc.h"

namespace markcut {

struct ApiRequest {
  std::string method;   // GET, POST, PATCH
  std::string path;     // e.g. /jobs/000001/program
  std::string body;
  std::vector<std::pair<std::string, std::string>> files;  // multipart uploads: filename, content
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Routes one request against the store. Errors become {stage, code, message}.
ApiResponse handle_request(JobStore& store, const ApiRequest& request);

// Threaded HTTP front end over handle_request.
class ApiServer {
 public:
  explicit ApiServer(JobStore& store);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and serves in a background thread; port 0 picks a free port.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop() is called.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace markcut
