#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>

#include "weaklabel/config.hpp"

namespace weaklabel {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8787;
  int max_width = 4096;
  int max_height = 4096;
  /// Directory of the built web UI served under "/"; empty disables it.
  std::string ui_dir;
  /// When set, each session mirrors its canonical files into store_dir/<id>/.
  std::string store_dir;
  int timeout_seconds = 30;
  PipelineConfig defaults;
};

/// Transport-independent result of an API call.
struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Session store and request handlers behind the HTTP API. All methods are
/// safe to call concurrently; calls on one session are serialized.
class AnnotationService {
 public:
  explicit AnnotationService(ServerOptions options = {});
  ~AnnotationService();

  /// POST /api/sessions with PGM or PNG bytes.
  ApiResponse create_session(std::string_view body);
  /// PUT /api/sessions/{id}/points
  ApiResponse put_points(const std::string& id, std::string_view body);
  /// GET /api/sessions/{id}/{label.pgm|trust.fmap|superpixels.pgm|overlay.png|points.json}
  ApiResponse get_artifact(const std::string& id, const std::string& name);
  /// GET /api/sessions/{id}/config
  ApiResponse get_config(const std::string& id);
  /// PATCH /api/sessions/{id}/config
  ApiResponse patch_config(const std::string& id, std::string_view body);
  ApiResponse delete_session(const std::string& id);

  std::size_t session_count() const;
  const ServerOptions& options() const noexcept { return options_; }

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  std::string new_id();

  ServerOptions options_;
  mutable std::shared_mutex sessions_mu_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex id_mu_;
  std::mt19937_64 id_rng_;
};

/// HTTP/1.1 front end over an AnnotationService.
class HttpServer {
 public:
  HttpServer(AnnotationService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind();
  /// Serves until stop(); blocks.
  void listen();
  /// bind() + listen() on a background thread; returns the bound port.
  int start_background();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace weaklabel
