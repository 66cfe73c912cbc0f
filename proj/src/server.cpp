#include "weaklabel/server.hpp"

#include <filesystem>
#include <optional>

#include "httplib.h"
#include "json.hpp"
#include "weaklabel/error.hpp"
#include "weaklabel/io.hpp"
#include "weaklabel/render.hpp"
#include "weaklabel/sgplg.hpp"

namespace weaklabel {

namespace {

using nlohmann::ordered_json;

constexpr const char* kPgmType = "image/x-portable-graymap";
constexpr const char* kFmapType = "application/octet-stream";
constexpr const char* kJsonType = "application/json";
constexpr const char* kPngType = "image/png";

ApiResponse error_response(int status, const std::string& message) {
  ordered_json j;
  j["error"] = message;
  return {status, kJsonType, j.dump()};
}

ApiResponse json_response(int status, const ordered_json& j) { return {status, kJsonType, j.dump()}; }

ordered_json labeled_counts(const LabelMap& labels) {
  const auto counts = labels.class_counts();
  ordered_json j = ordered_json::object();
  for (int c = 1; c < labels.num_classes(); ++c) j[std::to_string(c)] = counts[c];
  return j;
}

}  // namespace

struct AnnotationService::Session {
  std::mutex mu;
  std::string id;
  GrayImage image;
  PipelineConfig config;
  std::optional<SuperpixelMap> superpixels;
  std::optional<PointAnnotationSet> points;
  std::optional<PseudoLabels> last;

  Session(std::string id_, GrayImage image_, PipelineConfig config_)
      : id(std::move(id_)), image(std::move(image_)), config(std::move(config_)) {}

  const SuperpixelMap& ensure_superpixels() {
    if (!superpixels) superpixels = slic(image, config.slic);
    return *superpixels;
  }

  const PseudoLabels& ensure_result() {
    if (!last) last = generate(image, ensure_superpixels(), *points, config.sgplg);
    return *last;
  }
};

AnnotationService::AnnotationService(ServerOptions options)
    : options_(std::move(options)), id_rng_(std::random_device{}()) {
  options_.defaults.validate();
  if (!options_.store_dir.empty()) std::filesystem::create_directories(options_.store_dir);
}

AnnotationService::~AnnotationService() = default;

std::string AnnotationService::new_id() {
  std::lock_guard lock(id_mu_);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int word = 0; word < 2; ++word) {
    auto v = id_rng_();
    for (int k = 0; k < 16; ++k, v >>= 4) id.push_back(kHex[v & 0xf]);
  }
  return id;
}

std::shared_ptr<AnnotationService::Session> AnnotationService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t AnnotationService::session_count() const {
  std::shared_lock lock(sessions_mu_);
  return sessions_.size();
}

ApiResponse AnnotationService::create_session(std::string_view body) {
  if (body.empty()) return error_response(400, "empty request body; expected PGM or PNG bytes");
  std::optional<GrayImage> image;
  try {
    if (is_png(body)) {
      const auto [w, h] = png_dimensions(body);
      if (w > options_.max_width || h > options_.max_height) {
        return error_response(413, "image " + std::to_string(w) + "x" + std::to_string(h) +
                                       " exceeds the " + std::to_string(options_.max_width) + "x" +
                                       std::to_string(options_.max_height) + " limit");
      }
      image = decode_png_gray(body);
    } else {
      image = io::read_pgm(body);
    }
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
  if (image->width() > options_.max_width || image->height() > options_.max_height) {
    return error_response(413, "image " + std::to_string(image->width()) + "x" +
                                   std::to_string(image->height()) + " exceeds the " +
                                   std::to_string(options_.max_width) + "x" +
                                   std::to_string(options_.max_height) + " limit");
  }

  std::shared_ptr<Session> session;
  {
    std::unique_lock lock(sessions_mu_);
    std::string id;
    do {
      id = new_id();
    } while (sessions_.count(id) != 0);
    session = std::make_shared<Session>(id, std::move(*image), options_.defaults);
    sessions_.emplace(id, session);
  }
  if (!options_.store_dir.empty()) {
    const auto dir = std::filesystem::path(options_.store_dir) / session->id;
    std::filesystem::create_directories(dir);
    io::write_file((dir / "image.pgm").string(), io::write_pgm(session->image));
  }

  ordered_json j;
  j["session_id"] = session->id;
  j["width"] = session->image.width();
  j["height"] = session->image.height();
  return json_response(201, j);
}

ApiResponse AnnotationService::put_points(const std::string& id, std::string_view body) {
  const auto session = find(id);
  if (!session) return error_response(404, "unknown session " + id);
  std::lock_guard lock(session->mu);

  PointAnnotationSet points;
  try {
    points = io::read_points(body);
    // bounds are checked before any superpixel work
    (void)rasterize_points(points, session->image.width(), session->image.height());
  } catch (const Error& e) {
    return error_response(422, e.what());
  }

  const auto previous_points = std::move(session->points);
  session->points = std::move(points);
  session->last.reset();
  try {
    const auto& result = session->ensure_result();
    if (!options_.store_dir.empty()) {
      const auto dir = std::filesystem::path(options_.store_dir) / session->id;
      io::write_file((dir / "points.json").string(), io::write_points(*session->points));
      io::write_file((dir / "label.pgm").string(), io::write_pgm(result.labels));
      io::write_file((dir / "trust.fmap").string(), io::write_fmap(result.trust));
    }
    ordered_json j;
    j["labeled_counts"] = labeled_counts(result.labels);
    j["superpixels"] = result.superpixels.num_blocks();
    return json_response(200, j);
  } catch (const Error& e) {
    session->points = previous_points;
    session->last.reset();
    return error_response(422, e.what());
  }
}

ApiResponse AnnotationService::get_artifact(const std::string& id, const std::string& name) {
  const auto session = find(id);
  if (!session) return error_response(404, "unknown session " + id);
  std::lock_guard lock(session->mu);
  try {
    if (name == "superpixels.pgm") {
      return {200, kPgmType, io::write_superpixel_pgm(session->ensure_superpixels())};
    }
    if (name == "overlay.png") {
      const auto& sp = session->ensure_superpixels();
      const LabelMap* labels = session->points ? &session->ensure_result().labels : nullptr;
      return {200, kPngType, encode_png(render_overlay(session->image, &sp, labels))};
    }
    if (name == "points.json") {
      return {200, kJsonType, io::write_points(session->points.value_or(PointAnnotationSet{}))};
    }
    if (name == "label.pgm" || name == "trust.fmap") {
      if (!session->points) return error_response(409, "no points submitted for session " + id);
      const auto& result = session->ensure_result();
      if (name == "label.pgm") return {200, kPgmType, io::write_pgm(result.labels)};
      return {200, kFmapType, io::write_fmap(result.trust)};
    }
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
  return error_response(404, "unknown artifact " + name);
}

ApiResponse AnnotationService::get_config(const std::string& id) {
  const auto session = find(id);
  if (!session) return error_response(404, "unknown session " + id);
  std::lock_guard lock(session->mu);
  return {200, kJsonType, config_to_json(session->config)};
}

ApiResponse AnnotationService::patch_config(const std::string& id, std::string_view body) {
  const auto session = find(id);
  if (!session) return error_response(404, "unknown session " + id);
  std::lock_guard lock(session->mu);
  PipelineConfig merged;
  try {
    merged = merge_config(session->config, body);
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
  if (merged.slic != session->config.slic) session->superpixels.reset();
  if (merged != session->config) session->last.reset();
  session->config = merged;
  if (!options_.store_dir.empty()) {
    const auto dir = std::filesystem::path(options_.store_dir) / session->id;
    io::write_file((dir / "config.json").string(), config_to_json(merged));
  }
  return {200, kJsonType, config_to_json(merged)};
}

ApiResponse AnnotationService::delete_session(const std::string& id) {
  std::unique_lock lock(sessions_mu_);
  if (sessions_.erase(id) == 0) return error_response(404, "unknown session " + id);
  return {204, kJsonType, ""};
}

struct HttpServer::Impl {
  AnnotationService& service;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  explicit Impl(AnnotationService& s) : service(s) {}
};

namespace {

void reply(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  if (api.status != 204) res.set_content(api.body, api.content_type);
}

}  // namespace

HttpServer::HttpServer(AnnotationService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  auto& svc = impl_->service;
  const auto& opts = svc.options();
  srv.set_read_timeout(opts.timeout_seconds, 0);
  srv.set_write_timeout(opts.timeout_seconds, 0);

  srv.Post("/api/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.create_session(req.body));
  });
  srv.Put(R"(/api/sessions/([0-9a-f]+)/points)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.put_points(req.matches[1], req.body));
  });
  srv.Get(R"(/api/sessions/([0-9a-f]+)/config)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_config(req.matches[1]));
  });
  srv.Patch(R"(/api/sessions/([0-9a-f]+)/config)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.patch_config(req.matches[1], req.body));
  });
  srv.Get(R"(/api/sessions/([0-9a-f]+)/([a-z]+\.[a-z]+))",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            reply(res, svc.get_artifact(req.matches[1], req.matches[2]));
          });
  srv.Delete(R"(/api/sessions/([0-9a-f]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.delete_session(req.matches[1]));
  });

  if (!opts.ui_dir.empty()) {
    srv.set_mount_point("/", opts.ui_dir);
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("weaklabel annotation API; see /api/sessions\n", "text/plain");
    });
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  const auto& opts = impl_->service.options();
  if (opts.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(opts.host);
  } else {
    impl_->port = impl_->server.bind_to_port(opts.host, opts.port) ? opts.port : -1;
  }
  if (impl_->port < 0) {
    throw IoError("cannot bind " + opts.host + ":" + std::to_string(opts.port));
  }
  return impl_->port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

int HttpServer::start_background() {
  const int port = bind();
  impl_->thread = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace weaklabel
