#include "freetalky/service/server.hpp"

#include <httplib.h>

namespace freetalky::service {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception&) {
    throw ApiError(400, "request body is not valid JSON");
  }
}

template <typename Fn>
httplib::Server::Handler handler(int ok_status, Fn fn) {
  return [ok_status, fn](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, ok_status, fn(req));
    } catch (const ApiError& e) {
      send_json(res, e.status(), {{"error", e.what()}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  };
}

}  // namespace

HttpServer::HttpServer(Orchestrator& orchestrator, std::chrono::seconds expiry_interval)
    : orchestrator_(orchestrator), server_(std::make_unique<httplib::Server>()), expiry_interval_(expiry_interval) {
  auto& o = orchestrator_;
  server_->Post("/sessions", handler(201, [&o](const httplib::Request&) { return o.create_session(); }));
  server_->Post("/sessions/:id/persona", handler(200, [&o](const httplib::Request& req) {
                  return o.set_persona(req.path_params.at("id"), parse_body(req));
                }));
  server_->Post("/sessions/:id/utterance", handler(200, [&o](const httplib::Request& req) {
                  return o.utterance(req.path_params.at("id"), parse_body(req));
                }));
  server_->Get("/sessions/:id",
               handler(200, [&o](const httplib::Request& req) { return o.get_session(req.path_params.at("id")); }));
  server_->Post("/gec/correct", handler(200, [&o](const httplib::Request& req) { return o.correct(parse_body(req)); }));
  server_->Get("/health", handler(200, [&o](const httplib::Request&) { return o.health(); }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() {
  reaper_ = std::thread([this] {
    std::unique_lock lock(stop_lock_);
    while (!stop_signal_.wait_for(lock, expiry_interval_, [this] { return stopping_; })) orchestrator_.store().expire_idle();
  });
  server_->listen_after_bind();
}

int HttpServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  listener_ = std::thread([this] { run(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  {
    std::lock_guard g(stop_lock_);
    stopping_ = true;
  }
  stop_signal_.notify_all();
  server_->stop();
  if (listener_.joinable()) listener_.join();
  if (reaper_.joinable()) reaper_.join();
}

}  // namespace freetalky::service
