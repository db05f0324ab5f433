#pragma once

#include "freetalky/service/orchestrator.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <thread>

namespace httplib {
class Server;
}

namespace freetalky::service {

// JSON-over-HTTP front end for an Orchestrator. Errors are returned as
// {"error": message} with the status carried by ApiError.
class HttpServer {
 public:
  explicit HttpServer(Orchestrator& orchestrator, std::chrono::seconds expiry_interval = std::chrono::seconds(60));
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws std::runtime_error.
  int bind(const std::string& host, int port);
  // Serves until stop(). bind() must have succeeded.
  void run();
  // bind() then run() on a background thread.
  int start(const std::string& host, int port);
  void stop();

 private:
  Orchestrator& orchestrator_;
  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  std::thread reaper_;
  std::chrono::seconds expiry_interval_;
  std::mutex stop_lock_;
  std::condition_variable stop_signal_;
  bool stopping_ = false;
};

}  // namespace freetalky::service
