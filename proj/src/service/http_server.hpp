#pragma once

#include <memory>
#include <string>
#include <thread>

#include "service/engine.hpp"

namespace httplib {
class Server;
}

namespace claimsearch {

// HTTP status and body for an error raised while serving.
struct HttpError {
  int status = 500;
  Json body;
};

HttpError http_error_for(const Error& e);

// GET /health, POST /search, GET /doc/{id}?query_id=, POST /index/reload.
class HttpServer {
 public:
  explicit HttpServer(SearchEngine& engine);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Throws Error(Io) when the address cannot be bound.
  void start(const std::string& host, int port);
  int bound_port() const noexcept { return port_; }
  void stop();
  // Blocks until the server stops.
  void wait();

 private:
  SearchEngine& engine_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace claimsearch
