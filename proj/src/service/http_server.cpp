#include "service/http_server.hpp"

#include <httplib.h>

#include "common/error.hpp"

namespace claimsearch {
namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    HttpError err = http_error_for(e);
    send_json(res, err.status, err.body);
  } catch (const std::exception& e) {
    send_json(res, 500, Json{{"error", "Internal"}, {"message", e.what()}});
  }
}

}  // namespace

HttpError http_error_for(const Error& e) {
  std::string name(error_code_name(e.code()));
  int status = 500;
  switch (e.code()) {
    case ErrorCode::EmptyClaim:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimMismatch:
      status = 400;
      break;
    case ErrorCode::DocNotFound:
      status = 404;
      break;
    case ErrorCode::IndexNotLoaded:
    case ErrorCode::ProviderMismatch:
      status = 409;
      break;
    case ErrorCode::RemoteUnavailable:
    case ErrorCode::TextTooLong:
      status = 502;
      name = "EmbedderUnavailable";
      break;
    default:
      break;
  }
  return {status, Json{{"error", name}, {"message", e.what()}}};
}

HttpServer::HttpServer(SearchEngine& engine) : engine_(engine), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, engine_.health()); });
  });

  s.Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      Json body;
      try {
        body = Json::parse(req.body);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
      }
      send_json(res, 200, engine_.search(SearchRequest::from_json(body)));
    });
  });

  s.Get(R"(/doc/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string query_id = req.has_param("query_id") ? req.get_param_value("query_id") : std::string();
      send_json(res, 200, engine_.document(req.matches[1].str(), query_id));
    });
  });

  s.Post("/index/reload", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string index_dir, corpus_path;
      if (!req.body.empty()) {
        try {
          Json body = Json::parse(req.body);
          index_dir = body.value("index", "");
          corpus_path = body.value("corpus", "");
        } catch (const Json::exception& e) {
          throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
        }
      }
      engine_.reload(index_dir, corpus_path);
      send_json(res, 200, engine_.health());
    });
  });
}

HttpServer::~HttpServer() {
  stop();
  wait();
}

void HttpServer::start(const std::string& host, int port) {
  if (thread_.joinable()) throw Error(ErrorCode::InvalidArgument, "server already started");
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  if (server_) server_->stop();
}

void HttpServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace claimsearch
