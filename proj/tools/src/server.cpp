#include "server.hpp"

#include <httplib.h>

namespace superopt::cli {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(body.dump(), "application/json");
}

}  // namespace

ConsultServer::ConsultServer(const Recommender& recommender)
    : recommender_(recommender), server_(std::make_unique<httplib::Server>()) {
  server_->Get("/meta", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, recommender_.meta());
  });
  server_->Post("/recommend", [this](const httplib::Request& req, httplib::Response& res) {
    const Reply reply = recommender_.recommend_text(req.body);
    send_json(res, reply.status, reply.body);
  });
  server_->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

ConsultServer::~ConsultServer() = default;

int ConsultServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ConsultServer::listen() { return server_->listen_after_bind(); }

void ConsultServer::stop() { server_->stop(); }

void ConsultServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace superopt::cli
