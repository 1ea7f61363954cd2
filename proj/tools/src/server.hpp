#pragma once

#include <memory>
#include <string>

#include "recommender.hpp"

namespace httplib {
class Server;
}

namespace superopt::cli {

/// HTTP front end over a Recommender: GET /meta and POST /recommend.
class ConsultServer {
 public:
  explicit ConsultServer(const Recommender& recommender);
  ~ConsultServer();

  ConsultServer(const ConsultServer&) = delete;
  ConsultServer& operator=(const ConsultServer&) = delete;

  /// Binds the port (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  const Recommender& recommender_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace superopt::cli
