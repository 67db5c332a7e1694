#pragma once

#include <memory>
#include <string>

#include "lart/annoserve/store.hpp"

namespace httplib {
class Server;
}

namespace lart::annoserve {

/// HTTP/1.1 JSON front end of a Store.
///
///   GET  /pairs                      list with status and revision
///   GET  /pairs/{id}                 document, region lists, image URLs
///   GET  /pairs/{id}/image/{which}   PNG bytes; which = a | b | colored_a |
///                                    colored_b | regions_a | regions_b
///   PUT  /pairs/{id}/corr            {"base_revision", "corr", "region_edits"?}
///   POST /pairs/{id}/approve         {"base_revision"?}
///   POST /pairs/{id}/reopen          {"base_revision"?}
///
/// Errors: 400 malformed body, 404 unknown pair or image, 409 stale revision
/// or approved document. Bodies are {"error": message}.
class Server {
 public:
  explicit Server(Store& store, std::string cors_origin = "http://localhost:5173");
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to `port` (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void run();
  void stop();
  bool running() const;

 private:
  Store& store_;
  std::string cors_origin_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace lart::annoserve
