#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "irm/data_io.hpp"

namespace irm {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct ServiceOptions {
  /// When set, datasets and sessions are written here and reloaded on start.
  std::string state_dir;
  std::size_t max_rounds = 1000;
};

/// JSON session service. handle() is the whole API and is what the HTTP
/// server calls; it can be used directly without a socket.
///
///   GET  /api/health
///   GET  /api/datasets                      list
///   POST /api/datasets                      upload {name, content, columns?, label_columns?, invert?}
///                                           or generate {name?, generate: {kind, n, d, seed}}
///   GET  /api/datasets/{id}
///   GET  /api/sessions
///   POST /api/sessions                      {dataset, algorithm, s, epsilon, seed?, simulated_user?}
///   GET  /api/sessions/{id}                 full state
///   GET  /api/sessions/{id}/display
///   POST /api/sessions/{id}/sort            {round, order, ties?}
///   POST /api/sessions/{id}/favorite        {round, favorite}
///   POST /api/sessions/{id}/simulate        {rounds?}  (sessions created with simulated_user)
///   POST /api/sessions/{id}/stop
///   GET  /api/sessions/{id}/document        replayable session document
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Registers a dataset under id (default: its name). Returns the id.
  std::string add_dataset(Dataset dataset, std::string id = "");
  std::size_t dataset_count() const;

  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body = "");

  /// Serves on host:port in the calling thread until stop(). Throws Io on bind failure.
  void listen(const std::string& host, int port);
  /// Serves on a free port from a background thread and returns the port.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace irm
