#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "datalearner/dataset.hpp"
#include "datalearner/engine.hpp"

namespace httplib {
class Server;
}

namespace datalearner {

struct ServiceOptions {
  std::size_t max_upload_bytes = 64u << 20;
  /// Directory served at "/"; empty disables static serving.
  std::string ui_dir;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Request handlers over an in-memory dataset store and a job table. Handlers
/// never train inline; runs go to the job table.
class Service {
public:
  explicit Service(ServiceOptions options = {});

  Response list_algorithms() const;
  Response upload_dataset(const std::string& body, const std::string& filename);
  Response list_datasets() const;
  Response get_dataset(const std::string& id) const;
  Response start_run(const std::string& body);
  Response get_run(const std::string& id) const;
  Response cancel_run(const std::string& id);

  /// Stores an already-parsed dataset; returns its id.
  std::string add_dataset(Dataset ds, std::string filename);

  /// Registers every route (and the static UI, if configured) on `server`.
  void mount(httplib::Server& server);

  const ServiceOptions& options() const noexcept { return options_; }

private:
  struct Stored {
    std::string id;
    std::string filename;
    std::shared_ptr<const Dataset> data;
    Document summary;
    std::int64_t uploaded_at = 0;
  };

  Document stored_document(const Stored& s) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, Stored> datasets_;
  std::uint64_t next_dataset_ = 1;
  JobTable jobs_;
};

}  // namespace datalearner
