#include "datalearner/service.hpp"

#include <chrono>

#include "httplib.h"

#include "datalearner/arff.hpp"
#include "datalearner/error.hpp"

namespace datalearner {

namespace {

Response json_response(int status, const Document& doc) { return {status, doc.dump(), "application/json"}; }

Response error_response(int status, const std::string& message) {
  return json_response(status, Document{{"error", message}});
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {}

Response Service::list_algorithms() const { return json_response(200, algorithms_document()); }

Document Service::stored_document(const Stored& s) const {
  return {{"id", s.id}, {"filename", s.filename}, {"uploaded_at", s.uploaded_at}, {"summary", s.summary}};
}

std::string Service::add_dataset(Dataset ds, std::string filename) {
  Stored s;
  s.filename = std::move(filename);
  s.summary = summary_document(summarize(ds));
  s.data = std::make_shared<const Dataset>(std::move(ds));
  s.uploaded_at = std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  std::lock_guard lock(mutex_);
  s.id = "ds-" + std::to_string(next_dataset_++);
  const std::string id = s.id;
  datasets_.emplace(id, std::move(s));
  return id;
}

Response Service::upload_dataset(const std::string& body, const std::string& filename) {
  if (body.size() > options_.max_upload_bytes)
    return error_response(413, "upload exceeds " + std::to_string(options_.max_upload_bytes) + " bytes");
  if (body.empty()) return error_response(422, "line 1: empty document");
  try {
    const std::string id = add_dataset(parse_arff(body), filename);
    std::lock_guard lock(mutex_);
    return json_response(201, stored_document(datasets_.at(id)));
  } catch (const ParseError& e) {
    return error_response(422, e.what());
  }
}

Response Service::list_datasets() const {
  std::lock_guard lock(mutex_);
  Document out = Document::array();
  for (const auto& [id, s] : datasets_) out.push_back(stored_document(s));
  return json_response(200, out);
}

Response Service::get_dataset(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) return error_response(404, "unknown dataset '" + id + "'");
  return json_response(200, stored_document(it->second));
}

Response Service::start_run(const std::string& body) {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, std::string("malformed JSON: ") + e.what());
  }
  if (!req.is_object() || !req.contains("dataset_id") || !req["dataset_id"].is_string())
    return error_response(400, "body needs a string dataset_id");
  if (!req.contains("spec")) return error_response(400, "body needs a spec");
  std::shared_ptr<const Dataset> ds;
  {
    std::lock_guard lock(mutex_);
    auto it = datasets_.find(req["dataset_id"].get<std::string>());
    if (it == datasets_.end()) return error_response(404, "unknown dataset '" + req["dataset_id"].get<std::string>() + "'");
    ds = it->second.data;
  }
  try {
    const std::string run_id = jobs_.start(ds, spec_from_json(req["spec"]));
    return json_response(202, Document{{"run_id", run_id}});
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  }
}

Response Service::get_run(const std::string& id) const {
  try {
    return json_response(200, jobs_.poll(id).to_json());
  } catch (const NotFound& e) {
    return error_response(404, e.what());
  }
}

Response Service::cancel_run(const std::string& id) {
  try {
    return json_response(200, jobs_.cancel(id).to_json());
  } catch (const NotFound& e) {
    return error_response(404, e.what());
  }
}

void Service::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get("/api/algorithms", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, list_algorithms());
  });
  server.Get("/api/datasets", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, list_datasets());
  });
  server.Post("/api/datasets", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, upload_dataset(req.body, req.has_param("name") ? req.get_param_value("name") : "upload.arff"));
  });
  server.Get(R"(/api/datasets/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_dataset(req.matches[1]));
  });
  server.Post("/api/runs", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, start_run(req.body));
  });
  server.Get(R"(/api/runs/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_run(req.matches[1]));
  });
  server.Delete(R"(/api/runs/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, cancel_run(req.matches[1]));
  });
  server.set_payload_max_length(options_.max_upload_bytes + 1);
  if (!options_.ui_dir.empty()) server.set_mount_point("/", options_.ui_dir);
}

}  // namespace datalearner
