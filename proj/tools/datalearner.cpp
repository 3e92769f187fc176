// Command-line front end: info, algos, run, serve.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"

#include "datalearner/arff.hpp"
#include "datalearner/engine.hpp"
#include "datalearner/error.hpp"
#include "datalearner/service.hpp"

namespace dl = datalearner;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kInvalid = 3;
constexpr int kRuntime = 4;
constexpr int kInterrupted = 130;

std::atomic<bool> g_interrupted{false};
httplib::Server* g_server = nullptr;

extern "C" void on_sigint(int) {
  g_interrupted.store(true);
  if (g_server) g_server->stop();
}

struct LoadFailure {
  std::string message;
};

dl::Dataset load(const std::string& path) {
  try {
    return dl::load_arff(path);
  } catch (const dl::ParseError& e) {
    throw LoadFailure{path + ": " + e.what()};
  } catch (const std::exception& e) {
    throw LoadFailure{e.what()};
  }
}

/// "last" or a 1-based attribute number.
std::optional<std::size_t> parse_class_index(const std::string& text) {
  if (text == "last") return std::nullopt;
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || v == 0) throw dl::ValidationError("--class-index takes a 1-based number or 'last'");
  return v - 1;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_human(const dl::Document& doc) {
  std::cout << "=== Run information ===\n\n";
  std::cout << "Algorithm:  " << doc["algorithm"].get<std::string>();
  for (const auto& [k, v] : doc["params"].items()) std::cout << " " << k << "=" << v.dump();
  std::cout << "\nRelation:   " << doc["dataset"]["relation"].get<std::string>() << "\n";
  std::cout << "Instances:  " << doc["dataset"]["instances"] << "\nAttributes: " << doc["dataset"]["attributes"]
            << "\nSeed:       " << doc["seed"] << "\n";
  if (!doc["folds"].is_null()) std::cout << "Test mode:  " << doc["folds"] << "-fold cross-validation\n";
  std::cout << "\n=== Model ===\n\n" << doc["model_text"].get<std::string>() << "\n";
  std::cout << "Time taken to build model: " << fixed(doc["build_time_s"].get<double>(), 3) << " s\n";
  if (doc["accuracy"].is_null()) {
    std::cout << "Time taken to evaluate: " << fixed(doc["cv_time_s"].get<double>(), 3) << " s\n";
    return;
  }
  std::cout << "Time taken for cross-validation: " << fixed(doc["cv_time_s"].get<double>(), 3) << " s\n\n";
  std::cout << "=== Summary ===\n\nAccuracy: " << fixed(doc["accuracy"].get<double>(), 4) << " %\n\n";
  std::cout << "=== Detailed Accuracy By Class ===\n\n  Precision  Recall  F1      Class\n";
  for (const auto& c : doc["per_class"])
    std::cout << "  " << fixed(c["precision"].get<double>(), 3) << "      " << fixed(c["recall"].get<double>(), 3)
              << "   " << fixed(c["f1"].get<double>(), 3) << "   " << c["label"].get<std::string>() << "\n";
  std::cout << "\n=== Confusion Matrix ===\n\n";
  const auto& labels = doc["class_labels"];
  for (std::size_t i = 0; i < doc["confusion"].size(); ++i) {
    for (const auto& v : doc["confusion"][i]) {
      const std::string s = v.dump();
      std::cout << std::string(s.size() < 6 ? 6 - s.size() : 0, ' ') << s << " ";
    }
    std::cout << "  | " << labels[i].get<std::string>() << "\n";
  }
}

void print_algorithms() {
  for (const auto& a : dl::list_algorithms()) {
    std::cout << a.id << " (" << dl::to_string(a.family) << ") - " << a.title << "\n";
    for (const auto& p : a.params) {
      std::cout << "    " << p.name << " : " << dl::to_string(p.type) << ", default ";
      if (p.type == dl::ParamType::flag)
        std::cout << (p.default_value != 0 ? "true" : "false");
      else
        std::cout << p.default_value << ", range [" << p.min << ", " << p.max << "]";
      std::cout << " - " << p.description << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"datalearner: train and evaluate data-mining models on ARFF datasets"};
  app.require_subcommand(1, 1);

  auto* info = app.add_subcommand("info", "Summarize an ARFF dataset");
  std::string info_path;
  std::string info_class = "last";
  bool info_json = false;
  info->add_option("file", info_path, "ARFF file")->required();
  info->add_option("--class-index", info_class, "1-based class attribute or 'last'");
  info->add_flag("--json", info_json, "print JSON");

  auto* algos = app.add_subcommand("algos", "List available algorithms");
  bool algos_json = false;
  algos->add_flag("--json", algos_json, "print JSON");

  auto* run = app.add_subcommand("run", "Train and evaluate an algorithm");
  std::string data_path, algo, class_text = "last";
  std::vector<std::string> params;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  bool run_json = false;
  run->add_option("--data", data_path, "ARFF file")->required();
  run->add_option("--algo", algo, "algorithm id (see 'algos')")->required();
  run->add_option("--param", params, "key=value, repeatable")->allow_extra_args(false);
  run->add_option("--folds", folds, "cross-validation folds")->capture_default_str();
  run->add_option("--seed", seed, "random seed")->capture_default_str();
  run->add_option("--class-index", class_text, "1-based class attribute or 'last'")->capture_default_str();
  run->add_flag("--json", run_json, "print the result document as JSON");

  auto* serve = app.add_subcommand("serve", "Run the local HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1", data_dir, ui_dir;
  serve->add_option("--port", port, "listen port")->capture_default_str();
  serve->add_option("--host", host, "listen address")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "preload every *.arff file in this directory");
  serve->add_option("--ui-dir", ui_dir, "static UI directory served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*info) {
      dl::Dataset ds = load(info_path);
      if (auto ci = parse_class_index(info_class)) ds = dl::set_class_index(ds, *ci);
      const auto summary = dl::summarize(ds);
      if (info_json)
        std::cout << dl::summary_document(summary).dump(2) << "\n";
      else
        std::cout << dl::render_summary(summary);
      return kOk;
    }
    if (*algos) {
      if (algos_json)
        std::cout << dl::algorithms_document().dump(2) << "\n";
      else
        print_algorithms();
      return kOk;
    }
    if (*run) {
      dl::AlgorithmSpec spec;
      spec.algorithm = algo;
      spec.folds = folds;
      spec.seed = seed;
      spec.class_index = parse_class_index(class_text);
      for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
          std::cerr << "error: --param expects key=value, got '" << p << "'\n";
          return kUsage;
        }
        spec.params[p.substr(0, eq)] = p.substr(eq + 1);
      }
      const dl::Dataset ds = load(data_path);
      std::signal(SIGINT, on_sigint);
      dl::RunControl control(&g_interrupted, {});
      const dl::Document doc = dl::run_algorithm(ds, spec, control);
      if (run_json)
        std::cout << doc.dump(2) << "\n";
      else
        print_human(doc);
      return kOk;
    }
    if (*serve) {
      dl::ServiceOptions options;
      options.ui_dir = ui_dir;
      if (!ui_dir.empty() && !std::filesystem::is_directory(ui_dir)) {
        std::cerr << "error: --ui-dir '" << ui_dir << "' is not a directory\n";
        return kUsage;
      }
      dl::Service service(options);
      if (!data_dir.empty()) {
        if (!std::filesystem::is_directory(data_dir)) {
          std::cerr << "error: --data-dir '" << data_dir << "' is not a directory\n";
          return kUsage;
        }
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(data_dir))
          if (e.is_regular_file() && e.path().extension() == ".arff") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
          const std::string id = service.add_dataset(load(f.string()), f.filename().string());
          std::cerr << "loaded " << f.filename().string() << " as " << id << "\n";
        }
      }
      httplib::Server server;
      service.mount(server);
      g_server = &server;
      std::signal(SIGINT, on_sigint);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        if (g_interrupted) return kOk;
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return kRuntime;
      }
      return kOk;
    }
  } catch (const LoadFailure& e) {
    std::cerr << "error: " << e.message << "\n";
    return kUsage;
  } catch (const dl::Cancelled&) {
    std::cerr << "cancelled\n";
    return kInterrupted;
  } catch (const dl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
