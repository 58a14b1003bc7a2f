/*
 * Copyright (c) 2026, The threatflow authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef THREATFLOW_SERVER_HPP_
#define THREATFLOW_SERVER_HPP_

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "threatflow/dot.hpp"
#include "threatflow/scenario.hpp"

namespace threatflow {

struct ServerOptions {
  std::string scenario_dir = "scenarios";
  std::optional<std::string> catalog;  // listed by GET /threats
  std::size_t max_nodes_cap = 200000;
  int max_depth_cap = 512;
};

/**
 * HTTP facade over scenario analysis.
 *
 *   GET  /health               liveness
 *   GET  /scenarios            scenario files in the scenario directory
 *   GET  /threats              catalog entries (?scenario=id adds enabled flags)
 *   POST /analyze              {scenario, toggles?, mitigations?, bounds?, async?}
 *   POST /speculate            {scenario, toggles?, mitigations?}
 *   GET  /runs/{id}            cached result or status of an async run
 *   GET  /runs/{id}/graph.dot  attack-path graph of a finished run
 *
 * Errors: 400 malformed body, 404 unknown scenario or run, 422 unknown
 * toggle or otherwise unusable input.
 */
class ApiServer {
 public:
  explicit ApiServer(ServerOptions options) : options_(std::move(options)) { routes(); }

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  ~ApiServer() {
    stop();
    std::vector<std::thread> workers;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      workers.swap(workers_);
    }
    for (auto& t : workers) t.join();
  }

  httplib::Server& http() { return http_; }

  bool listen(const std::string& host, int port) { return http_.listen(host, port); }
  int bind_any(const std::string& host) { return http_.bind_to_any_port(host); }
  bool listen_after_bind() { return http_.listen_after_bind(); }
  void stop() {
    if (http_.is_running()) http_.stop();
  }

  /// Ids (file stems) of the scenarios on disk, sorted.
  std::vector<std::string> scenario_ids() const {
    std::vector<std::string> ids;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(options_.scenario_dir, ec)) {
      if (e.is_regular_file() && e.path().extension() == ".json") ids.push_back(e.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

 private:
  struct HttpError {
    int status;
    std::string message;
  };

  struct Run {
    std::string status = "running";  // running | done | failed
    Json result;
    std::string dot;
    std::string error;
    int error_status = 0;
  };

  static void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(2) + "\n", "application/json");
  }

  static void fail(httplib::Response& res, int status, const std::string& message) {
    send(res, status, {{"error", message}, {"status", status}});
  }

  /// Runs `f`, turning library errors into HTTP statuses.
  template <class F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const HttpError& e) {
      fail(res, e.status, e.message);
    } catch (const ParseError& e) {
      fail(res, 400, e.what());
    } catch (const Error& e) {
      fail(res, 422, e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(res, 400, e.what());
    }
  }

  static Json body_of(const httplib::Request& req) {
    Json j;
    try {
      j = Json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      throw HttpError{400, std::string("malformed JSON body: ") + e.what()};
    }
    if (!j.is_object()) throw HttpError{400, "request body must be a JSON object"};
    return j;
  }

  Scenario scenario(const std::string& id) const {
    const auto ids = scenario_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw HttpError{404, "unknown scenario '" + id + "'"};
    return load_scenario((std::filesystem::path(options_.scenario_dir) / (id + ".json")).string());
  }

  /// Scenario named by the body, with its delta and capped bounds applied.
  Scenario prepared(const Json& body, ScenarioDelta& delta) const {
    if (!body.contains("scenario") || !body["scenario"].is_string()) throw HttpError{400, "missing \"scenario\""};
    Scenario s = scenario(body["scenario"].get<std::string>());
    delta = delta_from_json(body);
    if (body.contains("bounds")) {
      if (!body["bounds"].is_object()) throw HttpError{400, "bounds must be an object"};
      s.options.bounds = bounds_from_json(body["bounds"], s.options.bounds);
    }
    s.options.bounds.max_nodes = std::min(s.options.bounds.max_nodes, options_.max_nodes_cap);
    s.options.bounds.max_depth = std::min(s.options.bounds.max_depth, options_.max_depth_cap);
    return s;
  }

  std::string new_run() {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::string id = "run-" + std::to_string(++counter_);
    runs_[id] = std::make_shared<Run>();
    return id;
  }

  void finish(const std::string& id, const RunReport& report) {
    Json j = to_json(report);
    j["run_id"] = id;
    std::lock_guard<std::mutex> lock(mutex_);
    auto& r = *runs_[id];
    r.result = std::move(j);
    r.dot = paths_to_dot(report.analysis.paths, report.scenario);
    r.status = "done";
  }

  std::shared_ptr<Run> find_run(const std::string& id) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = runs_.find(id);
    if (it == runs_.end()) throw HttpError{404, "unknown run '" + id + "'"};
    return it->second;
  }

  void routes() {
    http_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                               {"Access-Control-Allow-Headers", "Content-Type"},
                               {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    http_.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http_.Get("/health", [](const httplib::Request&, httplib::Response& res) { send(res, 200, {{"status", "ok"}}); });

    http_.Get("/scenarios", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        Json list = Json::array();
        for (const auto& id : scenario_ids()) {
          Json e = {{"id", id}};
          try {
            const Json j = read_json_file((std::filesystem::path(options_.scenario_dir) / (id + ".json")).string());
            e["name"] = j.value("name", id);
            e["description"] = j.value("description", std::string{});
          } catch (const Error& err) {
            e["error"] = err.what();
          }
          list.push_back(std::move(e));
        }
        send(res, 200, {{"scenarios", list}});
      });
    });

    http_.Get("/threats", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        Json list = Json::array();
        if (req.has_param("scenario")) {
          const Scenario s = scenario(req.get_param_value("scenario"));
          for (const auto& t : s.catalog.threats) {
            Json j = to_json(t);
            const ThreatToggle* tt = s.toggle(t.id);
            j["enabled"] = tt && tt->enabled;
            list.push_back(std::move(j));
          }
          Json mitigations = Json::array();
          for (const auto& m : s.catalog.mitigations) mitigations.push_back(to_json(m));
          send(res, 200, {{"threats", list}, {"mitigations", mitigations}});
          return;
        }
        const std::string path = catalog_path(options_.catalog.value_or(
            (std::filesystem::path(options_.scenario_dir) / ".." / "catalog" / "threats.json").lexically_normal().string()));
        const Catalog c = load_catalog(path);
        for (const auto& t : c.threats) list.push_back(to_json(t));
        Json mitigations = Json::array();
        for (const auto& m : c.mitigations) mitigations.push_back(to_json(m));
        send(res, 200, {{"threats", list}, {"mitigations", mitigations}});
      });
    });

    http_.Post("/analyze", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const Json body = body_of(req);
        ScenarioDelta delta;
        const Scenario s = apply_delta(prepared(body, delta), delta);
        const std::string id = new_run();
        if (body.value("async", false)) {
          std::lock_guard<std::mutex> lock(mutex_);
          workers_.emplace_back([this, s, id] {
            try {
              finish(id, run_scenario(s));
            } catch (const Error& e) {
              std::lock_guard<std::mutex> inner(mutex_);
              auto& r = *runs_[id];
              r.status = "failed";
              r.error = e.what();
              r.error_status = dynamic_cast<const ParseError*>(&e) ? 400 : 422;
            }
          });
          send(res, 202, {{"run_id", id}, {"status", "running"}});
          return;
        }
        finish(id, run_scenario(s));
        send(res, 200, find_run(id)->result);
      });
    });

    http_.Post("/speculate", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const Json body = body_of(req);
        ScenarioDelta delta;
        const Scenario s = prepared(body, delta);
        const Speculation spec = speculate(s, delta);
        const std::string base = new_run();
        finish(base, spec.base);
        const std::string changed = new_run();
        finish(changed, spec.delta);
        Json j = to_json(spec);
        j["base_run"] = base;
        j["delta_run"] = changed;
        send(res, 200, j);
      });
    });

    http_.Get(R"(/runs/([A-Za-z0-9-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto run = find_run(req.matches[1]);
        std::lock_guard<std::mutex> lock(mutex_);
        if (run->status == "done") {
          send(res, 200, run->result);
        } else if (run->status == "failed") {
          send(res, run->error_status, {{"run_id", std::string(req.matches[1])}, {"status", "failed"},
                                        {"error", run->error}});
        } else {
          send(res, 202, {{"run_id", std::string(req.matches[1])}, {"status", "running"}});
        }
      });
    });

    http_.Get(R"(/runs/([A-Za-z0-9-]+)/graph\.dot)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto run = find_run(req.matches[1]);
        std::lock_guard<std::mutex> lock(mutex_);
        if (run->status != "done") throw HttpError{404, "run " + std::string(req.matches[1]) + " has no graph yet"};
        res.status = 200;
        res.set_content(run->dot, "text/vnd.graphviz");
      });
    });
  }

  ServerOptions options_;
  httplib::Server http_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Run>> runs_;
  std::vector<std::thread> workers_;
  std::size_t counter_ = 0;
};

}  // namespace threatflow

#endif  // THREATFLOW_SERVER_HPP_
