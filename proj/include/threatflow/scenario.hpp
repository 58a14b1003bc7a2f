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

#ifndef THREATFLOW_SCENARIO_HPP_
#define THREATFLOW_SCENARIO_HPP_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "threatflow/catalog.hpp"
#include "threatflow/cloud.hpp"
#include "threatflow/paths.hpp"

namespace threatflow {

struct ThreatToggle {
  std::string id;
  bool enabled = true;
  Json overrides = Json::object();  // merge patch over the catalog entry
};

/**
 * Analysis input: a cloud configuration, a selection of catalog threats with
 * optional per-scenario overrides, link effects into the cloud, mitigations,
 * requirements and exploration bounds.
 */
struct Scenario {
  std::string name;
  std::string description;
  CloudConfig cloud;
  Catalog catalog;
  std::vector<ThreatToggle> threats;
  std::vector<LinkSpec> links;
  std::vector<std::string> mitigations;
  std::vector<SecurityRequirement> requirements;
  AnalysisOptions options;

  const ThreatToggle* toggle(const std::string& id) const {
    for (const auto& t : threats) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }
};

namespace detail {

inline std::string resolve_path(const std::string& base_dir, const std::string& ref) {
  std::filesystem::path p(ref);
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return p.lexically_normal().string();
}

}  // namespace detail

/**
 * Reads a scenario. "cloud" and "catalog" may be inline objects or paths
 * relative to `base_dir`; THREATFLOW_CATALOG overrides a catalog path, and
 * an explicit `catalog` overrides both.
 */
inline Scenario scenario_from_json(const Json& j, const std::string& base_dir = {},
                                   const Catalog* catalog = nullptr) {
  if (!j.is_object()) throw ParseError("scenario must be an object");
  try {
    Scenario s;
    s.name = j.value("name", std::string{});
    s.description = j.value("description", std::string{});
    const Json& cloud = j.at("cloud");
    s.cloud = cloud_config_from_json(cloud.is_string()
                                         ? read_json_file(detail::resolve_path(base_dir, cloud.get<std::string>()))
                                         : cloud);
    if (catalog) {
      s.catalog = *catalog;
    } else if (j.contains("catalog") && j["catalog"].is_object()) {
      s.catalog = catalog_from_json(j["catalog"]);
    } else {
      const std::string ref = j.value("catalog", std::string("../catalog/threats.json"));
      s.catalog = load_catalog(catalog_path(detail::resolve_path(base_dir, ref)));
    }
    for (const auto& t : j.value("threats", Json::array())) {
      ThreatToggle tt;
      if (t.is_string()) {
        tt.id = t.get<std::string>();
      } else {
        tt.id = t.at("id").get<std::string>();
        tt.enabled = t.value("enabled", true);
        if (t.contains("override")) tt.overrides = t["override"];
      }
      if (!s.catalog.find(tt.id)) throw UnknownToggle("scenario " + s.name + " names unknown threat '" + tt.id + "'");
      s.threats.push_back(std::move(tt));
    }
    for (const auto& l : j.value("links", Json::array())) s.links.push_back(link_from_json(l));
    for (const auto& m : j.value("mitigations", Json::array())) {
      const auto name = m.get<std::string>();
      if (!s.catalog.find_mitigation(name)) throw UnknownToggle("unknown mitigation '" + name + "'");
      s.mitigations.push_back(name);
    }
    for (const auto& r : j.value("requirements", Json::array())) s.requirements.push_back(requirement_from_json(r));
    if (j.contains("bounds")) s.options.bounds = bounds_from_json(j["bounds"]);
    if (j.contains("slicing")) s.options.slicing = slicing_from(j["slicing"].get<std::string>());
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed scenario: " + std::string(e.what()));
  }
}

inline Scenario load_scenario(const std::string& path, const Catalog* catalog = nullptr) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return scenario_from_json(read_json_file(path), dir, catalog);
}

/// Hypothetical change to a scenario.
struct ScenarioDelta {
  std::map<std::string, bool> toggles;  // threat id -> enabled
  std::vector<std::string> mitigations;

  bool empty() const { return toggles.empty() && mitigations.empty(); }
};

inline ScenarioDelta delta_from_json(const Json& j) {
  ScenarioDelta d;
  if (j.contains("toggles")) {
    if (!j["toggles"].is_object()) throw ParseError("toggles must map threat ids to booleans");
    for (auto it = j["toggles"].begin(); it != j["toggles"].end(); ++it) {
      if (!it.value().is_boolean()) throw ParseError("toggle " + it.key() + " must be a boolean");
      d.toggles[it.key()] = it.value().get<bool>();
    }
  }
  if (j.contains("mitigations")) {
    if (!j["mitigations"].is_array()) throw ParseError("mitigations must be a list");
    for (const auto& m : j["mitigations"]) {
      if (!m.is_string()) throw ParseError("mitigation names must be strings");
      d.mitigations.push_back(m.get<std::string>());
    }
  }
  return d;
}

/// Throws UnknownToggle for ids missing from the catalog.
inline Scenario apply_delta(Scenario s, const ScenarioDelta& d) {
  for (const auto& [id, on] : d.toggles) {
    if (!s.catalog.find(id)) throw UnknownToggle("unknown threat id '" + id + "'");
    bool found = false;
    for (auto& t : s.threats) {
      if (t.id == id) {
        t.enabled = on;
        found = true;
      }
    }
    if (!found) s.threats.push_back({id, on, Json::object()});
  }
  for (const auto& m : d.mitigations) {
    if (!s.catalog.find_mitigation(m)) throw UnknownToggle("unknown mitigation '" + m + "'");
    if (std::find(s.mitigations.begin(), s.mitigations.end(), m) == s.mitigations.end()) s.mitigations.push_back(m);
  }
  return s;
}

/// Scenario lowered to the inputs of analyze().
struct ResolvedScenario {
  Net cloud;
  std::vector<ThreatDefinition> threats;
  std::vector<LinkSpec> links;
};

inline ResolvedScenario resolve(const Scenario& s) {
  ResolvedScenario r;
  r.cloud = build_cloud_net(s.cloud);
  std::map<std::string, ThreatDefinition> enabled;
  for (const auto& t : s.threats) {
    if (!t.enabled) continue;
    Json def = to_json(*s.catalog.find(t.id));
    if (!t.overrides.empty()) def.merge_patch(t.overrides);
    ThreatDefinition d = threat_from_json(def);
    if (d.draft) throw InvalidThreat(d.id + " is a draft and needs annotation before analysis");
    enabled[d.id] = std::move(d);
  }
  std::vector<LinkSpec> links;
  for (const auto& l : s.links) {
    if (enabled.count(l.threat)) links.push_back(l);
  }
  for (const auto& name : s.mitigations) {
    for (const auto& e : s.catalog.find_mitigation(name)->edits) {
      auto it = enabled.find(e.threat);
      if (it == enabled.end()) continue;
      if (e.kind == MitigationEdit::Kind::RemoveLink) {
        if (!e.place) {
          enabled.erase(it);
          continue;
        }
        for (auto& l : links) {
          if (l.threat != e.threat) continue;
          std::erase_if(l.effects, [&](const LinkEffect& f) { return f.place == *e.place; });
        }
      } else {
        it->second.guard = it->second.guard ? ex::all({*it->second.guard, *e.condition}) : *e.condition;
      }
    }
  }
  for (auto& [id, t] : enabled) r.threats.push_back(std::move(t));
  for (auto& l : links) {
    if (enabled.count(l.threat)) r.links.push_back(std::move(l));
  }
  return r;
}

/// Outcome of one analysis run.
struct RunReport {
  std::string scenario;
  AnalysisOptions options;
  std::vector<std::string> threats;  // enabled after mitigations
  Analysis analysis;
  double seconds = 0;
};

inline Json to_json(const RunReport& r, bool timing = false) {
  Json paths = Json::array();
  for (const auto& p : r.analysis.paths) paths.push_back(to_json(p));
  Json centrality = Json::array();
  for (const auto& c : r.analysis.centrality) centrality.push_back(to_json(c));
  Json j = {{"scenario", r.scenario},
            {"slicing", slicing_name(r.options.slicing)},
            {"bounds", to_json(r.options.bounds)},
            {"threats", r.threats},
            {"graph", to_json(r.analysis.stats)},
            {"truncated", r.analysis.stats.truncated},
            {"paths", paths},
            {"centrality", centrality}};
  if (timing) j["seconds"] = r.seconds;
  return j;
}

inline RunReport run_scenario(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  const ResolvedScenario r = resolve(s);
  RunReport out;
  out.scenario = s.name;
  out.options = s.options;
  for (const auto& t : r.threats) out.threats.push_back(t.id);
  out.analysis = analyze(r.cloud, r.threats, r.links, s.requirements, s.options);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

struct Speculation {
  RunReport base;
  RunReport delta;
  PathDiff diff;
};

inline Speculation speculate(const Scenario& base, const ScenarioDelta& delta) {
  Scenario changed = apply_delta(base, delta);
  Speculation s;
  s.base = run_scenario(base);
  s.delta = run_scenario(changed);
  s.diff = diff_paths(s.base.analysis.paths, s.delta.analysis.paths);
  return s;
}

inline Json to_json(const Speculation& s) {
  Json j = to_json(s.diff);
  j["base_truncated"] = s.base.analysis.stats.truncated;
  j["delta_truncated"] = s.delta.analysis.stats.truncated;
  return j;
}

}  // namespace threatflow

#endif  // THREATFLOW_SCENARIO_HPP_
