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

#ifndef THREATFLOW_CATALOG_HPP_
#define THREATFLOW_CATALOG_HPP_

#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "threatflow/json.hpp"
#include "threatflow/threat.hpp"

namespace threatflow {

/// A named net edit. `remove-link` cuts a threat off from the cloud (or,
/// with a place, drops only its link effects into that place);
/// `strengthen-guard` conjoins a condition to its reconnaissance guard.
struct MitigationEdit {
  enum class Kind { RemoveLink, StrengthenGuard };
  Kind kind = Kind::RemoveLink;
  std::string threat;
  std::optional<std::string> place;
  std::optional<Expr> condition;

  friend bool operator==(const MitigationEdit&, const MitigationEdit&) = default;
};

struct Mitigation {
  std::string name;
  std::string description;
  std::vector<MitigationEdit> edits;

  friend bool operator==(const Mitigation&, const Mitigation&) = default;
};

inline Json to_json(const Mitigation& m) {
  Json edits = Json::array();
  for (const auto& e : m.edits) {
    Json j = {{"kind", e.kind == MitigationEdit::Kind::RemoveLink ? "remove-link" : "strengthen-guard"},
              {"threat", e.threat}};
    if (e.place) j["place"] = *e.place;
    if (e.condition) j["condition"] = e.condition->to_json();
    edits.push_back(std::move(j));
  }
  Json j = {{"name", m.name}};
  if (!m.description.empty()) j["description"] = m.description;
  j["edits"] = std::move(edits);
  return j;
}

inline Mitigation mitigation_from_json(const Json& j) {
  try {
    Mitigation m;
    m.name = j.at("name").get<std::string>();
    m.description = j.value("description", std::string{});
    for (const auto& e : j.at("edits")) {
      MitigationEdit edit;
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "remove-link") {
        edit.kind = MitigationEdit::Kind::RemoveLink;
      } else if (kind == "strengthen-guard") {
        edit.kind = MitigationEdit::Kind::StrengthenGuard;
        edit.condition = Expr::from_json(e.at("condition"));
      } else {
        throw ParseError("unknown mitigation edit '" + kind + "'");
      }
      edit.threat = e.at("threat").get<std::string>();
      if (e.contains("place")) edit.place = e["place"].get<std::string>();
      m.edits.push_back(std::move(edit));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed mitigation: ") + e.what());
  }
}

/// File-backed threat catalog: definitions, named mitigations and an
/// append-only audit trail of annotations.
struct Catalog {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::vector<ThreatDefinition> threats;
  std::vector<Mitigation> mitigations;
  Json audit = Json::array();

  const ThreatDefinition* find(const std::string& id) const {
    for (const auto& t : threats) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }
  ThreatDefinition* find(const std::string& id) {
    return const_cast<ThreatDefinition*>(static_cast<const Catalog*>(this)->find(id));
  }

  const Mitigation* find_mitigation(const std::string& name) const {
    for (const auto& m : mitigations) {
      if (m.name == name) return &m;
    }
    return nullptr;
  }

  /// Unique ids; every record valid or flagged draft.
  void validate() const {
    std::set<std::string> ids;
    for (const auto& t : threats) {
      if (!ids.insert(t.id).second) throw InvalidThreat("duplicate threat id '" + t.id + "'");
      validate_threat(t);
    }
    std::set<std::string> names;
    for (const auto& m : mitigations) {
      if (!names.insert(m.name).second) throw InvalidThreat("duplicate mitigation '" + m.name + "'");
      for (const auto& e : m.edits) {
        if (!ids.count(e.threat)) throw InvalidThreat("mitigation " + m.name + " edits unknown threat " + e.threat);
      }
    }
  }
};

inline Json to_json(const Catalog& c) {
  Json threats = Json::array();
  for (const auto& t : c.threats) threats.push_back(to_json(t));
  Json mitigations = Json::array();
  for (const auto& m : c.mitigations) mitigations.push_back(to_json(m));
  return {{"schema_version", c.schema_version}, {"threats", threats}, {"mitigations", mitigations}, {"audit", c.audit}};
}

inline Catalog catalog_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("catalog must be an object");
  Catalog c;
  c.schema_version = j.value("schema_version", 0);
  if (c.schema_version != Catalog::kSchemaVersion) {
    throw ParseError("unsupported catalog schema_version " + std::to_string(c.schema_version));
  }
  if (!j.contains("threats") || !j["threats"].is_array()) throw ParseError("catalog needs a threats list");
  for (const auto& t : j["threats"]) c.threats.push_back(threat_from_json(t));
  if (j.contains("mitigations")) {
    for (const auto& m : j["mitigations"]) c.mitigations.push_back(mitigation_from_json(m));
  }
  if (j.contains("audit")) c.audit = j["audit"];
  c.validate();
  return c;
}

inline Catalog load_catalog(const std::string& path) { return catalog_from_json(read_json_file(path)); }

inline void save_catalog(const std::string& path, const Catalog& c) { write_text_file(path, dump_canonical(to_json(c))); }

/// THREATFLOW_CATALOG when set, else the given fallback.
inline std::string catalog_path(const std::string& fallback) {
  if (const char* env = std::getenv("THREATFLOW_CATALOG"); env && *env) return env;
  return fallback;
}

}  // namespace threatflow

#endif  // THREATFLOW_CATALOG_HPP_
