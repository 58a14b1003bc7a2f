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

#ifndef THREATFLOW_INGEST_HPP_
#define THREATFLOW_INGEST_HPP_

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "threatflow/catalog.hpp"

namespace threatflow {

/// One vulnerability as published in a feed.
struct RawVulnRecord {
  std::string id;
  std::string description;
  std::optional<Impact> c, i, a;  // absent when the feed has no metric
  std::vector<std::string> products;
};

/// A record the importer skipped.
struct MalformedRecord {
  std::string id;
  std::string reason;
};

struct ImportResult {
  std::vector<ThreatDefinition> drafts;
  std::vector<MalformedRecord> errors;
};

inline bool valid_cve_id(const std::string& id) {
  static const std::regex kCve(R"(CVE-\d{4}-\d{4,})");
  return std::regex_match(id, kCve);
}

/// CVSS impact words: NONE, LOW/PARTIAL, HIGH/COMPLETE.
inline std::optional<Impact> cvss_impact(const Json& metric, const char* key) {
  if (!metric.is_object() || !metric.contains(key) || !metric[key].is_string()) return std::nullopt;
  const auto v = metric[key].get<std::string>();
  if (v == "NONE") return Impact::None;
  if (v == "LOW" || v == "PARTIAL") return Impact::Partial;
  if (v == "HIGH" || v == "COMPLETE") return Impact::Full;
  throw ParseError(std::string("unknown ") + key + " value '" + v + "'");
}

namespace detail {

inline void take_impacts(RawVulnRecord& r, const Json& metric) {
  r.c = cvss_impact(metric, "confidentialityImpact");
  r.i = cvss_impact(metric, "integrityImpact");
  r.a = cvss_impact(metric, "availabilityImpact");
}

inline std::string english(const Json& list) {
  if (!list.is_array()) return {};
  for (const auto& d : list) {
    if (d.value("lang", std::string{}) == "en") return d.value("value", std::string{});
  }
  return list.empty() ? std::string{} : list[0].value("value", std::string{});
}

/// 1.1 feed item: cve.CVE_data_meta.ID, impact.baseMetricV3/V2.
inline RawVulnRecord record_v11(const Json& item) {
  RawVulnRecord r;
  r.id = item.at("cve").at("CVE_data_meta").at("ID").get<std::string>();
  r.description = english(item["cve"].value("description", Json::object()).value("description_data", Json::array()));
  const Json impact = item.value("impact", Json::object());
  if (impact.contains("baseMetricV3")) {
    take_impacts(r, impact["baseMetricV3"].value("cvssV3", Json::object()));
  } else if (impact.contains("baseMetricV2")) {
    take_impacts(r, impact["baseMetricV2"].value("cvssV2", Json::object()));
  }
  if (item.contains("configurations")) {
    for (const auto& node : item["configurations"].value("nodes", Json::array())) {
      for (const auto& m : node.value("cpe_match", Json::array())) r.products.push_back(m.value("cpe23Uri", ""));
    }
  }
  return r;
}

/// 2.0 API item: cve.id, cve.metrics.cvssMetricV31/V30/V2[].cvssData.
inline RawVulnRecord record_v20(const Json& item) {
  const Json& cve = item.at("cve");
  RawVulnRecord r;
  r.id = cve.at("id").get<std::string>();
  r.description = english(cve.value("descriptions", Json::array()));
  const Json metrics = cve.value("metrics", Json::object());
  for (const char* key : {"cvssMetricV31", "cvssMetricV30", "cvssMetricV2"}) {
    if (metrics.contains(key) && metrics[key].is_array() && !metrics[key].empty()) {
      take_impacts(r, metrics[key][0].value("cvssData", Json::object()));
      break;
    }
  }
  return r;
}

}  // namespace detail

/// Draft definition: id, issue and impacts filled; everything else left for annotation.
inline ThreatDefinition draft_from(const RawVulnRecord& r) {
  ThreatDefinition t;
  t.id = r.id;
  t.issue = r.description;
  t.draft = true;
  t.review = {"service", "target_place", "action", "consequence"};
  t.cia.c = r.c.value_or(Impact::None);
  t.cia.i = r.i.value_or(Impact::None);
  t.cia.a = r.a.value_or(Impact::None);
  if (!r.c) t.review.push_back("cia.c");
  if (!r.i) t.review.push_back("cia.i");
  if (!r.a) t.review.push_back("cia.a");
  return t;
}

/**
 * Reads a vulnerability feed (1.1 "CVE_Items" or 2.0 "vulnerabilities").
 * Bad records are collected and skipped; a document that is not a feed at
 * all raises ParseError.
 */
inline ImportResult import_records(const Json& feed) {
  const Json* items = nullptr;
  bool v20 = false;
  if (feed.is_object() && feed.contains("CVE_Items")) {
    items = &feed["CVE_Items"];
  } else if (feed.is_object() && feed.contains("vulnerabilities")) {
    items = &feed["vulnerabilities"];
    v20 = true;
  }
  if (!items || !items->is_array()) throw ParseError("not a vulnerability feed: expected CVE_Items or vulnerabilities");
  ImportResult out;
  for (std::size_t k = 0; k < items->size(); ++k) {
    const Json& item = (*items)[k];
    std::string id = "#" + std::to_string(k);
    try {
      RawVulnRecord r = v20 ? detail::record_v20(item) : detail::record_v11(item);
      id = r.id;
      if (!valid_cve_id(r.id)) {
        out.errors.push_back({r.id, "id does not match CVE-YYYY-NNNN"});
        continue;
      }
      out.drafts.push_back(draft_from(r));
    } catch (const nlohmann::json::exception& e) {
      out.errors.push_back({id, e.what()});
    } catch (const ParseError& e) {
      out.errors.push_back({id, e.what()});
    }
  }
  return out;
}

inline ImportResult import_records(const std::string& path) { return import_records(read_json_file(path)); }

/// Adds drafts for ids the catalog lacks; returns how many were added.
inline std::size_t merge_drafts(Catalog& catalog, const std::vector<ThreatDefinition>& drafts) {
  std::size_t added = 0;
  for (const auto& d : drafts) {
    if (catalog.find(d.id)) continue;
    catalog.threats.push_back(d);
    ++added;
  }
  return added;
}

/// Manual completion of a definition.
struct Annotation {
  std::optional<std::string> service;
  std::optional<std::string> target_place;
  std::optional<std::string> action;
  std::optional<std::string> consequence;
  std::optional<std::vector<std::string>> requires_;
};

/**
 * Completes (or revises) the catalog entry `id`, checks it against the
 * cloud net, clears the draft flag and appends an audit entry holding the
 * previous definition. An action that differs from the issue text becomes an
 * accepted alias.
 */
inline ThreatDefinition annotate(Catalog& catalog, const std::string& id, const Annotation& a, const Net& cloud) {
  ThreatDefinition* t = catalog.find(id);
  if (!t) throw UnknownId("no threat '" + id + "' in the catalog");
  ThreatDefinition next = *t;
  if (a.service) next.service = *a.service;
  if (a.target_place) {
    if (!cloud.find_place(*a.target_place)) throw UnknownPlace("no place '" + *a.target_place + "' in the cloud net");
    next.target_place = *a.target_place;
  }
  if (a.action) {
    next.action = *a.action;
    if (next.action != next.issue &&
        std::find(next.aliases.begin(), next.aliases.end(), next.action) == next.aliases.end()) {
      next.aliases.push_back(next.action);
    }
  }
  if (a.consequence) next.consequence = *a.consequence;
  if (a.requires_) next.requires_ = *a.requires_;
  if (next.service.empty()) next.service = next.target_place;
  next.draft = false;
  std::erase_if(next.review, [](const std::string& f) { return f.rfind("cia.", 0) != 0; });
  validate_threat(next, &cloud);
  catalog.audit.push_back({{"id", id}, {"action", "annotate"}, {"previous", to_json(*t)}});
  *t = next;
  return next;
}

}  // namespace threatflow

#endif  // THREATFLOW_INGEST_HPP_
