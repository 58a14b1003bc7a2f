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

#ifndef THREATFLOW_THREAT_HPP_
#define THREATFLOW_THREAT_HPP_

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "threatflow/json.hpp"
#include "threatflow/net.hpp"

namespace threatflow {

enum class Impact { None, Partial, Full };
enum class Axis { Confidentiality, Integrity, Availability };

inline const char* impact_name(Impact i) {
  switch (i) {
    case Impact::Full: return "full";
    case Impact::Partial: return "partial";
    default: return "none";
  }
}

inline Impact impact_from(const std::string& s) {
  if (s == "full") return Impact::Full;
  if (s == "partial") return Impact::Partial;
  if (s == "none") return Impact::None;
  throw ParseError("impact must be full, partial or none, got '" + s + "'");
}

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::Confidentiality: return "confidentiality";
    case Axis::Integrity: return "integrity";
    default: return "availability";
  }
}

inline Axis axis_from(const std::string& s) {
  if (s == "confidentiality" || s == "C" || s == "c") return Axis::Confidentiality;
  if (s == "integrity" || s == "I" || s == "i") return Axis::Integrity;
  if (s == "availability" || s == "A" || s == "a") return Axis::Availability;
  throw ParseError("unknown requirement axis '" + s + "'");
}

struct CiaImpact {
  Impact c = Impact::None;
  Impact i = Impact::None;
  Impact a = Impact::None;

  Impact on(Axis axis) const {
    switch (axis) {
      case Axis::Confidentiality: return c;
      case Axis::Integrity: return i;
      default: return a;
    }
  }
  bool any() const { return c != Impact::None || i != Impact::None || a != Impact::None; }

  friend bool operator==(const CiaImpact&, const CiaImpact&) = default;
};

inline const std::vector<std::string>& consequence_names() {
  static const std::vector<std::string> kNames = {"bypass-auth",       "dos",          "read-data", "modify-config",
                                                  "intercept-traffic", "quota-bypass", "escalate"};
  return kNames;
}

/// Known consequence names, or `custom:<tag>`.
inline bool valid_consequence(const std::string& c) {
  const auto& known = consequence_names();
  if (std::find(known.begin(), known.end(), c) != known.end()) return true;
  return c.size() > 7 && c.compare(0, 7, "custom:") == 0;
}

/// Token a successful exploit leaves in Cons.
inline std::string consequence_token(const std::string& c) {
  if (c == "bypass-auth") return "bypass";
  if (c.compare(0, 7, "custom:") == 0) return c.substr(7);
  return c;
}

/// Cloud place the exploit needs to observe, optionally restricted to tokens
/// whose record fields equal the given values.
struct SurfaceMatch {
  std::string place;
  std::vector<std::pair<std::string, Value>> match;

  friend bool operator==(const SurfaceMatch&, const SurfaceMatch&) = default;
};

struct ThreatDefinition {
  std::string id;
  std::string service;
  std::string target_place;
  std::string issue;
  std::string action;
  std::string consequence;
  CiaImpact cia;
  std::vector<std::string> requires_;  // consequence tags achieved beforehand
  std::vector<SurfaceMatch> surface;   // defaults to the target place
  std::vector<std::string> aliases;    // further actions accepted for the issue
  std::optional<Expr> guard;           // extra reconnaissance condition
  bool draft = false;
  std::vector<std::string> review;     // fields flagged for a human
  std::string note;

  std::vector<SurfaceMatch> effective_surface() const {
    if (!surface.empty()) return surface;
    return {SurfaceMatch{target_place, {}}};
  }

  /// "CVE-2017-5638@VM{loc=host-1}"
  std::string label() const {
    std::string s = id + "@" + target_place;
    for (const auto& m : surface) {
      if (m.place != target_place || m.match.empty()) continue;
      s += '{';
      for (std::size_t k = 0; k < m.match.size(); ++k) {
        if (k) s += ',';
        s += m.match[k].first + "=" + (m.match[k].second.is_text() ? m.match[k].second.as_text() : m.match[k].second.str());
      }
      s += '}';
    }
    return s;
  }

  friend bool operator==(const ThreatDefinition&, const ThreatDefinition&) = default;
};

inline Json to_json(const ThreatDefinition& t) {
  Json j = Json::object();
  j["id"] = t.id;
  j["service"] = t.service;
  j["target_place"] = t.target_place;
  j["issue"] = t.issue;
  j["action"] = t.action;
  j["consequence"] = t.consequence;
  j["cia"] = {{"c", impact_name(t.cia.c)}, {"i", impact_name(t.cia.i)}, {"a", impact_name(t.cia.a)}};
  if (!t.requires_.empty()) j["requires"] = t.requires_;
  if (!t.surface.empty()) {
    Json s = Json::array();
    for (const auto& m : t.surface) {
      Json e = {{"place", m.place}};
      if (!m.match.empty()) {
        Json mm = Json::object();
        for (const auto& [k, v] : m.match) mm[k] = to_json(v);
        e["match"] = mm;
      }
      s.push_back(e);
    }
    j["surface"] = s;
  }
  if (!t.aliases.empty()) j["aliases"] = t.aliases;
  if (t.guard) j["guard"] = t.guard->to_json();
  if (t.draft) j["draft"] = true;
  if (!t.review.empty()) j["review"] = t.review;
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

inline ThreatDefinition threat_from_json(const Json& j) {
  try {
    ThreatDefinition t;
    t.id = j.at("id").get<std::string>();
    t.service = j.value("service", std::string{});
    t.target_place = j.value("target_place", std::string{});
    t.issue = j.value("issue", std::string{});
    t.action = j.value("action", std::string{});
    t.consequence = j.value("consequence", std::string{});
    if (j.contains("cia")) {
      const auto& c = j["cia"];
      t.cia.c = impact_from(c.value("c", std::string("none")));
      t.cia.i = impact_from(c.value("i", std::string("none")));
      t.cia.a = impact_from(c.value("a", std::string("none")));
    }
    if (j.contains("requires")) t.requires_ = j["requires"].get<std::vector<std::string>>();
    if (j.contains("surface")) {
      for (const auto& s : j["surface"]) {
        SurfaceMatch m{s.at("place").get<std::string>(), {}};
        if (s.contains("match")) {
          for (auto it = s["match"].begin(); it != s["match"].end(); ++it) {
            m.match.emplace_back(it.key(), value_from_json(it.value()));
          }
        }
        t.surface.push_back(std::move(m));
      }
    }
    if (j.contains("aliases")) t.aliases = j["aliases"].get<std::vector<std::string>>();
    if (j.contains("guard")) t.guard = Expr::from_json(j["guard"]);
    t.draft = j.value("draft", false);
    if (j.contains("review")) t.review = j["review"].get<std::vector<std::string>>();
    t.note = j.value("note", std::string{});
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed threat definition: ") + e.what());
  }
}

/// Checks a definition, and its places against `net` when given.
inline void validate_threat(const ThreatDefinition& t, const Net* net = nullptr) {
  if (t.id.empty()) throw InvalidThreat("threat without id");
  if (t.draft) return;
  if (!t.cia.any()) throw InvalidThreat(t.id + ": CIA impact is none on every axis");
  if (t.service.empty() || t.issue.empty() || t.action.empty() || t.target_place.empty()) {
    throw InvalidThreat(t.id + ": service, issue, action and target_place are required");
  }
  if (!valid_consequence(t.consequence)) throw InvalidThreat(t.id + ": unknown consequence '" + t.consequence + "'");
  for (const auto& r : t.requires_) {
    if (!valid_consequence(r)) throw InvalidThreat(t.id + ": unknown required consequence '" + r + "'");
  }
  if (net) {
    if (!net->find_place(t.target_place)) throw UnknownPlace(t.id + ": no place '" + t.target_place + "'");
    for (const auto& s : t.effective_surface()) {
      const Place* p = net->find_place(s.place);
      if (!p) throw UnknownPlace(t.id + ": no place '" + s.place + "'");
      if (!s.match.empty() && p->colors.kind() != ColorSet::Kind::Record) {
        throw InvalidThreat(t.id + ": surface match on non-record place " + s.place);
      }
    }
  }
}

// --------------------------------------------------------------------------
// Security requirements.

struct SecurityRequirement {
  Axis axis = Axis::Confidentiality;
  int priority = 1;                  // 1 is highest
  std::optional<std::string> scope;  // service or place

  friend bool operator==(const SecurityRequirement&, const SecurityRequirement&) = default;
};

inline Json to_json(const SecurityRequirement& r) {
  Json j = {{"axis", axis_name(r.axis)}, {"priority", r.priority}};
  if (r.scope) j["scope"] = *r.scope;
  return j;
}

inline SecurityRequirement requirement_from_json(const Json& j) {
  SecurityRequirement r;
  r.axis = axis_from(j.at("axis").get<std::string>());
  r.priority = j.at("priority").get<int>();
  if (j.contains("scope")) r.scope = j["scope"].get<std::string>();
  return r;
}

/// A consequence some threat achieved, with the impact it carries.
struct Achieved {
  std::string threat;
  std::string consequence;
  CiaImpact cia;
  std::string service;
  std::string place;
};

inline Achieved achieved(const ThreatDefinition& t) { return {t.id, t.consequence, t.cia, t.service, t.target_place}; }

struct Violation {
  SecurityRequirement requirement;
  bool partial = false;  // only partial impacts reach this requirement

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline Json to_json(const Violation& v) {
  Json j = to_json(v.requirement);
  j["impact"] = v.partial ? "partial" : "full";
  return j;
}

/// Requirements violated by the consequences, highest priority first.
inline std::vector<Violation> violated_requirements(const std::vector<Achieved>& consequences,
                                                    const std::vector<SecurityRequirement>& reqs) {
  std::vector<Violation> out;
  for (const auto& r : reqs) {
    bool hit = false;
    bool full = false;
    for (const auto& c : consequences) {
      if (r.scope && *r.scope != c.service && *r.scope != c.place) continue;
      const Impact i = c.cia.on(r.axis);
      if (i == Impact::None) continue;
      hit = true;
      full = full || i == Impact::Full;
    }
    if (hit) out.push_back({r, !full});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Violation& a, const Violation& b) { return a.requirement.priority < b.requirement.priority; });
  return out;
}

// --------------------------------------------------------------------------
// Threat subnets.

namespace detail {

inline ColorSet service_colors() { return ColorSet::record({{"s", ColorSet::text()}, {"i", ColorSet::text()}}); }

inline Value service_value(const std::string& s, const std::string& i) {
  return Value::record({{"s", Value::text(s)}, {"i", Value::text(i)}});
}

}  // namespace detail

/**
 * Reconnaissance, exploit and consequence for one threat.
 *
 *   Rec --rc--> PreCon_S [rc in Service] --> soft_iss (rc), Atk_sur (action)
 *   Rec --rc--> PreCon_F [not rc in Service]
 *   soft_iss --iss-->, Action ==act==, Atk_sur --as--> Exploit_S
 *       [(act = iss.i or act is an alias) and as = act] --> Cons
 *   Exploit_F has the same arcs and the negated guard.
 */
inline Net build_threat_subnet(const ThreatDefinition& t) {
  validate_threat(t);
  if (t.draft) throw InvalidThreat(t.id + ": draft threats cannot be instantiated");
  using namespace ex;
  Net n;
  n.name = t.id;
  n.add_place("Service", detail::service_colors(), "threat");
  n.add_place("Rec", detail::service_colors(), "threat");
  n.add_place("soft_iss", detail::service_colors(), "threat");
  n.add_place("Action", ColorSet::text(), "threat");
  n.add_place("Atk_sur", ColorSet::text(), "threat");
  n.add_place("Cons", ColorSet::text(), "threat");

  Expr recon = in(var("rc"), "Service");
  if (t.guard) recon = all({recon, *t.guard});
  n.add_transition("PreCon_S", recon);
  n.arc_in("Rec", "PreCon_S", Pattern::bind("rc"));
  n.arc_out("PreCon_S", "soft_iss", var("rc"));
  n.arc_out("PreCon_S", "Atk_sur", lit(Value::text(t.action)));
  n.add_transition("PreCon_F", not_(recon));
  n.arc_in("Rec", "PreCon_F", Pattern::bind("rc"));

  std::vector<Expr> matches{eq(var("act"), field("iss", "i"))};
  for (const auto& a : t.aliases) matches.push_back(eq(var("act"), lit(Value::text(a))));
  const Expr exploit = all({any(std::move(matches)), eq(var("as"), var("act"))});
  for (const char* tid : {"Exploit_S", "Exploit_F"}) {
    const bool success = tid[8] == 'S';
    n.add_transition(tid, success ? exploit : not_(exploit));
    n.arc_in("soft_iss", tid, Pattern::bind("iss"));
    n.arc_read("Action", tid, Pattern::bind("act"));
    n.arc_in("Atk_sur", tid, Pattern::bind("as"));
  }
  n.arc_out("Exploit_S", "Cons", lit(Value::text(consequence_token(t.consequence))));

  n.initial.add("Service", detail::service_value(t.service, t.issue));
  n.initial.add("Rec", detail::service_value(t.service, t.issue));
  n.initial.add("Action", Value::text(t.action));
  return n;
}

// --------------------------------------------------------------------------
// Composition.

struct LinkEffect {
  enum class Kind { Inject, Capability, Dos };
  Kind kind = Kind::Inject;
  std::string place;  // Inject, Dos
  Value token;        // Inject
  std::string tag;    // Capability

  friend bool operator==(const LinkEffect&, const LinkEffect&) = default;
};

struct LinkSpec {
  std::string threat;
  std::vector<LinkEffect> effects;

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

inline Json to_json(const LinkSpec& l) {
  Json effects = Json::array();
  for (const auto& e : l.effects) {
    switch (e.kind) {
      case LinkEffect::Kind::Inject:
        effects.push_back({{"kind", "inject"}, {"place", e.place}, {"token", to_json(e.token)}});
        break;
      case LinkEffect::Kind::Capability:
        effects.push_back({{"kind", "capability"}, {"tag", e.tag}});
        break;
      case LinkEffect::Kind::Dos:
        effects.push_back({{"kind", "dos"}, {"place", e.place}});
        break;
    }
  }
  return {{"threat", l.threat}, {"effects", effects}};
}

inline LinkSpec link_from_json(const Json& j) {
  try {
    LinkSpec l;
    l.threat = j.at("threat").get<std::string>();
    for (const auto& e : j.at("effects")) {
      LinkEffect f;
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "inject") {
        f.kind = LinkEffect::Kind::Inject;
        f.place = e.at("place").get<std::string>();
        f.token = value_from_json(e.at("token"));
      } else if (kind == "capability") {
        f.kind = LinkEffect::Kind::Capability;
        f.tag = e.at("tag").get<std::string>();
      } else if (kind == "dos") {
        f.kind = LinkEffect::Kind::Dos;
        f.place = e.at("place").get<std::string>();
      } else {
        throw ParseError("unknown link effect '" + kind + "'");
      }
      l.effects.push_back(std::move(f));
    }
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed link: ") + e.what());
  }
}

inline constexpr const char* kCapPlace = "Cap";
inline constexpr const char* kDosPlace = "DoS";

inline ColorSet cap_colors() { return ColorSet::record({{"tag", ColorSet::text()}, {"by", ColorSet::text()}}); }
inline ColorSet dos_colors() { return ColorSet::record({{"place", ColorSet::text()}, {"by", ColorSet::text()}}); }

inline std::string port_name(const std::string& place) { return "port:" + place; }

/**
 * Hierarchical composition: every threat becomes a submodule named by its id,
 * glued to the cloud through port places. Reconnaissance reads the threat's
 * surface places and the Cap tokens of its required consequences; a
 * successful exploit writes Cap {tag, by} plus the effects of its links. The
 * cloud's own transitions are left as they are.
 */
inline Net attach(const Net& cloud, const std::vector<ThreatDefinition>& threats, const std::vector<LinkSpec>& links) {
  Net out = cloud;
  out.name = cloud.name + "+threats";
  if (!out.find_place(kCapPlace)) out.add_place(kCapPlace, cap_colors(), "threat");
  if (!out.find_place(kDosPlace)) out.add_place(kDosPlace, dos_colors(), "threat");

  std::set<std::string> ids;
  for (const auto& t : threats) ids.insert(t.id);
  for (const auto& l : links) {
    if (!ids.count(l.threat)) throw UnresolvedLink("link for unknown threat '" + l.threat + "'");
  }

  for (const auto& t : threats) {
    validate_threat(t, &out);
    Net sub = build_threat_subnet(t);
    auto port = [&](const std::string& place) {
      const std::string local = port_name(place);
      if (!sub.find_place(local)) {
        const Place* outer = out.find_place(place);
        if (!outer) throw UnresolvedLink(t.id + ": no place '" + place + "' to link to");
        sub.add_place(local, outer->colors, "port");
        out.fusions.push_back(Fusion{t.id, place, local});
      }
      return local;
    };

    for (const auto& s : t.effective_surface()) {
      const std::string local = port(s.place);
      Pattern p = Pattern::wild();
      if (!s.match.empty()) {
        std::vector<std::pair<std::string, Pattern>> fields;
        for (const auto& [k, v] : s.match) fields.emplace_back(k, Pattern::lit(v));
        p = Pattern::record(std::move(fields));
      }
      sub.arc_read(local, "PreCon_S", p);
      sub.arc_read(local, "PreCon_F", p);
    }
    if (t.guard) {
      std::set<std::string> refs;
      referenced_places(*t.guard, refs);
      std::map<std::string, std::string> renamed;
      for (const auto& r : refs) {
        if (!sub.find_place(r)) renamed[r] = port(r);
      }
      for (auto& tr : sub.transitions) {
        if (tr.id == "PreCon_S" || tr.id == "PreCon_F") {
          tr.guard = rename_places(tr.guard, [&](const std::string& p) {
            auto it = renamed.find(p);
            return it == renamed.end() ? p : it->second;
          });
        }
      }
    }
    const std::string cap = port(kCapPlace);
    for (const auto& r : t.requires_) {
      const Pattern need = Pattern::record({{"tag", Pattern::lit(Value::text(r))}});
      sub.arc_read(cap, "PreCon_S", need);
      sub.arc_read(cap, "PreCon_F", need);
    }
    auto cap_token = [&](const std::string& tag) {
      return ex::lit(Value::record({{"tag", Value::text(tag)}, {"by", Value::text(t.id)}}));
    };
    sub.arc_out("Exploit_S", cap, cap_token(t.consequence));
    for (const auto& l : links) {
      if (l.threat != t.id) continue;
      for (const auto& e : l.effects) {
        switch (e.kind) {
          case LinkEffect::Kind::Inject: {
            const std::string local = port(e.place);
            if (!out.find_place(e.place)->colors.contains(e.token)) {
              throw UnresolvedLink(t.id + ": token " + e.token.str() + " does not fit " + e.place);
            }
            sub.arc_out("Exploit_S", local, ex::lit(e.token));
            break;
          }
          case LinkEffect::Kind::Capability:
            sub.arc_out("Exploit_S", cap, cap_token(e.tag));
            break;
          case LinkEffect::Kind::Dos: {
            if (!out.find_place(e.place)) throw UnresolvedLink(t.id + ": no place '" + e.place + "' to deny");
            const std::string dos = port(kDosPlace);
            sub.arc_out("Exploit_S", dos,
                        ex::lit(Value::record({{"place", Value::text(e.place)}, {"by", Value::text(t.id)}})));
            break;
          }
        }
      }
    }
    out.submodules.push_back(Submodule{t.id, std::make_shared<const Net>(std::move(sub))});
  }
  return out;
}

/// Flat id of a threat transition after flattening.
inline std::string threat_transition(const std::string& threat, const char* local) { return threat + "/" + local; }

/// Threat id of a flat transition id, or empty for cloud transitions.
inline std::string threat_of(const std::string& transition) {
  const auto slash = transition.rfind('/');
  return slash == std::string::npos ? std::string{} : transition.substr(0, slash);
}

}  // namespace threatflow

#endif  // THREATFLOW_THREAT_HPP_
