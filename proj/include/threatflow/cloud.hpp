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

#ifndef THREATFLOW_CLOUD_HPP_
#define THREATFLOW_CLOUD_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "threatflow/json.hpp"
#include "threatflow/net.hpp"

namespace threatflow {

struct Credentials {
  std::string username;
  std::string password;
  Tick at = 0;
};

struct Quota {
  std::string cpu;
  std::int64_t ram = 0;   // MB
  std::int64_t disk = 0;  // GB
};

struct Server {
  std::string loc;
  std::string dc;
  std::int64_t capacity = 1;
};

struct VmRequest {
  std::string username;
  std::string cpu;
  std::int64_t ram = 0;
  std::int64_t disk = 0;
  bool wants_storage = false;
  Tick at = 0;
};

struct MigrationConfig {
  bool enabled = false;
  Tick delay = 1;
  std::optional<Tick> at;  // provider-initiated migration request time
};

struct CloudConfig {
  std::vector<Credentials> users;
  std::map<std::string, Quota> quotas;
  std::vector<Server> servers;
  std::vector<std::string> disk_images;
  std::vector<std::string> mac_pool;
  std::vector<std::string> ip_pool;
  std::vector<std::string> online_users;
  std::vector<Credentials> logins;  // workload: login attempts
  std::vector<VmRequest> requests;  // workload: VM requests
  MigrationConfig migration;
  bool strict_quota_equality = false;

  /// Throws InvalidConfig naming the first violated invariant.
  void validate() const {
    std::set<std::string> names;
    for (const auto& u : users) {
      if (u.username.empty()) throw InvalidConfig("empty username");
      if (!names.insert(u.username).second) throw InvalidConfig("duplicate username '" + u.username + "'");
      if (!quotas.count(u.username)) throw InvalidConfig("no quota for user '" + u.username + "'");
    }
    for (const auto& [u, q] : quotas) {
      if (q.ram < 0 || q.disk < 0) throw InvalidConfig("negative quota for '" + u + "'");
    }
    for (const auto& s : servers) {
      if (s.capacity < 0) throw InvalidConfig("negative capacity on " + s.loc);
    }
    for (const auto& r : requests) {
      if (r.ram < 0 || r.disk < 0) throw InvalidConfig("negative resources in request of '" + r.username + "'");
    }
    if (!requests.empty()) {
      if (servers.empty()) throw InvalidConfig("VM requests need at least one server");
      if (disk_images.empty()) throw InvalidConfig("VM requests need a disk image");
      if (mac_pool.empty() || ip_pool.empty()) throw InvalidConfig("VM requests need non-empty mac and ip pools");
    }
    if (migration.delay < 0) throw InvalidConfig("negative migration delay");
  }
};

namespace detail {

inline std::vector<std::string> strings_at(const Json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key)) {
    for (const auto& s : j[key]) out.push_back(s.get<std::string>());
  }
  return out;
}

inline Credentials creds_from_json(const Json& j) {
  return Credentials{j.at("username").get<std::string>(), j.at("password").get<std::string>(), j.value("at", Tick{0})};
}

inline Json creds_to_json(const Credentials& c) {
  Json j = {{"username", c.username}, {"password", c.password}};
  if (c.at) j["at"] = c.at;
  return j;
}

}  // namespace detail

inline VmRequest vm_request_from_json(const Json& j) {
  VmRequest r;
  r.username = j.at("username").get<std::string>();
  r.cpu = j.at("cpu").get<std::string>();
  r.ram = j.at("ram").get<std::int64_t>();
  r.disk = j.at("disk").get<std::int64_t>();
  r.wants_storage = j.value("wants_storage", false);
  r.at = j.value("at", Tick{0});
  return r;
}

inline Json to_json(const VmRequest& r) {
  Json j = {{"username", r.username}, {"cpu", r.cpu}, {"ram", r.ram}, {"disk", r.disk}};
  if (r.wants_storage) j["wants_storage"] = true;
  if (r.at) j["at"] = r.at;
  return j;
}

/// Reads a CloudConfig document. Malformed documents raise ParseError; the
/// invariants are checked separately by validate().
inline CloudConfig cloud_config_from_json(const Json& j) {
  try {
    CloudConfig c;
    for (const auto& u : j.at("users")) c.users.push_back(detail::creds_from_json(u));
    if (j.contains("quotas")) {
      for (auto it = j["quotas"].begin(); it != j["quotas"].end(); ++it) {
        const auto& q = it.value();
        c.quotas[it.key()] = Quota{q.at("cpu").get<std::string>(), q.at("ram").get<std::int64_t>(),
                                   q.at("disk").get<std::int64_t>()};
      }
    }
    if (j.contains("servers")) {
      for (const auto& s : j["servers"]) {
        c.servers.push_back(Server{s.at("loc").get<std::string>(), s.at("dc").get<std::string>(),
                                   s.value("capacity", std::int64_t{1})});
      }
    }
    c.disk_images = detail::strings_at(j, "disk_images");
    c.mac_pool = detail::strings_at(j, "mac_pool");
    c.ip_pool = detail::strings_at(j, "ip_pool");
    c.online_users = detail::strings_at(j, "online_users");
    if (j.contains("workload")) {
      const auto& w = j["workload"];
      if (w.contains("logins")) {
        for (const auto& l : w["logins"]) c.logins.push_back(detail::creds_from_json(l));
      }
      if (w.contains("requests")) {
        for (const auto& r : w["requests"]) c.requests.push_back(vm_request_from_json(r));
      }
    }
    if (j.contains("migration")) {
      const auto& m = j["migration"];
      c.migration.enabled = m.value("enabled", false);
      c.migration.delay = m.value("delay", Tick{1});
      if (m.contains("at")) c.migration.at = m["at"].get<Tick>();
    }
    c.strict_quota_equality = j.value("strict_quota_equality", false);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed cloud config: ") + e.what());
  }
}

inline Json to_json(const CloudConfig& c) {
  Json j = Json::object();
  Json users = Json::array();
  for (const auto& u : c.users) users.push_back(detail::creds_to_json(u));
  j["users"] = users;
  Json quotas = Json::object();
  for (const auto& [u, q] : c.quotas) quotas[u] = {{"cpu", q.cpu}, {"ram", q.ram}, {"disk", q.disk}};
  j["quotas"] = quotas;
  Json servers = Json::array();
  for (const auto& s : c.servers) servers.push_back({{"loc", s.loc}, {"dc", s.dc}, {"capacity", s.capacity}});
  j["servers"] = servers;
  j["disk_images"] = c.disk_images;
  j["mac_pool"] = c.mac_pool;
  j["ip_pool"] = c.ip_pool;
  j["online_users"] = c.online_users;
  Json logins = Json::array();
  for (const auto& l : c.logins) logins.push_back(detail::creds_to_json(l));
  Json requests = Json::array();
  for (const auto& r : c.requests) requests.push_back(to_json(r));
  j["workload"] = {{"logins", logins}, {"requests", requests}};
  Json mig = {{"enabled", c.migration.enabled}, {"delay", c.migration.delay}};
  if (c.migration.at) mig["at"] = *c.migration.at;
  j["migration"] = mig;
  j["strict_quota_equality"] = c.strict_quota_equality;
  return j;
}

inline CloudConfig load_cloud_config(const std::string& path) { return cloud_config_from_json(read_json_file(path)); }

// --------------------------------------------------------------------------
// Token shapes.

namespace colors {

inline ColorSet cred() { return ColorSet::record({{"un", ColorSet::text()}, {"pw", ColorSet::text()}}); }
inline ColorSet request() {
  return ColorSet::record({{"un", ColorSet::text()}, {"cpu", ColorSet::text()}, {"ram", ColorSet::count()},
                           {"disk", ColorSet::count()}, {"storage", ColorSet::count()}});
}
inline ColorSet quota() {
  return ColorSet::record({{"un", ColorSet::text()}, {"cpu", ColorSet::text()}, {"ram", ColorSet::count()},
                           {"disk", ColorSet::count()}});
}
inline ColorSet account() {
  return ColorSet::record({{"un", ColorSet::text()}, {"vms", ColorSet::list(ColorSet::text())}});
}
inline ColorSet server() {
  return ColorSet::record({{"rank", ColorSet::count()}, {"loc", ColorSet::text()}, {"dc", ColorSet::text()},
                           {"free", ColorSet::count()}});
}
inline ColorSet host_slot() {
  return ColorSet::record({{"loc", ColorSet::text()}, {"dc", ColorSet::text()}, {"un", ColorSet::text()},
                           {"cpu", ColorSet::text()}, {"ram", ColorSet::count()}, {"disk", ColorSet::count()},
                           {"storage", ColorSet::count()}});
}
inline ColorSet vnic() { return ColorSet::record({{"idx", ColorSet::count()}, {"mac", ColorSet::text()}}); }
inline ColorSet dhcp() {
  return ColorSet::record({{"idx", ColorSet::count()}, {"ip", ColorSet::text()}, {"mac", ColorSet::text()}});
}
inline ColorSet hyp() { return ColorSet::tuple({host_slot(), ColorSet::text(), dhcp()}); }
inline ColorSet vm() {
  return ColorSet::record({{"loc", ColorSet::text()}, {"dc", ColorSet::text()}, {"un", ColorSet::text()},
                           {"cpu", ColorSet::text()}, {"ram", ColorSet::count()}, {"disk", ColorSet::count()},
                           {"storage", ColorSet::count()}, {"di", ColorSet::text()}, {"ip", ColorSet::text()},
                           {"mac", ColorSet::text()}, {"kind", ColorSet::text()}});
}

}  // namespace colors

inline Value cred_value(const std::string& un, const std::string& pw) {
  return Value::record({{"un", Value::text(un)}, {"pw", Value::text(pw)}});
}

inline Value request_value(const VmRequest& r) {
  return Value::record({{"un", Value::text(r.username)}, {"cpu", Value::text(r.cpu)}, {"ram", Value::count(r.ram)},
                        {"disk", Value::count(r.disk)}, {"storage", Value::count(r.wants_storage ? 1 : 0)}});
}

// --------------------------------------------------------------------------
// Abstract transition system.

/**
 * Six-state transition system driven by the inputs s (start), c (correct) and
 * i (invalid). With malicious inputs, t sends B to Invalid and C to Final.
 * Transition ids are `<state>.<input>`; names are the input letter.
 */
inline Net build_abstract_ts(bool with_malicious_inputs) {
  Net n;
  n.name = with_malicious_inputs ? "abstract-ts-malicious" : "abstract-ts";
  for (const char* p : {"Start", "A", "B", "C", "Final", "Invalid"}) n.add_place(p, ColorSet::text());
  auto edge = [&](const std::string& from, const std::string& input, const std::string& to) {
    Transition& t = n.add_transition(from + "." + input);
    t.name = input;
    n.arc_in(from, t.id, Pattern::bind("x"));
    n.arc_out(t.id, to, ex::var("x"));
  };
  edge("Start", "s", "A");
  edge("A", "c", "Final");
  edge("A", "i", "B");
  edge("B", "c", "Final");
  edge("B", "i", "C");
  edge("C", "c", "Final");
  edge("C", "i", "Invalid");
  if (with_malicious_inputs) {
    edge("B", "t", "Invalid");
    edge("C", "t", "Final");
  }
  n.initial.add("Start", Value::text("run"));
  return n;
}

// --------------------------------------------------------------------------
// Login system.

/**
 * Log_Reqs --U--> Auth_S / Auth_F. Auth_S also reads a stored account C and
 * requires U = C with U.un not yet online; Auth_F fires on the negation and
 * parks the attempt in Log_Errs (a retry is a fresh injection into Log_Reqs).
 */
inline Net build_login_net(const CloudConfig& config) {
  std::set<std::string> names;
  for (const auto& u : config.users) {
    if (!names.insert(u.username).second) throw InvalidConfig("duplicate username '" + u.username + "'");
  }
  Net n;
  n.name = "login";
  n.add_place("Log_Reqs", colors::cred(), "control");
  n.add_place("Usr_Accns", colors::cred(), "control");
  n.add_place("On_Usrs", ColorSet::text(), "control");
  n.add_place("Log_Errs", colors::cred(), "control");

  const Expr ok = ex::all({ex::in(ex::var("U"), "Usr_Accns"), ex::not_(ex::in(ex::field("U", "un"), "On_Usrs"))});
  n.add_transition("Auth_S", ex::all({ex::eq(ex::var("U"), ex::var("C")), ok}));
  n.arc_in("Log_Reqs", "Auth_S", Pattern::bind("U"));
  n.arc_read("Usr_Accns", "Auth_S", Pattern::bind("C"));
  n.arc_out("Auth_S", "On_Usrs", ex::field("U", "un"));

  n.add_transition("Auth_F", ex::not_(ok));
  n.arc_in("Log_Reqs", "Auth_F", Pattern::bind("U"));
  n.arc_out("Auth_F", "Log_Errs", ex::var("U"));

  for (const auto& u : config.users) n.initial.add("Usr_Accns", cred_value(u.username, u.password));
  for (const auto& u : config.online_users) n.initial.add("On_Usrs", Value::text(u));
  for (const auto& l : config.logins) n.initial.add("Log_Reqs", cred_value(l.username, l.password), l.at);
  return n;
}

// --------------------------------------------------------------------------
// Cloud model.

namespace detail {

inline Pattern request_pattern() {
  return Pattern::record({{"un", Pattern::bind("u")}, {"cpu", Pattern::bind("c")}, {"ram", Pattern::bind("r")},
                          {"disk", Pattern::bind("d")}, {"storage", Pattern::bind("st")}});
}

inline Expr request_expr() {
  return ex::record({{"un", ex::var("u")}, {"cpu", ex::var("c")}, {"ram", ex::var("r")}, {"disk", ex::var("d")},
                     {"storage", ex::var("st")}});
}

}  // namespace detail

/**
 * Three-layer cloud net: login (Auth_F/Auth_S), access grant, VM request
 * admission against quota (VM_F/VM_S), first-fit scheduling, final
 * configuration (Final_confs) and launch, plus optional migration.
 *
 * Places beyond the core list: Session (authenticated, not yet granted),
 * LoginErr and VMErr (rejections), MIGREQ (migration requests) and MIG
 * (VM in flight).
 */
inline Net build_cloud_net(const CloudConfig& config) {
  config.validate();
  Net n;
  n.name = "cloud";
  using namespace ex;

  n.add_place("UI", colors::cred(), "control");
  n.add_place("AS", colors::cred(), "control");
  n.add_place("Session", ColorSet::text(), "control");
  n.add_place("CA", ColorSet::text(), "control");
  n.add_place("LoginErr", colors::cred(), "control");
  n.add_place("DB", colors::account(), "storage");
  n.add_place("INT", colors::request(), "control");
  n.add_place("UQ", colors::quota(), "control");
  n.add_place("VMErr", colors::request(), "control");
  n.add_place("SL", colors::request(), "infrastructure");
  n.add_place("AR", colors::server(), "infrastructure");
  n.add_place("HS", colors::host_slot(), "infrastructure");
  n.add_place("DI", ColorSet::text(), "storage");
  n.add_place("NIC", colors::vnic(), "infrastructure");
  n.add_place("NET", colors::dhcp(), "infrastructure");
  n.add_place("HYP", colors::hyp(), "infrastructure");
  n.add_place("VM", colors::vm(), "infrastructure");
  n.add_place("MIGREQ", ColorSet::text(), "infrastructure");
  n.add_place("MIG", colors::vm(), "infrastructure");

  // T1.1 login.
  n.add_transition("Auth_F", not_(in(var("u"), "AS"))).name = "T1.1a";
  n.arc_in("UI", "Auth_F", Pattern::bind("u"));
  n.arc_out("Auth_F", "LoginErr", var("u"));
  n.add_transition("Auth_S", in(var("u"), "AS")).name = "T1.1b";
  n.arc_in("UI", "Auth_S", Pattern::bind("u"));
  n.arc_out("Auth_S", "Session", field("u", "un"));

  // T1.2 access grant.
  n.add_transition("Access").name = "T1.2";
  n.arc_in("Session", "Access", Pattern::bind("s"));
  n.arc_read("DB", "Access", Pattern::record({{"un", Pattern::bind("s")}}));
  n.arc_out("Access", "CA", var("s"));

  // T1.3 admission against quota.
  const Expr fits = config.strict_quota_equality
                        ? all({eq(var("c"), var("qc")), eq(var("r"), var("qr")), eq(var("d"), var("qd"))})
                        : all({eq(var("c"), var("qc")), le(var("r"), var("qr")), le(var("d"), var("qd"))});
  const Pattern quota = Pattern::record({{"un", Pattern::bind("u")}, {"cpu", Pattern::bind("qc")},
                                         {"ram", Pattern::bind("qr")}, {"disk", Pattern::bind("qd")}});
  n.add_transition("VM_F", not_(fits)).name = "T1.3a";
  n.arc_in("INT", "VM_F", detail::request_pattern());
  n.arc_read("UQ", "VM_F", quota);
  n.arc_read("CA", "VM_F", Pattern::bind("u"));
  n.arc_out("VM_F", "VMErr", detail::request_expr());
  n.add_transition("VM_S", fits).name = "T1.3b";
  n.arc_in("INT", "VM_S", detail::request_pattern());
  n.arc_read("UQ", "VM_S", quota);
  n.arc_read("CA", "VM_S", Pattern::bind("u"));
  n.arc_out("VM_S", "SL", detail::request_expr());

  // T1.4 first-fit scheduling over server rank.
  n.add_transition("Schedule",
                   all({gt(var("f"), lit(0)),
                        not_(exists("AR", "o", all({lt(field("o", "rank"), var("rk")), gt(field("o", "free"), lit(0))})))}))
      .name = "T1.4";
  n.arc_in("SL", "Schedule", detail::request_pattern());
  n.arc_in("AR", "Schedule",
           Pattern::record({{"rank", Pattern::bind("rk")}, {"loc", Pattern::bind("l")}, {"dc", Pattern::bind("dc")},
                            {"free", Pattern::bind("f")}}));
  n.arc_out("Schedule", "AR",
            record({{"rank", var("rk")}, {"loc", var("l")}, {"dc", var("dc")}, {"free", sub(var("f"), lit(1))}}));
  n.arc_out("Schedule", "HS",
            record({{"loc", var("l")}, {"dc", var("dc")}, {"un", var("u")}, {"cpu", var("c")}, {"ram", var("r")},
                    {"disk", var("d")}, {"storage", var("st")}}));

  // T1.5 final configuration: pool heads, matching MACs, config := h ++ (im) ++ dh.
  n.add_transition("Final_confs",
                   all({eq(field("dh", "mac"), field("vn", "mac")), not_(exists("DI", "o", lt(var("o"), var("im")))),
                        not_(exists("NIC", "o", lt(field("o", "idx"), field("vn", "idx")))),
                        not_(exists("NET", "o", lt(field("o", "idx"), field("dh", "idx"))))}))
      .name = "T1.5";
  n.arc_in("HS", "Final_confs", Pattern::bind("h"));
  n.arc_read("DI", "Final_confs", Pattern::bind("im"));
  n.arc_in("NIC", "Final_confs", Pattern::bind("vn"));
  n.arc_in("NET", "Final_confs", Pattern::bind("dh"));
  n.arc_out("Final_confs", "HYP", concat({tuple({var("h")}), tuple({var("im")}), tuple({var("dh")})}));

  // T1.6 launch and record ownership.
  n.add_transition("Launch").name = "T1.6";
  n.arc_in("HYP", "Launch",
           Pattern::tuple({Pattern::record({{"loc", Pattern::bind("l")}, {"dc", Pattern::bind("dc")},
                                            {"un", Pattern::bind("u")}, {"cpu", Pattern::bind("c")},
                                            {"ram", Pattern::bind("r")}, {"disk", Pattern::bind("d")},
                                            {"storage", Pattern::bind("st")}}),
                           Pattern::bind("im"),
                           Pattern::record({{"ip", Pattern::bind("ip")}, {"mac", Pattern::bind("mac")}})}));
  n.arc_in("DB", "Launch", Pattern::record({{"un", Pattern::bind("u")}, {"vms", Pattern::bind("vs")}}));
  n.arc_out("Launch", "VM",
            record({{"loc", var("l")}, {"dc", var("dc")}, {"un", var("u")}, {"cpu", var("c")}, {"ram", var("r")},
                    {"disk", var("d")}, {"storage", var("st")}, {"di", var("im")}, {"ip", var("ip")},
                    {"mac", var("mac")}, {"kind", if_(eq(var("st"), lit(1)), lit("VM+Data"), lit("VM"))}}));
  n.arc_out("Launch", "DB", record({{"un", var("u")}, {"vms", concat({var("vs"), tuple({var("ip")})})}}));

  if (config.migration.enabled) {
    n.add_transition("Migrate", all({ne(field("v", "loc"), var("l2")), gt(var("f"), lit(0))})).name = "Migrate";
    n.arc_in("VM", "Migrate", Pattern::bind("v"));
    n.arc_in("MIGREQ", "Migrate", Pattern::bind("why"));
    n.arc_in("AR", "Migrate",
             Pattern::record({{"rank", Pattern::bind("rk")}, {"loc", Pattern::bind("l2")},
                              {"dc", Pattern::bind("dc2")}, {"free", Pattern::bind("f")}}));
    n.arc_out("Migrate", "AR",
              record({{"rank", var("rk")}, {"loc", var("l2")}, {"dc", var("dc2")}, {"free", sub(var("f"), lit(1))}}));
    n.arc_out("Migrate", "MIG", with(var("v"), {{"loc", var("l2")}, {"dc", var("dc2")}}));
    n.add_transition("Migrate_done", truth(), config.migration.delay).name = "Migrate_done";
    n.arc_in("MIG", "Migrate_done", Pattern::bind("m"));
    n.arc_out("Migrate_done", "VM", var("m"));
    if (config.migration.at) n.initial.add("MIGREQ", Value::text("provider"), *config.migration.at);
  }

  for (const auto& u : config.users) {
    n.initial.add("AS", cred_value(u.username, u.password));
    n.initial.add("DB", Value::record({{"un", Value::text(u.username)}, {"vms", Value::tuple({})}}));
  }
  for (const auto& [u, q] : config.quotas) {
    n.initial.add("UQ", Value::record({{"un", Value::text(u)}, {"cpu", Value::text(q.cpu)},
                                       {"ram", Value::count(q.ram)}, {"disk", Value::count(q.disk)}}));
  }
  for (const auto& u : config.online_users) n.initial.add("CA", Value::text(u));
  for (std::size_t i = 0; i < config.servers.size(); ++i) {
    const auto& s = config.servers[i];
    n.initial.add("AR", Value::record({{"rank", Value::count(static_cast<std::int64_t>(i) + 1)},
                                       {"loc", Value::text(s.loc)}, {"dc", Value::text(s.dc)},
                                       {"free", Value::count(s.capacity)}}));
  }
  for (const auto& im : config.disk_images) n.initial.add("DI", Value::text(im));
  const std::size_t pool = std::min(config.mac_pool.size(), config.ip_pool.size());
  for (std::size_t i = 0; i < pool; ++i) {
    const auto idx = Value::count(static_cast<std::int64_t>(i));
    n.initial.add("NIC", Value::record({{"idx", idx}, {"mac", Value::text(config.mac_pool[i])}}));
    n.initial.add("NET", Value::record({{"idx", idx}, {"ip", Value::text(config.ip_pool[i])},
                                        {"mac", Value::text(config.mac_pool[i])}}));
  }
  for (const auto& l : config.logins) n.initial.add("UI", cred_value(l.username, l.password), l.at);
  for (const auto& r : config.requests) n.initial.add("INT", request_value(r), r.at);
  return n;
}

/// Adds a token to a place after checking it against the place's colors.
inline Marking inject(const Net& net, Marking m, const std::string& place, const Value& v, Tick at = 0) {
  const Place* p = net.find_place(place);
  if (!p) throw UnknownPlace("no place '" + place + "'");
  if (!p->colors.contains(v)) throw TypeMismatch(v.str() + " does not fit place " + place);
  m.add(place, v, at);
  return m;
}

/// Login attempt into UI.
inline Marking inject_request(const Net& net, Marking m, const Credentials& c) {
  return inject(net, std::move(m), "UI", cred_value(c.username, c.password), c.at);
}

/// VM request into INT.
inline Marking inject_request(const Net& net, Marking m, const VmRequest& r) {
  if (r.ram < 0 || r.disk < 0) throw TypeMismatch("negative resources in VM request");
  return inject(net, std::move(m), "INT", request_value(r), r.at);
}

}  // namespace threatflow

#endif  // THREATFLOW_CLOUD_HPP_
