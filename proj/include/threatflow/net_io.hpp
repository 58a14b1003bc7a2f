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

#ifndef THREATFLOW_NET_IO_HPP_
#define THREATFLOW_NET_IO_HPP_

#include <memory>
#include <string>

#include "threatflow/json.hpp"
#include "threatflow/net.hpp"

namespace threatflow {

// Net file layout:
//   { "name": ..., "places": [...], "transitions": [...], "arcs": [...],
//     "initial_marking": {...}, "submodules": [{"name", "net"}], "fusions": [...] }
// An arc with "pattern" runs place -> transition, one with "expr" runs
// transition -> place. Fields at their default value are omitted.

inline Json net_to_json(const Net& net) {
  Json j = Json::object();
  j["name"] = net.name;
  Json places = Json::array();
  for (const auto& p : net.places) {
    Json e = {{"id", p.id}};
    if (p.name != p.id) e["name"] = p.name;
    e["colors"] = p.colors.to_json();
    if (p.layer) e["layer"] = *p.layer;
    places.push_back(std::move(e));
  }
  j["places"] = std::move(places);

  Json transitions = Json::array();
  for (const auto& t : net.transitions) {
    Json e = {{"id", t.id}};
    if (t.name != t.id) e["name"] = t.name;
    if (t.guard.op != Expr::Op::True) e["guard"] = t.guard.to_json();
    if (t.delay != 0) e["delay"] = t.delay;
    transitions.push_back(std::move(e));
  }
  j["transitions"] = std::move(transitions);

  Json arcs = Json::array();
  for (const auto& a : net.inputs) {
    Json e = {{"from", a.place}, {"to", a.transition}, {"pattern", a.pattern.to_json()}};
    if (a.weight != 1) e["weight"] = a.weight;
    if (a.read) e["read"] = true;
    arcs.push_back(std::move(e));
  }
  for (const auto& a : net.outputs) {
    Json e = {{"from", a.transition}, {"to", a.place}, {"expr", a.expr.to_json()}};
    if (a.weight != 1) e["weight"] = a.weight;
    if (a.when) e["when"] = a.when->to_json();
    arcs.push_back(std::move(e));
  }
  j["arcs"] = std::move(arcs);
  j["initial_marking"] = to_json(net.initial);

  if (!net.submodules.empty()) {
    Json subs = Json::array();
    for (const auto& s : net.submodules) subs.push_back({{"name", s.name}, {"net", net_to_json(*s.net)}});
    j["submodules"] = std::move(subs);
  }
  if (!net.fusions.empty()) {
    Json fs = Json::array();
    for (const auto& f : net.fusions) fs.push_back({{"submodule", f.submodule}, {"outer", f.outer}, {"inner", f.inner}});
    j["fusions"] = std::move(fs);
  }
  return j;
}

inline Net net_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("net must be an object");
  try {
    Net net;
    net.name = j.value("name", std::string{});
    for (const auto& e : j.at("places")) {
      Place p;
      p.id = e.at("id").get<std::string>();
      p.name = e.value("name", p.id);
      p.colors = ColorSet::from_json(e.at("colors"));
      if (e.contains("layer")) p.layer = e["layer"].get<std::string>();
      net.places.push_back(std::move(p));
    }
    for (const auto& e : j.at("transitions")) {
      Transition t;
      t.id = e.at("id").get<std::string>();
      t.name = e.value("name", t.id);
      if (e.contains("guard")) t.guard = Expr::from_json(e["guard"]);
      t.delay = e.value("delay", Tick{0});
      if (t.delay < 0) throw ParseError("negative delay on " + t.id);
      net.transitions.push_back(std::move(t));
    }
    if (j.contains("arcs")) {
      for (const auto& e : j["arcs"]) {
        const auto from = e.at("from").get<std::string>();
        const auto to = e.at("to").get<std::string>();
        const int weight = e.value("weight", 1);
        if (e.contains("pattern")) {
          net.inputs.push_back(InputArc{from, to, Pattern::from_json(e["pattern"]), weight, e.value("read", false)});
        } else if (e.contains("expr")) {
          std::optional<Expr> when;
          if (e.contains("when")) when = Expr::from_json(e["when"]);
          net.outputs.push_back(OutputArc{from, to, Expr::from_json(e["expr"]), weight, std::move(when)});
        } else {
          throw ParseError("arc needs \"pattern\" or \"expr\": " + e.dump());
        }
      }
    }
    if (j.contains("initial_marking")) net.initial = marking_from_json(j["initial_marking"]);
    if (j.contains("submodules")) {
      for (const auto& s : j["submodules"]) {
        net.submodules.push_back(
            Submodule{s.at("name").get<std::string>(), std::make_shared<const Net>(net_from_json(s.at("net")))});
      }
    }
    if (j.contains("fusions")) {
      for (const auto& f : j["fusions"]) {
        net.fusions.push_back(Fusion{f.at("submodule").get<std::string>(), f.at("outer").get<std::string>(),
                                     f.at("inner").get<std::string>()});
      }
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed net: ") + e.what());
  }
}

inline Net load_net(const std::string& path) { return net_from_json(read_json_file(path)); }

}  // namespace threatflow

#endif  // THREATFLOW_NET_IO_HPP_
