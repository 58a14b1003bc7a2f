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

#ifndef THREATFLOW_NET_HPP_
#define THREATFLOW_NET_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "threatflow/expr.hpp"
#include "threatflow/marking.hpp"
#include "threatflow/value.hpp"

namespace threatflow {

struct Place {
  std::string id;
  std::string name;
  ColorSet colors;
  std::optional<std::string> layer;  // control, infrastructure, storage, threat

  friend bool operator==(const Place&, const Place&) = default;
};

struct Transition {
  std::string id;
  std::string name;
  Expr guard = ex::truth();
  Tick delay = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// place -> transition. A read arc tests its tokens without consuming them.
struct InputArc {
  std::string place;
  std::string transition;
  Pattern pattern;
  int weight = 1;
  bool read = false;

  friend bool operator==(const InputArc&, const InputArc&) = default;
};

/// transition -> place. Skipped when `when` evaluates false.
struct OutputArc {
  std::string transition;
  std::string place;
  Expr expr;
  int weight = 1;
  std::optional<Expr> when;

  friend bool operator==(const OutputArc&, const OutputArc&) = default;
};

struct Net;

struct Submodule {
  std::string name;
  std::shared_ptr<const Net> net;
};

/// Port-place fusion: `outer` in this net is glued to `inner` in submodule.
struct Fusion {
  std::string submodule;
  std::string outer;
  std::string inner;

  friend bool operator==(const Fusion&, const Fusion&) = default;
};

struct Net {
  std::string name;
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<InputArc> inputs;
  std::vector<OutputArc> outputs;
  Marking initial;
  std::vector<Submodule> submodules;
  std::vector<Fusion> fusions;

  const Place* find_place(const std::string& id) const {
    for (const auto& p : places) {
      if (p.id == id) return &p;
    }
    return nullptr;
  }

  const Transition* find_transition(const std::string& id) const {
    for (const auto& t : transitions) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }

  const Submodule* find_submodule(const std::string& name) const {
    for (const auto& s : submodules) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  Place& add_place(std::string id, ColorSet colors, std::optional<std::string> layer = std::nullopt) {
    places.push_back(Place{id, id, std::move(colors), std::move(layer)});
    return places.back();
  }

  Transition& add_transition(std::string id, Expr guard = ex::truth(), Tick delay = 0) {
    transitions.push_back(Transition{id, id, std::move(guard), delay});
    return transitions.back();
  }

  void arc_in(std::string place, std::string transition, Pattern p, int weight = 1) {
    inputs.push_back(InputArc{std::move(place), std::move(transition), std::move(p), weight, false});
  }

  void arc_read(std::string place, std::string transition, Pattern p) {
    inputs.push_back(InputArc{std::move(place), std::move(transition), std::move(p), 1, true});
  }

  void arc_out(std::string transition, std::string place, Expr e, int weight = 1,
               std::optional<Expr> when = std::nullopt) {
    outputs.push_back(OutputArc{std::move(transition), std::move(place), std::move(e), weight, std::move(when)});
  }

  friend bool operator==(const Net& a, const Net& b) {
    if (!(a.name == b.name && a.places == b.places && a.transitions == b.transitions &&
          a.inputs == b.inputs && a.outputs == b.outputs && a.initial == b.initial &&
          a.fusions == b.fusions && a.submodules.size() == b.submodules.size())) {
      return false;
    }
    for (std::size_t i = 0; i < a.submodules.size(); ++i) {
      if (a.submodules[i].name != b.submodules[i].name || !(*a.submodules[i].net == *b.submodules[i].net)) {
        return false;
      }
    }
    return true;
  }
};

struct NetDefect {
  enum class Kind {
    DanglingArc, UnboundVariable, FusionTypeMismatch, DanglingFusion, DuplicateId,
    UnknownPlaceRef, RepeatedVariable, IllTypedToken, BadWeight
  };

  Kind kind;
  std::string subject;  // variable, arc or place the defect is about
  std::string where;    // transition or submodule path

  std::string str() const {
    static constexpr const char* kNames[] = {
        "DanglingArc", "UnboundVariable", "FusionTypeMismatch", "DanglingFusion", "DuplicateId",
        "UnknownPlaceRef", "RepeatedVariable", "IllTypedToken", "BadWeight"};
    std::string s = kNames[static_cast<int>(kind)];
    s += "(\"" + subject + "\")";
    if (!where.empty()) s += " at " + where;
    return s;
  }

  friend bool operator==(const NetDefect&, const NetDefect&) = default;
};

namespace detail {

inline void validate_into(const Net& net, const std::string& prefix, std::vector<NetDefect>& out) {
  using K = NetDefect::Kind;
  auto at = [&](const std::string& s) { return prefix + s; };

  std::set<std::string> ids;
  for (const auto& p : net.places) {
    if (!ids.insert(p.id).second) out.push_back({K::DuplicateId, p.id, at(p.id)});
  }
  std::set<std::string> tids;
  for (const auto& t : net.transitions) {
    if (!tids.insert(t.id).second) out.push_back({K::DuplicateId, t.id, at(t.id)});
  }

  std::map<std::string, std::set<std::string>> bound;
  for (const auto& a : net.inputs) {
    const std::string label = a.place + "->" + a.transition;
    if (!net.find_place(a.place) || !net.find_transition(a.transition)) {
      out.push_back({K::DanglingArc, label, at(a.transition)});
      continue;
    }
    if (a.weight < 1) out.push_back({K::BadWeight, label, at(a.transition)});
    std::vector<std::string> vars;
    a.pattern.variables(vars);
    std::set<std::string> seen;
    for (const auto& v : vars) {
      if (!seen.insert(v).second) out.push_back({K::RepeatedVariable, v, at(a.transition)});
      bound[a.transition].insert(v);
    }
  }

  auto check_expr = [&](const Expr& e, const std::string& tid) {
    std::set<std::string> fv;
    free_vars(e, fv);
    for (const auto& v : fv) {
      if (!bound[tid].count(v)) out.push_back({K::UnboundVariable, v, at(tid)});
    }
    std::set<std::string> refs;
    referenced_places(e, refs);
    for (const auto& r : refs) {
      if (!net.find_place(r)) out.push_back({K::UnknownPlaceRef, r, at(tid)});
    }
  };

  for (const auto& t : net.transitions) check_expr(t.guard, t.id);
  for (const auto& a : net.outputs) {
    if (!net.find_place(a.place) || !net.find_transition(a.transition)) {
      out.push_back({K::DanglingArc, a.transition + "->" + a.place, at(a.transition)});
      continue;
    }
    if (a.weight < 1) out.push_back({K::BadWeight, a.transition + "->" + a.place, at(a.transition)});
    check_expr(a.expr, a.transition);
    if (a.when) check_expr(*a.when, a.transition);
  }

  for (const auto& [place, bag] : net.initial.places()) {
    const Place* p = net.find_place(place);
    if (!p) {
      out.push_back({K::DanglingArc, place, at("initial_marking")});
      continue;
    }
    for (const auto& [tok, n] : bag) {
      if (!p->colors.contains(tok.value)) out.push_back({K::IllTypedToken, tok.value.str(), at(place)});
    }
  }

  std::set<std::string> subs;
  for (const auto& s : net.submodules) {
    if (!subs.insert(s.name).second) out.push_back({K::DuplicateId, s.name, at(s.name)});
    if (ids.count(s.name) || tids.count(s.name)) out.push_back({K::DuplicateId, s.name, at(s.name)});
  }
  for (const auto& f : net.fusions) {
    const std::string label = f.outer + "=" + f.submodule + "/" + f.inner;
    const Submodule* sub = net.find_submodule(f.submodule);
    const Place* outer = net.find_place(f.outer);
    const Place* inner = sub ? sub->net->find_place(f.inner) : nullptr;
    if (!outer || !inner) {
      out.push_back({K::DanglingFusion, label, at(f.submodule)});
      continue;
    }
    if (!(outer->colors == inner->colors)) out.push_back({K::FusionTypeMismatch, label, at(f.submodule)});
  }
  for (const auto& s : net.submodules) validate_into(*s.net, prefix + s.name + "/", out);
}

}  // namespace detail

/// All structural defects of a net and its submodules; empty iff well formed.
inline std::vector<NetDefect> validate_net(const Net& net) {
  std::vector<NetDefect> out;
  detail::validate_into(net, "", out);
  return out;
}

}  // namespace threatflow

#endif  // THREATFLOW_NET_HPP_
