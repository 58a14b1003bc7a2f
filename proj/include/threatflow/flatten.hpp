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

#ifndef THREATFLOW_FLATTEN_HPP_
#define THREATFLOW_FLATTEN_HPP_

#include <map>
#include <string>

#include "threatflow/net.hpp"

namespace threatflow {

namespace detail {

inline Net flatten_rec(const Net& net) {
  Net out;
  out.name = net.name;
  out.places = net.places;
  out.transitions = net.transitions;
  out.inputs = net.inputs;
  out.outputs = net.outputs;
  out.initial = net.initial;

  for (const auto& sub : net.submodules) {
    const Net inner = flatten_rec(*sub.net);
    const std::string prefix = sub.name + "/";
    std::map<std::string, std::string> fused;
    for (const auto& f : net.fusions) {
      if (f.submodule == sub.name) fused[f.inner] = f.outer;
    }
    auto rn = [&](const std::string& id) {
      auto it = fused.find(id);
      return it == fused.end() ? prefix + id : it->second;
    };

    for (const auto& p : inner.places) {
      if (fused.count(p.id)) continue;
      out.places.push_back(Place{prefix + p.id, prefix + p.name, p.colors, p.layer});
    }
    for (const auto& t : inner.transitions) {
      out.transitions.push_back(Transition{prefix + t.id, prefix + t.name, rename_places(t.guard, rn), t.delay});
    }
    for (auto a : inner.inputs) {
      a.place = rn(a.place);
      a.transition = prefix + a.transition;
      out.inputs.push_back(std::move(a));
    }
    for (auto a : inner.outputs) {
      a.place = rn(a.place);
      a.transition = prefix + a.transition;
      a.expr = rename_places(std::move(a.expr), rn);
      if (a.when) a.when = rename_places(std::move(*a.when), rn);
      out.outputs.push_back(std::move(a));
    }
    for (const auto& [place, bag] : inner.initial.places()) {
      for (const auto& [tok, n] : bag) out.initial.add(rn(place), tok, n);
    }
  }
  return out;
}

}  // namespace detail

/**
 * Flattens a hierarchical net. Submodule places and transitions are renamed
 * `<submodule>/<id>`; a fused inner place is replaced by its outer place.
 * Initial tokens of fused places are merged into the outer place.
 */
inline Net flatten(const Net& net) {
  const auto defects = validate_net(net);
  if (!defects.empty()) {
    std::string msg = "cannot flatten invalid net:";
    for (const auto& d : defects) msg += " " + d.str();
    throw InvalidNet(msg);
  }
  return detail::flatten_rec(net);
}

}  // namespace threatflow

#endif  // THREATFLOW_FLATTEN_HPP_
