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

#ifndef THREATFLOW_TESTS_HIER_ORACLE_HPP_
#define THREATFLOW_TESTS_HIER_ORACLE_HPP_

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "threatflow/threatflow.hpp"

namespace oracle {

using namespace threatflow;

/**
 * Executes a hierarchical net module by module, without flattening. Each
 * module fires on a view holding its own places plus the outer places its
 * ports are fused to; the change is written back through the fusion chain.
 * Storage is named the way a flat net would name it so that reachable sets
 * can be compared directly.
 */
class HierarchicalRunner {
 public:
  explicit HierarchicalRunner(const Net& root) { add(root, "", -1); }

  Marking initial() const {
    Marking m;
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      for (const auto& [place, bag] : modules_[i].net->initial.places()) {
        for (const auto& [tok, n] : bag) m.add(resolve(i, place), tok, n);
      }
    }
    return m;
  }

  struct Move {
    std::size_t module;
    std::string transition;
    Binding binding;
  };

  std::vector<Move> enabled(const Marking& m, Tick clock) const {
    std::vector<Move> out;
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      const Marking v = view(i, m);
      for (const auto& t : modules_[i].net->transitions) {
        for (auto& b : oracle::enabled_bindings(*modules_[i].net, v, t.id, clock)) out.push_back({i, t.id, std::move(b)});
      }
    }
    return out;
  }

  Marking fire(const Marking& m, const Move& mv, Tick clock) const {
    const Marking before = view(mv.module, m);
    const Marking after = oracle::expected_after(*modules_[mv.module].net, before, mv.transition, mv.binding, clock);
    Marking out = m;
    for (const auto& p : modules_[mv.module].net->places) {
      const std::string where = resolve(mv.module, p.id);
      for (const auto& [tok, n] : before.bag(p.id)) out.remove(where, tok, n);
      for (const auto& [tok, n] : after.bag(p.id)) out.add(where, tok, n);
    }
    return out;
  }

  /// Reachable (marking, clock) keys under the engine's time rule: fire
  /// what is enabled now, else jump to the earliest instant that enables
  /// something. Returns false when the node limit is hit.
  bool reachable(std::set<std::string>& seen, std::size_t limit) const {
    std::deque<std::pair<Marking, Tick>> queue;
    const Marking m0 = initial();
    seen.insert(node_key(m0, 0));
    queue.emplace_back(m0, 0);
    while (!queue.empty()) {
      auto [m, clock] = queue.front();
      queue.pop_front();
      auto moves = enabled(m, clock);
      if (moves.empty()) {
        std::set<Tick> times;
        for (const auto& [p, bag] : m.places()) {
          for (const auto& [tok, n] : bag) {
            if (tok.time > clock) times.insert(tok.time);
          }
        }
        for (Tick t : times) {
          moves = enabled(m, t);
          if (!moves.empty()) {
            clock = t;
            break;
          }
        }
      }
      for (const auto& mv : moves) {
        Marking next = fire(m, mv, clock);
        if (seen.insert(node_key(next, clock)).second) {
          if (seen.size() > limit) return false;
          queue.emplace_back(std::move(next), clock);
        }
      }
    }
    return true;
  }

 private:
  struct Module {
    const Net* net;
    std::string prefix;
    int parent;
    std::map<std::string, std::string> ports;  // inner place -> place in parent
  };

  void add(const Net& net, const std::string& prefix, int parent,
           std::map<std::string, std::string> ports = {}) {
    const std::size_t me = modules_.size();
    modules_.push_back({&net, prefix, parent, std::move(ports)});
    for (const auto& sub : net.submodules) {
      std::map<std::string, std::string> sp;
      for (const auto& f : net.fusions) {
        if (f.submodule == sub.name) sp[f.inner] = f.outer;
      }
      add(*sub.net, prefix + sub.name + "/", static_cast<int>(me), std::move(sp));
    }
  }

  std::string resolve(std::size_t module, const std::string& place) const {
    const Module& m = modules_[module];
    auto it = m.ports.find(place);
    if (it != m.ports.end()) return resolve(static_cast<std::size_t>(m.parent), it->second);
    return m.prefix + place;
  }

  Marking view(std::size_t module, const Marking& m) const {
    Marking v;
    for (const auto& p : modules_[module].net->places) {
      for (const auto& [tok, n] : m.bag(resolve(module, p.id))) v.add(p.id, tok, n);
    }
    return v;
  }

  std::vector<Module> modules_;
};

/// Reachable keys of the flattened net, via the production explorer.
inline std::set<std::string> flat_reachable(const Net& net, std::size_t limit, bool& complete) {
  Bounds b;
  b.max_nodes = limit;
  b.max_depth = 100000;
  b.max_tokens_per_place = 1000;
  const auto g = explore(net, b);
  complete = !g.truncated;
  std::set<std::string> out;
  for (const auto& n : g.nodes) out.insert(node_key(n.marking, n.clock));
  return out;
}

}  // namespace oracle

#endif  // THREATFLOW_TESTS_HIER_ORACLE_HPP_
