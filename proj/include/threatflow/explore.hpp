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

#ifndef THREATFLOW_EXPLORE_HPP_
#define THREATFLOW_EXPLORE_HPP_

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "threatflow/engine.hpp"

namespace threatflow {

struct Bounds {
  int max_depth = 256;
  std::size_t max_nodes = 50000;
  int max_tokens_per_place = 64;
  int workers = 1;

  void validate() const {
    if (max_depth <= 0 || max_nodes == 0 || max_tokens_per_place <= 0 || workers <= 0) {
      throw InvalidConfig("exploration bounds must be positive");
    }
  }
};

inline Json to_json(const Bounds& b) {
  return {{"max_depth", b.max_depth}, {"max_nodes", b.max_nodes}, {"max_tokens_per_place", b.max_tokens_per_place},
          {"workers", b.workers}};
}

inline Bounds bounds_from_json(const Json& j, Bounds b = {}) {
  b.max_depth = j.value("max_depth", b.max_depth);
  b.max_nodes = j.value("max_nodes", b.max_nodes);
  b.max_tokens_per_place = j.value("max_tokens_per_place", b.max_tokens_per_place);
  b.workers = j.value("workers", b.workers);
  b.validate();
  return b;
}

struct GraphNode {
  Marking marking;
  Tick clock = 0;
  int depth = 0;
  bool dead = false;      // nothing can ever fire
  bool expanded = false;  // successors were added (false at a bound)
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string transition;
  Binding binding;
  Tick clock = 0;  // firing instant
};

/// Markings reachable from the root; node 0 is the root.
struct ReachabilityGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::vector<std::size_t>> out;  // edge indices per node
  bool truncated = false;

  std::vector<std::size_t> dead_nodes() const {
    std::vector<std::size_t> d;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].dead) d.push_back(i);
    }
    return d;
  }
};

inline std::string node_key(const Marking& m, Tick clock) {
  std::string k;
  m.write(k);
  k += '#';
  k += std::to_string(clock);
  return k;
}

namespace detail {

struct Successor {
  std::string transition;
  Binding binding;
  Marking marking;
  Tick clock;
};

inline std::vector<Successor> successors(const Engine& e, const Marking& m, Tick clock) {
  auto options = e.enabled_all(m, clock);
  if (options.empty()) {
    auto next = e.next_instant(m, clock);
    if (!next) return {};
    clock = *next;
    options = e.enabled_all(m, clock);
  }
  std::vector<Successor> out;
  out.reserve(options.size());
  for (auto& f : options) {
    Marking after = e.fire_unchecked(m, f.transition, f.binding, clock);
    out.push_back({std::move(f.transition), std::move(f.binding), std::move(after), clock});
  }
  return out;
}

inline bool within_token_bound(const Marking& m, int bound) {
  for (const auto& [p, bag] : m.places()) {
    if (m.size(p) > bound) return false;
  }
  return true;
}

}  // namespace detail

/**
 * Level-synchronous breadth-first exploration with marking deduplication.
 * Successor computation for a level may be spread over `bounds.workers`
 * threads; results are merged in frontier order, so the graph does not depend
 * on the worker count.
 */
inline ReachabilityGraph explore(const Engine& engine, const Marking& root, const Bounds& bounds, Tick clock = 0) {
  bounds.validate();
  ReachabilityGraph g;
  std::unordered_map<std::string, std::size_t> index;
  g.nodes.push_back(GraphNode{root, clock, 0, false, false});
  g.out.emplace_back();
  index.emplace(node_key(root, clock), 0);

  std::vector<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<std::vector<detail::Successor>> next_of(frontier.size());
    auto work = [&](std::size_t begin, std::size_t step, std::exception_ptr& err) {
      try {
        for (std::size_t i = begin; i < frontier.size(); i += step) {
          const GraphNode& n = g.nodes[frontier[i]];
          next_of[i] = detail::successors(engine, n.marking, n.clock);
        }
      } catch (...) {
        err = std::current_exception();
      }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(bounds.workers), frontier.size());
    std::vector<std::exception_ptr> errors(workers);
    if (workers <= 1) {
      work(0, 1, errors[0]);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers, std::ref(errors[w]));
      for (auto& t : pool) t.join();
    }
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const std::size_t from = frontier[i];
      auto& succ = next_of[i];
      if (succ.empty()) {
        g.nodes[from].dead = true;
        g.nodes[from].expanded = true;
        continue;
      }
      if (g.nodes[from].depth >= bounds.max_depth) {
        g.truncated = true;
        continue;
      }
      g.nodes[from].expanded = true;
      for (auto& s : succ) {
        if (!detail::within_token_bound(s.marking, bounds.max_tokens_per_place)) {
          g.truncated = true;
          continue;
        }
        std::string key = node_key(s.marking, s.clock);
        auto it = index.find(key);
        std::size_t to;
        if (it != index.end()) {
          to = it->second;
        } else {
          if (g.nodes.size() >= bounds.max_nodes) {
            g.truncated = true;
            continue;
          }
          to = g.nodes.size();
          g.nodes.push_back(GraphNode{std::move(s.marking), s.clock, g.nodes[from].depth + 1, false, false});
          g.out.emplace_back();
          index.emplace(std::move(key), to);
          next.push_back(to);
        }
        g.out[from].push_back(g.edges.size());
        g.edges.push_back(GraphEdge{from, to, std::move(s.transition), std::move(s.binding), s.clock});
      }
    }
    frontier = std::move(next);
  }
  return g;
}

inline ReachabilityGraph explore(const Net& net, const Bounds& bounds) {
  const Engine e(net);
  return explore(e, e.net().initial, bounds);
}

/// Re-fires every edge and compares the result with its target node.
inline bool verify_graph(const Engine& e, const ReachabilityGraph& g) {
  for (const auto& edge : g.edges) {
    const GraphNode& from = g.nodes[edge.from];
    const GraphNode& to = g.nodes[edge.to];
    if (to.clock != edge.clock) return false;
    if (!(e.fire(from.marking, edge.transition, edge.binding, edge.clock) == to.marking)) return false;
  }
  return true;
}

// --------------------------------------------------------------------------
// Traces.

struct TraceStep {
  Tick clock = 0;
  std::string transition;
  std::string binding;  // digest

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
  Marking initial;
  std::vector<TraceStep> steps;
  Marking final_marking;
  Tick final_clock = 0;
};

inline Json to_json(const Trace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back({{"clock", s.clock}, {"transition", s.transition}, {"binding", s.binding}});
  return {{"steps", steps}, {"final_clock", t.final_clock}, {"final_marking", to_json(t.final_marking)}};
}

/// Steps until the marking is dead or max_steps have fired.
inline Trace simulate(const Engine& e, const Marking& m, std::uint64_t seed, std::size_t max_steps, Tick clock = 0) {
  std::mt19937_64 rng(seed);
  Trace t;
  t.initial = m;
  t.final_marking = m;
  t.final_clock = clock;
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto r = e.step(t.final_marking, t.final_clock, rng);
    if (!r) break;
    t.steps.push_back({r->clock, r->transition, r->binding.digest()});
    t.final_marking = std::move(r->marking);
    t.final_clock = r->clock;
  }
  return t;
}

/// Re-fires a trace from `m`; throws NotEnabled when a step does not apply.
inline Marking replay(const Engine& e, Marking m, const std::vector<TraceStep>& steps) {
  for (const auto& s : steps) {
    bool fired = false;
    for (const auto& b : e.enabled(m, s.transition, s.clock)) {
      if (b.digest() == s.binding) {
        m = e.fire_unchecked(m, s.transition, b, s.clock);
        fired = true;
        break;
      }
    }
    if (!fired) throw NotEnabled("trace step " + s.transition + "@" + std::to_string(s.clock) + " does not apply");
  }
  return m;
}

/// Steps along a list of graph edges.
inline std::vector<TraceStep> steps_of(const ReachabilityGraph& g, const std::vector<std::size_t>& edges) {
  std::vector<TraceStep> out;
  for (std::size_t ei : edges) {
    const auto& e = g.edges[ei];
    out.push_back({e.clock, e.transition, e.binding.digest()});
  }
  return out;
}

/// Shortest edge path (BFS tree) from the root to `target`.
inline std::vector<std::size_t> path_to(const ReachabilityGraph& g, std::size_t target) {
  std::vector<std::size_t> parent(g.nodes.size(), SIZE_MAX);
  std::vector<bool> seen(g.nodes.size(), false);
  std::vector<std::size_t> queue{0};
  seen[0] = true;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t n = queue[qi];
    if (n == target) break;
    for (std::size_t ei : g.out[n]) {
      const std::size_t to = g.edges[ei].to;
      if (!seen[to]) {
        seen[to] = true;
        parent[to] = ei;
        queue.push_back(to);
      }
    }
  }
  std::vector<std::size_t> path;
  for (std::size_t n = target; n != 0 && parent[n] != SIZE_MAX; n = g.edges[parent[n]].from) path.push_back(parent[n]);
  std::reverse(path.begin(), path.end());
  return path;
}

/// Every simple path from the root to a dead node, as edge lists.
inline std::vector<std::vector<std::size_t>> maximal_paths(const ReachabilityGraph& g, std::size_t limit = 100000) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  std::vector<bool> on(g.nodes.size(), false);
  std::function<void(std::size_t)> dfs = [&](std::size_t n) {
    if (out.size() >= limit) return;
    if (g.nodes[n].dead) {
      out.push_back(stack);
      return;
    }
    on[n] = true;
    for (std::size_t ei : g.out[n]) {
      const std::size_t to = g.edges[ei].to;
      if (on[to]) continue;
      stack.push_back(ei);
      dfs(to);
      stack.pop_back();
    }
    on[n] = false;
  };
  if (!g.nodes.empty()) dfs(0);
  return out;
}

/// Nodes lying on a cycle (non-trivial strongly connected component or self loop).
inline std::vector<bool> cyclic_nodes(const ReachabilityGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false), cyclic(n, false);
  std::vector<std::size_t> stack;
  int counter = 0;
  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  for (std::size_t s = 0; s < n; ++s) {
    if (index[s] != -1) continue;
    std::vector<Frame> call{{s, 0}};
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next_edge < g.out[f.node].size()) {
        const auto& e = g.edges[g.out[f.node][f.next_edge++]];
        if (e.to == f.node) cyclic[f.node] = true;
        if (index[e.to] == -1) {
          index[e.to] = low[e.to] = counter++;
          stack.push_back(e.to);
          on_stack[e.to] = true;
          call.push_back({e.to, 0});
        } else if (on_stack[e.to]) {
          low[f.node] = std::min(low[f.node], index[e.to]);
        }
        continue;
      }
      const std::size_t v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        if (comp.size() > 1) {
          for (auto c : comp) cyclic[c] = true;
        }
      }
    }
  }
  return cyclic;
}

}  // namespace threatflow

#endif  // THREATFLOW_EXPLORE_HPP_
