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

#ifndef THREATFLOW_PATHS_HPP_
#define THREATFLOW_PATHS_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "threatflow/explore.hpp"
#include "threatflow/threat.hpp"

namespace threatflow {

// --------------------------------------------------------------------------
// Transition-system paths.

/// Maximal runs of a one-token net as "Start -s-> A -c-> Final", using the
/// transition names as arc labels.
inline std::vector<std::string> transition_system_paths(const Net& net, const Bounds& bounds = {}) {
  Engine e(net);
  const auto g = explore(e, e.net().initial, bounds);
  auto where = [](const Marking& m) {
    std::string s;
    for (const auto& [p, bag] : m.places()) s += (s.empty() ? "" : "+") + p;
    return s;
  };
  std::vector<std::string> out;
  for (const auto& path : maximal_paths(g)) {
    std::string s = where(g.nodes[0].marking);
    for (std::size_t ei : path) {
      const auto& edge = g.edges[ei];
      const Transition* t = e.net().find_transition(edge.transition);
      s += " -" + (t->name.empty() ? t->id : t->name) + "-> " + where(g.nodes[edge.to].marking);
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --------------------------------------------------------------------------
// Attack paths.

struct AttackStep {
  std::string threat;
  std::string service;
  std::string place;
  std::string label;
  std::string consequence;

  friend bool operator==(const AttackStep&, const AttackStep&) = default;
};

struct AttackPath {
  std::vector<AttackStep> steps;          // causal order
  std::vector<std::string> consequences;  // distinct, in step order
  std::vector<Violation> violated;        // highest priority first
  std::string entry;                      // label of the first step
  std::vector<TraceStep> witness;         // run of the analysed net ending with the last exploit
  std::vector<std::string> trail;         // transitions along the witness
  std::vector<std::string> scope;         // threats attached while searching
  bool loop = false;                      // witness visits a cyclic marking
  std::string key;                        // step labels joined by " > "

  std::vector<std::string> threats() const {
    std::vector<std::string> ids;
    for (const auto& s : steps) ids.push_back(s.threat);
    return ids;
  }

  int priority() const { return violated.empty() ? INT32_MAX : violated.front().requirement.priority; }
};

inline Json to_json(const AttackPath& p, bool with_witness = true) {
  Json steps = Json::array();
  for (const auto& s : p.steps) {
    steps.push_back({{"threat", s.threat}, {"service", s.service}, {"place", s.place}, {"label", s.label},
                     {"consequence", s.consequence}});
  }
  Json violated = Json::array();
  for (const auto& v : p.violated) violated.push_back(to_json(v));
  Json j = {{"key", p.key},           {"entry", p.entry},         {"steps", steps},
            {"consequences", p.consequences}, {"violated", violated}, {"loop", p.loop}};
  if (with_witness) {
    Json w = Json::array();
    for (const auto& s : p.witness) w.push_back({{"clock", s.clock}, {"transition", s.transition}, {"binding", s.binding}});
    j["witness"] = w;
    j["scope"] = p.scope;
  }
  return j;
}

/// Priority of the most important violated requirement, then length, then key.
inline void sort_paths(std::vector<AttackPath>& paths) {
  std::sort(paths.begin(), paths.end(), [](const AttackPath& a, const AttackPath& b) {
    if (a.priority() != b.priority()) return a.priority() < b.priority();
    if (a.steps.size() != b.steps.size()) return a.steps.size() < b.steps.size();
    return a.key < b.key;
  });
}

/// Threat -> threats its exploit depended on.
using ProvDag = std::map<std::string, std::set<std::string>>;

namespace detail {

inline void merge_into(ProvDag& into, const ProvDag& from) {
  for (const auto& [t, deps] : from) into[t].insert(deps.begin(), deps.end());
}

/// Topological order, smallest id first among ready threats.
inline std::vector<std::string> linearize(const ProvDag& dag) {
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> users;
  for (const auto& [t, deps] : dag) {
    indegree.try_emplace(t, 0);
    for (const auto& d : deps) {
      if (!dag.count(d) || d == t) continue;
      ++indegree[t];
      users[d].push_back(t);
    }
  }
  std::set<std::string> ready;
  for (const auto& [t, n] : indegree) {
    if (n == 0) ready.insert(t);
  }
  std::vector<std::string> out;
  while (!ready.empty()) {
    const std::string t = *ready.begin();
    ready.erase(ready.begin());
    out.push_back(t);
    for (const auto& u : users[t]) {
      if (--indegree[u] == 0) ready.insert(u);
    }
  }
  return out;
}

inline std::string dag_key(const ProvDag& d) {
  std::string s;
  for (const auto& [t, deps] : d) {
    s += t;
    s += '<';
    for (const auto& x : deps) {
      s += x;
      s += ',';
    }
    s += ';';
  }
  return s;
}

/**
 * Depth-first search over (graph node, token provenance). Every token of the
 * current marking carries the set of exploits it descends from; tokens made
 * by benign transitions out of untainted inputs stay untainted and are not
 * stored. Identical tokens with different provenance are distinguished by
 * branching over which copy a firing takes.
 */
class ProvenanceSearch {
 public:
  using Slot = std::pair<std::string, TimedToken>;
  using Taint = std::map<Slot, std::map<int, int>>;  // (place, token) -> prov id -> copies

  ProvenanceSearch(const Engine& engine, const ReachabilityGraph& graph,
                   const std::map<std::string, const ThreatDefinition*>& threats,
                   const std::vector<SecurityRequirement>& reqs, const std::set<std::string>& goals)
      : engine_(engine), graph_(graph), threats_(threats), reqs_(reqs), goals_(goals),
        cyclic_(cyclic_nodes(graph)) {
    dags_.emplace_back();
    dag_ids_.emplace("", 0);
  }

  std::map<std::string, AttackPath> run() {
    if (!graph_.nodes.empty()) visit(0, Taint{});
    return std::move(found_);
  }

 private:
  int intern(ProvDag d) {
    std::string k = dag_key(d);
    auto it = dag_ids_.find(k);
    if (it != dag_ids_.end()) return it->second;
    const int id = static_cast<int>(dags_.size());
    dags_.push_back(std::move(d));
    dag_ids_.emplace(std::move(k), id);
    return id;
  }

  static std::string state_key(std::size_t node, const Taint& t) {
    std::string s = std::to_string(node);
    s += '|';
    for (const auto& [slot, provs] : t) {
      s += slot.first;
      s += ':';
      slot.second.value.write(s);
      s += '@';
      s += std::to_string(slot.second.time);
      for (const auto& [id, n] : provs) {
        s += '#';
        s += std::to_string(id);
        s += 'x';
        s += std::to_string(n);
      }
      s += ';';
    }
    return s;
  }

  struct Choice {
    Taint taint;
    ProvDag dag;
  };

  /// Ways of attributing the consumed and read tokens of one firing. \`used\`
  /// counts copies already taken by earlier arcs, per provenance (-1: none).
  void attribute(const Marking& m, const std::vector<const InputArc*>& arcs, const Binding& b, std::size_t arc,
                 std::size_t tok, const Taint& taint, std::map<std::pair<Slot, int>, int>& used,
                 std::vector<std::pair<Slot, int>>& taken, ProvDag& dag, std::vector<Choice>& out) {
    if (arc == arcs.size()) {
      Taint next = taint;
      for (const auto& [slot, id] : taken) {
        auto& bag = next[slot];
        if (--bag[id] == 0) bag.erase(id);
        if (bag.empty()) next.erase(slot);
      }
      out.push_back({std::move(next), dag});
      return;
    }
    if (tok == b.consumed[arc].size()) {
      attribute(m, arcs, b, arc + 1, 0, taint, used, taken, dag, out);
      return;
    }
    const InputArc& a = *arcs[arc];
    const Slot slot{a.place, b.consumed[arc][tok]};
    std::map<int, int> provs;
    if (auto it = taint.find(slot); it != taint.end()) provs = it->second;
    int tainted = 0;
    for (const auto& [id, n] : provs) tainted += n;
    provs[-1] = m.count(slot.first, slot.second) - tainted;
    for (const auto& [id, n] : provs) {
      if (n - used[{slot, id}] <= 0) continue;
      ++used[{slot, id}];
      const bool remove = !a.read && id >= 0;
      if (remove) taken.emplace_back(slot, id);
      ProvDag d = dag;
      if (id >= 0) merge_into(d, dags_[static_cast<std::size_t>(id)]);
      attribute(m, arcs, b, arc, tok + 1, taint, used, taken, d, out);
      if (remove) taken.pop_back();
      --used[{slot, id}];
    }
  }

  void visit(std::size_t node, const Taint& taint) {
    if (!seen_.insert(state_key(node, taint)).second) return;
    const GraphNode& n = graph_.nodes[node];
    for (std::size_t ei : graph_.out[node]) {
      const GraphEdge& e = graph_.edges[ei];
      const auto& arcs = engine_.input_arcs(e.transition);
      std::vector<Choice> choices;
      std::map<std::pair<Slot, int>, int> used;
      std::vector<std::pair<Slot, int>> taken;
      ProvDag dag;
      attribute(n.marking, arcs, e.binding, 0, 0, taint, used, taken, dag, choices);

      const std::string owner = threat_of(e.transition);
      const bool exploit = !owner.empty() && e.transition == threat_transition(owner, "Exploit_S");
      const auto produced = engine_.produce(n.marking, e.transition, e.binding, e.clock);
      for (auto& c : choices) {
        if (exploit) {
          std::set<std::string> deps;
          for (const auto& [t, _] : c.dag) deps.insert(t);
          c.dag[owner].insert(deps.begin(), deps.end());
        }
        if (!c.dag.empty()) {
          const int id = intern(c.dag);
          for (const auto& [place, tok] : produced) ++c.taint[{place, tok}][id];
        }
        path_.push_back(ei);
        if (exploit && goals_.count(owner)) emit(c.dag);
        visit(e.to, c.taint);
        path_.pop_back();
      }
    }
  }

  void emit(const ProvDag& dag) {
    AttackPath p;
    std::vector<Achieved> achieved_by;
    for (const auto& id : linearize(dag)) {
      auto it = threats_.find(id);
      if (it == threats_.end()) continue;
      const ThreatDefinition& t = *it->second;
      p.steps.push_back({t.id, t.service, t.target_place, t.label(), t.consequence});
      achieved_by.push_back(achieved(t));
      if (std::find(p.consequences.begin(), p.consequences.end(), t.consequence) == p.consequences.end()) {
        p.consequences.push_back(t.consequence);
      }
    }
    if (p.steps.empty()) return;
    p.violated = violated_requirements(achieved_by, reqs_);
    if (p.violated.empty()) return;
    for (std::size_t i = 0; i < p.steps.size(); ++i) p.key += (i ? " > " : "") + p.steps[i].label;
    if (found_.count(p.key)) return;
    p.entry = p.steps.front().label;
    p.witness = steps_of(graph_, path_);
    for (std::size_t ei : path_) {
      p.trail.push_back(graph_.edges[ei].transition);
      p.loop = p.loop || cyclic_[graph_.edges[ei].from];
    }
    found_.emplace(p.key, std::move(p));
  }

  const Engine& engine_;
  const ReachabilityGraph& graph_;
  const std::map<std::string, const ThreatDefinition*>& threats_;
  const std::vector<SecurityRequirement>& reqs_;
  const std::set<std::string>& goals_;
  std::vector<bool> cyclic_;
  std::vector<ProvDag> dags_;
  std::map<std::string, int> dag_ids_;
  std::unordered_set<std::string> seen_;
  std::vector<std::size_t> path_;
  std::map<std::string, AttackPath> found_;
};

}  // namespace detail

/**
 * Attack paths in the reachability graph of a threat-attached net: one per
 * distinct causal chain of exploits that ends in a successful exploit of a
 * goal threat (every threat when `goals` is null) and whose consequences
 * violate at least one requirement.
 */
inline std::vector<AttackPath> enumerate_attack_paths(const Engine& engine, const ReachabilityGraph& graph,
                                                      const std::vector<ThreatDefinition>& threats,
                                                      const std::vector<SecurityRequirement>& reqs,
                                                      const std::set<std::string>* goals = nullptr) {
  std::map<std::string, const ThreatDefinition*> index;
  std::set<std::string> all;
  for (const auto& t : threats) {
    index.emplace(t.id, &t);
    all.insert(t.id);
  }
  detail::ProvenanceSearch search(engine, graph, index, reqs, goals ? *goals : all);
  std::vector<AttackPath> out;
  for (auto& [k, p] : search.run()) {
    for (const auto& t : threats) p.scope.push_back(t.id);
    std::sort(p.scope.begin(), p.scope.end());
    out.push_back(std::move(p));
  }
  sort_paths(out);
  return out;
}

// --------------------------------------------------------------------------
// Cone of influence.

/// Cloud places whose tokens can flow into `targets` through cloud transitions.
inline std::set<std::string> upstream_places(const Net& cloud, std::set<std::string> targets) {
  std::vector<std::string> work(targets.begin(), targets.end());
  while (!work.empty()) {
    const std::string p = work.back();
    work.pop_back();
    for (const auto& o : cloud.outputs) {
      if (o.place != p) continue;
      for (const auto& i : cloud.inputs) {
        if (i.transition == o.transition && targets.insert(i.place).second) work.push_back(i.place);
      }
    }
  }
  return targets;
}

/**
 * Threats that can contribute to an exploit of `goal`: the goal, providers
 * of its required consequences, and threats whose link effects put tokens
 * into places upstream of its surface, closed transitively.
 */
inline std::set<std::string> cone_of(const Net& cloud, const std::vector<ThreatDefinition>& threats,
                                     const std::vector<LinkSpec>& links, const std::string& goal) {
  std::map<std::string, const ThreatDefinition*> index;
  for (const auto& t : threats) index.emplace(t.id, &t);
  std::map<std::string, std::set<std::string>> injects, tags;
  for (const auto& t : threats) tags[t.id].insert(consequence_token(t.consequence));
  for (const auto& l : links) {
    for (const auto& e : l.effects) {
      if (e.kind == LinkEffect::Kind::Inject) injects[l.threat].insert(e.place);
      if (e.kind == LinkEffect::Kind::Dos) injects[l.threat].insert(kDosPlace);
      if (e.kind == LinkEffect::Kind::Capability) tags[l.threat].insert(e.tag);
    }
  }
  std::set<std::string> cone;
  std::vector<std::string> work{goal};
  while (!work.empty()) {
    const std::string id = work.back();
    work.pop_back();
    auto it = index.find(id);
    if (it == index.end() || !cone.insert(id).second) continue;
    const ThreatDefinition& t = *it->second;
    std::set<std::string> surface;
    for (const auto& s : t.effective_surface()) surface.insert(s.place);
    if (t.guard) referenced_places(*t.guard, surface);
    const auto up = upstream_places(cloud, surface);
    std::set<std::string> need;
    for (const auto& r : t.requires_) need.insert(consequence_token(r));
    for (const auto& u : threats) {
      if (cone.count(u.id)) continue;
      bool feeds = false;
      for (const auto& p : injects[u.id]) feeds = feeds || up.count(p);
      for (const auto& g : tags[u.id]) feeds = feeds || need.count(g) || (up.count(kCapPlace) && !g.empty());
      if (feeds) work.push_back(u.id);
    }
  }
  return cone;
}

// --------------------------------------------------------------------------
// Analysis driver.

enum class Slicing { Cone, None };

inline const char* slicing_name(Slicing s) { return s == Slicing::Cone ? "cone" : "none"; }

inline Slicing slicing_from(const std::string& s) {
  if (s == "cone") return Slicing::Cone;
  if (s == "none") return Slicing::None;
  throw InvalidConfig("unknown slicing mode '" + s + "'");
}

struct GraphStats {
  std::size_t explorations = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t dead = 0;
  bool truncated = false;
};

inline Json to_json(const GraphStats& s) {
  return {{"explorations", s.explorations}, {"nodes", s.nodes}, {"edges", s.edges}, {"dead", s.dead},
          {"truncated", s.truncated}};
}

struct Centrality {
  std::string threat;
  std::size_t paths = 0;
  int rank = 0;

  friend bool operator==(const Centrality&, const Centrality&) = default;
};

/// Participation count per threat, ranked descending (ties share a rank).
inline std::vector<Centrality> centrality_report(const std::vector<AttackPath>& paths) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : paths) {
    std::set<std::string> ids;
    for (const auto& s : p.steps) ids.insert(s.threat);
    for (const auto& id : ids) ++counts[id];
  }
  std::vector<Centrality> out;
  for (const auto& [id, n] : counts) out.push_back({id, n, 0});
  std::stable_sort(out.begin(), out.end(), [](const Centrality& a, const Centrality& b) { return a.paths > b.paths; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].rank = (i > 0 && out[i].paths == out[i - 1].paths) ? out[i - 1].rank : static_cast<int>(i) + 1;
  }
  return out;
}

inline Json to_json(const Centrality& c) { return {{"threat", c.threat}, {"paths", c.paths}, {"rank", c.rank}}; }

struct AnalysisOptions {
  Bounds bounds;
  Slicing slicing = Slicing::Cone;
};

struct Analysis {
  std::vector<AttackPath> paths;
  std::vector<Centrality> centrality;
  GraphStats stats;
};

/// Subset of links whose threats are in `ids`.
inline std::vector<LinkSpec> links_within(const std::vector<LinkSpec>& links, const std::set<std::string>& ids) {
  std::vector<LinkSpec> out;
  for (const auto& l : links) {
    if (ids.count(l.threat)) out.push_back(l);
  }
  return out;
}

inline std::vector<ThreatDefinition> threats_within(const std::vector<ThreatDefinition>& threats,
                                                    const std::set<std::string>& ids) {
  std::vector<ThreatDefinition> out;
  for (const auto& t : threats) {
    if (ids.count(t.id)) out.push_back(t);
  }
  return out;
}

/**
 * attach -> explore -> enumerate. With cone slicing every goal threat is
 * analysed in the net holding only its cone, and goals with equal cones share
 * one exploration.
 */
inline Analysis analyze(const Net& cloud, const std::vector<ThreatDefinition>& threats,
                        const std::vector<LinkSpec>& links, const std::vector<SecurityRequirement>& reqs,
                        const AnalysisOptions& options) {
  options.bounds.validate();
  Analysis result;
  std::map<std::set<std::string>, std::set<std::string>> groups;  // cone -> goals
  if (options.slicing == Slicing::None) {
    std::set<std::string> all;
    for (const auto& t : threats) all.insert(t.id);
    if (!all.empty()) groups[all] = all;
  } else {
    for (const auto& t : threats) groups[cone_of(cloud, threats, links, t.id)].insert(t.id);
  }
  std::map<std::string, AttackPath> merged;
  for (const auto& [cone, goals] : groups) {
    const auto subset = threats_within(threats, cone);
    const Net net = attach(cloud, subset, links_within(links, cone));
    const Engine engine(net);
    const auto graph = explore(engine, engine.net().initial, options.bounds);
    ++result.stats.explorations;
    result.stats.nodes += graph.nodes.size();
    result.stats.edges += graph.edges.size();
    result.stats.dead += graph.dead_nodes().size();
    result.stats.truncated = result.stats.truncated || graph.truncated;
    for (auto& p : enumerate_attack_paths(engine, graph, subset, reqs, &goals)) merged.try_emplace(p.key, std::move(p));
  }
  for (auto& [k, p] : merged) result.paths.push_back(std::move(p));
  sort_paths(result.paths);
  result.centrality = centrality_report(result.paths);
  return result;
}

// --------------------------------------------------------------------------
// Diffs.

struct PathDiff {
  std::vector<AttackPath> removed;        // base only
  std::vector<AttackPath> surviving;      // both
  std::vector<AttackPath> newly_exposed;  // delta only

  bool empty() const { return removed.empty() && newly_exposed.empty(); }
};

inline PathDiff diff_paths(const std::vector<AttackPath>& base, const std::vector<AttackPath>& delta) {
  std::set<std::string> in_base, in_delta;
  for (const auto& p : base) in_base.insert(p.key);
  for (const auto& p : delta) in_delta.insert(p.key);
  PathDiff d;
  for (const auto& p : base) (in_delta.count(p.key) ? d.surviving : d.removed).push_back(p);
  for (const auto& p : delta) {
    if (!in_base.count(p.key)) d.newly_exposed.push_back(p);
  }
  return d;
}

inline Json to_json(const PathDiff& d) {
  auto list = [](const std::vector<AttackPath>& ps) {
    Json a = Json::array();
    for (const auto& p : ps) a.push_back(to_json(p, false));
    return a;
  };
  return {{"removed", list(d.removed)}, {"surviving", list(d.surviving)}, {"newly_exposed", list(d.newly_exposed)}};
}

}  // namespace threatflow

#endif  // THREATFLOW_PATHS_HPP_
