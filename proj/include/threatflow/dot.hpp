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

#ifndef THREATFLOW_DOT_HPP_
#define THREATFLOW_DOT_HPP_

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "threatflow/paths.hpp"
#include "threatflow/scenario.hpp"

namespace threatflow {

/// Quoted DOT identifier.
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

/// Short marking label: one "place xN" line per non-empty place.
inline std::string marking_label(const Marking& m, Tick clock) {
  std::string s = "t=" + std::to_string(clock);
  for (const auto& [p, bag] : m.places()) {
    const int n = m.size(p);
    s += "\n" + p + (n == 1 ? "" : " x" + std::to_string(n));
  }
  return s;
}

/// Reachability graph; threat transitions are drawn in red, dead markings doubled.
inline std::string graph_to_dot(const ReachabilityGraph& g, const std::string& name = "reachability") {
  std::ostringstream out;
  out << "digraph " << dot_quote(name) << " {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    out << "  n" << i << " [label=" << dot_quote(marking_label(n.marking, n.clock));
    if (n.dead) out << ", peripheries=2";
    if (!n.expanded && !n.dead) out << ", style=dashed";
    out << "];\n";
  }
  for (const auto& e : g.edges) {
    out << "  n" << e.from << " -> n" << e.to << " [label=" << dot_quote(e.transition);
    if (!threat_of(e.transition).empty()) out << ", color=red, fontcolor=red";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

/**
 * Attack-path graph in the layered style of path figures: the cloud entry,
 * one node per exploit step, and one node per violated requirement. Edges of
 * each path carry its index.
 */
inline std::string paths_to_dot(const std::vector<AttackPath>& paths, const std::string& name = "attack-paths") {
  std::ostringstream out;
  out << "digraph " << dot_quote(name) << " {\n  rankdir=LR;\n  node [shape=ellipse, fontsize=10];\n";
  out << "  cloud [label=\"Cloud\", shape=box];\n";
  std::map<std::string, std::string> ids;
  auto node = [&](const std::string& label, const char* shape) {
    auto it = ids.find(label);
    if (it != ids.end()) return it->second;
    const std::string id = "s" + std::to_string(ids.size());
    ids.emplace(label, id);
    out << "  " << id << " [label=" << dot_quote(label) << ", shape=" << shape << "];\n";
    return id;
  };
  std::set<std::string> edges;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    std::string prev = "cloud";
    for (const auto& s : p.steps) {
      const std::string cur = node(s.label + "\n" + s.consequence, "ellipse");
      const std::string e = prev + " -> " + cur;
      if (edges.insert(e).second) lines.push_back("  " + e + " [color=red];\n");
      prev = cur;
    }
    for (const auto& v : p.violated) {
      const std::string req = node(std::string(axis_name(v.requirement.axis)) + " (priority " +
                                       std::to_string(v.requirement.priority) + ")",
                                   "box");
      const std::string e = prev + " -> " + req;
      if (edges.insert(e).second) lines.push_back("  " + e + " [style=dashed];\n");
    }
  }
  for (const auto& l : lines) out << l;
  out << "}\n";
  return out.str();
}

// --------------------------------------------------------------------------
// Plain-text reports.

inline std::string describe_path(const AttackPath& p) {
  std::string s = p.key + "\n    consequences: ";
  for (std::size_t i = 0; i < p.consequences.size(); ++i) s += (i ? ", " : "") + p.consequences[i];
  s += "\n    violates: ";
  for (std::size_t i = 0; i < p.violated.size(); ++i) {
    const auto& v = p.violated[i];
    s += std::string(i ? ", " : "") + axis_name(v.requirement.axis) + "/" + std::to_string(v.requirement.priority) +
         (v.partial ? " (partial)" : "");
  }
  if (p.loop) s += "\n    on a loop";
  return s + "\n";
}

inline std::string report_text(const RunReport& r, bool timing = false) {
  std::ostringstream out;
  const auto& st = r.analysis.stats;
  out << "scenario " << r.scenario << ": " << r.threats.size() << " threats, " << st.explorations
      << " explorations, " << st.nodes << " markings, " << st.edges << " firings"
      << (st.truncated ? ", TRUNCATED" : "") << "\n";
  out << r.analysis.paths.size() << " attack paths\n";
  for (std::size_t i = 0; i < r.analysis.paths.size(); ++i) {
    out << "  " << (i + 1) << ". " << describe_path(r.analysis.paths[i]);
  }
  if (!r.analysis.centrality.empty()) {
    out << "centrality\n";
    for (const auto& c : r.analysis.centrality) out << "  " << c.rank << ". " << c.threat << " (" << c.paths << ")\n";
  }
  if (timing) out << "time " << r.seconds << " s\n";
  return out.str();
}

inline std::string diff_text(const PathDiff& d) {
  std::ostringstream out;
  auto section = [&](const char* title, const char* mark, const std::vector<AttackPath>& ps) {
    out << title << " (" << ps.size() << ")\n";
    for (const auto& p : ps) out << "  " << mark << " " << p.key << "\n";
  };
  section("removed", "-", d.removed);
  section("surviving", "=", d.surviving);
  section("newly exposed", "+", d.newly_exposed);
  return out.str();
}

}  // namespace threatflow

#endif  // THREATFLOW_DOT_HPP_
