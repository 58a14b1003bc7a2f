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

// Reference implementations used to cross-check the engine. They favour
// obviousness over speed and share no search code with the library.

#ifndef THREATFLOW_TESTS_ORACLE_HPP_
#define THREATFLOW_TESTS_ORACLE_HPP_

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "threatflow/threatflow.hpp"

namespace oracle {

using namespace threatflow;

/// One physical token copy: (place, token, copy number).
struct Instance {
  std::string place;
  TimedToken token;
  int copy;
  auto operator<=>(const Instance&) const = default;
};

inline std::vector<Instance> instances(const Marking& m, const std::string& place, Tick clock) {
  std::vector<Instance> out;
  for (const auto& [tok, n] : m.bag(place)) {
    if (tok.time > clock) continue;
    for (int c = 0; c < n; ++c) out.push_back({place, tok, c});
  }
  return out;
}

/// All k-subsets of {0..n-1}.
inline void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Cartesian product over token copies for every input arc, rejecting reuse of
/// a copy, then pattern match and guard.
inline std::vector<Binding> enabled_bindings(const Net& net, const Marking& m, const std::string& tid, Tick clock) {
  const Transition* t = net.find_transition(tid);
  std::vector<const InputArc*> arcs;
  for (const auto& a : net.inputs) {
    if (a.transition == tid) arcs.push_back(&a);
  }
  // Per arc: candidate choices as lists of instances.
  std::vector<std::vector<std::vector<Instance>>> choices;
  for (const InputArc* a : arcs) {
    auto pool = instances(m, a->place, clock);
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    subsets(static_cast<int>(pool.size()), a->weight, 0, cur, idx);
    std::vector<std::vector<Instance>> opts;
    for (const auto& s : idx) {
      std::vector<Instance> pick;
      for (int i : s) pick.push_back(pool[static_cast<std::size_t>(i)]);
      opts.push_back(std::move(pick));
    }
    choices.push_back(std::move(opts));
  }

  std::set<Binding> found;
  std::vector<std::size_t> odo(arcs.size(), 0);
  auto total_empty = std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); });
  if (total_empty) return {};
  while (true) {
    std::set<Instance> taken;
    bool clash = false;
    Binding b;
    b.consumed.resize(arcs.size());
    bool ok = true;
    for (std::size_t i = 0; i < arcs.size() && ok; ++i) {
      for (const auto& inst : choices[i][odo[i]]) {
        if (!taken.insert(inst).second) clash = true;
        if (!arcs[i]->pattern.match(inst.token.value, b.vars)) ok = false;
        b.consumed[i].push_back(inst.token);
      }
      std::sort(b.consumed[i].begin(), b.consumed[i].end());
    }
    if (ok && !clash && holds(t->guard, b.vars, &m)) found.insert(b);
    std::size_t k = 0;
    while (k < arcs.size() && ++odo[k] == choices[k].size()) odo[k++] = 0;
    if (k == arcs.size()) break;
  }
  return {found.begin(), found.end()};
}

// ---------------------------------------------------------------------------
// Random nets: at most 5 places and 4 tokens per place, well typed by
// construction.

enum class Ty { Text, Count, Rec };

inline ColorSet color_of(Ty t) {
  switch (t) {
    case Ty::Text: return ColorSet::text();
    case Ty::Count: return ColorSet::count();
    case Ty::Rec: return ColorSet::record({{"a", ColorSet::text()}, {"b", ColorSet::count()}});
  }
  return ColorSet::text();
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int below(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
  bool coin(int pct) { return below(100) < pct; }

  Value text() { return Value::text(std::string(1, static_cast<char>('p' + below(3)))); }
  Value count() { return Value::count(below(3)); }
  Value value(Ty t) {
    switch (t) {
      case Ty::Text: return text();
      case Ty::Count: return count();
      case Ty::Rec: return Value::record({{"a", text()}, {"b", count()}});
    }
    return text();
  }

  struct Var {
    std::string name;
    Ty ty;
  };

  Pattern pattern(Ty ty, std::vector<Var>& vars, std::set<std::string>& used_here) {
    auto fresh_or_shared = [&](Ty want) -> Pattern {
      // Reuse a variable from an earlier arc to exercise consistency.
      std::vector<const Var*> same;
      for (const auto& v : vars) {
        if (v.ty == want && !used_here.count(v.name)) same.push_back(&v);
      }
      if (!same.empty() && coin(35)) {
        const Var* v = same[static_cast<std::size_t>(below(static_cast<int>(same.size())))];
        used_here.insert(v->name);
        return Pattern::bind(v->name);
      }
      std::string n = "v" + std::to_string(vars.size());
      vars.push_back({n, want});
      used_here.insert(n);
      return Pattern::bind(n);
    };
    const int r = below(10);
    if (r == 0) return Pattern::wild();
    if (r == 1) return Pattern::lit(value(ty));
    if (ty == Ty::Rec && r < 5) {
      std::vector<std::pair<std::string, Pattern>> fields;
      if (coin(70)) fields.emplace_back("a", coin(20) ? Pattern::lit(text()) : fresh_or_shared(Ty::Text));
      if (coin(70)) fields.emplace_back("b", fresh_or_shared(Ty::Count));
      return Pattern::record(std::move(fields));
    }
    return fresh_or_shared(ty);
  }

  Expr term(Ty ty, const std::vector<Var>& vars) {
    std::vector<const Var*> same;
    for (const auto& v : vars) {
      if (v.ty == ty) same.push_back(&v);
    }
    if (!same.empty() && coin(75)) return ex::var(same[static_cast<std::size_t>(below(static_cast<int>(same.size())))]->name);
    if (ty == Ty::Count && coin(30)) {
      for (const auto& v : vars) {
        if (v.ty == Ty::Rec) return ex::field(ex::var(v.name), "b");
      }
    }
    if (ty == Ty::Rec && coin(50)) return ex::record({{"a", term(Ty::Text, vars)}, {"b", term(Ty::Count, vars)}});
    return ex::lit(value(ty));
  }

  Expr guard(const std::vector<Var>& vars, const std::vector<std::pair<std::string, Ty>>& places, int depth = 0) {
    const int r = below(depth > 1 ? 5 : 8);
    const Ty ty = static_cast<Ty>(below(3));
    switch (r) {
      case 0: return ex::truth();
      case 1: return ex::eq(term(ty, vars), term(ty, vars));
      case 2: return ex::ne(term(ty, vars), term(ty, vars));
      case 3: return ex::le(term(Ty::Count, vars), term(Ty::Count, vars));
      case 4: {
        const auto& [pid, pty] = places[static_cast<std::size_t>(below(static_cast<int>(places.size())))];
        return ex::in(term(pty, vars), pid);
      }
      case 5: return ex::not_(guard(vars, places, depth + 1));
      case 6: return ex::all({guard(vars, places, depth + 1), guard(vars, places, depth + 1)});
      default: return ex::any({guard(vars, places, depth + 1), guard(vars, places, depth + 1)});
    }
  }

  /// Random flat net with its initial marking.
  Net net() {
    Net n;
    n.name = "random";
    const int np = 1 + below(5);
    std::vector<std::pair<std::string, Ty>> places;
    for (int i = 0; i < np; ++i) {
      const Ty ty = static_cast<Ty>(below(3));
      const std::string id = "P" + std::to_string(i);
      n.add_place(id, color_of(ty));
      places.emplace_back(id, ty);
      const int toks = below(5);
      for (int k = 0; k < toks; ++k) n.initial.add(id, value(ty), coin(15) ? 1 : 0);
    }
    const int nt = 1 + below(3);
    for (int t = 0; t < nt; ++t) {
      const std::string tid = "T" + std::to_string(t);
      std::vector<Var> vars;
      const int arcs = 1 + below(3);
      for (int a = 0; a < arcs; ++a) {
        const auto& [pid, pty] = places[static_cast<std::size_t>(below(np))];
        std::set<std::string> used_here;
        Pattern p = pattern(pty, vars, used_here);
        const int w = coin(20) ? 2 : 1;
        if (coin(20)) {
          n.arc_read(pid, tid, std::move(p));
        } else {
          n.arc_in(pid, tid, std::move(p), w);
        }
      }
      n.add_transition(tid, guard(vars, places), coin(20) ? 1 + below(3) : 0);
      const int outs = below(3);
      for (int o = 0; o < outs; ++o) {
        const auto& [pid, pty] = places[static_cast<std::size_t>(below(np))];
        n.arc_out(tid, pid, term(pty, vars), coin(15) ? 2 : 1);
      }
    }
    return n;
  }
};

/// m - consumed (non-read arcs) + produced, computed directly.
inline Marking expected_after(const Net& net, const Marking& m, const std::string& tid, const Binding& b, Tick clock) {
  Marking out = m;
  std::size_t i = 0;
  for (const auto& a : net.inputs) {
    if (a.transition != tid) continue;
    if (!a.read) {
      for (const auto& tok : b.consumed[i]) out.remove(a.place, tok);
    }
    ++i;
  }
  const Tick delay = net.find_transition(tid)->delay;
  for (const auto& a : net.outputs) {
    if (a.transition != tid) continue;
    if (a.when && !holds(*a.when, b.vars, &m)) continue;
    out.add(a.place, evaluate(a.expr, b.vars, &m), clock + delay, a.weight);
  }
  return out;
}

}  // namespace oracle

#endif  // THREATFLOW_TESTS_ORACLE_HPP_
