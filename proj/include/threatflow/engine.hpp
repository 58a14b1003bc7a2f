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

#ifndef THREATFLOW_ENGINE_HPP_
#define THREATFLOW_ENGINE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "threatflow/flatten.hpp"
#include "threatflow/net.hpp"

namespace threatflow {

inline std::string hex64(std::uint64_t h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
  return s;
}

/// FNV-1a, 64 bit. Stable across platforms.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Variable assignment plus the concrete tokens each input arc takes.
struct Binding {
  Vars vars;
  std::vector<std::vector<TimedToken>> consumed;  // per input arc, in arc order

  std::string key() const {
    std::string s;
    for (const auto& [k, v] : vars) {
      s += k;
      s += '=';
      v.write(s);
      s += ';';
    }
    s += '|';
    for (const auto& arc : consumed) {
      for (const auto& t : arc) {
        t.value.write(s);
        s += '@';
        s += std::to_string(t.time);
        s += ',';
      }
      s += '|';
    }
    return s;
  }

  std::string digest() const { return hex64(fnv1a(key())); }

  friend bool operator==(const Binding&, const Binding&) = default;
  friend auto operator<=>(const Binding&, const Binding&) = default;
};

inline Json to_json(const Binding& b) {
  Json j = Json::object();
  for (const auto& [k, v] : b.vars) j[k] = to_json(v);
  return j;
}

struct StepResult {
  std::string transition;
  Binding binding;
  Marking marking;
  Tick clock = 0;
};

struct Firing {
  std::string transition;
  Binding binding;
};

/**
 * Firing rule over a flat net. Hierarchical nets are flattened on
 * construction. Instances are immutable after construction and may be shared
 * between threads.
 *
 * Binding search is exhaustive backtracking over the input arcs, so its cost
 * is the product of the eligible token counts of the input places in the
 * worst case.
 */
class Engine {
 public:
  explicit Engine(const Net& net)
      : net_(std::make_shared<const Net>(net.submodules.empty() ? net : flatten(net))) {
    for (const auto& p : net_->places) colors_.emplace(p.id, &p.colors);
    for (const auto& t : net_->transitions) order_.push_back(t.id);
    std::sort(order_.begin(), order_.end());
    for (const auto& t : net_->transitions) {
      Slot& s = slots_[t.id];
      s.transition = &t;
      for (const auto& a : net_->inputs) {
        if (a.transition == t.id) s.inputs.push_back(&a);
      }
      for (const auto& a : net_->outputs) {
        if (a.transition == t.id) s.outputs.push_back(&a);
      }
    }
  }

  const Net& net() const { return *net_; }
  const std::vector<std::string>& transition_order() const { return order_; }

  /// Input arcs of a transition in binding order (Binding::consumed follows it).
  const std::vector<const InputArc*>& input_arcs(const std::string& tid) const { return slot(tid).inputs; }

  std::vector<Binding> enabled(const Marking& m, const std::string& tid, Tick clock) const {
    const Slot& s = slot(tid);
    std::set<Binding> found;
    Search search{*this, s, m, clock, found, {}};
    Binding b;
    b.consumed.resize(s.inputs.size());
    search.arc(0, b);
    return {found.begin(), found.end()};
  }

  /// Every enabled (transition, binding) pair, canonical order.
  std::vector<Firing> enabled_all(const Marking& m, Tick clock) const {
    std::vector<Firing> out;
    for (const auto& tid : order_) {
      for (auto& b : enabled(m, tid, clock)) out.push_back({tid, std::move(b)});
    }
    return out;
  }

  bool any_enabled(const Marking& m, Tick clock) const {
    for (const auto& tid : order_) {
      if (!enabled(m, tid, clock).empty()) return true;
    }
    return false;
  }

  /// Earliest instant > clock at which something is enabled, if any.
  std::optional<Tick> next_instant(const Marking& m, Tick clock) const {
    std::set<Tick> times;
    for (const auto& [p, bag] : m.places()) {
      for (const auto& [tok, n] : bag) {
        if (tok.time > clock) times.insert(tok.time);
      }
    }
    for (Tick t : times) {
      if (any_enabled(m, t)) return t;
    }
    return std::nullopt;
  }

  /// Tokens the firing would produce, in output-arc order.
  std::vector<std::pair<std::string, TimedToken>> produce(const Marking& m, const std::string& tid,
                                                          const Binding& b, Tick clock) const {
    const Slot& s = slot(tid);
    std::vector<std::pair<std::string, TimedToken>> out;
    for (const OutputArc* a : s.outputs) {
      if (a->when && !holds(*a->when, b.vars, &m)) continue;
      Value v = evaluate(a->expr, b.vars, &m);
      if (!colors_.at(a->place)->contains(v)) {
        throw TypeMismatch("token " + v.str() + " does not fit place " + a->place + " (" +
                           colors_.at(a->place)->str() + ")");
      }
      for (int i = 0; i < a->weight; ++i) out.emplace_back(a->place, TimedToken{v, clock + s.transition->delay});
    }
    return out;
  }

  /// Fires without re-checking enabledness. The binding must come from enabled().
  Marking fire_unchecked(const Marking& m, const std::string& tid, const Binding& b, Tick clock) const {
    const Slot& s = slot(tid);
    auto produced = produce(m, tid, b, clock);
    Marking out = m;
    for (std::size_t i = 0; i < s.inputs.size(); ++i) {
      if (s.inputs[i]->read) continue;
      for (const auto& tok : b.consumed[i]) out.remove(s.inputs[i]->place, tok);
    }
    for (const auto& [place, tok] : produced) out.add(place, tok);
    return out;
  }

  /// Checked firing. A binding given only by its variables is resolved to the
  /// first enabled binding with those variables.
  Marking fire(const Marking& m, const std::string& tid, const Binding& b, Tick clock) const {
    const auto options = enabled(m, tid, clock);
    const bool vars_only = b.consumed.empty() && !slot(tid).inputs.empty();
    for (const auto& o : options) {
      if (vars_only ? o.vars == b.vars : o == b) return fire_unchecked(m, tid, o, clock);
    }
    throw NotEnabled("transition " + tid + " is not enabled under the given binding at clock " +
                     std::to_string(clock));
  }

  /// One simulation step: uniform choice (rng() mod n) over the canonical list
  /// of enabled pairs, advancing the clock first when nothing is enabled.
  std::optional<StepResult> step(const Marking& m, Tick clock, std::mt19937_64& rng) const {
    auto options = enabled_all(m, clock);
    if (options.empty()) {
      auto next = next_instant(m, clock);
      if (!next) return std::nullopt;
      clock = *next;
      options = enabled_all(m, clock);
    }
    const std::size_t pick = static_cast<std::size_t>(rng() % options.size());
    Firing& f = options[pick];
    Marking out = fire_unchecked(m, f.transition, f.binding, clock);
    return StepResult{f.transition, std::move(f.binding), std::move(out), clock};
  }

 private:
  struct Slot {
    const Transition* transition = nullptr;
    std::vector<const InputArc*> inputs;
    std::vector<const OutputArc*> outputs;
  };

  const Slot& slot(const std::string& tid) const {
    auto it = slots_.find(tid);
    if (it == slots_.end()) throw UnknownTransition("unknown transition '" + tid + "'");
    return it->second;
  }

  struct Search {
    const Engine& engine;
    const Slot& slot;
    const Marking& marking;
    Tick clock;
    std::set<Binding>& found;
    std::map<std::string, std::map<TimedToken, int>> used;

    void arc(std::size_t i, Binding& b) {
      if (i == slot.inputs.size()) {
        if (holds(slot.transition->guard, b.vars, &marking)) found.insert(b);
        return;
      }
      pick(i, 0, slot.inputs[i]->weight, b);
    }

    // Chooses `remaining` more tokens for arc i, from entries at index >= start.
    void pick(std::size_t i, std::size_t start, int remaining, Binding& b) {
      if (remaining == 0) {
        arc(i + 1, b);
        return;
      }
      const InputArc& a = *slot.inputs[i];
      const auto& bag = marking.bag(a.place);
      auto& usage = used[a.place];
      std::size_t idx = 0;
      for (auto it = bag.begin(); it != bag.end(); ++it, ++idx) {
        if (idx < start) continue;
        const auto& [tok, n] = *it;
        if (tok.time > clock) continue;
        int& u = usage[tok];
        if (u >= n) continue;
        Vars saved = b.vars;
        if (a.pattern.match(tok.value, b.vars)) {
          ++u;
          b.consumed[i].push_back(tok);
          pick(i, idx, remaining - 1, b);
          b.consumed[i].pop_back();
          --u;
        }
        b.vars = std::move(saved);
      }
    }
  };

  std::shared_ptr<const Net> net_;
  std::unordered_map<std::string, const ColorSet*> colors_;
  std::unordered_map<std::string, Slot> slots_;
  std::vector<std::string> order_;
};

inline std::vector<Binding> enabled_bindings(const Net& net, const Marking& m, const std::string& tid,
                                             Tick clock) {
  return Engine(net).enabled(m, tid, clock);
}

inline Marking fire(const Net& net, const Marking& m, const std::string& tid, const Binding& b, Tick clock) {
  return Engine(net).fire(m, tid, b, clock);
}

inline std::optional<StepResult> step(const Net& net, const Marking& m, Tick clock, std::mt19937_64& rng) {
  return Engine(net).step(m, clock, rng);
}

}  // namespace threatflow

#endif  // THREATFLOW_ENGINE_HPP_
