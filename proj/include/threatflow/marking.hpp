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

#ifndef THREATFLOW_MARKING_HPP_
#define THREATFLOW_MARKING_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "threatflow/value.hpp"

namespace threatflow {

using Tick = std::int64_t;

struct TimedToken {
  Value value;
  Tick time = 0;

  friend bool operator==(const TimedToken&, const TimedToken&) = default;
  friend std::strong_ordering operator<=>(const TimedToken& a, const TimedToken& b) {
    if (auto c = a.value <=> b.value; c != 0) return c;
    return a.time <=> b.time;
  }
};

/// Multiset of timed tokens per place. Empty places are never stored, so two
/// markings are equal iff they hold the same tokens.
class Marking {
 public:
  using Bag = std::map<TimedToken, int>;

  void add(const std::string& place, const Value& v, Tick time = 0, int n = 1) {
    add(place, TimedToken{v, time}, n);
  }

  void add(const std::string& place, const TimedToken& tok, int n = 1) {
    if (n <= 0) return;
    places_[place][tok] += n;
  }

  /// Removes n copies; returns false (and changes nothing) if fewer are present.
  bool remove(const std::string& place, const TimedToken& tok, int n = 1) {
    auto pit = places_.find(place);
    if (pit == places_.end()) return false;
    auto tit = pit->second.find(tok);
    if (tit == pit->second.end() || tit->second < n) return false;
    tit->second -= n;
    if (tit->second == 0) pit->second.erase(tit);
    if (pit->second.empty()) places_.erase(pit);
    return true;
  }

  int count(const std::string& place, const TimedToken& tok) const {
    auto pit = places_.find(place);
    if (pit == places_.end()) return 0;
    auto tit = pit->second.find(tok);
    return tit == pit->second.end() ? 0 : tit->second;
  }

  /// Copies of v in the place, any timestamp.
  int count_value(const std::string& place, const Value& v) const {
    int n = 0;
    for (const auto& [tok, k] : bag(place)) {
      if (tok.value == v) n += k;
    }
    return n;
  }

  int size(const std::string& place) const {
    int n = 0;
    for (const auto& [tok, k] : bag(place)) n += k;
    return n;
  }

  bool empty(const std::string& place) const { return places_.find(place) == places_.end(); }
  bool empty() const { return places_.empty(); }

  const Bag& bag(const std::string& place) const {
    static const Bag kEmpty;
    auto it = places_.find(place);
    return it == places_.end() ? kEmpty : it->second;
  }

  const std::map<std::string, Bag>& places() const { return places_; }

  /// Token values of a place, one entry per copy, canonical order.
  std::vector<Value> values(const std::string& place) const {
    std::vector<Value> out;
    for (const auto& [tok, k] : bag(place)) {
      for (int i = 0; i < k; ++i) out.push_back(tok.value);
    }
    return out;
  }

  /// Restriction to the given places.
  template <class Pred>
  Marking filter(Pred keep) const {
    Marking m;
    for (const auto& [p, b] : places_) {
      if (keep(p)) m.places_[p] = b;
    }
    return m;
  }

  /// Canonical text key; equal markings give equal keys.
  void write(std::string& out) const {
    for (const auto& [p, b] : places_) {
      out += p;
      out += ':';
      for (const auto& [tok, k] : b) {
        if (k != 1) {
          out += std::to_string(k);
          out += '`';
        }
        tok.value.write(out);
        if (tok.time != 0) {
          out += '@';
          out += std::to_string(tok.time);
        }
        out += ' ';
      }
      out += ';';
    }
  }

  std::string str() const {
    std::string s;
    write(s);
    return s;
  }

  friend bool operator==(const Marking&, const Marking&) = default;

 private:
  std::map<std::string, Bag> places_;
};

/// JSON form of a marking: place -> [{"token": v, "at": t, "count": n}];
/// "at" and "count" are omitted at their defaults (0 and 1).
inline Json to_json(const Marking& m) {
  Json j = Json::object();
  for (const auto& [place, bag] : m.places()) {
    Json arr = Json::array();
    for (const auto& [tok, n] : bag) {
      Json e = Json::object();
      e["token"] = to_json(tok.value);
      if (tok.time != 0) e["at"] = tok.time;
      if (n != 1) e["count"] = n;
      arr.push_back(std::move(e));
    }
    j[place] = std::move(arr);
  }
  return j;
}

inline Marking marking_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("marking must be an object");
  Marking m;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_array()) throw ParseError("marking of " + it.key() + " must be a list");
    for (const auto& e : it.value()) {
      if (!e.is_object() || !e.contains("token")) {
        throw ParseError("marking entry needs a \"token\" key: " + e.dump());
      }
      const Tick at = e.value("at", Tick{0});
      const int n = e.value("count", 1);
      if (n <= 0) throw ParseError("token count must be positive in " + e.dump());
      m.add(it.key(), value_from_json(e["token"]), at, n);
    }
  }
  return m;
}

}  // namespace threatflow

#endif  // THREATFLOW_MARKING_HPP_
