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

#ifndef THREATFLOW_VALUE_HPP_
#define THREATFLOW_VALUE_HPP_

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threatflow/error.hpp"
#include "threatflow/json.hpp"

namespace threatflow {

/**
 * Typed datum carried by a token.
 *
 * A value is one of text, an integer count, a record (ordered, uniquely named
 * fields) or a tuple. Equality and ordering are structural; the ordering is
 * total so markings can be kept canonical.
 */
class Value {
 public:
  enum class Kind : std::uint8_t { Text = 0, Count = 1, Record = 2, Tuple = 3 };

  Value() = default;  // empty text

  static Value text(std::string s) {
    Value v;
    v.kind_ = Kind::Text;
    v.text_ = std::move(s);
    return v;
  }

  static Value count(std::int64_t n) {
    Value v;
    v.kind_ = Kind::Count;
    v.count_ = n;
    return v;
  }

  static Value tuple(std::vector<Value> items) {
    Value v;
    v.kind_ = Kind::Tuple;
    v.items_ = std::move(items);
    return v;
  }

  static Value record(std::vector<std::pair<std::string, Value>> fields) {
    Value v;
    v.kind_ = Kind::Record;
    v.names_.reserve(fields.size());
    v.items_.reserve(fields.size());
    for (auto& [name, value] : fields) {
      for (const auto& existing : v.names_) {
        if (existing == name) throw TypeMismatch("duplicate record field '" + name + "'");
      }
      v.names_.push_back(std::move(name));
      v.items_.push_back(std::move(value));
    }
    return v;
  }

  Kind kind() const { return kind_; }
  bool is_text() const { return kind_ == Kind::Text; }
  bool is_count() const { return kind_ == Kind::Count; }
  bool is_record() const { return kind_ == Kind::Record; }
  bool is_tuple() const { return kind_ == Kind::Tuple; }

  const std::string& as_text() const {
    if (!is_text()) throw TypeMismatch("expected text, got " + str());
    return text_;
  }

  std::int64_t as_count() const {
    if (!is_count()) throw TypeMismatch("expected count, got " + str());
    return count_;
  }

  /// Record field names, in declaration order.
  const std::vector<std::string>& names() const { return names_; }
  /// Record field values or tuple elements.
  const std::vector<Value>& items() const { return items_; }

  /// Field lookup; nullptr when absent or not a record.
  const Value* field(std::string_view name) const {
    if (!is_record()) return nullptr;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return &items_[i];
    }
    return nullptr;
  }

  const Value& at(std::size_t i) const {
    if (!is_tuple()) throw TypeMismatch("expected tuple, got " + str());
    if (i >= items_.size()) {
      throw TypeMismatch("tuple index " + std::to_string(i) + " out of range in " + str());
    }
    return items_[i];
  }

  /// Copy with one field replaced (or appended when absent).
  Value with_field(const std::string& name, Value v) const {
    if (!is_record()) throw TypeMismatch("expected record, got " + str());
    Value out = *this;
    for (std::size_t i = 0; i < out.names_.size(); ++i) {
      if (out.names_[i] == name) {
        out.items_[i] = std::move(v);
        return out;
      }
    }
    out.names_.push_back(name);
    out.items_.push_back(std::move(v));
    return out;
  }

  friend bool operator==(const Value& a, const Value& b) {
    return a.kind_ == b.kind_ && a.count_ == b.count_ && a.text_ == b.text_ &&
           a.names_ == b.names_ && a.items_ == b.items_;
  }

  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    switch (a.kind_) {
      case Kind::Text:
        return a.text_.compare(b.text_) <=> 0;
      case Kind::Count:
        return a.count_ <=> b.count_;
      case Kind::Record:
        if (auto c = compare_names(a.names_, b.names_); c != 0) return c;
        [[fallthrough]];
      case Kind::Tuple:
        break;
    }
    const std::size_t n = std::min(a.items_.size(), b.items_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = a.items_[i] <=> b.items_[i]; c != 0) return c;
    }
    return a.items_.size() <=> b.items_.size();
  }

  /// Compact canonical rendering: "sm", 5, (a,b), {un="sm",pw="t1"}.
  void write(std::string& out) const {
    switch (kind_) {
      case Kind::Text:
        out += '"';
        for (char ch : text_) {
          if (ch == '"' || ch == '\\') out += '\\';
          out += ch;
        }
        out += '"';
        return;
      case Kind::Count:
        out += std::to_string(count_);
        return;
      case Kind::Tuple:
        out += '(';
        for (std::size_t i = 0; i < items_.size(); ++i) {
          if (i) out += ',';
          items_[i].write(out);
        }
        out += ')';
        return;
      case Kind::Record:
        out += '{';
        for (std::size_t i = 0; i < items_.size(); ++i) {
          if (i) out += ',';
          out += names_[i];
          out += '=';
          items_[i].write(out);
        }
        out += '}';
        return;
    }
  }

  std::string str() const {
    std::string s;
    write(s);
    return s;
  }

 private:
  static std::strong_ordering compare_names(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = a[i].compare(b[i]) <=> 0; c != 0) return c;
    }
    return a.size() <=> b.size();
  }

  Kind kind_ = Kind::Text;
  std::int64_t count_ = 0;
  std::string text_;
  std::vector<std::string> names_;
  std::vector<Value> items_;
};

inline Value text(std::string s) { return Value::text(std::move(s)); }
inline Value count(std::int64_t n) { return Value::count(n); }

// JSON: string <-> text, integer <-> count, array <-> tuple, object <-> record.
inline Json to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Text:
      return v.as_text();
    case Value::Kind::Count:
      return v.as_count();
    case Value::Kind::Tuple: {
      Json arr = Json::array();
      for (const auto& item : v.items()) arr.push_back(to_json(item));
      return arr;
    }
    case Value::Kind::Record: {
      Json obj = Json::object();
      for (std::size_t i = 0; i < v.names().size(); ++i) {
        obj[v.names()[i]] = to_json(v.items()[i]);
      }
      return obj;
    }
  }
  return nullptr;
}

inline Value value_from_json(const Json& j) {
  if (j.is_string()) return Value::text(j.get<std::string>());
  if (j.is_number_integer()) return Value::count(j.get<std::int64_t>());
  if (j.is_array()) {
    std::vector<Value> items;
    items.reserve(j.size());
    for (const auto& e : j) items.push_back(value_from_json(e));
    return Value::tuple(std::move(items));
  }
  if (j.is_object()) {
    std::vector<std::pair<std::string, Value>> fields;
    for (auto it = j.begin(); it != j.end(); ++it) {
      fields.emplace_back(it.key(), value_from_json(it.value()));
    }
    return Value::record(std::move(fields));
  }
  throw ParseError("cannot read token value from " + j.dump());
}

/**
 * Type descriptor for the values a place may hold.
 *
 * Mirrors the value shapes, plus `list` for variable-length tuples of one
 * element type (the Arr columns of the cloud places).
 */
class ColorSet {
 public:
  enum class Kind : std::uint8_t { Text, Count, Record, Tuple, List };

  ColorSet() = default;

  static ColorSet text() { return ColorSet(Kind::Text); }
  static ColorSet count() { return ColorSet(Kind::Count); }
  static ColorSet list(ColorSet element) {
    ColorSet c(Kind::List);
    c.parts_.push_back(std::move(element));
    return c;
  }
  static ColorSet tuple(std::vector<ColorSet> parts) {
    ColorSet c(Kind::Tuple);
    c.parts_ = std::move(parts);
    return c;
  }
  static ColorSet record(std::vector<std::pair<std::string, ColorSet>> fields) {
    ColorSet c(Kind::Record);
    for (auto& [name, cs] : fields) {
      c.names_.push_back(std::move(name));
      c.parts_.push_back(std::move(cs));
    }
    return c;
  }

  Kind kind() const { return kind_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ColorSet>& parts() const { return parts_; }

  /// Membership test. Records must carry exactly the declared fields in order.
  bool contains(const Value& v) const {
    switch (kind_) {
      case Kind::Text:
        return v.is_text();
      case Kind::Count:
        return v.is_count();
      case Kind::List:
        if (!v.is_tuple()) return false;
        for (const auto& item : v.items()) {
          if (!parts_[0].contains(item)) return false;
        }
        return true;
      case Kind::Tuple:
        if (!v.is_tuple() || v.items().size() != parts_.size()) return false;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          if (!parts_[i].contains(v.items()[i])) return false;
        }
        return true;
      case Kind::Record:
        if (!v.is_record() || v.names() != names_) return false;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          if (!parts_[i].contains(v.items()[i])) return false;
        }
        return true;
    }
    return false;
  }

  friend bool operator==(const ColorSet&, const ColorSet&) = default;

  std::string str() const { return to_json().dump(); }

  Json to_json() const {
    switch (kind_) {
      case Kind::Text:
        return "text";
      case Kind::Count:
        return "count";
      case Kind::List:
        return Json{{"list", parts_[0].to_json()}};
      case Kind::Tuple: {
        Json arr = Json::array();
        for (const auto& p : parts_) arr.push_back(p.to_json());
        return Json{{"tuple", arr}};
      }
      case Kind::Record: {
        Json arr = Json::array();
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          arr.push_back(Json::array({names_[i], parts_[i].to_json()}));
        }
        return Json{{"record", arr}};
      }
    }
    return nullptr;
  }

  static ColorSet from_json(const Json& j) {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "text") return text();
      if (s == "count") return count();
      throw ParseError("unknown color set '" + s + "'");
    }
    if (!j.is_object() || j.size() != 1) throw ParseError("bad color set " + j.dump());
    const auto& [key, body] = *j.items().begin();
    if (key == "list") return list(from_json(body));
    if (key == "tuple") {
      std::vector<ColorSet> parts;
      for (const auto& p : body) parts.push_back(from_json(p));
      return tuple(std::move(parts));
    }
    if (key == "record") {
      std::vector<std::pair<std::string, ColorSet>> fields;
      for (const auto& f : body) {
        if (!f.is_array() || f.size() != 2) throw ParseError("bad record field " + f.dump());
        fields.emplace_back(f[0].get<std::string>(), from_json(f[1]));
      }
      return record(std::move(fields));
    }
    throw ParseError("unknown color set '" + key + "'");
  }

 private:
  explicit ColorSet(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Text;
  std::vector<std::string> names_;
  std::vector<ColorSet> parts_;
};

}  // namespace threatflow

#endif  // THREATFLOW_VALUE_HPP_
