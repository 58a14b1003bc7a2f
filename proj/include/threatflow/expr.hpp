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

#ifndef THREATFLOW_EXPR_HPP_
#define THREATFLOW_EXPR_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threatflow/marking.hpp"
#include "threatflow/value.hpp"

namespace threatflow {

using Vars = std::map<std::string, Value>;

/**
 * Closed expression language for guards and output-arc constructors.
 *
 * Value operators build or project tokens; predicate operators yield truth
 * values. `in` and `exists` read the token set of a place in the marking the
 * transition fires from (timestamps are ignored for these reads).
 *
 * JSON grammar (nested arrays, operator first):
 *   ["var", x]  ["lit", v]  ["field", e, name]  ["at", e, i]
 *   ["tuple", e...]  ["record", [name, e]...]  ["concat", e...]
 *   ["with", e, [name, e]...]  ["if", p, e1, e2]  ["add", a, b]  ["sub", a, b]
 *   ["eq"|"ne"|"lt"|"le"|"gt"|"ge", a, b]  ["and", p...]  ["or", p...]
 *   ["not", p]  ["in", e, place]  ["exists", place, x, p]  ["true"]  ["false"]
 */
struct Expr {
  enum class Op : std::uint8_t {
    Var, Lit, Field, At, Tuple, Record, Concat, With, If, Add, Sub,
    Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not, In, Exists, True, False
  };

  Op op = Op::True;
  std::string name;                 // variable, field or place
  std::int64_t index = 0;           // tuple position
  Value literal;                    // Lit
  std::vector<std::string> labels;  // record/with field names; exists variable
  std::vector<Expr> args;

  bool is_predicate() const {
    switch (op) {
      case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge:
      case Op::And: case Op::Or: case Op::Not: case Op::In: case Op::Exists:
      case Op::True: case Op::False:
        return true;
      default:
        return false;
    }
  }

  friend bool operator==(const Expr&, const Expr&) = default;

  Json to_json() const;
  static Expr from_json(const Json& j);
  std::string str() const { return to_json().dump(); }
};

/// Expression builders.
namespace ex {

inline Expr node(Expr::Op op, std::vector<Expr> args = {}) {
  Expr e;
  e.op = op;
  e.args = std::move(args);
  return e;
}
inline Expr var(std::string name) {
  Expr e = node(Expr::Op::Var);
  e.name = std::move(name);
  return e;
}
inline Expr lit(Value v) {
  Expr e = node(Expr::Op::Lit);
  e.literal = std::move(v);
  return e;
}
inline Expr lit(const char* s) { return lit(Value::text(s)); }
inline Expr lit(std::int64_t n) { return lit(Value::count(n)); }
inline Expr lit(int n) { return lit(Value::count(n)); }
inline Expr field(Expr of, std::string name) {
  Expr e = node(Expr::Op::Field, {std::move(of)});
  e.name = std::move(name);
  return e;
}
inline Expr field(std::string var_name, std::string name) {
  return field(var(std::move(var_name)), std::move(name));
}
inline Expr at(Expr of, std::int64_t i) {
  Expr e = node(Expr::Op::At, {std::move(of)});
  e.index = i;
  return e;
}
inline Expr tuple(std::vector<Expr> items) { return node(Expr::Op::Tuple, std::move(items)); }
inline Expr record(std::vector<std::pair<std::string, Expr>> fields) {
  Expr e = node(Expr::Op::Record);
  for (auto& [n, v] : fields) {
    e.labels.push_back(std::move(n));
    e.args.push_back(std::move(v));
  }
  return e;
}
inline Expr concat(std::vector<Expr> parts) { return node(Expr::Op::Concat, std::move(parts)); }
inline Expr with(Expr base, std::vector<std::pair<std::string, Expr>> updates) {
  Expr e = node(Expr::Op::With, {std::move(base)});
  for (auto& [n, v] : updates) {
    e.labels.push_back(std::move(n));
    e.args.push_back(std::move(v));
  }
  return e;
}
inline Expr if_(Expr cond, Expr then, Expr otherwise) {
  return node(Expr::Op::If, {std::move(cond), std::move(then), std::move(otherwise)});
}
inline Expr add(Expr a, Expr b) { return node(Expr::Op::Add, {std::move(a), std::move(b)}); }
inline Expr sub(Expr a, Expr b) { return node(Expr::Op::Sub, {std::move(a), std::move(b)}); }
inline Expr eq(Expr a, Expr b) { return node(Expr::Op::Eq, {std::move(a), std::move(b)}); }
inline Expr ne(Expr a, Expr b) { return node(Expr::Op::Ne, {std::move(a), std::move(b)}); }
inline Expr lt(Expr a, Expr b) { return node(Expr::Op::Lt, {std::move(a), std::move(b)}); }
inline Expr le(Expr a, Expr b) { return node(Expr::Op::Le, {std::move(a), std::move(b)}); }
inline Expr gt(Expr a, Expr b) { return node(Expr::Op::Gt, {std::move(a), std::move(b)}); }
inline Expr ge(Expr a, Expr b) { return node(Expr::Op::Ge, {std::move(a), std::move(b)}); }
inline Expr all(std::vector<Expr> ps) { return node(Expr::Op::And, std::move(ps)); }
inline Expr any(std::vector<Expr> ps) { return node(Expr::Op::Or, std::move(ps)); }
inline Expr not_(Expr p) { return node(Expr::Op::Not, {std::move(p)}); }
inline Expr in(Expr v, std::string place) {
  Expr e = node(Expr::Op::In, {std::move(v)});
  e.name = std::move(place);
  return e;
}
inline Expr exists(std::string place, std::string var_name, Expr cond) {
  Expr e = node(Expr::Op::Exists, {std::move(cond)});
  e.name = std::move(place);
  e.labels.push_back(std::move(var_name));
  return e;
}
inline Expr truth() { return node(Expr::Op::True); }
inline Expr falsity() { return node(Expr::Op::False); }

}  // namespace ex

namespace detail {

struct OpName {
  Expr::Op op;
  std::string_view name;
};

inline constexpr OpName kOpNames[] = {
    {Expr::Op::Var, "var"},       {Expr::Op::Lit, "lit"},     {Expr::Op::Field, "field"},
    {Expr::Op::At, "at"},         {Expr::Op::Tuple, "tuple"}, {Expr::Op::Record, "record"},
    {Expr::Op::Concat, "concat"}, {Expr::Op::With, "with"},   {Expr::Op::If, "if"},
    {Expr::Op::Add, "add"},       {Expr::Op::Sub, "sub"},     {Expr::Op::Eq, "eq"},
    {Expr::Op::Ne, "ne"},         {Expr::Op::Lt, "lt"},       {Expr::Op::Le, "le"},
    {Expr::Op::Gt, "gt"},         {Expr::Op::Ge, "ge"},       {Expr::Op::And, "and"},
    {Expr::Op::Or, "or"},         {Expr::Op::Not, "not"},     {Expr::Op::In, "in"},
    {Expr::Op::Exists, "exists"}, {Expr::Op::True, "true"},   {Expr::Op::False, "false"},
};

inline std::string_view op_name(Expr::Op op) {
  for (const auto& e : kOpNames) {
    if (e.op == op) return e.name;
  }
  return "?";
}

inline Expr::Op op_from_name(const std::string& s) {
  for (const auto& e : kOpNames) {
    if (e.name == s) return e.op;
  }
  throw ParseError("unknown expression operator '" + s + "'");
}

inline void require_arity(const Json& j, std::size_t n, bool at_least = false) {
  if (at_least ? j.size() < n : j.size() != n) {
    throw ParseError("wrong operand count in expression " + j.dump());
  }
}

}  // namespace detail

inline Json Expr::to_json() const {
  Json j = Json::array();
  j.push_back(std::string(detail::op_name(op)));
  switch (op) {
    case Op::Var:
      j.push_back(name);
      break;
    case Op::Lit:
      j.push_back(threatflow::to_json(literal));
      break;
    case Op::Field:
      j.push_back(args[0].to_json());
      j.push_back(name);
      break;
    case Op::At:
      j.push_back(args[0].to_json());
      j.push_back(index);
      break;
    case Op::Record:
      for (std::size_t i = 0; i < args.size(); ++i) {
        j.push_back(Json::array({labels[i], args[i].to_json()}));
      }
      break;
    case Op::With:
      j.push_back(args[0].to_json());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        j.push_back(Json::array({labels[i], args[i + 1].to_json()}));
      }
      break;
    case Op::In:
      j.push_back(args[0].to_json());
      j.push_back(name);
      break;
    case Op::Exists:
      j.push_back(name);
      j.push_back(labels[0]);
      j.push_back(args[0].to_json());
      break;
    default:
      for (const auto& a : args) j.push_back(a.to_json());
  }
  return j;
}

inline Expr Expr::from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_string()) {
    throw ParseError("expression must be a non-empty array headed by an operator: " + j.dump());
  }
  Expr e;
  e.op = detail::op_from_name(j[0].get<std::string>());
  using detail::require_arity;
  switch (e.op) {
    case Op::Var:
      require_arity(j, 2);
      e.name = j[1].get<std::string>();
      break;
    case Op::Lit:
      require_arity(j, 2);
      e.literal = value_from_json(j[1]);
      break;
    case Op::Field:
      require_arity(j, 3);
      e.args.push_back(from_json(j[1]));
      e.name = j[2].get<std::string>();
      break;
    case Op::At:
      require_arity(j, 3);
      e.args.push_back(from_json(j[1]));
      e.index = j[2].get<std::int64_t>();
      break;
    case Op::Record:
      for (std::size_t i = 1; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != 2) throw ParseError("bad record entry " + j[i].dump());
        e.labels.push_back(j[i][0].get<std::string>());
        e.args.push_back(from_json(j[i][1]));
      }
      break;
    case Op::With:
      require_arity(j, 2, true);
      e.args.push_back(from_json(j[1]));
      for (std::size_t i = 2; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != 2) throw ParseError("bad with entry " + j[i].dump());
        e.labels.push_back(j[i][0].get<std::string>());
        e.args.push_back(from_json(j[i][1]));
      }
      break;
    case Op::In:
      require_arity(j, 3);
      e.args.push_back(from_json(j[1]));
      e.name = j[2].get<std::string>();
      break;
    case Op::Exists:
      require_arity(j, 4);
      e.name = j[1].get<std::string>();
      e.labels.push_back(j[2].get<std::string>());
      e.args.push_back(from_json(j[3]));
      break;
    case Op::If:
      require_arity(j, 4);
      for (std::size_t i = 1; i < j.size(); ++i) e.args.push_back(from_json(j[i]));
      break;
    case Op::Add: case Op::Sub: case Op::Eq: case Op::Ne:
    case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge:
      require_arity(j, 3);
      for (std::size_t i = 1; i < j.size(); ++i) e.args.push_back(from_json(j[i]));
      break;
    case Op::Not:
      require_arity(j, 2);
      e.args.push_back(from_json(j[1]));
      break;
    case Op::True: case Op::False:
      require_arity(j, 1);
      break;
    default:
      for (std::size_t i = 1; i < j.size(); ++i) e.args.push_back(from_json(j[i]));
  }
  return e;
}

/// Free variables (those not introduced by an enclosing `exists`).
inline void free_vars(const Expr& e, std::set<std::string>& out,
                      std::vector<std::string>* scope = nullptr) {
  std::vector<std::string> local;
  std::vector<std::string>& bound = scope ? *scope : local;
  if (e.op == Expr::Op::Var) {
    for (const auto& b : bound) {
      if (b == e.name) return;
    }
    out.insert(e.name);
    return;
  }
  if (e.op == Expr::Op::Exists) {
    bound.push_back(e.labels[0]);
    free_vars(e.args[0], out, &bound);
    bound.pop_back();
    return;
  }
  for (const auto& a : e.args) free_vars(a, out, &bound);
}

/// Places read through `in` / `exists`.
inline void referenced_places(const Expr& e, std::set<std::string>& out) {
  if (e.op == Expr::Op::In || e.op == Expr::Op::Exists) out.insert(e.name);
  for (const auto& a : e.args) referenced_places(a, out);
}

inline Expr rename_places(Expr e, const std::function<std::string(const std::string&)>& rn) {
  if (e.op == Expr::Op::In || e.op == Expr::Op::Exists) e.name = rn(e.name);
  for (auto& a : e.args) a = rename_places(std::move(a), rn);
  return e;
}

/**
 * Evaluates expressions against a variable binding and, for place reads, the
 * current marking. Evaluation is total on well-typed bindings; ill-typed use
 * raises EvalError.
 */
class Evaluator {
 public:
  Evaluator(const Vars& vars, const Marking* marking) : vars_(vars), marking_(marking) {}

  Value value(const Expr& e) {
    using Op = Expr::Op;
    switch (e.op) {
      case Op::Var:
        return lookup(e.name);
      case Op::Lit:
        return e.literal;
      case Op::Field: {
        Value of = value(e.args[0]);
        const Value* f = of.field(e.name);
        if (!f) throw EvalError("no field '" + e.name + "' in " + of.str());
        return *f;
      }
      case Op::At: {
        Value of = value(e.args[0]);
        if (!of.is_tuple() || e.index < 0 || static_cast<std::size_t>(e.index) >= of.items().size()) {
          throw EvalError("cannot take element " + std::to_string(e.index) + " of " + of.str());
        }
        return of.items()[static_cast<std::size_t>(e.index)];
      }
      case Op::Tuple: {
        std::vector<Value> items;
        items.reserve(e.args.size());
        for (const auto& a : e.args) items.push_back(value(a));
        return Value::tuple(std::move(items));
      }
      case Op::Record: {
        std::vector<std::pair<std::string, Value>> fields;
        for (std::size_t i = 0; i < e.args.size(); ++i) fields.emplace_back(e.labels[i], value(e.args[i]));
        return Value::record(std::move(fields));
      }
      case Op::Concat: {
        std::vector<Value> items;
        for (const auto& a : e.args) {
          Value part = value(a);
          if (!part.is_tuple()) throw EvalError("concat operand is not a tuple: " + part.str());
          items.insert(items.end(), part.items().begin(), part.items().end());
        }
        return Value::tuple(std::move(items));
      }
      case Op::With: {
        Value base = value(e.args[0]);
        if (!base.is_record()) throw EvalError("with on non-record " + base.str());
        for (std::size_t i = 0; i < e.labels.size(); ++i) {
          base = base.with_field(e.labels[i], value(e.args[i + 1]));
        }
        return base;
      }
      case Op::If:
        return test(e.args[0]) ? value(e.args[1]) : value(e.args[2]);
      case Op::Add:
      case Op::Sub: {
        Value a = value(e.args[0]);
        Value b = value(e.args[1]);
        if (!a.is_count() || !b.is_count()) throw EvalError("arithmetic on non-count values");
        return Value::count(e.op == Op::Add ? a.as_count() + b.as_count()
                                            : a.as_count() - b.as_count());
      }
      default:
        throw EvalError("predicate used where a value is expected: " + e.str());
    }
  }

  bool test(const Expr& e) {
    using Op = Expr::Op;
    switch (e.op) {
      case Op::True:
        return true;
      case Op::False:
        return false;
      case Op::Eq:
        return value(e.args[0]) == value(e.args[1]);
      case Op::Ne:
        return value(e.args[0]) != value(e.args[1]);
      case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: {
        Value a = value(e.args[0]);
        Value b = value(e.args[1]);
        if (a.kind() != b.kind()) throw EvalError("ordering across kinds: " + a.str() + " vs " + b.str());
        auto c = a <=> b;
        if (e.op == Op::Lt) return c < 0;
        if (e.op == Op::Le) return c <= 0;
        if (e.op == Op::Gt) return c > 0;
        return c >= 0;
      }
      case Op::And:
        for (const auto& a : e.args) {
          if (!test(a)) return false;
        }
        return true;
      case Op::Or:
        for (const auto& a : e.args) {
          if (test(a)) return true;
        }
        return false;
      case Op::Not:
        return !test(e.args[0]);
      case Op::In: {
        Value v = value(e.args[0]);
        for (const auto& [tok, n] : place_bag(e.name)) {
          if (tok.value == v) return true;
        }
        return false;
      }
      case Op::Exists:
        for (const auto& [tok, n] : place_bag(e.name)) {
          locals_.emplace_back(e.labels[0], &tok.value);
          const bool hit = test(e.args[0]);
          locals_.pop_back();
          if (hit) return true;
        }
        return false;
      default:
        throw EvalError("value used where a predicate is expected: " + e.str());
    }
  }

 private:
  const Value& lookup(const std::string& name) const {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
      if (it->first == name) return *it->second;
    }
    auto it = vars_.find(name);
    if (it == vars_.end()) throw EvalError("unbound variable '" + name + "'");
    return it->second;
  }

  const Marking::Bag& place_bag(const std::string& place) const {
    if (!marking_) throw EvalError("place read of '" + place + "' without a marking");
    return marking_->bag(place);
  }

  const Vars& vars_;
  const Marking* marking_;
  std::vector<std::pair<std::string, const Value*>> locals_;
};

inline Value evaluate(const Expr& e, const Vars& vars, const Marking* m = nullptr) {
  return Evaluator(vars, m).value(e);
}

inline bool holds(const Expr& e, const Vars& vars, const Marking* m = nullptr) {
  return Evaluator(vars, m).test(e);
}

/**
 * Input-arc pattern: binds a variable, matches a literal, ignores, or
 * destructures a record (named subset of fields) or a tuple (exact length).
 *
 * JSON: ["var", x]  ["_"]  ["lit", v]  ["record", [name, p]...]  ["tuple", p...]
 */
struct Pattern {
  enum class Kind : std::uint8_t { Bind, Wild, Lit, Record, Tuple };

  Kind kind = Kind::Wild;
  std::string name;
  Value literal;
  std::vector<std::string> labels;
  std::vector<Pattern> parts;

  static Pattern bind(std::string var) {
    Pattern p;
    p.kind = Kind::Bind;
    p.name = std::move(var);
    return p;
  }
  static Pattern wild() { return Pattern{}; }
  static Pattern lit(Value v) {
    Pattern p;
    p.kind = Kind::Lit;
    p.literal = std::move(v);
    return p;
  }
  static Pattern record(std::vector<std::pair<std::string, Pattern>> fields) {
    Pattern p;
    p.kind = Kind::Record;
    for (auto& [n, sub] : fields) {
      p.labels.push_back(std::move(n));
      p.parts.push_back(std::move(sub));
    }
    return p;
  }
  static Pattern tuple(std::vector<Pattern> items) {
    Pattern p;
    p.kind = Kind::Tuple;
    p.parts = std::move(items);
    return p;
  }

  /// Extends `vars` so that the pattern matches v. On failure `vars` may hold
  /// partial bindings; callers match on a copy.
  bool match(const Value& v, Vars& vars) const {
    switch (kind) {
      case Kind::Wild:
        return true;
      case Kind::Lit:
        return v == literal;
      case Kind::Bind: {
        auto [it, inserted] = vars.try_emplace(name, v);
        return inserted || it->second == v;
      }
      case Kind::Record:
        if (!v.is_record()) return false;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          const Value* f = v.field(labels[i]);
          if (!f || !parts[i].match(*f, vars)) return false;
        }
        return true;
      case Kind::Tuple:
        if (!v.is_tuple() || v.items().size() != parts.size()) return false;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          if (!parts[i].match(v.items()[i], vars)) return false;
        }
        return true;
    }
    return false;
  }

  /// Variable occurrences in order (duplicates kept so callers can detect them).
  void variables(std::vector<std::string>& out) const {
    if (kind == Kind::Bind) out.push_back(name);
    for (const auto& p : parts) p.variables(out);
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;

  Json to_json() const {
    switch (kind) {
      case Kind::Bind:
        return Json::array({"var", name});
      case Kind::Wild:
        return Json::array({"_"});
      case Kind::Lit:
        return Json::array({"lit", threatflow::to_json(literal)});
      case Kind::Record: {
        Json j = Json::array({"record"});
        for (std::size_t i = 0; i < parts.size(); ++i) j.push_back(Json::array({labels[i], parts[i].to_json()}));
        return j;
      }
      case Kind::Tuple: {
        Json j = Json::array({"tuple"});
        for (const auto& p : parts) j.push_back(p.to_json());
        return j;
      }
    }
    return nullptr;
  }

  static Pattern from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_string()) throw ParseError("bad pattern " + j.dump());
    const auto head = j[0].get<std::string>();
    if (head == "var" && j.size() == 2) return bind(j[1].get<std::string>());
    if (head == "_" && j.size() == 1) return wild();
    if (head == "lit" && j.size() == 2) return lit(value_from_json(j[1]));
    if (head == "record") {
      std::vector<std::pair<std::string, Pattern>> fields;
      for (std::size_t i = 1; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != 2) throw ParseError("bad record pattern entry " + j[i].dump());
        fields.emplace_back(j[i][0].get<std::string>(), from_json(j[i][1]));
      }
      return record(std::move(fields));
    }
    if (head == "tuple") {
      std::vector<Pattern> items;
      for (std::size_t i = 1; i < j.size(); ++i) items.push_back(from_json(j[i]));
      return tuple(std::move(items));
    }
    throw ParseError("bad pattern " + j.dump());
  }
};

}  // namespace threatflow

#endif  // THREATFLOW_EXPR_HPP_
