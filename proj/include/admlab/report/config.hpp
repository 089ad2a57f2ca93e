#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace admlab::report {

/// Invalid configuration; `line` is 1-based (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& msg)
      : std::runtime_error(msg), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Source lines of the scenario objects in a config file and of the keys
/// inside them. Works on the raw text with a small tokenizer that only
/// tracks strings and bracket depth; the text is assumed to be valid JSON.
class SourceMap {
 public:
  struct ObjectLines {
    std::size_t line = 0;
    std::map<std::string, std::size_t> keys;         ///< direct keys of the scenario object
    std::map<std::string, std::size_t> param_keys;   ///< keys of its "params" object
  };

  SourceMap() = default;
  explicit SourceMap(const std::string& text) { scan(text); }

  [[nodiscard]] std::size_t scenario_line(std::size_t i) const {
    return i < objects_.size() ? objects_[i].line : 0;
  }
  [[nodiscard]] std::size_t key_line(std::size_t i, const std::string& key) const {
    if (i >= objects_.size()) return 0;
    auto it = objects_[i].keys.find(key);
    return it == objects_[i].keys.end() ? objects_[i].line : it->second;
  }
  [[nodiscard]] std::size_t param_line(std::size_t i, const std::string& key) const {
    if (i >= objects_.size()) return 0;
    auto it = objects_[i].param_keys.find(key);
    return it == objects_[i].param_keys.end() ? key_line(i, "params") : it->second;
  }
  [[nodiscard]] std::size_t top_key_line(const std::string& key) const {
    auto it = top_.find(key);
    return it == top_.end() ? 1 : it->second;
  }

 private:
  void scan(const std::string& s) {
    std::size_t line = 1;
    int depth = 0;
    int scenarios_depth = -1;  // depth inside the "scenarios" array
    int params_depth = -1;     // depth inside the current "params" object
    std::string last_string;
    bool last_was_key_candidate = false;
    std::size_t last_string_line = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (c == '\n') {
        ++line;
        continue;
      }
      if (c == '"') {
        std::string str;
        const std::size_t start_line = line;
        for (++i; i < s.size() && s[i] != '"'; ++i) {
          if (s[i] == '\\' && i + 1 < s.size()) {
            str.push_back(s[++i]);
            continue;
          }
          if (s[i] == '\n') ++line;
          str.push_back(s[i]);
        }
        last_string = std::move(str);
        last_string_line = start_line;
        last_was_key_candidate = true;
        continue;
      }
      if (c == ':' && last_was_key_candidate) {
        if (depth == 1) top_[last_string] = last_string_line;
        if (scenarios_depth >= 0 && depth == scenarios_depth + 1 && !objects_.empty())
          objects_.back().keys[last_string] = last_string_line;
        if (params_depth >= 0 && depth == params_depth && !objects_.empty())
          objects_.back().param_keys[last_string] = last_string_line;
        pending_key_ = last_string;
        pending_depth_ = depth;
        last_was_key_candidate = false;
        continue;
      }
      if (c == '[' || c == '{') {
        ++depth;
        if (c == '[' && depth == 2 && pending_depth_ == 1 && pending_key_ == "scenarios") scenarios_depth = depth;
        if (c == '{' && scenarios_depth >= 0 && depth == scenarios_depth + 1) objects_.push_back({line, {}, {}});
        if (c == '{' && scenarios_depth >= 0 && depth == scenarios_depth + 2 && pending_depth_ == scenarios_depth + 1 &&
            pending_key_ == "params")
          params_depth = depth;
        pending_key_.clear();
      } else if (c == ']' || c == '}') {
        if (depth == params_depth) params_depth = -1;
        if (depth == scenarios_depth) scenarios_depth = -1;
        --depth;
      }
      if (c != ' ' && c != '\t' && c != '\r') last_was_key_candidate = false;
    }
  }

  std::vector<ObjectLines> objects_;
  std::map<std::string, std::size_t> top_;
  std::string pending_key_;
  int pending_depth_ = -1;
};

/// Typed access to a scenario's "params" object. Every read marks the key as
/// used; finish() rejects keys that no read consumed.
class ParamReader {
 public:
  ParamReader(const nlohmann::json& params, const SourceMap& map, std::size_t scenario)
      : p_(params), map_(map), idx_(scenario) {
    if (!p_.is_object()) throw ConfigError(map_.key_line(idx_, "params"), "\"params\" must be an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return p_.contains(key); }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    const auto* v = fetch(key, def.has_value());
    return v ? to_number(key, *v) : *def;
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) {
    const auto* v = fetch(key, def.has_value());
    if (!v) return *def;
    if (!v->is_array()) return {to_number(key, *v)};
    std::vector<double> out;
    for (const auto& e : *v) out.push_back(to_number(key, e));
    if (out.empty()) fail(key, "list must not be empty");
    return out;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = std::nullopt) {
    const auto* v = fetch(key, def.has_value());
    if (!v) return *def;
    if (!v->is_number_integer()) fail(key, "expected an integer");
    return v->get<std::int64_t>();
  }

  std::vector<std::int64_t> integers(const std::string& key,
                                     std::optional<std::vector<std::int64_t>> def = std::nullopt) {
    const auto* v = fetch(key, def.has_value());
    if (!v) return *def;
    std::vector<std::int64_t> out;
    auto one = [&](const nlohmann::json& e) {
      if (!e.is_number_integer()) fail(key, "expected integers");
      out.push_back(e.get<std::int64_t>());
    };
    if (v->is_array()) {
      for (const auto& e : *v) one(e);
    } else {
      one(*v);
    }
    if (out.empty()) fail(key, "list must not be empty");
    return out;
  }

  std::string text(const std::string& key, std::optional<std::string> def = std::nullopt) {
    const auto* v = fetch(key, def.has_value());
    if (!v) return *def;
    if (!v->is_string()) fail(key, "expected a string");
    return v->get<std::string>();
  }

  bool flag(const std::string& key, bool def) {
    const auto* v = fetch(key, true);
    if (!v) return def;
    if (!v->is_boolean()) fail(key, "expected true or false");
    return v->get<bool>();
  }

  /// Throws a ConfigError anchored at `key` (or at "params" when absent).
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(map_.param_line(idx_, key), "parameter \"" + key + "\": " + what);
  }

  void require(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

  void finish() const {
    for (const auto& [k, v] : p_.items())
      if (!used_.count(k)) fail(k, "unknown parameter for this kind");
  }

 private:
  const nlohmann::json* fetch(const std::string& key, bool optional) {
    used_.insert(key);
    if (!p_.contains(key)) {
      if (!optional) fail(key, "missing required parameter");
      return nullptr;
    }
    return &p_.at(key);
  }

  double to_number(const std::string& key, const nlohmann::json& v) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    fail(key, "expected a number (or \"inf\")");
  }

  const nlohmann::json& p_;
  const SourceMap& map_;
  std::size_t idx_;
  std::set<std::string> used_;
};

}  // namespace admlab::report
