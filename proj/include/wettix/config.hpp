#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace wettix {

/**
 * Parsed config value. Numbers support + - * / ^, pi and the usual math
 * functions; other forms are identifiers, calls name(args, key=value),
 * lists [..] and tuples (..).
 */
struct Value {
  enum class Kind { Number, Ident, Call, List, Tuple };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string name;  // identifier or call name
  std::vector<Value> items;  // list/tuple elements or positional call args
  std::vector<std::pair<std::string, Value>> named;

  bool is_number() const { return kind == Kind::Number; }
  bool is_ident(const std::string& s) const { return kind == Kind::Ident && name == s; }
  double as_number(const std::string& ctx) const;
  long as_integer(const std::string& ctx) const;
  const std::string& as_ident(const std::string& ctx) const;
  // Named argument, falling back to positional index pos (or throwing).
  const Value* arg(const std::string& key, int pos = -1) const;
  double num_arg(const std::string& key, int pos, const std::string& ctx) const;
  double num_arg_or(const std::string& key, double fallback, const std::string& ctx) const;
  void check_args(const std::vector<std::string>& allowed, const std::string& ctx) const;
};

Value parse_value(const std::string& text);

/// INI-style sections of raw key = value text, in file order.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  // Applies "section.key=value"; the key must be known.
  void set_override(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& raw);
  bool has(const std::string& section, const std::string& key) const;
  const std::string& raw(const std::string& section, const std::string& key) const;
  Value get(const std::string& section, const std::string& key) const;
  // Rejects sections and keys outside the schema.
  void validate_keys() const;
  std::string snapshot() const;

  static const std::map<std::string, std::vector<std::string>>& schema();

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
  std::vector<std::string> overrides_;
};

}  // namespace wettix
