#include "wettix/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wettix/errors.hpp"

namespace wettix {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Value parse() {
    Value v = expr();
    ws();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ConfigError("cannot parse value '" + s_ + "': " + msg);
  }
  void ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  static Value num(double x) {
    Value v;
    v.kind = Value::Kind::Number;
    v.number = x;
    return v;
  }
  double need_number(const Value& v) {
    if (!v.is_number()) fail("arithmetic on a non-number");
    return v.number;
  }

  Value expr() {
    Value a = term();
    for (;;) {
      if (eat('+')) a = num(need_number(a) + need_number(term()));
      else if (eat('-')) a = num(need_number(a) - need_number(term()));
      else return a;
    }
  }
  Value term() {
    Value a = unary();
    for (;;) {
      if (eat('*')) a = num(need_number(a) * need_number(unary()));
      else if (eat('/')) a = num(need_number(a) / need_number(unary()));
      else return a;
    }
  }
  Value unary() {
    if (eat('-')) return num(-need_number(unary()));
    if (eat('+')) return num(need_number(unary()));
    Value a = atom();
    if (eat('^')) return num(std::pow(need_number(a), need_number(unary())));
    return a;
  }
  Value atom() {
    ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double x = 0;
      try {
        x = std::stod(s_.substr(pos_), &used);
      } catch (...) {
        fail("bad number");
      }
      pos_ += used;
      return num(x);
    }
    if (c == '[') {
      ++pos_;
      Value v;
      v.kind = Value::Kind::List;
      if (!eat(']')) {
        do v.items.push_back(expr());
        while (eat(','));
        expect(']');
      }
      return v;
    }
    if (c == '(') {
      ++pos_;
      Value first = expr();
      if (eat(')')) return first;
      Value v;
      v.kind = Value::Kind::Tuple;
      v.items.push_back(first);
      while (eat(',')) v.items.push_back(expr());
      expect(')');
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t b = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '_' || s_[pos_] == '-' || s_[pos_] == '.'))
        ++pos_;
      std::string id = s_.substr(b, pos_ - b);
      if (eat('(')) return call(id);
      if (id == "pi") return num(std::numbers::pi);
      if (id == "inf") return num(INFINITY);
      Value v;
      v.kind = Value::Kind::Ident;
      v.name = id;
      return v;
    }
    if (c == '"') {
      size_t e = s_.find('"', pos_ + 1);
      if (e == std::string::npos) fail("unterminated string");
      Value v;
      v.kind = Value::Kind::Ident;
      v.name = s_.substr(pos_ + 1, e - pos_ - 1);
      pos_ = e + 1;
      return v;
    }
    fail(std::string("unexpected '") + c + "'");
  }
  Value call(const std::string& id) {
    Value v;
    v.kind = Value::Kind::Call;
    v.name = id;
    if (!eat(')')) {
      do {
        ws();
        size_t save = pos_;
        // key = value ?
        size_t b = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        std::string key = s_.substr(b, pos_ - b);
        ws();
        if (!key.empty() && pos_ < s_.size() && s_[pos_] == '=') {
          ++pos_;
          v.named.emplace_back(key, expr());
        } else {
          pos_ = save;
          v.items.push_back(expr());
        }
      } while (eat(','));
      expect(')');
    }
    static const std::map<std::string, double (*)(double)> math = {
        {"sqrt", [](double x) { return std::sqrt(x); }}, {"sin", [](double x) { return std::sin(x); }},
        {"cos", [](double x) { return std::cos(x); }},   {"exp", [](double x) { return std::exp(x); }},
        {"log", [](double x) { return std::log(x); }},   {"abs", [](double x) { return std::abs(x); }}};
    auto it = math.find(id);
    if (it != math.end()) {
      if (v.items.size() != 1 || !v.named.empty()) fail(id + " takes one argument");
      return num(it->second(need_number(v.items[0])));
    }
    return v;
  }

  const std::string& s_;
  size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

double Value::as_number(const std::string& ctx) const {
  if (!is_number()) throw ConfigError(ctx + ": expected a number");
  if (!std::isfinite(number)) throw ConfigError(ctx + ": value is not finite");
  return number;
}

long Value::as_integer(const std::string& ctx) const {
  const double x = as_number(ctx);
  if (x != std::floor(x)) throw ConfigError(ctx + ": expected an integer");
  return long(x);
}

const std::string& Value::as_ident(const std::string& ctx) const {
  if (kind != Kind::Ident) throw ConfigError(ctx + ": expected a word");
  return name;
}

const Value* Value::arg(const std::string& key, int pos) const {
  for (const auto& [k, v] : named)
    if (k == key) return &v;
  if (pos >= 0 && size_t(pos) < items.size()) return &items[size_t(pos)];
  return nullptr;
}

double Value::num_arg(const std::string& key, int pos, const std::string& ctx) const {
  const Value* v = arg(key, pos);
  if (!v) throw ConfigError(ctx + ": " + name + "() needs argument '" + key + "'");
  return v->as_number(ctx + ": " + name + "(" + key + ")");
}

double Value::num_arg_or(const std::string& key, double fallback, const std::string& ctx) const {
  const Value* v = arg(key);
  return v ? v->as_number(ctx + ": " + name + "(" + key + ")") : fallback;
}

void Value::check_args(const std::vector<std::string>& allowed, const std::string& ctx) const {
  for (const auto& [k, v] : named) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == k;
    if (!ok) throw ConfigError(ctx + ": " + name + "() has no argument '" + k + "'");
  }
}

Value parse_value(const std::string& text) { return Parser(text).parse(); }

const std::map<std::string, std::vector<std::string>>& Config::schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"grid", {"n"}},
      {"time", {"dt", "T", "levels", "snapshots"}},
      {"tensions", {"sigma_VL", "sigma_LS", "sigma_VS"}},
      {"mobilities", {"m_VL", "m_LS", "m_VS", "m_VS_alt"}},
      {"kernel", {"mode", "R", "R1", "R2", "q", "time_scale"}},
      {"shapes", {"droplet", "substrate", "area"}},
      {"solver",
       {"comparison", "selection", "band", "mu_tol", "mu_lo", "mu_hi", "reference", "ft_M",
        "ft_eta", "ft_dt", "n_cmp", "redistance", "redistance_every", "threads", "seed"}},
      {"output", {"dir", "name", "fields", "contours", "energy"}}};
  return s;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value in a section");
    c.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  c.validate_keys();
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& section, const std::string& key, const std::string& raw) {
  for (auto& [name, kv] : sections_) {
    if (name != section) continue;
    for (auto& [k, v] : kv)
      if (k == key) {
        v = raw;
        return;
      }
    kv.emplace_back(key, raw);
    return;
  }
  sections_.push_back({section, {{key, raw}}});
}

void Config::set_override(const std::string& a) {
  const size_t dot = a.find('.'), eq = a.find('=');
  if (dot == std::string::npos || eq == std::string::npos || dot > eq)
    throw ConfigError("override '" + a + "' must look like section.key=value");
  const std::string section = trim(a.substr(0, dot)), key = trim(a.substr(dot + 1, eq - dot - 1));
  set(section, key, trim(a.substr(eq + 1)));
  validate_keys();
  overrides_.push_back(a);
}

bool Config::has(const std::string& section, const std::string& key) const {
  for (const auto& [name, kv] : sections_)
    if (name == section)
      for (const auto& [k, v] : kv)
        if (k == key) return true;
  return false;
}

const std::string& Config::raw(const std::string& section, const std::string& key) const {
  for (const auto& [name, kv] : sections_)
    if (name == section)
      for (const auto& [k, v] : kv)
        if (k == key) return v;
  throw ConfigError("missing config key " + section + "." + key);
}

Value Config::get(const std::string& section, const std::string& key) const {
  try {
    return parse_value(raw(section, key));
  } catch (const ConfigError& e) {
    throw ConfigError(section + "." + key + ": " + e.what());
  }
}

void Config::validate_keys() const {
  const auto& s = schema();
  for (const auto& [name, kv] : sections_) {
    auto it = s.find(name);
    if (it == s.end()) throw ConfigError("unknown config section [" + name + "]");
    for (const auto& [k, v] : kv) {
      bool ok = false;
      for (const auto& allowed : it->second) ok = ok || allowed == k;
      if (!ok) throw ConfigError("unknown config key " + name + "." + k);
    }
  }
}

std::string Config::snapshot() const {
  std::ostringstream os;
  for (const auto& o : overrides_) os << "# override " << o << '\n';
  for (const auto& [name, kv] : sections_) {
    os << '[' << name << "]\n";
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
    os << '\n';
  }
  return os.str();
}

}  // namespace wettix
