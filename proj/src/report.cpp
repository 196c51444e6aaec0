#include "monosphere/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace monosphere::report {

std::string format_double(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

Json Json::array() {
  Json j;
  j.type_ = Type::Array;
  return j;
}

Json Json::object() {
  Json j;
  j.type_ = Type::Object;
  return j;
}

Json& Json::operator[](const std::string& key) {
  if (type_ == Type::Null) type_ = Type::Object;
  for (auto& [k, v] : obj_)
    if (k == key) return v;
  obj_.emplace_back(key, Json());
  return obj_.back().second;
}

void Json::push_back(Json v) {
  if (type_ == Type::Null) type_ = Type::Array;
  arr_.push_back(std::move(v));
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
}

}  // namespace

void Json::write(std::string& out, int indent, int depth) const {
  const std::string pad(size_t(indent) * size_t(depth + 1), ' ');
  const std::string pad0(size_t(indent) * size_t(depth), ' ');
  switch (type_) {
    case Type::Null: out += "null"; break;
    case Type::Bool: out += bool_ ? "true" : "false"; break;
    case Type::Int: out += std::to_string(int_); break;
    case Type::Double: {
      if (std::isfinite(double_)) {
        out += format_double(double_);
      } else {
        out += '"';
        out += std::isnan(double_) ? "nan" : (double_ > 0 ? "inf" : "-inf");
        out += '"';
      }
      break;
    }
    case Type::String: write_escaped(out, str_); break;
    case Type::Array: {
      if (arr_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (size_t i = 0; i < arr_.size(); ++i) {
        out += pad;
        arr_[i].write(out, indent, depth + 1);
        if (i + 1 < arr_.size()) out += ',';
        out += '\n';
      }
      out += pad0 + "]";
      break;
    }
    case Type::Object: {
      if (obj_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (size_t i = 0; i < obj_.size(); ++i) {
        out += pad;
        write_escaped(out, obj_[i].first);
        out += ": ";
        obj_[i].second.write(out, indent, depth + 1);
        if (i + 1 < obj_.size()) out += ',';
        out += '\n';
      }
      out += pad0 + "}";
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += '\n';
  return out;
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw InvalidParams("config line " + std::to_string(line) + ": " + msg);
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool seen_tau = false;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    auto trim = [](std::string s) {
      const char* ws = " \t\r";
      s.erase(0, s.find_first_not_of(ws));
      if (auto p = s.find_last_not_of(ws); p != std::string::npos) s.erase(p + 1);
      else s.clear();
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) parse_fail(lineno, "empty key or value");
    auto as_double = [&](const std::string& v) {
      try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) parse_fail(lineno, "trailing characters in number '" + v + "'");
        return d;
      } catch (const std::invalid_argument&) {
        parse_fail(lineno, "not a number: '" + v + "'");
      } catch (const std::out_of_range&) {
        parse_fail(lineno, "number out of range: '" + v + "'");
      }
    };
    auto as_int = [&](const std::string& v) {
      try {
        size_t used = 0;
        long d = std::stol(v, &used);
        if (used != v.size()) parse_fail(lineno, "trailing characters in integer '" + v + "'");
        return int(d);
      } catch (const std::invalid_argument&) {
        parse_fail(lineno, "not an integer: '" + v + "'");
      } catch (const std::out_of_range&) {
        parse_fail(lineno, "integer out of range: '" + v + "'");
      }
    };
    if (key == "r") cfg.r = as_double(val);
    else if (key == "mass") cfg.mass = as_double(val);
    else if (key == "alpha") cfg.alpha = as_double(val);
    else if (key == "hbar") cfg.hbar = as_double(val);
    else if (key == "twice_l") cfg.twice_l = as_int(val);
    else if (key == "twice_j_max") cfg.twice_j_max = as_int(val);
    else if (key == "tau_override") { cfg.tau_override = as_double(val); seen_tau = true; }
    else if (key == "seed") cfg.seed = std::uint64_t(std::stoull(val));
    else if (key.rfind("tol.", 0) == 0) cfg.tolerances[key.substr(4)] = as_double(val);
    else parse_fail(lineno, "unknown key '" + key + "'");
  }
  if (seen_tau && !(*cfg.tau_override > 0.0))
    throw InvalidParams("config: tau_override must be positive");
  // validates positivity and twist consistency
  (void)cfg.params();
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParams("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

std::string RunConfig::canonical() const {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  kv("r", format_double(r));
  kv("mass", format_double(mass));
  kv("alpha", format_double(alpha));
  kv("hbar", format_double(hbar));
  kv("twice_l", std::to_string(twice_l));
  kv("twice_j_max", std::to_string(twice_j_max));
  if (tau_override) kv("tau_override", format_double(*tau_override));
  kv("seed", std::to_string(seed));
  for (const auto& [k, v] : tolerances) kv("tol." + k, format_double(v));
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)hash());
  return buf;
}

classical::ModelParams RunConfig::params() const {
  auto p = classical::params_from_twist(twice_l, r, mass, alpha, hbar);
  if (twice_j_max < std::abs(twice_l))
    throw InvalidParams("config: twice_j_max < |twice_l|");
  if ((twice_j_max - std::abs(twice_l)) % 2 != 0)
    throw InvalidParams("config: twice_j_max and twice_l parities mismatch");
  if (tau_override) {
    // tau reparameterizes alpha so tau = hbar/(m alpha r^2) stays an identity
    p.tau = *tau_override;
    p.alpha = hbar / (mass * *tau_override * r * r);
  }
  return p;
}

double RunConfig::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("write_file_atomic: cannot open '" + tmp + "'");
    out << content;
    if (!out) throw NumericalError("write_file_atomic: write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw NumericalError("write_file_atomic: rename failed for '" + path + "'");
}

}  // namespace monosphere::report
