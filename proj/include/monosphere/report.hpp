#pragma once

// Deterministic report emission and run configuration: canonical key=value
// config files, FNV-1a config hashes, an insertion-ordered JSON writer with
// fixed 17-significant-digit floats, and atomic file output.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "monosphere/classical.hpp"

namespace monosphere::report {

inline constexpr const char* kVersion = "monosphere 0.1.0";

std::string format_double(double v, int significant = 17);

// Insertion-ordered JSON value; doubles rendered at 17 significant digits.
class Json {
 public:
  enum class Type { Null, Bool, Int, Double, String, Array, Object };

  Json() : type_(Type::Null) {}
  Json(bool b) : type_(Type::Bool), bool_(b) {}
  Json(int v) : type_(Type::Int), int_(v) {}
  Json(long v) : type_(Type::Int), int_(v) {}
  Json(std::uint64_t v) : type_(Type::Int), int_(std::int64_t(v)) {}
  Json(double v) : type_(Type::Double), double_(v) {}
  Json(const char* s) : type_(Type::String), str_(s) {}
  Json(std::string s) : type_(Type::String), str_(std::move(s)) {}

  static Json array();
  static Json object();

  Json& operator[](const std::string& key);  // object access, inserts
  void push_back(Json v);                    // array append
  std::string dump(int indent = 2) const;

 private:
  void write(std::string& out, int indent, int depth) const;

  Type type_;
  bool bool_{false};
  std::int64_t int_{0};
  double double_{0.0};
  std::string str_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;
};

// Flat key=value run configuration.
struct RunConfig {
  double r{1.0};
  double mass{1.0};
  double alpha{1.0};
  double hbar{1.0};
  int twice_l{0};
  int twice_j_max{40};
  std::optional<double> tau_override;
  std::uint64_t seed{0};
  std::map<std::string, double> tolerances;  // keys without the "tol." prefix

  static RunConfig parse_string(const std::string& text);  // line-anchored errors
  static RunConfig parse_file(const std::string& path);

  std::string canonical() const;
  std::uint64_t hash() const;  // FNV-1a 64 over the canonical form
  std::string hash_hex() const;

  classical::ModelParams params() const;  // validates, applies tau_override
  double tolerance(const std::string& name, double fallback) const;
};

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace monosphere::report
