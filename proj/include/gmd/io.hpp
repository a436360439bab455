#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmd/bounds.hpp"
#include "gmd/core_model.hpp"
#include "gmd/monte_carlo.hpp"

namespace gmd::io {

using nlohmann::json;

namespace detail {

inline bool finite_number(const json& j) { return j.is_number() && std::isfinite(j.get<double>()); }

}  // namespace detail

/// Parses {"family": "normal"|"student-t", "nu": number?, "mu": [...],
/// "sigma": [[...], ...]} (row-major). Unknown keys and non-finite numbers are
/// errors; all problems are collected into one ValidationError. Shape and
/// definiteness are left to validate().
inline DistributionSpec parse_spec(const json& j) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw ValidationError({"spec must be a JSON object"});
  static const std::set<std::string> known = {"family", "nu", "mu", "sigma"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) errors.push_back("unknown key \"" + key + "\"");
  }
  DistributionSpec spec;
  if (!j.contains("family") || !j["family"].is_string()) {
    errors.push_back("\"family\" must be \"normal\" or \"student-t\"");
  } else {
    const auto fam = j["family"].get<std::string>();
    if (fam == "normal") {
      spec.family = Family::normal();
      if (j.contains("nu")) errors.push_back("\"nu\" is only valid for the student-t family");
    } else if (fam == "student-t") {
      if (!j.contains("nu") || !detail::finite_number(j["nu"])) {
        errors.push_back("student-t family requires a finite numeric \"nu\"");
      } else {
        spec.family = Family::student_t(j["nu"].get<double>());
      }
    } else {
      errors.push_back("unknown family \"" + fam + "\"");
    }
  }
  if (!j.contains("mu") || !j["mu"].is_array()) {
    errors.push_back("\"mu\" must be an array of numbers");
  } else {
    for (const auto& v : j["mu"]) {
      if (!detail::finite_number(v)) {
        errors.push_back("\"mu\" entries must be finite numbers");
        break;
      }
      spec.mu.push_back(v.get<double>());
    }
  }
  if (!j.contains("sigma") || !j["sigma"].is_array()) {
    errors.push_back("\"sigma\" must be an array of rows");
  } else {
    const auto& rows = j["sigma"];
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 || !rows[0].is_array() ? 0 : rows[0].size();
    Matrix m(r, c);
    bool ok = true;
    for (std::size_t a = 0; a < r && ok; ++a) {
      if (!rows[a].is_array() || rows[a].size() != c) {
        errors.push_back("\"sigma\" rows must be arrays of equal length");
        ok = false;
        break;
      }
      for (std::size_t b = 0; b < c; ++b) {
        if (!detail::finite_number(rows[a][b])) {
          errors.push_back("\"sigma\" entries must be finite numbers");
          ok = false;
          break;
        }
        m(a, b) = rows[a][b].get<double>();
      }
    }
    spec.sigma = std::move(m);
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return spec;
}

inline DistributionSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("malformed JSON: ") + e.what()});
  }
  return parse_spec(j);
}

inline DistributionSpec parse_spec(const char* text) { return parse_spec(std::string(text)); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError({"cannot read spec file \"" + path + "\""});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json to_json(const DistributionSpec& spec) {
  json j;
  j["family"] = spec.family.name();
  if (spec.family.is_student()) j["nu"] = spec.family.nu;
  j["mu"] = spec.mu;
  json rows = json::array();
  for (std::size_t a = 0; a < spec.sigma.rows(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < spec.sigma.cols(); ++b) row.push_back(spec.sigma(a, b));
    rows.push_back(row);
  }
  j["sigma"] = rows;
  return j;
}

/// Pair indices are reported 1-based.
inline json to_json(const GmdResult& r) {
  json j;
  j["value"] = r.value;
  j["method"] = method_name(r.method);
  json pairs = json::array();
  for (const auto& c : r.pair_contributions) {
    pairs.push_back({{"i", c.i + 1}, {"j", c.j + 1}, {"value", c.value}});
  }
  j["pair_contributions"] = pairs;
  j["diagnostics"] = r.diagnostics;
  if (!r.labels.empty()) j["labels"] = r.labels;
  return j;
}

inline json to_json(const BoundReport& b) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["theorem1"] = opt(b.theorem1);
  j["sqrt_one_minus_rho"] = opt(b.sqrt_one_minus_rho);
  j["gmd2_sqrt2"] = opt(b.gmd2_sqrt2);
  j["cp_bound"] = b.cp_bound ? json{{"p", b.cp_bound->p}, {"value", b.cp_bound->value}} : json(nullptr);
  j["exact_gmd"] = opt(b.exact_gmd);
  j["dominated"] = b.dominated();
  return j;
}

/// Header x1,...,xn then one row per draw, 17 significant digits.
inline void write_csv(std::ostream& out, const Matrix& samples) {
  for (std::size_t k = 0; k < samples.cols(); ++k) {
    out << (k ? "," : "") << 'x' << (k + 1);
  }
  out << '\n';
  char buf[32];
  for (std::size_t d = 0; d < samples.rows(); ++d) {
    for (std::size_t k = 0; k < samples.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", samples(d, k));
      out << (k ? "," : "") << buf;
    }
    out << '\n';
  }
}

inline std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace gmd::io
