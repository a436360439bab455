#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <string>

#include "gmd/gmd.hpp"
#include "gmd/io.hpp"

namespace gmd::cli {

enum class Subcommand { ClosedForm, Bound, Estimate, Verify, QuantileGmd };
enum class OutputFormat { Json, Text };

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitVerifyMismatch = 3;

struct CliRequest {
  Subcommand subcommand = Subcommand::ClosedForm;
  std::string spec_path;
  std::optional<double> nu;
  std::uint64_t draws = 1'000'000;
  std::uint64_t seed = MonteCarloConfig{}.seed;
  unsigned chunks = MonteCarloConfig{}.chunks;
  double abs_tol = QuadratureConfig{}.abs_tol;
  double rel_tol = QuadratureConfig{}.rel_tol;
  OutputFormat output = OutputFormat::Json;
  std::optional<std::string> dump;
  /// verify: allowed |closed - quadrature|.
  double quadrature_tolerance = 1e-6;
  /// verify: allowed |closed - monte carlo| in standard errors.
  double monte_carlo_se = 3.0;
  /// quantile-gmd: 1-based coordinate whose marginal is used.
  std::size_t index = 1;
};

namespace detail {

using io::json;

inline void emit(std::ostream& out, const json& j, OutputFormat fmt) {
  if (fmt == OutputFormat::Json) {
    out << j.dump(2) << '\n';
    return;
  }
  std::function<void(const json&, const std::string&)> walk = [&](const json& v, const std::string& prefix) {
    if (v.is_object()) {
      for (const auto& [k, x] : v.items()) walk(x, prefix.empty() ? k : prefix + "." + k);
    } else if (v.is_array()) {
      for (std::size_t a = 0; a < v.size(); ++a) walk(v[a], prefix + "[" + std::to_string(a) + "]");
    } else {
      out << std::left << std::setw(40) << prefix << ' ';
      if (v.is_number_float()) out << io::format17(v.get<double>());
      else if (v.is_string()) out << v.get<std::string>();
      else out << v.dump();
      out << '\n';
    }
  };
  walk(j, "");
}

inline MonteCarloConfig mc_config(const CliRequest& req) {
  MonteCarloConfig cfg;
  cfg.draws = req.draws;
  cfg.seed = req.seed;
  cfg.chunks = req.chunks;
  return cfg;
}

inline QuadratureConfig quad_config(const CliRequest& req) {
  QuadratureConfig cfg;
  cfg.abs_tol = req.abs_tol;
  cfg.rel_tol = req.rel_tol;
  cfg.validate();
  return cfg;
}

inline DistributionSpec load_spec(const CliRequest& req) {
  DistributionSpec spec = io::parse_spec(io::read_file(req.spec_path));
  if (req.nu) spec.family = Family::student_t(*req.nu);
  return spec;
}

inline json verify_report(const ValidatedSpec& spec, const CliRequest& req, bool& pass) {
  const GmdResult closed = closed_form_gmd(spec);
  const GmdResult quad = gmd_theorem2(spec, quad_config(req));
  const GmdEstimate mc = estimate_gmd(spec, mc_config(req));
  const double quad_diff = std::fabs(closed.value - quad.value);
  const double mc_z = mc.std_error > 0.0 ? std::fabs(closed.value - mc.value) / mc.std_error
                                         : (closed.value == mc.value ? 0.0 : INFINITY);
  pass = quad_diff <= req.quadrature_tolerance && mc_z <= req.monte_carlo_se;
  json j;
  j["closed_form"] = closed.value;
  j["quadrature"] = quad.value;
  j["monte_carlo"] = mc.value;
  j["monte_carlo_std_error"] = mc.std_error;
  j["abs_diff_quadrature"] = quad_diff;
  j["monte_carlo_se_units"] = mc_z;
  j["quadrature_tolerance"] = req.quadrature_tolerance;
  j["monte_carlo_tolerance_se"] = req.monte_carlo_se;
  j["quadrature_error_estimate"] = quad.diagnostics.at("abs_error");
  json pairs = json::array();
  for (std::size_t k = 0; k < closed.pair_contributions.size(); ++k) {
    const auto& c = closed.pair_contributions[k];
    pairs.push_back({{"i", c.i + 1},
                     {"j", c.j + 1},
                     {"closed_form", c.value},
                     {"quadrature", quad.pair_contributions[k].value},
                     {"monte_carlo", mc.pair_means[k].value}});
  }
  j["pairs"] = pairs;
  if (pairwise_exchangeable(spec)) j["exchangeable_skew"] = gmd_exchangeable_skew(spec, quad_config(req));
  j["pass"] = pass;
  return j;
}

inline void verify_text(std::ostream& out, const json& j) {
  auto row = [&](const std::string& method, double value, const std::string& disc, const std::string& tol) {
    out << std::left << std::setw(14) << method << std::setw(26) << io::format17(value) << std::setw(26)
        << disc << tol << '\n';
  };
  out << std::left << std::setw(14) << "method" << std::setw(26) << "value" << std::setw(26)
      << "discrepancy" << "tolerance" << '\n';
  row("closed-form", j["closed_form"].get<double>(), "-", "-");
  row("quadrature", j["quadrature"].get<double>(), io::format17(j["abs_diff_quadrature"].get<double>()),
      io::format17(j["quadrature_tolerance"].get<double>()) + " abs");
  row("monte-carlo", j["monte_carlo"].get<double>(),
      io::format17(j["monte_carlo_se_units"].get<double>()) + " SE",
      io::format17(j["monte_carlo_tolerance_se"].get<double>()) + " SE");
  out << "status: " << (j["pass"].get<bool>() ? "PASS" : "FAIL") << '\n';
}

// Univariate law for quantile-gmd: {"law": ..., parameters}.
inline QuantileFunction parse_univariate(const json& j, double& mean) {
  static const std::set<std::string> known = {"law", "a", "b", "rate", "location", "scale", "nu"};
  std::vector<std::string> errors;
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) errors.push_back("unknown key \"" + key + "\"");
  }
  if (!errors.empty()) throw ValidationError(errors);
  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ValidationError({std::string("\"") + key + "\" must be a number"});
    return j[key].get<double>();
  };
  const std::string law = j["law"].is_string() ? j["law"].get<std::string>() : "";
  if (law == "uniform") {
    const double a = num("a", 0.0), b = num("b", 1.0);
    mean = 0.5 * (a + b);
    return uniform_quantile(a, b);
  }
  if (law == "exponential") {
    const double rate = num("rate", 1.0);
    mean = 1.0 / rate;
    return exponential_quantile(rate);
  }
  if (law == "normal") {
    mean = num("location", 0.0);
    return normal_quantile(mean, num("scale", 1.0));
  }
  if (law == "student-t") {
    mean = num("location", 0.0);
    return student_quantile(mean, num("scale", 1.0), DegreesOfFreedom(num("nu", NAN)));
  }
  throw ValidationError({"\"law\" must be one of uniform, exponential, normal, student-t"});
}

inline json quantile_report(const CliRequest& req) {
  const json j = [&] {
    try {
      return json::parse(io::read_file(req.spec_path));
    } catch (const json::parse_error& e) {
      throw ValidationError({std::string("malformed JSON: ") + e.what()});
    }
  }();
  double mean = 0.0;
  QuantileFunction q;
  std::string source;
  if (j.is_object() && j.contains("law")) {
    q = parse_univariate(j, mean);
    source = j["law"].get<std::string>();
  } else {
    DistributionSpec raw = io::parse_spec(j);
    if (req.nu) raw.family = Family::student_t(*req.nu);
    const ValidatedSpec spec = validate(raw, MomentRequirement::Mean);
    if (req.index < 1 || req.index > spec.dimension()) {
      throw ValidationError({"--index must lie in 1.." + std::to_string(spec.dimension())});
    }
    const std::size_t k = req.index - 1;
    mean = spec.mu()[k];
    const double scale = std::sqrt(spec.sigma()(k, k));
    q = spec.family().is_normal() ? normal_quantile(mean, scale)
                                  : student_quantile(mean, scale, spec.family().dof());
    source = "marginal x" + std::to_string(req.index) + " of " + spec.family().name() + " spec";
  }
  if (!q.monotone_on_grid()) throw ValidationError({"quantile function is not nondecreasing"});
  QuantileGmdOptions opt;
  opt.quadrature = quad_config(req);
  const double value = quantile_gmd(q, opt);
  json out;
  out["value"] = value;
  out["method"] = method_name(Method::Quantile);
  out["mean"] = mean;
  out["source"] = source;
  if (mean != 0.0) {
    out["gini_index"] = gini_index(value, mean);
    if (mean < 0.0) out["warning"] = "gini index interpretation requires a nonnegative variable";
  } else {
    out["gini_index"] = nullptr;
  }
  return out;
}

}  // namespace detail

/// Executes one request, writing the report to `out` and machine-readable
/// errors to `err`. Exit codes: 0 success, 1 invalid input, 2 numerical
/// nonconvergence, 3 verify discrepancy beyond tolerance.
inline int run(const CliRequest& req, std::ostream& out, std::ostream& err) {
  using detail::json;
  try {
    if (req.subcommand == Subcommand::QuantileGmd) {
      detail::emit(out, detail::quantile_report(req), req.output);
      return kExitOk;
    }
    const DistributionSpec raw = detail::load_spec(req);
    switch (req.subcommand) {
      case Subcommand::ClosedForm: {
        const ValidatedSpec spec = validate(raw, MomentRequirement::Mean);
        detail::emit(out, io::to_json(closed_form_gmd(spec)), req.output);
        return kExitOk;
      }
      case Subcommand::Bound: {
        const ValidatedSpec spec = validate(raw);
        BoundReport report = bound_report(spec);
        if (!spec.family().is_student() || spec.family().nu > 1.0) {
          report.exact_gmd = closed_form_gmd(spec).value;
        }
        json j = io::to_json(report);
        if (spec.family().is_student() && spec.family().nu <= 2.0) {
          j["note"] = "variance is infinite for nu <= 2; variance-based bounds are inapplicable";
        }
        detail::emit(out, j, req.output);
        return kExitOk;
      }
      case Subcommand::Estimate: {
        const ValidatedSpec spec = validate(raw, MomentRequirement::Mean);
        const MonteCarloConfig cfg = detail::mc_config(req);
        GmdEstimate est;
        if (req.dump) {
          const Matrix samples = sample_spec(spec, cfg);
          std::ofstream f(*req.dump);
          if (!f) throw ValidationError({"cannot write dump file \"" + *req.dump + "\""});
          io::write_csv(f, samples);
          est = empirical_gmd(samples, cfg.chunks);
        } else {
          est = estimate_gmd(spec, cfg);
        }
        GmdResult r = to_gmd_result(est);
        r.diagnostics["seed"] = static_cast<double>(cfg.seed);
        r.diagnostics["chunks"] = cfg.chunks;
        detail::emit(out, io::to_json(r), req.output);
        return kExitOk;
      }
      case Subcommand::Verify: {
        const ValidatedSpec spec = validate(raw, MomentRequirement::Mean);
        bool pass = false;
        const json j = detail::verify_report(spec, req, pass);
        if (req.output == OutputFormat::Json) out << j.dump(2) << '\n';
        else detail::verify_text(out, j);
        return pass ? kExitOk : kExitVerifyMismatch;
      }
      case Subcommand::QuantileGmd:
        break;
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << json{{"errors", e.errors()}}.dump() << '\n';
    return kExitInvalid;
  } catch (const NonConvergenceError& e) {
    err << json{{"errors", {e.what()}}, {"estimate", e.estimate()}, {"abs_error", e.abs_error()}}.dump()
        << '\n';
    return kExitNonConvergence;
  } catch (const DomainError& e) {
    err << json{{"errors", {e.what()}}}.dump() << '\n';
    return kExitInvalid;
  }
}

}  // namespace gmd::cli
