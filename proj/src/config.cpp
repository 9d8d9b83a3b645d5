#include "tickvol/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "tickvol/errors.hpp"

namespace tickvol {
namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw ConfigError(std::string(where) + ": unknown field '" + key + "'");
  }
}

template <typename T>
T field(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback, const char* where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

const char* convention_name(Convention c) {
  return c == Convention::rescaled ? "rescaled" : "unrescaled";
}

}  // namespace

CurveSpec curve_from_json(const Json& j) {
  const auto kind = field<std::string>(j, "kind", "curve");
  if (kind == "constant") {
    reject_unknown(j, {"kind", "value"}, "curve");
    return CurveSpec::constant(field<double>(j, "value", "curve"));
  }
  if (kind == "cosine_log") {
    reject_unknown(j, {"kind", "a", "k"}, "curve");
    return CurveSpec::cosine_log(field<double>(j, "a", "curve"), field<double>(j, "k", "curve"));
  }
  if (kind == "table") {
    reject_unknown(j, {"kind", "values"}, "curve");
    return CurveSpec::table(field<std::vector<double>>(j, "values", "curve"));
  }
  throw ConfigError("curve: unknown kind '" + kind + "'");
}

Json to_json(const CurveSpec& c) {
  switch (c.kind()) {
    case CurveKind::constant:
      return {{"kind", "constant"}, {"value", c.param_a()}};
    case CurveKind::cosine_log:
      return {{"kind", "cosine_log"}, {"a", c.param_a()}, {"k", c.param_k()}};
    case CurveKind::table:
      return {{"kind", "table"}, {"values", c.values()}};
  }
  return {};
}

NoiseModel noise_from_json(const Json& j) {
  reject_unknown(j, {"omega", "theta", "rounding"}, "noise");
  NoiseModel n;
  n.omega = field_or(j, "omega", n.omega, "noise");
  n.theta = field_or(j, "theta", n.theta, "noise");
  n.rounding = field_or(j, "rounding", n.rounding, "noise");
  n.validate();
  return n;
}

Json to_json(const NoiseModel& n) {
  return {{"omega", n.omega}, {"theta", n.theta}, {"rounding", n.rounding}};
}

SimulationConfig simulation_from_json(const Json& j) {
  reject_unknown(j, {"sigma2", "intensity", "noise", "horizon", "rescaled", "x0", "seed"},
                 "simulation");
  SimulationConfig s;
  if (j.contains("sigma2")) s.sigma2 = curve_from_json(j.at("sigma2"));
  if (j.contains("intensity")) s.intensity = curve_from_json(j.at("intensity"));
  if (j.contains("noise")) s.noise = noise_from_json(j.at("noise"));
  s.horizon = field_or(j, "horizon", s.horizon, "simulation");
  s.rescaled = field_or(j, "rescaled", s.rescaled, "simulation");
  s.x0 = field_or(j, "x0", s.x0, "simulation");
  s.seed = field_or<std::uint64_t>(j, "seed", s.seed, "simulation");
  if (!(s.horizon > 0.0)) throw ConfigError("simulation: horizon must be > 0");
  return s;
}

Json to_json(const SimulationConfig& s) {
  return {{"sigma2", to_json(s.sigma2)},    {"intensity", to_json(s.intensity)},
          {"noise", to_json(s.noise)},      {"horizon", s.horizon},
          {"rescaled", s.rescaled},         {"x0", s.x0},
          {"seed", s.seed}};
}

EstimatorConfig estimator_from_json(const Json& j, double horizon, const EstimatorConfig& base) {
  constexpr const char* where = "estimator";
  reject_unknown(j,
                 {"intensity_bandwidth", "clock_bandwidth", "intensity_window_seconds",
                  "clock_window_seconds", "tick_window", "block_size", "delta", "kernel", "kernels",
                  "weight", "grid", "convention"},
                 where);
  EstimatorConfig cfg = base;
  cfg.intensity_bandwidth = field_or(j, "intensity_bandwidth", cfg.intensity_bandwidth, where);
  cfg.clock_bandwidth = field_or(j, "clock_bandwidth", cfg.clock_bandwidth, where);
  if (j.contains("intensity_window_seconds")) {
    cfg.intensity_bandwidth = field<double>(j, "intensity_window_seconds", where) / horizon;
  }
  if (j.contains("clock_window_seconds")) {
    cfg.clock_bandwidth = field<double>(j, "clock_window_seconds", where) / horizon;
  }

  if (j.contains("tick_window")) {
    const auto& tw = j.at("tick_window");
    if (tw.is_string() && tw.get<std::string>() == "matched") {
      cfg.tick_window.reset();
    } else if (tw.is_number_integer() && tw.get<long long>() > 0) {
      cfg.tick_window = tw.get<std::size_t>();
    } else {
      throw ConfigError("estimator: tick_window must be a positive integer or \"matched\"");
    }
  }

  WeightFunction g = cfg.weight.function();
  if (j.contains("weight")) {
    const auto& w = j.at("weight");
    if (w.is_string() && w.get<std::string>() == "default") {
      g = WeightFunction{};
    } else if (w.is_object() && w.contains("table")) {
      g = WeightFunction::table(w.at("table").get<std::vector<double>>());
    } else {
      throw ConfigError("estimator: weight must be \"default\" or {\"table\": [...]}");
    }
  }
  std::size_t block = cfg.block_size();
  if (j.contains("block_size")) block = field<std::size_t>(j, "block_size", where);
  if (j.contains("delta")) {
    const double delta = field<double>(j, "delta", where);
    if (!(delta > 0.0)) throw ConfigError("estimator: delta must be > 0");
    block = static_cast<std::size_t>(std::floor(delta * std::sqrt(horizon)));
  }
  cfg.weight = PreAvgWeight(block, std::move(g));

  if (j.contains("kernel")) {
    const KernelSpec k{kernel_kind_from_string(field<std::string>(j, "kernel", where))};
    cfg.intensity_kernel = cfg.clock_kernel = cfg.tick_kernel = k;
  }
  if (j.contains("kernels")) {
    const auto& ks = j.at("kernels");
    reject_unknown(ks, {"intensity", "clock", "tick"}, "estimator.kernels");
    if (ks.contains("intensity")) {
      cfg.intensity_kernel.kind = kernel_kind_from_string(ks.at("intensity").get<std::string>());
    }
    if (ks.contains("clock")) {
      cfg.clock_kernel.kind = kernel_kind_from_string(ks.at("clock").get<std::string>());
    }
    if (ks.contains("tick")) {
      cfg.tick_kernel.kind = kernel_kind_from_string(ks.at("tick").get<std::string>());
    }
  }

  if (j.contains("convention")) {
    const auto c = field<std::string>(j, "convention", where);
    if (c == "rescaled") {
      cfg.convention = Convention::rescaled;
    } else if (c == "unrescaled") {
      cfg.convention = Convention::unrescaled;
    } else {
      throw ConfigError("estimator: convention must be \"rescaled\" or \"unrescaled\"");
    }
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.is_array()) {
      cfg.grid = g.get<std::vector<double>>();
    } else if (g.is_object() && g.contains("points")) {
      cfg.grid = interior_grid(g.at("points").get<std::size_t>(),
                               std::max(cfg.intensity_bandwidth, cfg.clock_bandwidth));
    } else {
      throw ConfigError("estimator: grid must be an array or {\"points\": n}");
    }
  }
  cfg.validate();
  return cfg;
}

Json to_json(const EstimatorConfig& cfg) {
  Json j;
  j["intensity_bandwidth"] = cfg.intensity_bandwidth;
  j["clock_bandwidth"] = cfg.clock_bandwidth;
  if (cfg.tick_window) {
    j["tick_window"] = *cfg.tick_window;
  } else {
    j["tick_window"] = "matched";
  }
  j["block_size"] = cfg.block_size();
  if (cfg.weight.function().is_default()) {
    j["weight"] = "default";
  } else {
    j["weight"] = {{"table", cfg.weight.function().values()}};
  }
  j["kernels"] = {{"intensity", to_string(cfg.intensity_kernel.kind)},
                  {"clock", to_string(cfg.clock_kernel.kind)},
                  {"tick", to_string(cfg.tick_kernel.kind)}};
  j["grid"] = cfg.grid;
  j["convention"] = convention_name(cfg.convention);
  return j;
}

Smoothness smoothness_from_json(const Json& j) {
  reject_unknown(j, {"m", "gamma", "m_prime", "gamma_prime"}, "smoothness");
  Smoothness s;
  s.m = field_or(j, "m", s.m, "smoothness");
  s.gamma = field_or(j, "gamma", s.gamma, "smoothness");
  s.m_prime = field_or(j, "m_prime", s.m_prime, "smoothness");
  s.gamma_prime = field_or(j, "gamma_prime", s.gamma_prime, "smoothness");
  if (s.m < 0 || s.m > 2 || s.m_prime < 0 || s.m_prime > 2) {
    throw ConfigError("smoothness: m and m_prime must be 0, 1 or 2");
  }
  return s;
}

Json to_json(const Smoothness& s) {
  return {{"m", s.m}, {"gamma", s.gamma}, {"m_prime", s.m_prime}, {"gamma_prime", s.gamma_prime}};
}

namespace {

AcceptanceCheck check_from_json(const Json& j) {
  constexpr const char* where = "check";
  reject_unknown(j, {"kind", "lo", "hi", "k", "tolerance", "min_win_fraction", "max_mse_ratio"},
                 where);
  AcceptanceCheck c;
  const auto kind = field<std::string>(j, "kind", where);
  if (kind == "variance_ratio") {
    c.kind = CheckKind::variance_ratio;
    c.lo = field<double>(j, "lo", where);
    c.hi = field<double>(j, "hi", where);
  } else if (kind == "mean_within_se") {
    c.kind = CheckKind::mean_within_se;
    c.k = field_or(j, "k", c.k, where);
  } else if (kind == "mean_relative") {
    c.kind = CheckKind::mean_relative;
    c.tolerance = field<double>(j, "tolerance", where);
  } else if (kind == "comparison") {
    c.kind = CheckKind::comparison;
    c.min_win_fraction = field_or(j, "min_win_fraction", c.min_win_fraction, where);
    c.max_mse_ratio = field_or(j, "max_mse_ratio", c.max_mse_ratio, where);
  } else {
    throw ConfigError("check: unknown kind '" + kind + "'");
  }
  return c;
}

}  // namespace

std::vector<RegistryEntry> registry_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("scenarios") || !j.at("scenarios").is_array()) {
    throw ConfigError("registry: expected {\"scenarios\": [...]}");
  }
  std::vector<RegistryEntry> out;
  std::set<std::string> names;
  for (const auto& sj : j.at("scenarios")) {
    reject_unknown(sj,
                   {"name", "description", "estimator", "compare", "simulation", "estimator_config",
                    "u0", "replications", "seed", "smoothness", "check"},
                   "scenario");
    RegistryEntry e;
    auto& s = e.scenario;
    s.name = field<std::string>(sj, "name", "scenario");
    if (!names.insert(s.name).second) throw ConfigError("registry: duplicate scenario " + s.name);
    if (sj.contains("simulation")) s.sim = simulation_from_json(sj.at("simulation"));
    if (sj.contains("seed")) s.sim.seed = sj.at("seed").get<std::uint64_t>();
    if (sj.contains("estimator_config")) {
      s.cfg = estimator_from_json(sj.at("estimator_config"), s.sim.horizon);
    }
    s.u0 = field_or(sj, "u0", s.u0, "scenario");
    s.replications = field_or<std::size_t>(sj, "replications", s.replications, "scenario");
    if (sj.contains("smoothness")) s.smoothness = smoothness_from_json(sj.at("smoothness"));
    if (field_or(sj, "compare", false, "scenario")) {
      e.tag.reset();
    } else {
      e.tag = estimator_tag_from_string(field<std::string>(sj, "estimator", "scenario"));
    }
    if (!sj.contains("check")) throw ConfigError("scenario " + s.name + ": missing check");
    e.check = check_from_json(sj.at("check"));
    if (!e.tag && e.check.kind != CheckKind::comparison) {
      throw ConfigError("scenario " + s.name + ": comparison scenarios need a comparison check");
    }
    s.validate();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<RegistryEntry> load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open registry " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("registry " + path.string() + ": " + e.what());
  }
  return registry_from_json(j);
}

Json to_json(const CurveEstimate& curve) {
  Json pts = Json::array();
  for (const auto& p : curve.points) {
    Json q = {{"u", p.u}, {"reason_code", to_string(p.reason)}};
    q["value"] = p.value ? Json(*p.value) : Json(nullptr);
    if (!p.detail.empty()) q["detail"] = p.detail;
    pts.push_back(std::move(q));
  }
  return {{"estimator", to_string(curve.tag)}, {"config", to_json(curve.config)}, {"points", pts}};
}

namespace {

Json failures_json(const std::vector<ReplicationFailure>& fs) {
  Json a = Json::array();
  for (const auto& f : fs) a.push_back({{"index", f.index}, {"message", f.message}});
  return a;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const MCReport& r, bool include_samples) {
  Json j = {{"scenario", r.scenario},
            {"estimator", to_string(r.tag)},
            {"replications", r.replications},
            {"failures", failures_json(r.failures)},
            {"truth", r.truth},
            {"center", r.center},
            {"mean", r.mean},
            {"std_error", r.std_error},
            {"bias", r.bias},
            {"scaled_variance", r.scaled_variance},
            {"target_variance", optional_json(r.target_variance)},
            {"ratio", optional_json(r.ratio)},
            {"skewness", r.skewness},
            {"excess_kurtosis", r.excess_kurtosis},
            {"regime", r.regime},
            {"wall_seconds", r.wall_seconds}};
  if (include_samples) {
    Json est = Json::array();
    for (double v : r.estimates) est.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
    j["estimates"] = est;
    j["scaled_errors"] = r.scaled_errors;
  }
  return j;
}

Json to_json(const ComparisonReport& r, bool include_samples) {
  const char* verdict = r.comparison.verdict == RateComparison::faster      ? "faster"
                        : r.comparison.verdict == RateComparison::same_rate ? "same_rate"
                                                                            : "uncompared";
  Json j = {{"scenario", r.scenario},
            {"replications", r.replications},
            {"failures", failures_json(r.failures)},
            {"truth", r.truth},
            {"mse_clock", r.mse_clock},
            {"mse_decomposed", r.mse_decomposed},
            {"mse_ratio", r.mse_ratio},
            {"win_fraction", r.win_fraction},
            {"variance_clock", r.variance_clock},
            {"variance_decomposed", r.variance_decomposed},
            {"variance_ratio", r.variance_ratio},
            {"case", "c" + std::to_string(r.comparison.id)},
            {"rate_verdict", verdict},
            {"wall_seconds", r.wall_seconds}};
  if (include_samples) {
    j["clock_sq_err"] = r.clock_sq_err;
    j["decomposed_sq_err"] = r.decomposed_sq_err;
  }
  return j;
}

}  // namespace tickvol
