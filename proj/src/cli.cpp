#include "tickvol/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "tickvol/config.hpp"
#include "tickvol/errors.hpp"
#include "tickvol/ingest.hpp"
#include "tickvol/io.hpp"

namespace tickvol {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    Json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  Json j = read_json_file(path);
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  const std::set<std::string> sections{"simulation", "arrivals", "estimator", "estimators",
                                       "log_floor", "cleaning"};
  for (const auto& [key, value] : j.items()) {
    if (!sections.contains(key)) throw ConfigError("config: unknown section '" + key + "'");
  }
  return j;
}

// Estimator settings used for real data: M = 200 s per side for both
// windows, H = 15, tick window matched to the clock window, Epanechnikov
// kernels, g(x) = x(1 - x), 1/T convention.
Json default_estimator_json() {
  return {{"intensity_window_seconds", 200.0},
          {"clock_window_seconds", 200.0},
          {"tick_window", "matched"},
          {"block_size", 15},
          {"kernel", "epanechnikov"},
          {"weight", "default"},
          {"convention", "unrescaled"},
          {"grid", {{"points", 200}}}};
}

constexpr double kDefaultLogFloor = 1e-12;

// Later layers win; a key replaces its alternative spelling.
void overlay(Json& base, const Json& patch) {
  static const std::vector<std::pair<std::string, std::string>> aliases{
      {"intensity_bandwidth", "intensity_window_seconds"},
      {"clock_bandwidth", "clock_window_seconds"},
      {"block_size", "delta"},
      {"kernel", "kernels"}};
  for (const auto& [key, value] : patch.items()) {
    for (const auto& [a, b] : aliases) {
      if (key == a) base.erase(b);
      if (key == b) base.erase(a);
    }
    base[key] = value;
  }
}

Json file_entry(const fs::path& p) {
  Json j = {{"path", fs::absolute(p).lexically_normal().string()}};
  std::error_code ec;
  const auto size = fs::file_size(p, ec);
  if (!ec) j["bytes"] = size;
  return j;
}

Json manifest(const std::string& subcommand, const std::vector<std::string>& args, Json config,
              std::vector<fs::path> inputs, std::vector<fs::path> outputs,
              std::optional<std::uint64_t> seed, Clock::time_point started) {
  Json in = Json::array();
  for (const auto& p : inputs) in.push_back(file_entry(p));
  Json out = Json::array();
  for (const auto& p : outputs) out.push_back(file_entry(p));
  return {{"subcommand", subcommand},
          {"arguments", args},
          {"config", std::move(config)},
          {"inputs", in},
          {"outputs", out},
          {"seed", seed ? Json(*seed) : Json(nullptr)},
          {"tool", "tickvol"},
          {"version", kVersion},
          {"wall_seconds", std::chrono::duration<double>(Clock::now() - started).count()}};
}

std::string series_text(const TickSeries& s) {
  std::ostringstream os;
  write_series_csv(os, s);
  return os.str();
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path q = p;
  q += suffix;
  return q;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string arrivals;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto started = Clock::now();
  const Json cfg = load_config(a.config);
  SimulationConfig sim = simulation_from_json(cfg.value("simulation", Json::object()));
  if (a.seed) sim.seed = *a.seed;

  std::string arrivals = a.arrivals;
  if (arrivals.empty() && cfg.contains("arrivals")) arrivals = cfg.at("arrivals").get<std::string>();

  TickSeries series;
  std::vector<fs::path> inputs;
  if (!a.config.empty()) inputs.emplace_back(a.config);
  if (!arrivals.empty()) {
    const TickSeries source = read_series_file(arrivals);
    if (source.empty()) throw EmptySeriesError("arrivals file " + arrivals + " has no ticks");
    sim.horizon = source.horizon();
    series = simulate_on_arrivals(sim, {source.times().begin(), source.times().end()});
    inputs.emplace_back(arrivals);
  } else {
    series = simulate(sim);
  }

  const fs::path out_path = a.out;
  ensure_parent(out_path);
  write_file_atomic(out_path, series_text(series));
  Json resolved = {{"simulation", to_json(sim)},
                   {"arrivals", arrivals.empty() ? Json(nullptr) : Json(arrivals)}};
  const auto m = manifest("simulate", args, resolved, inputs, {out_path}, sim.seed, started);
  write_file_atomic(with_suffix(out_path, ".manifest.json"), m.dump(2) + "\n");
  out << "simulated " << series.size() << " ticks over T=" << format_double(series.horizon())
      << " -> " << out_path.string() << "\n";
  return exit_ok;
}

// ---- estimate ----------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string config;
  std::string out;
  std::vector<std::string> estimators;
  std::optional<std::size_t> grid_points;
  std::optional<double> bandwidth_clock;
  std::optional<double> bandwidth_intensity;
  std::optional<std::string> tick_window;
  std::optional<std::size_t> block_size;
  std::optional<double> log_floor;
};

int cmd_estimate(const EstimateArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto started = Clock::now();
  const Json cfg = load_config(a.config);
  const TickSeries series = read_series_file(a.data);
  if (series.empty()) throw EmptySeriesError("no ticks in " + a.data);

  Json est = default_estimator_json();
  if (cfg.contains("estimator")) overlay(est, cfg.at("estimator"));
  Json flags = Json::object();
  if (a.bandwidth_clock) flags["clock_bandwidth"] = *a.bandwidth_clock;
  if (a.bandwidth_intensity) flags["intensity_bandwidth"] = *a.bandwidth_intensity;
  if (a.block_size) flags["block_size"] = *a.block_size;
  if (a.grid_points) flags["grid"] = {{"points", *a.grid_points}};
  if (a.tick_window) {
    if (*a.tick_window == "matched") {
      flags["tick_window"] = "matched";
    } else {
      std::size_t n = 0;
      try {
        std::size_t used = 0;
        n = std::stoull(*a.tick_window, &used);
        if (used != a.tick_window->size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError("--tick-window: expected a positive integer or 'matched'");
      }
      flags["tick_window"] = n;
    }
  }
  overlay(est, flags);
  const EstimatorConfig ecfg = estimator_from_json(est, series.horizon());

  double log_floor = cfg.value("log_floor", kDefaultLogFloor);
  if (a.log_floor) log_floor = *a.log_floor;
  if (!(log_floor > 0.0)) throw ConfigError("log_floor must be > 0");

  std::vector<std::string> names = a.estimators;
  if (names.empty() && cfg.contains("estimators")) {
    names = cfg.at("estimators").get<std::vector<std::string>>();
  }
  if (names.empty()) names = {"intensity", "clock_pavg", "tick_pavg", "decomposed", "noise_var"};
  std::vector<EstimatorTag> tags;
  for (const auto& n : names) tags.push_back(estimator_tag_from_string(n));

  const fs::path dir = a.out;
  fs::create_directories(dir);
  std::vector<fs::path> outputs;
  Json summary = Json::object();
  for (const auto tag : tags) {
    const CurveEstimate curve = estimate_on_grid(series, ecfg, tag);
    std::ostringstream os;
    write_curve_csv(os, curve, log_floor);
    const fs::path p = dir / (std::string(to_string(tag)) + ".csv");
    write_file_atomic(p, os.str());
    outputs.push_back(p);
    std::size_t ok = 0;
    for (const auto& pt : curve.points) ok += pt.reason == ReasonCode::ok;
    summary[std::string(to_string(tag))] = {{"points", curve.points.size()}, {"ok", ok}};
    out << to_string(tag) << ": " << ok << "/" << curve.points.size() << " points -> "
        << p.string() << "\n";
  }

  Json resolved = {{"estimator", to_json(ecfg)},
                   {"estimator_input", est},
                   {"estimators", names},
                   {"log_floor", log_floor},
                   {"horizon", series.horizon()},
                   {"ticks", series.size()},
                   {"resolved_tick_window", ecfg.tick_window
                                                ? Json(*ecfg.tick_window)
                                                : Json(matched_tick_window(
                                                      ecfg.clock_bandwidth * series.horizon(),
                                                      series.size(), series.horizon()))},
                   {"summary", summary}};
  std::vector<fs::path> inputs{a.data};
  if (!a.config.empty()) inputs.emplace_back(a.config);
  const auto m = manifest("estimate", args, resolved, inputs, outputs, std::nullopt, started);
  write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
  return exit_ok;
}

// ---- clean -------------------------------------------------------------

struct CleanArgs {
  std::string input;
  std::string out;
  std::string report;
  std::string config;
  std::optional<double> session_start;
  std::optional<double> session_end;
  std::vector<std::string> bad_conditions;
  std::optional<std::size_t> outlier_window;
  std::optional<double> outlier_multiplier;
};

CleaningOptions cleaning_from_json(const Json& j) {
  CleaningOptions o;
  for (const auto& [key, value] : j.items()) {
    if (key == "session_start") {
      o.session_start = value.get<double>();
    } else if (key == "session_end") {
      o.session_end = value.get<double>();
    } else if (key == "bad_conditions") {
      for (const auto& c : value) o.bad_conditions.insert(c.get<std::string>());
    } else if (key == "outliers") {
      OutlierFilter f;
      f.window = value.value("window", f.window);
      f.multiplier = value.value("multiplier", f.multiplier);
      o.outliers = f;
    } else {
      throw ConfigError("cleaning: unknown field '" + key + "'");
    }
  }
  return o;
}

int cmd_clean(const CleanArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto started = Clock::now();
  const Json cfg = load_config(a.config);
  CleaningOptions opts = cleaning_from_json(cfg.value("cleaning", Json::object()));
  if (a.session_start) opts.session_start = *a.session_start;
  if (a.session_end) opts.session_end = *a.session_end;
  for (const auto& c : a.bad_conditions) opts.bad_conditions.insert(c);
  if (a.outlier_window || a.outlier_multiplier) {
    OutlierFilter f = opts.outliers.value_or(OutlierFilter{});
    if (a.outlier_window) f.window = *a.outlier_window;
    if (a.outlier_multiplier) f.multiplier = *a.outlier_multiplier;
    opts.outliers = f;
  }
  if (!(opts.session_end > opts.session_start)) {
    throw ConfigError("cleaning: session_end must exceed session_start");
  }

  std::ifstream in(a.input);
  if (!in) throw FormatError("cannot open " + a.input);
  const ParseResult parsed = parse_tick_csv(in);
  const CleanResult cleaned = clean_ticks(parsed.records, opts);

  const fs::path out_path = a.out;
  ensure_parent(out_path);
  write_file_atomic(out_path, series_text(cleaned.series));

  const auto& r = cleaned.report;
  Json malformed = Json::array();
  for (const auto& m : parsed.malformed) malformed.push_back({{"line", m.line}, {"reason", m.reason}});
  Json report = {{"input", r.input},
                 {"pre_market", r.pre_market},
                 {"after_market", r.after_market},
                 {"bad_condition", r.bad_condition},
                 {"outliers", r.outliers},
                 {"tie_groups", r.tie_groups},
                 {"output", r.output},
                 {"horizon", cleaned.series.horizon()},
                 {"malformed", malformed}};
  const fs::path report_path = a.report.empty() ? with_suffix(out_path, ".report.json") : fs::path(a.report);
  ensure_parent(report_path);
  write_file_atomic(report_path, report.dump(2) + "\n");

  Json resolved = {{"session_start", opts.session_start},
                   {"session_end", opts.session_end},
                   {"bad_conditions", opts.bad_conditions},
                   {"outliers", opts.outliers ? Json{{"window", opts.outliers->window},
                                                     {"multiplier", opts.outliers->multiplier}}
                                              : Json(nullptr)}};
  std::vector<fs::path> inputs{a.input};
  if (!a.config.empty()) inputs.emplace_back(a.config);
  const auto m = manifest("clean", args, resolved, inputs, {out_path, report_path}, std::nullopt,
                          started);
  write_file_atomic(with_suffix(out_path, ".manifest.json"), m.dump(2) + "\n");
  out << "kept " << r.output << " of " << r.input << " trades -> " << out_path.string() << "\n";
  return exit_ok;
}

// ---- validate ----------------------------------------------------------

struct ValidateArgs {
  std::string registry;
  std::vector<std::string> names;
  bool all = false;
  std::string report;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::size_t threads = 0;
};

int cmd_validate(const ValidateArgs& a, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  const auto started = Clock::now();
  auto entries = load_registry(a.registry);

  std::vector<const RegistryEntry*> selected;
  if (a.all) {
    for (const auto& e : entries) selected.push_back(&e);
  } else {
    for (const auto& name : a.names) {
      const auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const RegistryEntry& e) { return e.scenario.name == name; });
      if (it == entries.end()) {
        std::string listing;
        for (const auto& e : entries) listing += "\n  " + e.scenario.name;
        throw ConfigError("unknown scenario '" + name + "'; available:" + listing);
      }
      selected.push_back(&*it);
    }
  }
  if (selected.empty()) {
    err << "warning: no scenarios selected; nothing to do\n";
    return exit_ok;
  }

  RunOptions opts;
  opts.threads = a.threads;
  bool all_pass = true;
  Json results = Json::array();
  for (const auto* e : selected) {
    Scenario s = e->scenario;
    if (a.seed) s.sim.seed = *a.seed;
    if (a.replications) s.replications = *a.replications;
    Json r;
    CheckOutcome outcome;
    try {
      if (e->tag) {
        const MCReport rep = run_scenario(s, *e->tag, opts);
        outcome = evaluate_check(e->check, rep);
        r = to_json(rep);
      } else {
        const ComparisonReport rep = compare_estimators(s, opts);
        outcome = evaluate_check(e->check, rep);
        r = to_json(rep);
      }
    } catch (const ScenarioAbortedError& ex) {
      outcome = {false, ex.what()};
      r = {{"scenario", s.name}, {"aborted", ex.what()}};
    }
    r["pass"] = outcome.pass;
    r["check"] = outcome.message;
    r["master_seed"] = s.sim.seed;
    results.push_back(r);
    all_pass = all_pass && outcome.pass;
    out << (outcome.pass ? "PASS " : "FAIL ") << s.name << ": " << outcome.message << "\n";
  }

  if (!a.report.empty()) {
    const fs::path report_path = a.report;
    ensure_parent(report_path);
    write_file_atomic(report_path, Json{{"results", results}, {"pass", all_pass}}.dump(2) + "\n");
    Json resolved = {{"registry", a.registry},
                     {"scenarios", a.all ? Json("all") : Json(a.names)},
                     {"replications_override",
                      a.replications ? Json(*a.replications) : Json(nullptr)}};
    const auto m = manifest("validate", args, resolved, {a.registry}, {report_path}, a.seed, started);
    write_file_atomic(with_suffix(report_path, ".manifest.json"), m.dump(2) + "\n");
  }
  return all_pass ? exit_ok : exit_validation_failed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spot volatility from tick data: simulate, clean, estimate, validate", "tickvol"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate a tick series from a model config");
  sim->add_option("--config", sa.config, "JSON config with a 'simulation' section")->required();
  sim->add_option("--out", sa.out, "Output series CSV")->required();
  sim->add_option("--seed", sa.seed, "Master seed (overrides the config)");
  sim->add_option("--arrivals", sa.arrivals, "Series CSV whose tick times are reused as arrivals");

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Estimate curves on a grid from a series CSV");
  est->add_option("--data", ea.data, "Cleaned series CSV")->required();
  est->add_option("--config", ea.config, "JSON config with an 'estimator' section");
  est->add_option("--out", ea.out, "Output directory")->required();
  est->add_option("--estimators", ea.estimators, "Subset of curves to emit")->delimiter(',');
  est->add_option("--grid-points", ea.grid_points, "Number of interior grid points");
  est->add_option("--bandwidth-clock", ea.bandwidth_clock, "Clock bandwidth b as a fraction of T");
  est->add_option("--bandwidth-intensity", ea.bandwidth_intensity,
                  "Intensity bandwidth as a fraction of T");
  est->add_option("--tick-window", ea.tick_window, "Ticks per side, or 'matched'");
  est->add_option("--block-size", ea.block_size, "Pre-averaging block size H");
  est->add_option("--log-floor", ea.log_floor, "Floor applied before taking logs");

  CleanArgs ca;
  auto* cln = app.add_subcommand("clean", "Clean raw trades into a series CSV");
  cln->add_option("--input", ca.input, "Raw CSV with timestamp,price,condition")->required();
  cln->add_option("--out", ca.out, "Output series CSV")->required();
  cln->add_option("--report", ca.report, "Cleaning report JSON (default <out>.report.json)");
  cln->add_option("--config", ca.config, "JSON config with a 'cleaning' section");
  cln->add_option("--session-start", ca.session_start, "Session open, seconds since midnight");
  cln->add_option("--session-end", ca.session_end, "Session close, seconds since midnight");
  cln->add_option("--bad-condition", ca.bad_conditions, "Condition code to drop (repeatable)");
  cln->add_option("--outlier-window", ca.outlier_window, "Rolling median window in trades");
  cln->add_option("--outlier-multiplier", ca.outlier_multiplier, "MAD multiplier");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Run registry scenarios against acceptance bands");
  val->add_option("--registry", va.registry, "Scenario registry JSON")->required();
  val->add_option("names", va.names, "Scenario names");
  val->add_flag("--all", va.all, "Run every scenario in the registry");
  val->add_option("--report", va.report, "Report JSON");
  val->add_option("--seed", va.seed, "Master seed override");
  val->add_option("--replications", va.replications, "Replication count override");
  val->add_option("--threads", va.threads, "Worker threads (0: TICKVOL_THREADS or all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input_error;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sa, args, out);
    if (est->parsed()) return cmd_estimate(ea, args, out);
    if (cln->parsed()) return cmd_clean(ca, args, out);
    if (val->parsed()) return cmd_validate(va, args, out, err);
  } catch (const ScenarioAbortedError& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation_failed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return exit_input_error;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }
  return exit_input_error;
}

}  // namespace tickvol
