#include "tickvol/mc_harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tickvol/errors.hpp"
#include "tickvol/rng.hpp"

namespace tickvol {

double Scenario::delta() const {
  return static_cast<double>(cfg.block_size()) / std::sqrt(sim.horizon);
}

void Scenario::validate() const {
  if (replications < 2) throw ConfigError("scenario '" + name + "': replications must be >= 2");
  if (!(u0 > 0.0 && u0 < 1.0)) throw ConfigError("scenario '" + name + "': u0 must lie in (0, 1)");
  if (!(sim.horizon > 0.0)) throw ConfigError("scenario '" + name + "': horizon must be > 0");
  sim.noise.validate();
  cfg.validate();
}

std::uint64_t replication_seed(const Scenario& s, std::size_t r) {
  return derive_seed(s.sim.seed, "replication", r);
}

TickSeries simulate_replication(const Scenario& s, std::size_t r) {
  auto sim = s.sim;
  sim.seed = replication_seed(s, r);
  return simulate(sim);
}

std::size_t default_thread_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TICKVOL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

namespace {

// Runs body(r) for r in [0, R) on a small pool; body must only touch slot r.
void for_each_replication(std::size_t count, const RunOptions& opts,
                          const std::function<void(std::size_t)>& body) {
  const std::size_t threads = std::max<std::size_t>(
      1, std::min(count, opts.threads ? opts.threads : default_thread_count()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < count; j = next++) {
      body(opts.reverse_order ? count - 1 - j : j);
    }
  };
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
}

void enforce_failure_budget(const std::string& name, std::size_t replications,
                            const std::vector<ReplicationFailure>& failures) {
  if (20 * failures.size() <= replications) return;
  std::ostringstream msg;
  msg << "scenario '" << name << "': " << failures.size() << " of " << replications
      << " replications failed (limit 5%)";
  for (std::size_t j = 0; j < std::min<std::size_t>(failures.size(), 3); ++j) {
    msg << "; #" << failures[j].index << ": " << failures[j].message;
  }
  throw ScenarioAbortedError(msg.str());
}

double expected_tick_count(const Scenario& s) {
  using boost::math::quadrature::gauss_kronrod;
  const auto& lambda = s.sim.intensity;
  return s.sim.horizon *
         gauss_kronrod<double, 61>::integrate([&](double u) { return lambda(u); }, 0.0, 1.0, 15, 1e-12);
}

// Mean of the intensity estimator: int K(x) lambda(u0 + b x) dx.
double smoothed_intensity(const Scenario& s) {
  using boost::math::quadrature::gauss_kronrod;
  const auto& kernel = s.cfg.intensity_kernel;
  const double b = s.cfg.intensity_bandwidth;
  if (s.sim.intensity.kind() == CurveKind::constant) return s.sim.intensity(s.u0);
  return gauss_kronrod<double, 61>::integrate(
      [&](double x) { return kernel(x) * s.sim.intensity(s.u0 + b * x); }, -1.0, 1.0, 15, 1e-12);
}

struct Targets {
  double truth = 0.0;
  double center = 0.0;
  std::function<double(const TickSeries&)> rate;  // per-replication rate
  std::optional<double> variance;
  std::string regime;
};

Targets targets_for(const Scenario& s, EstimatorTag tag) {
  const double T = s.sim.horizon;
  const double u0 = s.u0;
  const double sigma2 = s.sim.sigma2(u0);
  const double lambda = s.sim.intensity(u0);
  const double omega2 = s.sim.noise.omega * s.sim.noise.omega;
  const double delta = s.delta();
  // Variance of one latent increment, and the tick estimand in reporting units.
  const double per_tick = sigma2 * (s.sim.rescaled ? 1.0 / T : 1.0);
  const double tick_truth = s.cfg.scale(T) * T * per_tick;
  const auto& cfg = s.cfg;

  auto tick_rate = [&cfg, T](const TickSeries& series) {
    return std::sqrt(static_cast<double>(resolve_tick_window(cfg, series)) / std::sqrt(T));
  };
  auto constant_rate = [](double r) { return [r](const TickSeries&) { return r; }; };

  Targets t;
  switch (tag) {
    case EstimatorTag::intensity:
      t.truth = lambda;
      t.center = smoothed_intensity(s);
      t.rate = constant_rate(std::sqrt(cfg.intensity_bandwidth * T));
      t.variance = intensity_variance_target(lambda, cfg.intensity_kernel);
      break;
    case EstimatorTag::clock_pavg: {
      const auto& sg = s.sim.sigma2;
      const auto& lm = s.sim.intensity;
      const double d2 = sg.second_derivative(u0) * lm(u0) +
                        2.0 * sg.derivative(u0) * lm.derivative(u0) +
                        sg(u0) * lm.second_derivative(u0);
      const bool smooth = s.smoothness.m == 2 && s.smoothness.m_prime == 2;
      t.truth = tick_truth * lambda;
      t.center = t.truth + clock_bias_target(d2, cfg.clock_bandwidth, cfg.clock_kernel, smooth) *
                               (tick_truth / sigma2);
      t.rate = constant_rate(std::sqrt(cfg.clock_bandwidth * std::sqrt(T)));
      t.variance =
          clock_variance_target(sigma2, lambda, omega2, delta, cfg.clock_kernel, cfg.weight).total();
      break;
    }
    case EstimatorTag::tick_pavg:
      t.truth = tick_truth;
      t.center = t.truth;
      t.rate = tick_rate;
      t.variance = tick_variance_target(sigma2, omega2, delta, cfg.tick_kernel, cfg.weight).total();
      break;
    case EstimatorTag::decomposed: {
      t.truth = tick_truth * lambda;
      t.center = t.truth;
      const double nominal_n =
          cfg.tick_window ? static_cast<double>(*cfg.tick_window)
                          : std::floor(cfg.clock_bandwidth * expected_tick_count(s));
      const auto d = decomposed_targets(sigma2, lambda, omega2, delta, cfg.intensity_kernel,
                                        cfg.tick_kernel, cfg.weight, s.smoothness,
                                        cfg.intensity_bandwidth, T, nominal_n);
      t.regime = std::string(to_string(d.regime));
      if (d.regime == DecompositionRegime::tick) {
        t.rate = tick_rate;
        t.variance = d.v2;
      } else {
        t.rate = constant_rate(std::sqrt(cfg.intensity_bandwidth * T));
        t.variance = d.w2;
      }
      break;
    }
    case EstimatorTag::realized_vol:
      t.truth = s.cfg.scale(T) * T * lambda * (per_tick + 2.0 * omega2);
      t.center = t.truth;
      t.rate = constant_rate(1.0);
      break;
    case EstimatorTag::noise_var:
      t.truth = omega2;
      t.center = omega2 + 0.5 * per_tick;
      t.rate = constant_rate(1.0);
      break;
  }
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Moments sample_moments(const std::vector<double>& xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = xs.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

MCReport run_scenario(const Scenario& s, EstimatorTag tag, const RunOptions& opts) {
  s.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto targets = targets_for(s, tag);
  const std::size_t R = s.replications;

  std::vector<double> estimates(R, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> rates(R, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(R);
  for_each_replication(R, opts, [&](std::size_t r) {
    try {
      const auto series = simulate_replication(s, r);
      estimates[r] = estimate(series, s.u0, s.cfg, tag);
      rates[r] = targets.rate(series);
    } catch (const Error& e) {
      errors[r] = e.what();
      estimates[r] = std::numeric_limits<double>::quiet_NaN();
    }
  });

  MCReport rep;
  rep.scenario = s.name;
  rep.tag = tag;
  rep.replications = R;
  rep.truth = targets.truth;
  rep.center = targets.center;
  rep.regime = targets.regime;
  std::vector<double> ok;
  for (std::size_t r = 0; r < R; ++r) {
    if (!errors[r].empty() || !std::isfinite(estimates[r])) {
      rep.failures.push_back({r, errors[r].empty() ? "non-finite estimate" : errors[r]});
      continue;
    }
    ok.push_back(estimates[r]);
    rep.scaled_errors.push_back(rates[r] * (estimates[r] - targets.center));
  }
  enforce_failure_budget(s.name, R, rep.failures);
  rep.estimates = std::move(estimates);

  const auto raw = sample_moments(ok);
  rep.mean = raw.mean;
  rep.std_error = std::sqrt(raw.variance / static_cast<double>(ok.size()));
  rep.bias = rep.mean - rep.truth;

  const auto scaled = sample_moments(rep.scaled_errors);
  rep.scaled_variance = scaled.variance;
  rep.skewness = scaled.skewness;
  rep.excess_kurtosis = scaled.excess_kurtosis;
  rep.target_variance = targets.variance;
  if (targets.variance && *targets.variance > 0.0) {
    rep.ratio = rep.scaled_variance / *targets.variance;
  }
  rep.wall_seconds = seconds_since(start);
  return rep;
}

ComparisonReport compare_estimators(const Scenario& s, const RunOptions& opts) {
  s.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t R = s.replications;
  const double T = s.sim.horizon;
  const double per_tick = s.sim.sigma2(s.u0) * (s.sim.rescaled ? 1.0 / T : 1.0);
  const double truth = s.cfg.scale(T) * T * per_tick * s.sim.intensity(s.u0);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> clock(R, nan);
  std::vector<double> decomposed(R, nan);
  std::vector<std::string> errors(R);
  for_each_replication(R, opts, [&](std::size_t r) {
    try {
      const auto series = simulate_replication(s, r);
      clock[r] = estimate_clock_vol_pavg(series, s.u0, s.cfg);
      decomposed[r] = estimate_decomposed_clock_vol(series, s.u0, s.cfg);
    } catch (const Error& e) {
      errors[r] = e.what();
    }
  });

  ComparisonReport rep;
  rep.scenario = s.name;
  rep.replications = R;
  rep.truth = truth;
  rep.comparison = comparison_case(s.smoothness);
  std::vector<double> ok_clock;
  std::vector<double> ok_dec;
  std::size_t wins = 0;
  for (std::size_t r = 0; r < R; ++r) {
    if (!errors[r].empty() || !std::isfinite(clock[r]) || !std::isfinite(decomposed[r])) {
      rep.failures.push_back({r, errors[r].empty() ? "non-finite estimate" : errors[r]});
      continue;
    }
    const double ec = (clock[r] - truth) * (clock[r] - truth);
    const double ed = (decomposed[r] - truth) * (decomposed[r] - truth);
    rep.clock_sq_err.push_back(ec);
    rep.decomposed_sq_err.push_back(ed);
    ok_clock.push_back(clock[r]);
    ok_dec.push_back(decomposed[r]);
    if (ed < ec) ++wins;
  }
  enforce_failure_budget(s.name, R, rep.failures);

  const double n = static_cast<double>(rep.clock_sq_err.size());
  for (std::size_t j = 0; j < rep.clock_sq_err.size(); ++j) {
    rep.mse_clock += rep.clock_sq_err[j];
    rep.mse_decomposed += rep.decomposed_sq_err[j];
  }
  rep.mse_clock /= n;
  rep.mse_decomposed /= n;
  rep.mse_ratio = rep.mse_decomposed / rep.mse_clock;
  rep.win_fraction = static_cast<double>(wins) / n;
  rep.variance_clock = sample_moments(ok_clock).variance;
  rep.variance_decomposed = sample_moments(ok_dec).variance;
  rep.variance_ratio = rep.variance_decomposed / rep.variance_clock;
  rep.wall_seconds = seconds_since(start);
  return rep;
}

CheckOutcome evaluate_check(const AcceptanceCheck& check, const MCReport& report) {
  std::ostringstream msg;
  msg.precision(6);
  switch (check.kind) {
    case CheckKind::variance_ratio: {
      if (!report.ratio) return {false, "no theoretical variance for this estimator"};
      const bool pass = *report.ratio >= check.lo && *report.ratio <= check.hi;
      msg << "variance ratio " << *report.ratio << " (band [" << check.lo << ", " << check.hi
          << "])";
      return {pass, msg.str()};
    }
    case CheckKind::mean_within_se: {
      const double z = std::abs(report.bias) / report.std_error;
      msg << "mean " << report.mean << " vs " << report.truth << ": " << z << " SE (limit "
          << check.k << ")";
      return {z <= check.k, msg.str()};
    }
    case CheckKind::mean_relative: {
      const double rel = std::abs(report.bias) / std::abs(report.truth);
      msg << "mean " << report.mean << " vs " << report.truth << ": relative error " << rel
          << " (limit " << check.tolerance << ")";
      return {rel <= check.tolerance, msg.str()};
    }
    case CheckKind::comparison:
      return {false, "comparison check needs a comparison report"};
  }
  return {false, "unknown check"};
}

CheckOutcome evaluate_check(const AcceptanceCheck& check, const ComparisonReport& report) {
  if (check.kind != CheckKind::comparison) return {false, "check needs a single-estimator report"};
  std::ostringstream msg;
  msg.precision(6);
  const bool pass =
      report.win_fraction >= check.min_win_fraction && report.mse_ratio < check.max_mse_ratio;
  msg << "win fraction " << report.win_fraction << " (min " << check.min_win_fraction
      << "), MSE ratio " << report.mse_ratio << " (max " << check.max_mse_ratio << ")";
  return {pass, msg.str()};
}

}  // namespace tickvol
