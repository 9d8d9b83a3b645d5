#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tickvol/asymptotics.hpp"
#include "tickvol/estimators.hpp"
#include "tickvol/model_sim.hpp"

namespace tickvol {

struct Scenario {
  std::string name;
  SimulationConfig sim;  // sim.seed is the master seed
  EstimatorConfig cfg;
  double u0 = 0.5;
  std::size_t replications = 100;
  Smoothness smoothness;

  // delta = H / sqrt(T)
  double delta() const;
  void validate() const;
};

/// Seed of replication r; independent of execution order.
std::uint64_t replication_seed(const Scenario& s, std::size_t r);
TickSeries simulate_replication(const Scenario& s, std::size_t r);

struct ReplicationFailure {
  std::size_t index = 0;
  std::string message;
};

struct MCReport {
  std::string scenario;
  EstimatorTag tag = EstimatorTag::intensity;
  std::size_t replications = 0;
  std::vector<double> estimates;  // NaN where the replication failed
  std::vector<ReplicationFailure> failures;

  double truth = 0.0;   // population value of the estimand at u0
  double center = 0.0;  // value the scaled errors are centred at
  double mean = 0.0;
  double std_error = 0.0;  // Monte Carlo standard error of the mean
  double bias = 0.0;       // mean - truth

  std::vector<double> scaled_errors;  // rate * (estimate - center), successes only
  double scaled_variance = 0.0;
  std::optional<double> target_variance;
  std::optional<double> ratio;  // scaled_variance / target_variance
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::string regime;

  double wall_seconds = 0.0;
};

struct ComparisonReport {
  std::string scenario;
  std::size_t replications = 0;
  double truth = 0.0;
  std::vector<double> clock_sq_err;
  std::vector<double> decomposed_sq_err;
  std::vector<ReplicationFailure> failures;
  double mse_clock = 0.0;
  double mse_decomposed = 0.0;
  double mse_ratio = 0.0;     // decomposed / clock
  double win_fraction = 0.0;  // share of replications where decomposed is closer
  double variance_clock = 0.0;
  double variance_decomposed = 0.0;
  double variance_ratio = 0.0;  // decomposed / clock
  ComparisonCase comparison;
  double wall_seconds = 0.0;
};

struct RunOptions {
  std::size_t threads = 0;     // 0: TICKVOL_THREADS or hardware concurrency
  bool reverse_order = false;  // execution order only; results stay keyed by index
};

std::size_t default_thread_count();

/// R independent simulate -> estimate replications at s.u0. Throws
/// ScenarioAbortedError when more than 5% of the replications fail.
MCReport run_scenario(const Scenario& s, EstimatorTag tag, const RunOptions& opts = {});

/// Head-to-head squared errors of clock_pavg and decomposed at s.u0 on
/// the same simulated series.
ComparisonReport compare_estimators(const Scenario& s, const RunOptions& opts = {});

/// Sample summary helpers (population-style moments of standardised values).
struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};
Moments sample_moments(const std::vector<double>& xs);

// ---- scenario registry -------------------------------------------------

enum class CheckKind { variance_ratio, mean_within_se, mean_relative, comparison };

/// Acceptance band attached to a registry scenario.
///   variance_ratio  lo <= ratio <= hi
///   mean_within_se  |mean - truth| <= k * std_error
///   mean_relative   |mean - truth| <= tolerance * |truth|
///   comparison      win_fraction >= min_win_fraction and mse_ratio < max_mse_ratio
struct AcceptanceCheck {
  CheckKind kind = CheckKind::variance_ratio;
  double lo = 0.0;
  double hi = 0.0;
  double k = 3.0;
  double tolerance = 0.1;
  double min_win_fraction = 0.7;
  double max_mse_ratio = 1.0;
};

struct RegistryEntry {
  Scenario scenario;
  std::optional<EstimatorTag> tag;  // empty for comparison scenarios
  AcceptanceCheck check;
};

struct CheckOutcome {
  bool pass = false;
  std::string message;
};

CheckOutcome evaluate_check(const AcceptanceCheck& check, const MCReport& report);
CheckOutcome evaluate_check(const AcceptanceCheck& check, const ComparisonReport& report);

}  // namespace tickvol
