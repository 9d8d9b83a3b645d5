#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tickvol/kernels.hpp"
#include "tickvol/model_sim.hpp"

namespace tickvol {

/// Which normalisation the volatility estimates are reported in.
///   rescaled    prices follow dX = sigma(t/T) T^{-1/2} dW_N; estimates target sigma^2, sigma^2 lambda
///   unrescaled  per-tick variance without the T^{-1/2} factor (real data);
///               volatility estimates are multiplied by 1/T
enum class Convention { rescaled, unrescaled };

struct EstimatorConfig {
  double intensity_bandwidth = 0.05;  // fraction of [0, 1], per side
  double clock_bandwidth = 0.05;      // fraction of [0, 1], per side; M = b T seconds
  // Ticks per side for the tick-time estimator. Empty: floor(b * #ticks),
  // i.e. the same range as the clock window.
  std::optional<std::size_t> tick_window;
  PreAvgWeight weight{15};
  KernelSpec intensity_kernel;
  KernelSpec clock_kernel;
  KernelSpec tick_kernel;
  std::vector<double> grid;
  Convention convention = Convention::rescaled;

  std::size_t block_size() const { return weight.block_size(); }
  void validate() const;
  // Multiplier applied to volatility estimates (1 or 1/T).
  double scale(double horizon) const;
};

/// Tick window with the same coverage as a clock window of M seconds:
/// floor(M * n_ticks / T).
std::size_t matched_tick_window(double window_seconds, std::size_t n_ticks, double horizon);

std::size_t resolve_tick_window(const EstimatorConfig& cfg, const TickSeries& series);

/// Pre-averaged quadratic term and its noise-bias correction. The estimate
/// is first - correction, already multiplied by the convention scale.
struct VolTerms {
  double first = 0.0;
  double correction = 0.0;
  double value() const { return first - correction; }
};

double estimate_intensity(const TickSeries& series, double u0, const EstimatorConfig& cfg);

VolTerms clock_vol_terms(const TickSeries& series, double u0, const EstimatorConfig& cfg);
double estimate_clock_vol_pavg(const TickSeries& series, double u0, const EstimatorConfig& cfg);

VolTerms tick_vol_terms(const TickSeries& series, double u0, const EstimatorConfig& cfg);
double estimate_tick_vol_pavg(const TickSeries& series, double u0, const EstimatorConfig& cfg);

double estimate_decomposed_clock_vol(const TickSeries& series, double u0,
                                     const EstimatorConfig& cfg);

double estimate_realized_vol(const TickSeries& series, double u0, const EstimatorConfig& cfg);

double estimate_noise_variance(const TickSeries& series, double u0, const EstimatorConfig& cfg);

// First index with t_i >= u0 * T, or size() if none.
std::size_t first_index_at_or_after(const TickSeries& series, double u0);

enum class EstimatorTag { intensity, clock_pavg, tick_pavg, decomposed, noise_var, realized_vol };

std::string_view to_string(EstimatorTag tag);
EstimatorTag estimator_tag_from_string(std::string_view name);

double estimate(const TickSeries& series, double u0, const EstimatorConfig& cfg, EstimatorTag tag);

enum class ReasonCode { ok, boundary, insufficient_ticks, degenerate, non_finite };

std::string_view to_string(ReasonCode code);

struct CurvePoint {
  double u = 0.0;
  std::optional<double> value;
  ReasonCode reason = ReasonCode::ok;
  std::string detail;
};

struct CurveEstimate {
  EstimatorTag tag = EstimatorTag::intensity;
  std::vector<CurvePoint> points;
  EstimatorConfig config;
};

/// Pointwise evaluation over cfg.grid; points that fail a precondition
/// carry a reason code instead of a value.
CurveEstimate estimate_on_grid(const TickSeries& series, const EstimatorConfig& cfg,
                               EstimatorTag tag);

/// n equally spaced points strictly inside (margin, 1 - margin).
std::vector<double> interior_grid(std::size_t n, double margin);

}  // namespace tickvol
