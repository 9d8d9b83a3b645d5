#include "tickvol/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tickvol/errors.hpp"

namespace tickvol {

void EstimatorConfig::validate() const {
  auto check_bandwidth = [](double b, const char* name) {
    if (!std::isfinite(b) || b <= 0.0 || b > 0.5) {
      throw ConfigError(std::string(name) + " must lie in (0, 1/2], got " + std::to_string(b));
    }
  };
  check_bandwidth(intensity_bandwidth, "intensity_bandwidth");
  check_bandwidth(clock_bandwidth, "clock_bandwidth");
  if (tick_window && *tick_window < block_size()) {
    throw ConfigError("tick_window N must be >= block_size H");
  }
}

double EstimatorConfig::scale(double horizon) const {
  return convention == Convention::rescaled ? 1.0 : 1.0 / horizon;
}

std::size_t matched_tick_window(double window_seconds, std::size_t n_ticks, double horizon) {
  return static_cast<std::size_t>(std::floor(window_seconds * static_cast<double>(n_ticks) / horizon));
}

std::size_t resolve_tick_window(const EstimatorConfig& cfg, const TickSeries& series) {
  if (cfg.tick_window) return *cfg.tick_window;
  const double T = series.horizon();
  const std::size_t n = matched_tick_window(cfg.clock_bandwidth * T, series.size(), T);
  if (n < cfg.block_size()) {
    throw OutOfRangeError("matched tick window " + std::to_string(n) + " is below block size " +
                          std::to_string(cfg.block_size()));
  }
  return n;
}

namespace {

void check_interior(double u0, double bandwidth, const char* what) {
  if (!(u0 > bandwidth && u0 < 1.0 - bandwidth)) {
    throw BoundaryError(std::string(what) + ": u0=" + std::to_string(u0) +
                        " is not inside (b, 1-b) for b=" + std::to_string(bandwidth));
  }
}

// Indices [first, last) of ticks strictly inside (t0 - width, t0 + width).
std::pair<std::size_t, std::size_t> kernel_window(std::span<const double> t, double t0,
                                                  double width) {
  const auto lo = std::upper_bound(t.begin(), t.end(), t0 - width);
  const auto hi = std::lower_bound(lo, t.end(), t0 + width);
  return {static_cast<std::size_t>(lo - t.begin()), static_cast<std::size_t>(hi - t.begin())};
}

double squared_return(std::span<const double> y, std::size_t i) {
  const double d = y[i] - y[i - 1];
  return d * d;
}

// Kernel-weighted sum of squared raw returns without normalisation.
double raw_realized_sum(const TickSeries& series, double u0, double bandwidth,
                        const KernelSpec& kernel) {
  const auto t = series.times();
  const auto y = series.log_prices();
  const double width = bandwidth * series.horizon();
  const double t0 = u0 * series.horizon();
  const auto [first, last] = kernel_window(t, t0, width);
  double acc = 0.0;
  for (std::size_t i = std::max<std::size_t>(first, 1); i < last; ++i) {
    acc += kernel((t[i] - t0) / width) * squared_return(y, i);
  }
  return acc;
}

}  // namespace

std::size_t first_index_at_or_after(const TickSeries& series, double u0) {
  const auto t = series.times();
  const double t0 = u0 * series.horizon();
  return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), t0) - t.begin());
}

double estimate_intensity(const TickSeries& series, double u0, const EstimatorConfig& cfg) {
  const double b = cfg.intensity_bandwidth;
  check_interior(u0, b, "intensity");
  const auto t = series.times();
  const double width = b * series.horizon();
  const double t0 = u0 * series.horizon();
  const auto [first, last] = kernel_window(t, t0, width);
  double acc = 0.0;
  for (std::size_t i = first; i < last; ++i) acc += cfg.intensity_kernel((t[i] - t0) / width);
  return acc / width;
}

VolTerms clock_vol_terms(const TickSeries& series, double u0, const EstimatorConfig& cfg) {
  const double b = cfg.clock_bandwidth;
  check_interior(u0, b, "clock_pavg");
  const auto t = series.times();
  const auto y = series.log_prices();
  const std::size_t H = cfg.block_size();
  const auto& c = cfg.weight.constants();
  const double width = b * series.horizon();
  const double t0 = u0 * series.horizon();
  const auto [first, last] = kernel_window(t, t0, width);

  double pavg_sum = 0.0;
  double raw_sum = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const double w = cfg.clock_kernel((t[i] - t0) / width);
    // Blocks running past the end of the series are dropped.
    if (i + H - 1 < y.size()) {
      const double p = pre_averaged_increment(y, i, cfg.weight);
      pavg_sum += w * p * p;
    }
    if (i >= 1) raw_sum += w * squared_return(y, i);
  }
  const double Hd = static_cast<double>(H);
  const double s = cfg.scale(series.horizon());
  return {s * pavg_sum / (b * Hd * c.g2), s * raw_sum * c.sum_h2 / (2.0 * b * Hd * c.g2)};
}

double estimate_clock_vol_pavg(const TickSeries& series, double u0, const EstimatorConfig& cfg) {
  return clock_vol_terms(series, u0, cfg).value();
}

VolTerms tick_vol_terms(const TickSeries& series, double u0, const EstimatorConfig& cfg) {
  const std::size_t n = series.size();
  const std::size_t H = cfg.block_size();
  const std::size_t N = resolve_tick_window(cfg, series);
  const std::size_t i0 = first_index_at_or_after(series, u0);
  if (i0 >= n) {
    throw OutOfRangeError("tick_pavg: no tick at or after u0=" + std::to_string(u0));
  }
  if (i0 < N + 1) {
    throw OutOfRangeError("tick_pavg: " + std::to_string(N + 1 - i0) +
                          " ticks missing before u0=" + std::to_string(u0));
  }
  if (i0 + N + H - 1 > n - 1) {
    throw OutOfRangeError("tick_pavg: " + std::to_string(i0 + N + H - n) +
                          " ticks missing after u0=" + std::to_string(u0));
  }

  const auto y = series.log_prices();
  const auto& c = cfg.weight.constants();
  const double Nd = static_cast<double>(N);
  double pavg_sum = 0.0;
  double raw_sum = 0.0;
  for (std::size_t i = i0 - N; i <= i0 + N; ++i) {
    const double w = cfg.tick_kernel((static_cast<double>(i) - static_cast<double>(i0)) / Nd);
    const double p = pre_averaged_increment(y, i, cfg.weight);
    pavg_sum += w * p * p;
    raw_sum += w * squared_return(y, i);
  }
  const double T = series.horizon();
  const double Hd = static_cast<double>(H);
  const double s = cfg.scale(T);
  return {s * T * pavg_sum / (Nd * Hd * c.g2), s * T * raw_sum * c.sum_h2 / (2.0 * Nd * Hd * c.g2)};
}

double estimate_tick_vol_pavg(const TickSeries& series, double u0, const EstimatorConfig& cfg) {
  return tick_vol_terms(series, u0, cfg).value();
}

double estimate_decomposed_clock_vol(const TickSeries& series, double u0,
                                     const EstimatorConfig& cfg) {
  const double tick = estimate_tick_vol_pavg(series, u0, cfg);
  const double intensity = estimate_intensity(series, u0, cfg);
  return tick * intensity;
}

double estimate_realized_vol(const TickSeries& series, double u0, const EstimatorConfig& cfg) {
  check_interior(u0, cfg.clock_bandwidth, "realized_vol");
  return cfg.scale(series.horizon()) *
         raw_realized_sum(series, u0, cfg.clock_bandwidth, cfg.clock_kernel) / cfg.clock_bandwidth;
}

double estimate_noise_variance(const TickSeries& series, double u0, const EstimatorConfig& cfg) {
  check_interior(u0, cfg.clock_bandwidth, "noise_var");
  const double intensity = estimate_intensity(series, u0, cfg);
  if (!(intensity > 0.0)) {
    throw DegenerateError("noise_var: intensity estimate is zero at u0=" + std::to_string(u0));
  }
  const double rv =
      raw_realized_sum(series, u0, cfg.clock_bandwidth, cfg.clock_kernel) / cfg.clock_bandwidth;
  return rv / (2.0 * series.horizon() * intensity);
}

std::string_view to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::intensity:
      return "intensity";
    case EstimatorTag::clock_pavg:
      return "clock_pavg";
    case EstimatorTag::tick_pavg:
      return "tick_pavg";
    case EstimatorTag::decomposed:
      return "decomposed";
    case EstimatorTag::noise_var:
      return "noise_var";
    case EstimatorTag::realized_vol:
      return "realized_vol";
  }
  return "intensity";
}

EstimatorTag estimator_tag_from_string(std::string_view name) {
  for (auto tag : {EstimatorTag::intensity, EstimatorTag::clock_pavg, EstimatorTag::tick_pavg,
                   EstimatorTag::decomposed, EstimatorTag::noise_var, EstimatorTag::realized_vol}) {
    if (to_string(tag) == name) return tag;
  }
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

double estimate(const TickSeries& series, double u0, const EstimatorConfig& cfg, EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::intensity:
      return estimate_intensity(series, u0, cfg);
    case EstimatorTag::clock_pavg:
      return estimate_clock_vol_pavg(series, u0, cfg);
    case EstimatorTag::tick_pavg:
      return estimate_tick_vol_pavg(series, u0, cfg);
    case EstimatorTag::decomposed:
      return estimate_decomposed_clock_vol(series, u0, cfg);
    case EstimatorTag::noise_var:
      return estimate_noise_variance(series, u0, cfg);
    case EstimatorTag::realized_vol:
      return estimate_realized_vol(series, u0, cfg);
  }
  return 0.0;
}

std::string_view to_string(ReasonCode code) {
  switch (code) {
    case ReasonCode::ok:
      return "ok";
    case ReasonCode::boundary:
      return "boundary";
    case ReasonCode::insufficient_ticks:
      return "insufficient_ticks";
    case ReasonCode::degenerate:
      return "degenerate";
    case ReasonCode::non_finite:
      return "non_finite";
  }
  return "ok";
}

CurveEstimate estimate_on_grid(const TickSeries& series, const EstimatorConfig& cfg,
                               EstimatorTag tag) {
  CurveEstimate out;
  out.tag = tag;
  out.config = cfg;
  out.points.reserve(cfg.grid.size());
  for (double u : cfg.grid) {
    CurvePoint p;
    p.u = u;
    try {
      const double v = estimate(series, u, cfg, tag);
      if (std::isfinite(v)) {
        p.value = v;
      } else {
        p.reason = ReasonCode::non_finite;
      }
    } catch (const BoundaryError& e) {
      p.reason = ReasonCode::boundary;
      p.detail = e.what();
    } catch (const OutOfRangeError& e) {
      p.reason = ReasonCode::insufficient_ticks;
      p.detail = e.what();
    } catch (const DegenerateError& e) {
      p.reason = ReasonCode::degenerate;
      p.detail = e.what();
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

std::vector<double> interior_grid(std::size_t n, double margin) {
  std::vector<double> grid(n);
  const double span = 1.0 - 2.0 * margin;
  for (std::size_t j = 0; j < n; ++j) {
    grid[j] = margin + span * (static_cast<double>(j) + 1.0) / (static_cast<double>(n) + 1.0);
  }
  return grid;
}

}  // namespace tickvol
