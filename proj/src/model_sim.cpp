#include "tickvol/model_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tickvol/errors.hpp"
#include "tickvol/rng.hpp"

namespace tickvol {

CurveSpec CurveSpec::constant(double c) {
  if (!std::isfinite(c) || c <= 0.0) {
    throw InvalidCurveError("constant curve value must be finite and > 0, got " +
                            std::to_string(c));
  }
  CurveSpec s;
  s.kind_ = CurveKind::constant;
  s.a_ = c;
  return s;
}

CurveSpec CurveSpec::cosine_log(double a, double k) {
  if (!std::isfinite(a) || !std::isfinite(k)) {
    throw InvalidCurveError("cosine_log parameters must be finite");
  }
  CurveSpec s;
  s.kind_ = CurveKind::cosine_log;
  s.a_ = a;
  s.k_ = k;
  return s;
}

CurveSpec CurveSpec::table(std::vector<double> values) {
  if (values.size() < 2) throw InvalidCurveError("table curve needs at least 2 grid points");
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw InvalidCurveError("table curve values must be finite and > 0");
    }
  }
  CurveSpec s;
  s.kind_ = CurveKind::table;
  s.values_ = std::move(values);
  return s;
}

double CurveSpec::table_at(double u) const {
  const double n = static_cast<double>(values_.size() - 1);
  const double x = std::clamp(u, 0.0, 1.0) * n;
  const auto j = std::min(static_cast<std::size_t>(x), values_.size() - 2);
  const double w = x - static_cast<double>(j);
  return (1.0 - w) * values_[j] + w * values_[j + 1];
}

double CurveSpec::operator()(double u) const {
  switch (kind_) {
    case CurveKind::constant:
      return a_;
    case CurveKind::cosine_log:
      return std::exp(a_ + std::cos(k_ * std::numbers::pi * u));
    case CurveKind::table:
      return table_at(u);
  }
  return a_;
}

double CurveSpec::derivative(double u) const {
  switch (kind_) {
    case CurveKind::constant:
      return 0.0;
    case CurveKind::cosine_log: {
      const double w = k_ * std::numbers::pi;
      return -w * std::sin(w * u) * (*this)(u);
    }
    case CurveKind::table: {
      const double step = 1.0 / static_cast<double>(values_.size() - 1);
      return (table_at(u + step) - table_at(u - step)) / (2.0 * step);
    }
  }
  return 0.0;
}

double CurveSpec::second_derivative(double u) const {
  switch (kind_) {
    case CurveKind::constant:
      return 0.0;
    case CurveKind::cosine_log: {
      const double w = k_ * std::numbers::pi;
      const double s = std::sin(w * u);
      return (*this)(u) * w * w * (s * s - std::cos(w * u));
    }
    case CurveKind::table: {
      // Central differences with step 1/(grid density); approximate only.
      const double step = 1.0 / static_cast<double>(values_.size() - 1);
      return (table_at(u + step) - 2.0 * table_at(u) + table_at(u - step)) / (step * step);
    }
  }
  return 0.0;
}

double CurveSpec::upper_bound() const {
  switch (kind_) {
    case CurveKind::constant:
      return a_;
    case CurveKind::cosine_log:
      return std::exp(a_ + 1.0);
    case CurveKind::table:
      return *std::max_element(values_.begin(), values_.end()) * 1.001;
  }
  return a_;
}

void NoiseModel::validate() const {
  if (!std::isfinite(omega) || omega < 0.0) throw DomainError("noise omega must be >= 0");
  if (!std::isfinite(theta) || theta <= 0.0) throw DomainError("noise theta must be > 0");
}

TickSeries::TickSeries(double horizon, std::vector<double> times, std::vector<double> log_prices,
                       bool clean)
    : horizon_(horizon), times_(std::move(times)), log_prices_(std::move(log_prices)), clean_(clean) {
  if (!std::isfinite(horizon_) || horizon_ <= 0.0) {
    throw DomainError("series horizon must be finite and > 0");
  }
  if (times_.size() != log_prices_.size()) {
    throw DomainError("times and log-prices differ in length");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(log_prices_[i])) {
      throw DomainError("non-finite value at index " + std::to_string(i));
    }
    if (times_[i] < 0.0 || times_[i] > horizon_) {
      throw DomainError("time outside [0, T] at index " + std::to_string(i));
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DomainError("times not strictly increasing at index " + std::to_string(i));
    }
  }
}

std::vector<double> sample_nhpp(const CurveSpec& intensity, double horizon, std::uint64_t seed) {
  if (!std::isfinite(horizon) || horizon <= 0.0) throw DomainError("horizon must be > 0");
  const double rate_max = intensity.upper_bound();
  if (!std::isfinite(rate_max) || rate_max <= 0.0) {
    throw InvalidCurveError("intensity upper bound must be finite and > 0");
  }

  Engine rng(seed);
  std::exponential_distribution<double> gap(rate_max);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(rate_max * horizon * 1.1) + 16);
  double t = 0.0;
  while (true) {
    t += gap(rng);
    if (t > horizon) break;
    const double rate = intensity(t / horizon);
    if (!std::isfinite(rate) || rate <= 0.0) {
      throw InvalidCurveError("intensity evaluated to a non-positive or non-finite value at u=" +
                              std::to_string(t / horizon));
    }
    if (unif(rng) * rate_max <= rate && (times.empty() || t > times.back())) {
      times.push_back(t);
    }
  }
  return times;
}

std::vector<double> sample_tick_path(const CurveSpec& sigma2, std::span<const double> times,
                                     double horizon, bool rescaled, std::uint64_t seed,
                                     double x0) {
  Engine rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = rescaled ? 1.0 / std::sqrt(horizon) : 1.0;

  std::vector<double> path(times.size());
  double x = x0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double var = sigma2(times[i] / horizon);
    if (!std::isfinite(var) || var <= 0.0) {
      throw InvalidCurveError("sigma2 evaluated to a non-positive or non-finite value");
    }
    x += std::sqrt(var) * normal(rng) * scale;
    path[i] = x;
  }
  return path;
}

std::vector<double> apply_noise(std::span<const double> latent, const NoiseModel& model,
                                std::uint64_t seed) {
  model.validate();
  std::vector<double> out(latent.begin(), latent.end());
  if (model.is_identity()) return out;

  Engine rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double eps = model.omega > 0.0 ? model.omega * normal(rng) : 0.0;
    if (!model.rounding) {
      out[i] += eps;
      continue;
    }
    const double price = std::exp(out[i]) + eps;
    if (!(price > 0.01)) {
      throw DomainError("rounded price would be non-positive at index " + std::to_string(i));
    }
    out[i] = std::log(std::floor(100.0 * price) / 100.0);
  }
  return out;
}

TickSeries simulate_on_arrivals(const SimulationConfig& cfg, std::vector<double> times) {
  cfg.noise.validate();
  auto latent = sample_tick_path(cfg.sigma2, times, cfg.horizon, cfg.rescaled,
                                 derive_seed(cfg.seed, "increments"), cfg.x0);
  auto observed = apply_noise(latent, cfg.noise, derive_seed(cfg.seed, "noise"));
  return TickSeries(cfg.horizon, std::move(times), std::move(observed));
}

TickSeries simulate(const SimulationConfig& cfg) {
  auto times = sample_nhpp(cfg.intensity, cfg.horizon, derive_seed(cfg.seed, "arrivals"));
  return simulate_on_arrivals(cfg, std::move(times));
}

}  // namespace tickvol
