#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tickvol {

enum class CurveKind { constant, cosine_log, table };

/// Deterministic, strictly positive curve on rescaled time u in [0, 1].
/// Used for both the tick-time volatility sigma^2(u) and the intensity lambda(u).
///
///   constant(c)        c
///   cosine_log(a, k)   exp(a + cos(k * pi * u))
///   table(values)      linear interpolation on a uniform grid over [0, 1]
class CurveSpec {
 public:
  static CurveSpec constant(double c);
  static CurveSpec cosine_log(double a, double k);
  static CurveSpec table(std::vector<double> values);

  double operator()(double u) const;
  double derivative(double u) const;
  double second_derivative(double u) const;

  // Upper bound on sup_u curve(u), used as the thinning rate.
  double upper_bound() const;

  CurveKind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_k() const { return k_; }
  const std::vector<double>& values() const { return values_; }

 private:
  CurveSpec() = default;
  double table_at(double u) const;

  CurveKind kind_ = CurveKind::constant;
  double a_ = 1.0;  // constant value, or the log-level of cosine_log
  double k_ = 0.0;
  std::vector<double> values_;
};

struct NoiseModel {
  double omega = 0.0;     // standard deviation of the additive noise
  double theta = 2.0;     // Var[eps^2] = theta * omega^4; Gaussian noise has theta = 2
  bool rounding = false;  // round exp(X) + eps down to cents before taking logs

  void validate() const;
  bool is_identity() const { return omega == 0.0 && !rounding; }
};

/// Strictly increasing arrival times on [0, T] with aligned observed log-prices.
class TickSeries {
 public:
  TickSeries() = default;
  TickSeries(double horizon, std::vector<double> times, std::vector<double> log_prices,
             bool clean = false);

  double horizon() const { return horizon_; }
  std::span<const double> times() const { return times_; }
  std::span<const double> log_prices() const { return log_prices_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  bool clean() const { return clean_; }

  friend bool operator==(const TickSeries&, const TickSeries&) = default;

 private:
  double horizon_ = 1.0;
  std::vector<double> times_;
  std::vector<double> log_prices_;
  bool clean_ = false;
};

/// Arrival times of a nonhomogeneous Poisson process with intensity
/// lambda(t / T) on (0, T], by Lewis-Shedler thinning against upper_bound().
std::vector<double> sample_nhpp(const CurveSpec& intensity, double horizon, std::uint64_t seed);

/// Latent log-prices X_{t_i}: X starts at x0 and moves by
/// sigma(t_i / T) * U_i, times 1/sqrt(T) when `rescaled`.
std::vector<double> sample_tick_path(const CurveSpec& sigma2, std::span<const double> times,
                                     double horizon, bool rescaled, std::uint64_t seed,
                                     double x0 = 0.0);

/// Observed log-prices. Additive mode: Y = X + eps. Rounding mode:
/// Y = log(floor(100 * (exp(X) + eps)) / 100).
std::vector<double> apply_noise(std::span<const double> latent, const NoiseModel& model,
                                std::uint64_t seed);

struct SimulationConfig {
  CurveSpec sigma2 = CurveSpec::constant(1.0);
  CurveSpec intensity = CurveSpec::constant(1.0);
  NoiseModel noise;
  double horizon = 23400.0;
  bool rescaled = true;
  double x0 = 0.0;
  std::uint64_t seed = 1;
};

/// Full simulation; arrivals, increments and noise draw from separate
/// sub-streams of `cfg.seed`.
TickSeries simulate(const SimulationConfig& cfg);

/// Same as simulate() but with externally supplied arrival times.
TickSeries simulate_on_arrivals(const SimulationConfig& cfg, std::vector<double> times);

}  // namespace tickvol
