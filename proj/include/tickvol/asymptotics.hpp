#pragma once

#include <optional>
#include <string_view>

#include "tickvol/kernels.hpp"

namespace tickvol {

/// Variance of the form delta * A + B / delta + C / delta^3.
struct VarianceComponents {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double delta = 1.0;
  double total() const;
};

/// Limit variance of sqrt(b T^{1/2}) (clock_pavg - sigma^2 lambda - bias).
VarianceComponents clock_variance_target(double sigma2, double lambda, double omega2, double delta,
                                         const KernelSpec& kernel, const PreAvgWeight& weight);

/// Limit variance of sqrt(N / T^{1/2}) (tick_pavg - sigma^2).
VarianceComponents tick_variance_target(double sigma2, double omega2, double delta,
                                        const KernelSpec& kernel, const PreAvgWeight& weight);

/// Limit variance of sqrt(b T) (intensity - E intensity): lambda * int K^2.
double intensity_variance_target(double lambda, const KernelSpec& kernel);

/// (1/2) (sigma^2 lambda)'' b^2 int x^2 K; zero unless both curves are C^2.
double clock_bias_target(double sigma2_lambda_second_deriv, double bandwidth,
                         const KernelSpec& kernel, bool twice_differentiable = true);

/// Minimiser of delta A + B / delta + C / delta^3 over delta > 0, or
/// nullopt when B = C = 0 (objective decreases towards delta -> 0).
std::optional<double> optimal_delta(double a, double b, double c);

/// Hoelder smoothness (m, gamma) of sigma^2 and (m', gamma') of lambda.
/// Scenario metadata only; never estimated.
struct Smoothness {
  int m = 2;
  double gamma = 0.5;
  int m_prime = 2;
  double gamma_prime = 0.5;
};

/// Which limit governs the decomposed estimator.
///   tick       sqrt(N / T^{1/2}) rate, variance V^2
///   intensity  sqrt(b T) rate, variance W^2 (first part)
///   boundary   both rates of the same order; W^2 includes the c1 term
enum class DecompositionRegime { tick, intensity, boundary };

std::string_view to_string(DecompositionRegime regime);

DecompositionRegime decomposition_regime(const Smoothness& s);

struct DecomposedTargets {
  DecompositionRegime regime = DecompositionRegime::tick;
  double v2 = 0.0;
  double w2 = 0.0;
  double c1 = 0.0;
};

/// V^2 = lambda^2 (tick total); W^2 = sigma^4 lambda int K^2 (+ c1 lambda^2 tick total
/// on the boundary), with c1 = (b T) / (N / T^{1/2}) using the intensity bandwidth.
DecomposedTargets decomposed_targets(double sigma2, double lambda, double omega2, double delta,
                                     const KernelSpec& intensity_kernel,
                                     const KernelSpec& tick_kernel, const PreAvgWeight& weight,
                                     const Smoothness& s, double intensity_bandwidth,
                                     double horizon, double tick_window);

enum class RateComparison { faster, same_rate, unknown };

struct ComparisonCase {
  int id = 0;  // 1..12
  RateComparison verdict = RateComparison::unknown;
};

/// Case of the rate/variance comparison between the decomposed and the
/// classical clock estimator for the given smoothness.
ComparisonCase comparison_case(const Smoothness& s);

/// Largest kappa such that N = T^kappa satisfies the segment condition
/// needed by the tick-time CLT for this smoothness (strict inequality).
double max_tick_window_exponent(const Smoothness& s);

/// Overlap constants of pre-averaged squares:
/// phi_1(s) = int g'(x) g'(x+s) dx, phi_2(s) = int g(x) g(x+s) dx and
/// Phi_ij = int_0^1 phi_i phi_j ds.
struct OverlapConstants {
  double phi11 = 0.0;
  double phi12 = 0.0;
  double phi22 = 0.0;
};

OverlapConstants overlap_constants(const WeightFunction& g);

/// Variance of sqrt(N / T^{1/2}) (tick_pavg - sigma^2) obtained when the
/// dependence between overlapping pre-averaged blocks is carried through:
/// int k^2 (delta 4 Phi22 sigma^4 + 8 Phi12 sigma^2 omega^2 / delta + 4 Phi11 omega^4 / delta^3) / g2^2.
VarianceComponents tick_variance_overlap(double sigma2, double omega2, double delta,
                                         const KernelSpec& kernel, const PreAvgWeight& weight);

}  // namespace tickvol
