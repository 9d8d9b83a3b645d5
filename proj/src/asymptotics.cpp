#include "tickvol/asymptotics.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "tickvol/errors.hpp"

namespace tickvol {

double VarianceComponents::total() const {
  return delta * a + b / delta + c / (delta * delta * delta);
}

namespace {

void require_positive_delta(double delta) {
  if (!std::isfinite(delta) || delta <= 0.0) throw DomainError("delta must be > 0");
}

double slope_ratio(const PreAvgWeight& weight) {
  const auto& c = weight.constants();
  return c.g2_prime / c.g2;
}

}  // namespace

VarianceComponents tick_variance_target(double sigma2, double omega2, double delta,
                                        const KernelSpec& kernel, const PreAvgWeight& weight) {
  require_positive_delta(delta);
  const double k2 = kernel.squared_integral();
  const double r = slope_ratio(weight);
  return {2.0 * sigma2 * sigma2 * k2, 4.0 * omega2 * sigma2 * r * k2, 2.0 * omega2 * omega2 * r * r * k2,
          delta};
}

VarianceComponents clock_variance_target(double sigma2, double lambda, double omega2, double delta,
                                         const KernelSpec& kernel, const PreAvgWeight& weight) {
  auto v = tick_variance_target(sigma2, omega2, delta, kernel, weight);
  v.a *= lambda;
  v.b *= lambda;
  v.c *= lambda;
  return v;
}

double intensity_variance_target(double lambda, const KernelSpec& kernel) {
  return lambda * kernel.squared_integral();
}

double clock_bias_target(double sigma2_lambda_second_deriv, double bandwidth,
                         const KernelSpec& kernel, bool twice_differentiable) {
  if (!twice_differentiable) return 0.0;
  return 0.5 * sigma2_lambda_second_deriv * bandwidth * bandwidth * kernel.second_moment();
}

std::optional<double> optimal_delta(double a, double b, double c) {
  if (!(a > 0.0)) throw DomainError("optimal_delta: A must be > 0");
  if (b < 0.0 || c < 0.0) throw DomainError("optimal_delta: B and C must be >= 0");
  if (b == 0.0 && c == 0.0) return std::nullopt;

  // d/d delta of the objective; increasing in delta for delta > 0.
  auto slope = [=](double d) { return a - b / (d * d) - 3.0 * c / (d * d * d * d); };
  double lo = 1.0;
  double hi = 1.0;
  while (slope(lo) > 0.0) lo *= 0.5;
  while (slope(hi) < 0.0) hi *= 2.0;
  if (slope(lo) == 0.0) return lo;
  if (slope(hi) == 0.0) return hi;

  std::uintmax_t max_iter = 200;
  auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::max(1.0, std::abs(x)); };
  const auto [left, right] = boost::math::tools::toms748_solve(slope, lo, hi, tol, max_iter);
  return 0.5 * (left + right);
}

std::string_view to_string(DecompositionRegime regime) {
  switch (regime) {
    case DecompositionRegime::tick:
      return "tick";
    case DecompositionRegime::intensity:
      return "intensity";
    case DecompositionRegime::boundary:
      return "boundary";
  }
  return "tick";
}

DecompositionRegime decomposition_regime(const Smoothness& s) {
  if (s.m_prime >= 1) return DecompositionRegime::tick;
  double threshold = 0.0;
  if (s.m == 0) {
    threshold = s.gamma / (2.0 * s.gamma + 2.0);
  } else if (s.m == 1) {
    const double gs = std::min(s.gamma, s.gamma_prime);
    threshold = (gs + 2.0) / (2.0 * gs + 8.0);
  } else {
    threshold = (std::sqrt(65.0) - 7.0) / 4.0;
  }
  if (s.gamma_prime > threshold) return DecompositionRegime::tick;
  if (s.gamma_prime < threshold) return DecompositionRegime::intensity;
  return DecompositionRegime::boundary;
}

DecomposedTargets decomposed_targets(double sigma2, double lambda, double omega2, double delta,
                                     const KernelSpec& intensity_kernel,
                                     const KernelSpec& tick_kernel, const PreAvgWeight& weight,
                                     const Smoothness& s, double intensity_bandwidth,
                                     double horizon, double tick_window) {
  DecomposedTargets out;
  out.regime = decomposition_regime(s);
  const double tick_total = tick_variance_target(sigma2, omega2, delta, tick_kernel, weight).total();
  out.v2 = lambda * lambda * tick_total;
  out.c1 = intensity_bandwidth * horizon / (tick_window / std::sqrt(horizon));
  switch (out.regime) {
    case DecompositionRegime::tick:
      break;
    case DecompositionRegime::intensity:
      out.w2 = sigma2 * sigma2 * lambda * intensity_kernel.squared_integral();
      break;
    case DecompositionRegime::boundary:
      out.w2 = sigma2 * sigma2 * lambda * intensity_kernel.squared_integral() +
               out.c1 * lambda * lambda * tick_total;
      break;
  }
  return out;
}

ComparisonCase comparison_case(const Smoothness& s) {
  const int m = s.m;
  const int mp = s.m_prime;
  const double g = s.gamma;
  const double gp = s.gamma_prime;
  auto faster = [](int id) { return ComparisonCase{id, RateComparison::faster}; };
  auto same = [](int id) { return ComparisonCase{id, RateComparison::same_rate}; };
  auto unknown = [](int id) { return ComparisonCase{id, RateComparison::unknown}; };

  if (m == 0 && mp == 0) return g > gp ? faster(1) : same(6);
  if (m == 1 && mp == 0) return faster(2);
  if (m == 1 && mp == 1) return 2.0 * gp < g ? faster(3) : unknown(9);
  if (m == 2 && mp == 0) return faster(4);
  if (m == 2 && mp == 1) return gp < 0.5 ? faster(5) : unknown(11);
  if (m == 0 && mp == 1) return same(7);
  if (m == 0 && mp == 2) return same(8);
  if (m == 1 && mp == 2) return unknown(10);
  return unknown(12);
}

double max_tick_window_exponent(const Smoothness& s) {
  // N^p / T^q -> 0 with N = T^kappa  <=>  kappa < q / p.
  if (s.m == 0) return (0.5 + 2.0 * s.gamma) / (1.0 + 2.0 * s.gamma);
  if (s.m == 1) {
    const double g = s.m_prime == 0 ? std::min(s.gamma, s.gamma_prime) : s.gamma;
    return (2.5 + g) / (3.0 + g);
  }
  if (s.m_prime == 0) return (2.5 + s.gamma_prime) / (3.0 + s.gamma_prime);
  return 3.5 / 4.0;
}

OverlapConstants overlap_constants(const WeightFunction& g) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr double h = 1e-6;
  auto dg = [&](double x) {
    if (g.is_default()) return 1.0 - 2.0 * x;
    return (g(std::min(x + h, 1.0)) - g(std::max(x - h, 0.0))) /
           (std::min(x + h, 1.0) - std::max(x - h, 0.0));
  };
  auto phi1 = [&](double s) {
    if (s >= 1.0) return 0.0;
    return gauss_kronrod<double, 31>::integrate([&](double x) { return dg(x) * dg(x + s); }, 0.0,
                                                1.0 - s, 10, 1e-12);
  };
  auto phi2 = [&](double s) {
    if (s >= 1.0) return 0.0;
    return gauss_kronrod<double, 31>::integrate([&](double x) { return g(x) * g(x + s); }, 0.0,
                                                1.0 - s, 10, 1e-12);
  };
  OverlapConstants out;
  out.phi11 = gauss_kronrod<double, 31>::integrate(
      [&](double s) {
        const double p = phi1(s);
        return p * p;
      },
      0.0, 1.0, 10, 1e-12);
  out.phi12 = gauss_kronrod<double, 31>::integrate([&](double s) { return phi1(s) * phi2(s); },
                                                   0.0, 1.0, 10, 1e-12);
  out.phi22 = gauss_kronrod<double, 31>::integrate(
      [&](double s) {
        const double p = phi2(s);
        return p * p;
      },
      0.0, 1.0, 10, 1e-12);
  return out;
}

VarianceComponents tick_variance_overlap(double sigma2, double omega2, double delta,
                                         const KernelSpec& kernel, const PreAvgWeight& weight) {
  require_positive_delta(delta);
  const auto oc = overlap_constants(weight.function());
  const double g2 = weight.constants().g2;
  const double k2 = kernel.squared_integral() / (g2 * g2);
  return {4.0 * oc.phi22 * sigma2 * sigma2 * k2, 8.0 * oc.phi12 * sigma2 * omega2 * k2,
          4.0 * oc.phi11 * omega2 * omega2 * k2, delta};
}

}  // namespace tickvol
