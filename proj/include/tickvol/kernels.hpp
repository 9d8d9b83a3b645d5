#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tickvol {

class TickSeries;

enum class KernelKind { epanechnikov, triangular, uniform };

/// Symmetric smoothing kernel with support [-1, 1] and unit mass.
struct KernelSpec {
  KernelKind kind = KernelKind::epanechnikov;

  double operator()(double x) const;
  double squared_integral() const;  // int K(x)^2 dx
  double second_moment() const;     // int x^2 K(x) dx

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double eval_kernel(const KernelSpec& spec, double x);

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

/// Pre-averaging weight function g on [0, 1] with g(0) = g(1) = 0.
/// Either the default g(x) = x(1 - x) or a table on a uniform grid with
/// linear interpolation.
class WeightFunction {
 public:
  WeightFunction() = default;  // x(1 - x)
  static WeightFunction table(std::vector<double> values);

  double operator()(double x) const;
  bool is_default() const { return values_.empty(); }
  const std::vector<double>& values() const { return values_; }

  double squared_integral() const;             // g_2 = int g^2
  double derivative_squared_integral() const;  // g'_2 = int (g')^2

 private:
  std::vector<double> values_;
};

struct WeightConstants {
  double g2 = 0.0;           // int_0^1 g^2
  double g2_prime = 0.0;     // int_0^1 (g')^2
  double g2_discrete = 0.0;  // sum_{l=1}^{H-1} g(l/H)^2 / H
  double sum_h2 = 0.0;       // sum_{l=1}^{H-1} h(l/H)^2
};

/// A weight function bound to a block size H, with every derived
/// constant computed once at construction.
class PreAvgWeight {
 public:
  explicit PreAvgWeight(std::size_t block_size, WeightFunction g = {});

  std::size_t block_size() const { return block_size_; }
  const WeightFunction& function() const { return g_; }

  // g(l/H) for l = 0..H
  std::span<const double> g_values() const { return g_values_; }
  // h(l/H) = g((l+1)/H) - g(l/H) for l = 0..H-1
  std::span<const double> h_values() const { return h_values_; }
  const WeightConstants& constants() const { return constants_; }

 private:
  std::size_t block_size_;
  WeightFunction g_;
  std::vector<double> g_values_;
  std::vector<double> h_values_;
  WeightConstants constants_;
};

WeightConstants weight_constants(const PreAvgWeight& weight);

/// sum_{l=1}^{H-1} g(l/H) (Y_{i+l} - Y_{i+l-1}). Needs i + H - 1 < size.
double pre_averaged_increment(std::span<const double> log_prices, std::size_t i,
                              const PreAvgWeight& weight);
double pre_averaged_increment(const TickSeries& series, std::size_t i, const PreAvgWeight& weight);

/// Abel-summed form -sum_{l=0}^{H-1} h(l/H) Y_{i+l}; equal to the above up to rounding.
double pre_averaged_increment_h_form(std::span<const double> log_prices, std::size_t i,
                                     const PreAvgWeight& weight);

}  // namespace tickvol
