#include "tickvol/kernels.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "tickvol/errors.hpp"
#include "tickvol/model_sim.hpp"

namespace tickvol {

double KernelSpec::operator()(double x) const {
  const double a = std::abs(x);
  if (!(a < 1.0)) return 0.0;
  switch (kind) {
    case KernelKind::epanechnikov:
      return 0.75 * (1.0 - x * x);
    case KernelKind::triangular:
      return 1.0 - a;
    case KernelKind::uniform:
      return 0.5;
  }
  return 0.0;
}

double KernelSpec::squared_integral() const {
  switch (kind) {
    case KernelKind::epanechnikov:
      return 3.0 / 5.0;
    case KernelKind::triangular:
      return 2.0 / 3.0;
    case KernelKind::uniform:
      return 0.5;
  }
  return 0.0;
}

double KernelSpec::second_moment() const {
  switch (kind) {
    case KernelKind::epanechnikov:
      return 1.0 / 5.0;
    case KernelKind::triangular:
      return 1.0 / 6.0;
    case KernelKind::uniform:
      return 1.0 / 3.0;
  }
  return 0.0;
}

double eval_kernel(const KernelSpec& spec, double x) { return spec(x); }

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::epanechnikov:
      return "epanechnikov";
    case KernelKind::triangular:
      return "triangular";
    case KernelKind::uniform:
      return "uniform";
  }
  return "epanechnikov";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "epanechnikov") return KernelKind::epanechnikov;
  if (name == "triangular") return KernelKind::triangular;
  if (name == "uniform") return KernelKind::uniform;
  throw ConfigError("unknown kernel '" + std::string(name) + "'");
}

WeightFunction WeightFunction::table(std::vector<double> values) {
  if (values.size() < 2) throw InvalidWeightError("weight table needs at least 2 grid points");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidWeightError("weight table values must be finite");
  }
  if (std::abs(values.front()) > 1e-12 || std::abs(values.back()) > 1e-12) {
    throw InvalidWeightError("weight function must satisfy g(0) = g(1) = 0");
  }
  WeightFunction w;
  w.values_ = std::move(values);
  return w;
}

double WeightFunction::operator()(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (values_.empty()) return x * (1.0 - x);
  const double n = static_cast<double>(values_.size() - 1);
  const double pos = x * n;
  const auto j = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double w = pos - static_cast<double>(j);
  return (1.0 - w) * values_[j] + w * values_[j + 1];
}

double WeightFunction::squared_integral() const {
  if (values_.empty()) return 1.0 / 30.0;
  using boost::math::quadrature::gauss;
  const double step = 1.0 / static_cast<double>(values_.size() - 1);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < values_.size(); ++j) {
    const double lo = static_cast<double>(j) * step;
    total += gauss<double, 7>::integrate(
        [&](double x) {
          const double v = (*this)(x);
          return v * v;
        },
        lo, lo + step);
  }
  return total;
}

double WeightFunction::derivative_squared_integral() const {
  if (values_.empty()) return 1.0 / 3.0;
  // Piecewise linear: the derivative is constant on each cell.
  const double n = static_cast<double>(values_.size() - 1);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < values_.size(); ++j) {
    const double slope = (values_[j + 1] - values_[j]) * n;
    total += slope * slope / n;
  }
  return total;
}

PreAvgWeight::PreAvgWeight(std::size_t block_size, WeightFunction g)
    : block_size_(block_size), g_(std::move(g)) {
  if (block_size_ < 2) throw ConfigError("pre-averaging block size H must be >= 2");
  const double H = static_cast<double>(block_size_);
  g_values_.resize(block_size_ + 1);
  for (std::size_t l = 0; l <= block_size_; ++l) g_values_[l] = g_(static_cast<double>(l) / H);
  if (std::abs(g_values_.front()) > 1e-12 || std::abs(g_values_.back()) > 1e-12) {
    throw InvalidWeightError("weight function must satisfy g(0) = g(1) = 0");
  }
  h_values_.resize(block_size_);
  for (std::size_t l = 0; l < block_size_; ++l) h_values_[l] = g_values_[l + 1] - g_values_[l];

  constants_.g2 = g_.squared_integral();
  constants_.g2_prime = g_.derivative_squared_integral();
  for (std::size_t l = 1; l < block_size_; ++l) {
    constants_.g2_discrete += g_values_[l] * g_values_[l] / H;
    constants_.sum_h2 += h_values_[l] * h_values_[l];
  }
}

WeightConstants weight_constants(const PreAvgWeight& weight) { return weight.constants(); }

namespace {

void check_window(std::size_t size, std::size_t i, std::size_t block) {
  if (i + block - 1 >= size) {
    throw OutOfRangeError("pre-averaging window [" + std::to_string(i) + ", " +
                          std::to_string(i + block - 1) + "] exceeds series of length " +
                          std::to_string(size));
  }
}

}  // namespace

double pre_averaged_increment(std::span<const double> y, std::size_t i, const PreAvgWeight& weight) {
  const std::size_t H = weight.block_size();
  check_window(y.size(), i, H);
  const auto g = weight.g_values();
  double acc = 0.0;
  for (std::size_t l = 1; l < H; ++l) acc += g[l] * (y[i + l] - y[i + l - 1]);
  return acc;
}

double pre_averaged_increment(const TickSeries& series, std::size_t i, const PreAvgWeight& weight) {
  return pre_averaged_increment(series.log_prices(), i, weight);
}

double pre_averaged_increment_h_form(std::span<const double> y, std::size_t i,
                                     const PreAvgWeight& weight) {
  const std::size_t H = weight.block_size();
  check_window(y.size(), i, H);
  const auto h = weight.h_values();
  double acc = 0.0;
  for (std::size_t l = 0; l < H; ++l) acc -= h[l] * y[i + l];
  return acc;
}

}  // namespace tickvol
