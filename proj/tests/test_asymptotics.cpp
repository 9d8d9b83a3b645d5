#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tickvol/asymptotics.hpp"
#include "tickvol/errors.hpp"

using namespace tickvol;

namespace {

const KernelSpec kEpa{KernelKind::epanechnikov};
const KernelSpec kUni{KernelKind::uniform};
const PreAvgWeight kW{15};

double epa_sq() {
  return oracle::simpson([](double x) { return std::pow(oracle::epanechnikov(x), 2); }, -1, 1);
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("clock variance targets") {
  const double k2 = epa_sq();
  const double ratio = oracle::simpson([](double x) { return std::pow(1 - 2 * x, 2); }, 0, 1) /
                       oracle::simpson([](double x) { return std::pow(x * (1 - x), 2); }, 0, 1);
  const auto v = clock_variance_target(1.0, 1.0, 0.0, 1.0, kEpa, kW);
  CHECK(v.a == doctest::Approx(2 * k2).epsilon(1e-9));
  CHECK(v.a == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(v.total() == doctest::Approx(1.2).epsilon(1e-12));
  const auto w = clock_variance_target(1.0, 1.0, 1.0, 1.0, kEpa, kW);
  CHECK(w.b == doctest::Approx(4 * ratio * k2).epsilon(1e-9));
  CHECK(w.b == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(w.c == doctest::Approx(2 * ratio * ratio * k2).epsilon(1e-9));

  const auto x = clock_variance_target(0.7, 1.3, 0.2, 0.8, kEpa, kW);
  const auto y = clock_variance_target(0.7, 2.6, 0.2, 0.8, kEpa, kW);
  CHECK(y.a == 2 * x.a);
  CHECK(y.b == 2 * x.b);
  CHECK(y.c == 2 * x.c);
  CHECK_THROWS_AS(clock_variance_target(1, 1, 0, 0.0, kEpa, kW), DomainError);
}

TEST_CASE("tick variance targets and their relation to the clock targets") {
  CHECK(tick_variance_target(1.0, 0.0, 1.0, kEpa, kW).total() == doctest::Approx(1.2).epsilon(1e-12));
  const double lam = 1.7;
  const auto t = tick_variance_target(0.9, 0.3, 1.1, kEpa, kW);
  const auto c = clock_variance_target(0.9, lam, 0.3, 1.1, kEpa, kW);
  CHECK(c.a / t.a == doctest::Approx(lam).epsilon(1e-14));
  CHECK(c.b / t.b == doctest::Approx(lam).epsilon(1e-14));
  CHECK(c.c / t.c == doctest::Approx(lam).epsilon(1e-14));

  // Large delta: the delta A term dominates and the total increases.
  const auto d = optimal_delta(t.a, t.b, t.c).value();
  double prev = tick_variance_target(0.9, 0.3, d, kEpa, kW).total();
  for (double delta = 2 * d; delta < 1e4; delta *= 2) {
    const auto v = tick_variance_target(0.9, 0.3, delta, kEpa, kW);
    CHECK(v.total() > prev);
    prev = v.total();
  }
  const auto far = tick_variance_target(0.9, 0.3, 1e6, kEpa, kW);
  CHECK(far.delta * far.a / far.total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("homogeneity in sigma^2") {
  const auto v = tick_variance_target(0.5, 0.2, 1.0, kEpa, kW);
  const auto w = tick_variance_target(1.5, 0.2, 1.0, kEpa, kW);
  CHECK(w.a / v.a == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(w.b / v.b == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(w.c == v.c);
}

TEST_CASE("kernel swap changes targets by the ratio of squared integrals") {
  const auto e = clock_variance_target(1.0, 1.2, 0.1, 0.9, kEpa, kW);
  const auto u = clock_variance_target(1.0, 1.2, 0.1, 0.9, kUni, kW);
  const double r = kUni.squared_integral() / kEpa.squared_integral();
  CHECK(u.a / e.a == doctest::Approx(r).epsilon(1e-14));
  CHECK(u.b / e.b == doctest::Approx(r).epsilon(1e-14));
  CHECK(u.c / e.c == doctest::Approx(r).epsilon(1e-14));
}

TEST_CASE("intensity variance target") {
  CHECK(intensity_variance_target(1.0, kEpa) == doctest::Approx(epa_sq()).epsilon(1e-9));
  CHECK(intensity_variance_target(1.0, kEpa) == doctest::Approx(0.6));
  CHECK(intensity_variance_target(0.0, kEpa) == 0.0);
  CHECK(intensity_variance_target(2.0, kUni) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("clock bias target") {
  CHECK(clock_bias_target(0.0, 0.1, kEpa) == 0.0);
  const double m2 = oracle::simpson([](double x) { return x * x * oracle::epanechnikov(x); }, -1, 1);
  CHECK(m2 == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(clock_bias_target(1.0, 0.1, kEpa) == doctest::Approx(0.5 * m2 * 0.01).epsilon(1e-9));
  CHECK(clock_bias_target(1.0, 0.1, kEpa) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(clock_bias_target(1.0, 0.2, kEpa) == doctest::Approx(4 * clock_bias_target(1.0, 0.1, kEpa)));
  CHECK(clock_bias_target(1.0, 0.1, kEpa, false) == 0.0);
}

TEST_CASE("optimal delta") {
  CHECK(!optimal_delta(1.0, 0.0, 0.0).has_value());
  CHECK(optimal_delta(1.0, 1.0, 0.0).value() == doctest::Approx(1.0).epsilon(1e-12));
  const double d = optimal_delta(1.0, 0.0, 3.0).value();
  CHECK(d == doctest::Approx(std::pow(9.0, 0.25)).epsilon(1e-12));
  CHECK(d == doctest::Approx(1.7320508075688772).epsilon(1e-12));
  for (auto [a, b, c] : {std::tuple{1.2, 24.0, 0.5}, std::tuple{3.0, 1e-3, 1e-6},
                         std::tuple{0.01, 50.0, 1e3}}) {
    const double x = optimal_delta(a, b, c).value();
    CHECK(std::abs(a - b / (x * x) - 3 * c / std::pow(x, 4)) <= 1e-8);
  }
  CHECK_THROWS_AS(optimal_delta(0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(optimal_delta(1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("decomposition regimes") {
  // m' >= 1 always leaves the tick limit in charge.
  CHECK(decomposition_regime({2, 0.5, 1, 0.1}) == DecompositionRegime::tick);
  CHECK(decomposition_regime({0, 0.5, 2, 0.5}) == DecompositionRegime::tick);
  // m = m' = 0: threshold gamma / (2 gamma + 2).
  CHECK(decomposition_regime({0, 0.5, 0, 0.2}) == DecompositionRegime::tick);
  CHECK(decomposition_regime({0, 0.5, 0, 0.1}) == DecompositionRegime::intensity);
  CHECK(decomposition_regime({0, 0.5, 0, 0.5 / 3.0}) == DecompositionRegime::boundary);
  // m = 1: (gamma* + 2) / (2 gamma* + 8) with gamma* = min(gamma, gamma').
  const double t1 = (0.3 + 2.0) / (2 * 0.3 + 8.0);
  CHECK(decomposition_regime({1, 0.3, 0, t1 + 0.01}) == DecompositionRegime::tick);
  CHECK(decomposition_regime({1, 0.3, 0, t1 - 0.01}) == DecompositionRegime::intensity);
  // m = 2: (sqrt(65) - 7) / 4.
  const double t2 = (std::sqrt(65.0) - 7.0) / 4.0;
  CHECK(decomposition_regime({2, 0.5, 0, t2 + 1e-3}) == DecompositionRegime::tick);
  CHECK(decomposition_regime({2, 0.5, 0, t2 - 1e-3}) == DecompositionRegime::intensity);
  CHECK(decomposition_regime({2, 0.5, 0, t2}) == DecompositionRegime::boundary);
}

TEST_CASE("decomposed targets") {
  const double s2 = 0.8, lam = 1.4, om2 = 0.01, delta = 1.0;
  const double T = 10000.0, bi = 0.05, N = 500.0;
  const double tick = tick_variance_target(s2, om2, delta, kEpa, kW).total();
  const auto t = decomposed_targets(s2, lam, om2, delta, kEpa, kEpa, kW, {2, 0.5, 2, 0.5}, bi, T, N);
  CHECK(t.regime == DecompositionRegime::tick);
  CHECK(t.v2 == doctest::Approx(lam * lam * tick).epsilon(1e-14));
  CHECK(t.c1 == doctest::Approx(bi * T / (N / std::sqrt(T))).epsilon(1e-14));
  const double w_int = s2 * s2 * lam * 0.6;
  const auto i = decomposed_targets(s2, lam, om2, delta, kEpa, kEpa, kW, {0, 0.5, 0, 0.1}, bi, T, N);
  CHECK(i.w2 == doctest::Approx(w_int).epsilon(1e-12));
  const auto b = decomposed_targets(s2, lam, om2, delta, kEpa, kEpa, kW, {0, 0.5, 0, 0.5 / 3.0}, bi,
                                    T, N);
  CHECK(b.w2 == doctest::Approx(w_int + b.c1 * lam * lam * tick).epsilon(1e-12));
}

TEST_CASE("comparison table cases") {
  struct Row {
    Smoothness s;
    int id;
    RateComparison v;
  };
  const Row rows[] = {
      {{0, 0.6, 0, 0.3}, 1, RateComparison::faster},   {{1, 0.5, 0, 0.5}, 2, RateComparison::faster},
      {{1, 0.7, 1, 0.3}, 3, RateComparison::faster},   {{2, 0.5, 0, 0.5}, 4, RateComparison::faster},
      {{2, 0.5, 1, 0.4}, 5, RateComparison::faster},   {{0, 0.3, 0, 0.6}, 6, RateComparison::same_rate},
      {{0, 0.3, 0, 0.3}, 6, RateComparison::same_rate}, {{0, 0.3, 1, 0.5}, 7, RateComparison::same_rate},
      {{0, 0.3, 2, 0.5}, 8, RateComparison::same_rate}, {{1, 0.4, 1, 0.3}, 9, RateComparison::unknown},
      {{1, 0.4, 2, 0.3}, 10, RateComparison::unknown},  {{2, 0.5, 1, 0.5}, 11, RateComparison::unknown},
      {{2, 0.5, 2, 0.5}, 12, RateComparison::unknown},
  };
  for (const auto& r : rows) {
    CAPTURE(r.id);
    const auto c = comparison_case(r.s);
    CHECK(c.id == r.id);
    CHECK(c.verdict == r.v);
  }
}

TEST_CASE("maximal tick window exponents") {
  CHECK(max_tick_window_exponent({0, 0.5, 0, 0.5}) == doctest::Approx(1.5 / 2.0));
  CHECK(max_tick_window_exponent({1, 0.4, 0, 0.2}) == doctest::Approx(2.7 / 3.2));
  CHECK(max_tick_window_exponent({1, 0.4, 1, 0.2}) == doctest::Approx(2.9 / 3.4));
  CHECK(max_tick_window_exponent({2, 0.5, 0, 0.3}) == doctest::Approx(2.8 / 3.3));
  CHECK(max_tick_window_exponent({2, 0.5, 2, 0.5}) == doctest::Approx(7.0 / 8.0));
}

TEST_CASE("overlap constants of x(1 - x) by nested quadrature") {
  auto phi2 = [](double s) {
    return oracle::simpson([&](double x) { return oracle::g_default(x) * oracle::g_default(x + s); },
                           0.0, 1.0 - s, 400);
  };
  auto phi1 = [](double s) {
    return oracle::simpson([&](double x) { return (1 - 2 * x) * (1 - 2 * (x + s)); }, 0.0, 1.0 - s,
                           400);
  };
  const double p22 = oracle::simpson([&](double s) { return phi2(s) * phi2(s); }, 0, 1, 400);
  const double p12 = oracle::simpson([&](double s) { return phi1(s) * phi2(s); }, 0, 1, 400);
  const double p11 = oracle::simpson([&](double s) { return phi1(s) * phi1(s); }, 0, 1, 400);
  const auto oc = overlap_constants(WeightFunction{});
  CHECK(oc.phi22 == doctest::Approx(p22).epsilon(1e-8));
  CHECK(oc.phi12 == doctest::Approx(p12).epsilon(1e-8));
  CHECK(oc.phi11 == doctest::Approx(p11).epsilon(1e-8));
  // 2 Phi22 / g2^2 is the factor separating the overlap-aware A term from 2 int k^2.
  CHECK(2 * oc.phi22 * 900.0 == doctest::Approx(0.60245).epsilon(1e-4));
  const auto v = tick_variance_overlap(1.0, 0.0, 1.0, kEpa, kW);
  CHECK(v.a == doctest::Approx(4 * p22 * 900.0 * 0.6).epsilon(1e-8));
}

}  // TEST_SUITE
