#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tickvol/model_sim.hpp"

namespace tickvol {

struct RawTickRecord {
  double timestamp = 0.0;  // seconds since midnight
  double price = 0.0;
  std::optional<std::string> condition;

  friend bool operator==(const RawTickRecord&, const RawTickRecord&) = default;
};

struct MalformedRow {
  std::size_t line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<RawTickRecord> records;
  std::vector<MalformedRow> malformed;
};

/// Reads "timestamp,price,condition" CSV. Malformed rows are collected;
/// more than 1% malformed rows aborts with a FormatError.
ParseResult parse_tick_csv(std::istream& in);

/// k trades sharing second s become s + j/k (j = 0..k-1), at 0.01 s resolution.
/// `width` shrinks the spread when the next distinct timestamp is closer than 1 s.
std::vector<double> spread_same_timestamp(double second, std::size_t count, double width = 1.0);

struct OutlierFilter {
  std::size_t window = 21;  // centred rolling window, in trades
  double multiplier = 10.0;
};

struct CleaningOptions {
  double session_start = 34200.0;  // 09:30
  double session_end = 57600.0;    // 16:00
  std::set<std::string> bad_conditions;
  std::optional<OutlierFilter> outliers;
};

struct CleaningReport {
  std::size_t input = 0;
  std::size_t pre_market = 0;
  std::size_t after_market = 0;
  std::size_t bad_condition = 0;
  std::size_t outliers = 0;
  std::size_t tie_groups = 0;  // timestamp groups with more than one trade
  std::size_t output = 0;
};

struct CleanResult {
  TickSeries series;
  CleaningReport report;
};

/// Session filter, condition filter, optional outlier filter, tie spreading,
/// rebasing to t - session_start and conversion to log-prices.
CleanResult clean_ticks(const std::vector<RawTickRecord>& records, const CleaningOptions& opts = {});

/// Re-applies tie spreading to a series already on the [0, T] clock.
/// The identity on clean series.
TickSeries clean_series(const TickSeries& series);

}  // namespace tickvol
