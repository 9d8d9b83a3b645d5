#include "tickvol/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <string_view>

#include "tickvol/errors.hpp"

namespace tickvol {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Round to 0.01 and return in hundredths.
long long to_cents(double x) { return std::llround(x * 100.0); }

}  // namespace

ParseResult parse_tick_csv(std::istream& in) {
  ParseResult out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t data_rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (!header_seen) {
      if (view.empty()) continue;
      if (view != "timestamp,price,condition") {
        throw FormatError("line " + std::to_string(line_no) +
                          ": expected header 'timestamp,price,condition'");
      }
      header_seen = true;
      continue;
    }
    if (view.empty()) continue;
    ++data_rows;

    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
        view.find(',', c2 + 1) != std::string_view::npos) {
      out.malformed.push_back({line_no, "expected 3 comma-separated fields"});
      continue;
    }
    const auto ts = parse_double(view.substr(0, c1));
    const auto px = parse_double(view.substr(c1 + 1, c2 - c1 - 1));
    if (!ts) {
      out.malformed.push_back({line_no, "timestamp is not a finite number"});
      continue;
    }
    if (!px || *px <= 0.0) {
      out.malformed.push_back({line_no, "price is not a positive number"});
      continue;
    }
    RawTickRecord rec{*ts, *px, std::nullopt};
    const auto cond = trim(view.substr(c2 + 1));
    if (!cond.empty()) rec.condition = std::string(cond);
    out.records.push_back(std::move(rec));
  }

  if (!header_seen) throw FormatError("missing header 'timestamp,price,condition'");
  if (data_rows > 0 && 100 * out.malformed.size() > data_rows) {
    std::string msg = std::to_string(out.malformed.size()) + " of " + std::to_string(data_rows) +
                      " rows malformed (limit 1%)";
    for (std::size_t j = 0; j < std::min<std::size_t>(out.malformed.size(), 5); ++j) {
      msg += "; line " + std::to_string(out.malformed[j].line) + ": " + out.malformed[j].reason;
    }
    throw FormatError(msg);
  }
  return out;
}

std::vector<double> spread_same_timestamp(double second, std::size_t count, double width) {
  std::vector<double> out(count);
  if (count == 0) return out;
  out[0] = second;
  const long long base = to_cents(second);
  for (std::size_t j = 1; j < count; ++j) {
    const double offset = width * static_cast<double>(j) / static_cast<double>(count);
    // Integer hundredths keep 34210 + 2/3 -> 34210.67 exact.
    out[j] = static_cast<double>(base + std::llround(offset * 100.0)) / 100.0;
  }
  return out;
}

namespace {

std::vector<bool> outlier_mask(const std::vector<RawTickRecord>& recs, const OutlierFilter& f) {
  std::vector<bool> drop(recs.size(), false);
  const std::size_t half = f.window / 2;
  std::vector<double> buf;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(recs.size(), i + half + 1);
    buf.clear();
    for (std::size_t j = lo; j < hi; ++j) buf.push_back(recs[j].price);
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    const double median = *mid;
    for (double& v : buf) v = std::abs(v - median);
    std::nth_element(buf.begin(), mid, buf.end());
    const double mad = std::max(*mid, 0.01);
    drop[i] = std::abs(recs[i].price - median) > f.multiplier * mad;
  }
  return drop;
}

// Times strictly increasing after spreading each run of equal timestamps.
std::vector<double> spread_ties(const std::vector<double>& ts, std::size_t& groups) {
  std::vector<double> out;
  out.reserve(ts.size());
  std::size_t i = 0;
  while (i < ts.size()) {
    std::size_t j = i + 1;
    while (j < ts.size() && ts[j] == ts[i]) ++j;
    const std::size_t k = j - i;
    if (k == 1) {
      out.push_back(ts[i]);
    } else {
      ++groups;
      const double width = j < ts.size() ? std::min(1.0, ts[j] - ts[i]) : 1.0;
      auto group = spread_same_timestamp(ts[i], k, width);
      // Gaps finer than the 0.01 s grid: fall back to unrounded offsets.
      const bool collides =
          std::adjacent_find(group.begin(), group.end(), std::greater_equal<>()) != group.end() ||
          (j < ts.size() && group.back() >= ts[j]);
      if (collides) {
        for (std::size_t m = 1; m < k; ++m) {
          group[m] = ts[i] + width * static_cast<double>(m) / static_cast<double>(k);
        }
      }
      out.insert(out.end(), group.begin(), group.end());
    }
    i = j;
  }
  return out;
}

}  // namespace

CleanResult clean_ticks(const std::vector<RawTickRecord>& records, const CleaningOptions& opts) {
  CleanResult res;
  auto& rep = res.report;
  rep.input = records.size();

  std::vector<RawTickRecord> kept;
  kept.reserve(records.size());
  for (const auto& r : records) {
    if (r.timestamp < opts.session_start) {
      ++rep.pre_market;
    } else if (r.timestamp > opts.session_end) {
      ++rep.after_market;
    } else if (r.condition && opts.bad_conditions.contains(*r.condition)) {
      ++rep.bad_condition;
    } else {
      kept.push_back(r);
    }
  }
  if (opts.outliers && !kept.empty()) {
    const auto drop = outlier_mask(kept, *opts.outliers);
    std::vector<RawTickRecord> filtered;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (drop[i]) {
        ++rep.outliers;
      } else {
        filtered.push_back(kept[i]);
      }
    }
    kept = std::move(filtered);
  }
  if (kept.empty()) throw EmptySeriesError("no records survive cleaning");

  std::vector<double> ts(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0 && kept[i].timestamp < kept[i - 1].timestamp) {
      throw FormatError("timestamps decrease after record " + std::to_string(i));
    }
    ts[i] = kept[i].timestamp;
  }
  const auto spread = spread_ties(ts, rep.tie_groups);

  const double horizon = opts.session_end - opts.session_start;
  const long long start_cents = to_cents(opts.session_start);
  std::vector<double> times(kept.size());
  std::vector<double> logs(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double t = spread[i];
    const long long cents = to_cents(t);
    // On the 0.01 s grid, rebase in integer hundredths so 34210.67 -> 10.67 exactly.
    times[i] = std::abs(t * 100.0 - static_cast<double>(cents)) < 1e-6
                   ? static_cast<double>(cents - start_cents) / 100.0
                   : t - opts.session_start;
    logs[i] = std::log(kept[i].price);
  }
  rep.output = times.size();
  res.series = TickSeries(horizon, std::move(times), std::move(logs), true);
  return res;
}

TickSeries clean_series(const TickSeries& series) {
  std::vector<double> ts(series.times().begin(), series.times().end());
  std::size_t groups = 0;
  auto times = spread_ties(ts, groups);
  return TickSeries(series.horizon(), std::move(times),
                    std::vector<double>(series.log_prices().begin(), series.log_prices().end()),
                    true);
}

}  // namespace tickvol
