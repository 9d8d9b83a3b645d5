#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tickvol/errors.hpp"
#include "tickvol/ingest.hpp"
#include "tickvol/io.hpp"

using namespace tickvol;

namespace {

ParseResult parse(const std::string& text) {
  std::istringstream in(text);
  return parse_tick_csv(in);
}

RawTickRecord rec(double t, double p, std::optional<std::string> c = std::nullopt) {
  return {t, p, std::move(c)};
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("parse: header only, plain rows and malformed rows") {
  CHECK(parse("timestamp,price,condition\n").records.empty());

  const auto one = parse("timestamp,price,condition\n34210,39.41,\n");
  REQUIRE(one.records.size() == 1);
  CHECK(one.records[0] == rec(34210, 39.41));

  std::string text = "timestamp,price,condition\n34210,abc,\n";
  for (int i = 0; i < 150; ++i) text += "34211," + std::to_string(40 + i * 0.01) + ",@\n";
  const auto bad = parse(text);
  REQUIRE(bad.malformed.size() == 1);
  CHECK(bad.malformed[0].line == 2);
  CHECK(bad.records.size() == 150);
  CHECK(*bad.records[0].condition == "@");

  CHECK_THROWS_AS(parse("time,price\n1,2\n"), FormatError);
  CHECK_THROWS_AS(parse(""), FormatError);
  // More than 1% malformed aborts.
  CHECK_THROWS_AS(parse("timestamp,price,condition\n1,x,\n2,3,\n"), FormatError);
  CHECK_THROWS_AS(parse("timestamp,price,condition\n1,-3,\n" + std::string(50, '\n')), FormatError);
}

TEST_CASE("spread same timestamp") {
  const auto one = spread_same_timestamp(34210.0, 1);
  CHECK(one == std::vector<double>{34210.0});
  const auto three = spread_same_timestamp(34210.0, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == 34210.0);
  CHECK(three[1] == 34210.33);
  CHECK(three[2] == 34210.67);
  CHECK(spread_same_timestamp(0.0, 2) == std::vector<double>{0.0, 0.5});
}

TEST_CASE("clean: three trades in one second and session rebasing") {
  const std::vector<RawTickRecord> raw{rec(34100, 39.0), rec(34200, 39.40), rec(34210, 39.41),
                                       rec(34210, 39.42), rec(34210, 39.40), rec(34211, 39.43),
                                       rec(57600, 39.50), rec(57700, 39.6)};
  const auto res = clean_ticks(raw);
  CHECK(res.report.pre_market == 1);
  CHECK(res.report.after_market == 1);
  CHECK(res.report.tie_groups == 1);
  CHECK(res.report.output == 6);
  CHECK(res.series.horizon() == 23400.0);
  const auto t = res.series.times();
  REQUIRE(t.size() == 6);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == 10.0);
  CHECK(t[2] == 10.33);
  CHECK(t[3] == 10.67);
  CHECK(t[4] == 11.0);
  CHECK(t[5] == 23400.0);
  // Order of trades inside the tie group is kept.
  CHECK(res.series.log_prices()[1] == std::log(39.41));
  CHECK(res.series.log_prices()[2] == std::log(39.42));
  CHECK(res.series.log_prices()[3] == std::log(39.40));
  CHECK(res.series.clean());
}

TEST_CASE("clean: tie spreading shrinks before a close next trade") {
  const std::vector<RawTickRecord> raw{rec(34300, 10), rec(34300, 10.01), rec(34300.5, 10.02)};
  const auto res = clean_ticks(raw);
  const auto t = res.series.times();
  CHECK(t[0] == 100.0);
  CHECK(t[1] == 100.25);
  CHECK(t[2] == 100.5);

  const std::vector<RawTickRecord> tight{rec(34300, 10), rec(34300, 10), rec(34300, 10),
                                         rec(34300.01, 10)};
  const auto res_tight = clean_ticks(tight);
  const auto tt = res_tight.series.times();
  for (std::size_t i = 1; i < tt.size(); ++i) CHECK(tt[i] > tt[i - 1]);
}

TEST_CASE("clean: conditions, outliers and errors") {
  CleaningOptions opts;
  opts.bad_conditions = {"Z", "T"};
  const std::vector<RawTickRecord> all_bad{rec(34300, 10, "Z"), rec(34301, 10, "T")};
  CHECK_THROWS_AS(clean_ticks(all_bad, opts), EmptySeriesError);
  CHECK_THROWS_AS(clean_ticks({}), EmptySeriesError);

  const std::vector<RawTickRecord> mixed{rec(34300, 10, "Z"), rec(34301, 10.01, "@"),
                                         rec(34302, 10.02)};
  const auto res = clean_ticks(mixed, opts);
  CHECK(res.report.bad_condition == 1);
  CHECK(res.report.output == 2);

  std::vector<RawTickRecord> spiky;
  for (int i = 0; i < 40; ++i) spiky.push_back(rec(34300 + i, 20.0 + 0.01 * (i % 3)));
  spiky[20].price = 35.0;
  opts.outliers = OutlierFilter{};
  const auto filtered = clean_ticks(spiky, opts);
  CHECK(filtered.report.outliers == 1);
  CHECK(filtered.report.output == 39);

  const std::vector<RawTickRecord> backwards{rec(34300, 10), rec(34299, 10)};
  CHECK_THROWS_AS(clean_ticks(backwards), FormatError);
}

TEST_CASE("clean output is strictly increasing and no longer than the input") {
  std::vector<RawTickRecord> raw;
  for (int i = 0; i < 500; ++i) raw.push_back(rec(34200 + (i / 4), 30 + 0.01 * (i % 7)));
  const auto res = clean_ticks(raw);
  CHECK(res.series.size() <= raw.size());
  const auto t = res.series.times();
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
}

TEST_CASE("cleaning a clean series is the identity; round trip through CSV") {
  std::vector<RawTickRecord> raw;
  for (int i = 0; i < 300; ++i) raw.push_back(rec(34200.0 + 1.7 * (i / 3), 25 + 0.01 * (i % 11)));
  const auto s = clean_ticks(raw).series;
  CHECK(clean_series(s) == s);
  std::stringstream buf;
  write_series_csv(buf, s);
  const auto back = read_series_csv(buf);
  CHECK(back == s);
  CHECK(clean_series(back) == s);
}

}  // TEST_SUITE
