#include "tickvol/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "tickvol/errors.hpp"

namespace tickvol {

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void write_series_csv(std::ostream& out, const TickSeries& series) {
  out << "# tickvol-series horizon=" << format_double(series.horizon())
      << " clean=" << (series.clean() ? 1 : 0) << "\n";
  out << "time,log_price\n";
  const auto t = series.times();
  const auto y = series.log_prices();
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_double(t[i]) << ',' << format_double(y[i]) << '\n';
  }
}

namespace {

double parse_field(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("line " + std::to_string(line) + ": cannot parse number '" + std::string(s) +
                      "'");
  }
  return v;
}

}  // namespace

TickSeries read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  double horizon = 0.0;
  bool clean = false;
  bool have_meta = false;
  bool have_header = false;
  std::vector<double> times;
  std::vector<double> logs;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (!have_meta) {
      std::istringstream meta(line);
      std::string hash;
      std::string tag;
      meta >> hash >> tag;
      if (hash != "#" || tag != "tickvol-series") {
        throw FormatError("line 1: expected '# tickvol-series horizon=<T> clean=<0|1>'");
      }
      std::string kv;
      while (meta >> kv) {
        if (kv.rfind("horizon=", 0) == 0) horizon = parse_field(kv.substr(8), line_no);
        if (kv.rfind("clean=", 0) == 0) clean = kv.substr(6) == "1";
      }
      if (!(horizon > 0.0)) throw FormatError("series metadata lacks a positive horizon");
      have_meta = true;
      continue;
    }
    if (!have_header) {
      if (line.rfind("time,log_price", 0) != 0) {
        throw FormatError("line " + std::to_string(line_no) + ": expected header 'time,log_price'");
      }
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 'time,log_price'");
    }
    std::string_view view(line);
    times.push_back(parse_field(view.substr(0, comma), line_no));
    logs.push_back(parse_field(view.substr(comma + 1), line_no));
  }
  if (!have_meta || !have_header) throw FormatError("not a tickvol series file");
  return TickSeries(horizon, std::move(times), std::move(logs), clean);
}

TickSeries read_series_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_series_csv(in);
}

void write_curve_csv(std::ostream& out, const CurveEstimate& curve, std::optional<double> log_floor) {
  out << "u,value,reason_code";
  if (log_floor) out << ",log_value";
  out << '\n';
  for (const auto& p : curve.points) {
    out << format_double(p.u) << ',';
    if (p.value) out << format_double(*p.value);
    out << ',' << to_string(p.reason);
    if (log_floor) {
      out << ',';
      if (p.value) out << format_double(std::log(std::max(*p.value, *log_floor)));
    }
    out << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tickvol
