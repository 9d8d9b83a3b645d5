#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "tickvol/estimators.hpp"
#include "tickvol/model_sim.hpp"

namespace tickvol {

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// Tick series CSV:
///   # tickvol-series horizon=<T> clean=<0|1>
///   time,log_price
///   <t_1>,<y_1>
void write_series_csv(std::ostream& out, const TickSeries& series);
TickSeries read_series_csv(std::istream& in);
TickSeries read_series_file(const std::filesystem::path& path);

/// Curve CSV with columns u,value,reason_code and, when a floor is given,
/// log_value = log(max(value, floor)).
void write_curve_csv(std::ostream& out, const CurveEstimate& curve,
                     std::optional<double> log_floor = std::nullopt);

/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tickvol
