#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "tickvol/asymptotics.hpp"
#include "tickvol/estimators.hpp"
#include "tickvol/mc_harness.hpp"
#include "tickvol/model_sim.hpp"

namespace tickvol {

using Json = nlohmann::json;

// Curves: {"kind": "constant", "value": c} | {"kind": "cosine_log", "a": a, "k": k}
//       | {"kind": "table", "values": [...]}
CurveSpec curve_from_json(const Json& j);
Json to_json(const CurveSpec& c);

// {"omega": 0.001, "theta": 2, "rounding": false}
NoiseModel noise_from_json(const Json& j);
Json to_json(const NoiseModel& n);

// {"sigma2": curve, "intensity": curve, "noise": noise, "horizon": T,
//  "rescaled": bool, "x0": x0, "seed": s}
SimulationConfig simulation_from_json(const Json& j);
Json to_json(const SimulationConfig& s);

/// Estimator section. Bandwidths come either as fractions
/// ("intensity_bandwidth", "clock_bandwidth") or in seconds
/// ("intensity_window_seconds", "clock_window_seconds", converted with the
/// horizon). "tick_window" is an integer or "matched"; "block_size" or
/// "delta" (H = floor(delta sqrt(T))); "kernel" or "kernels": {intensity,
/// clock, tick}; "weight": "default" | {"table": [...]}; "grid": [u...] |
/// {"points": n}; "convention": "rescaled" | "unrescaled".
EstimatorConfig estimator_from_json(const Json& j, double horizon,
                                    const EstimatorConfig& base = {});
Json to_json(const EstimatorConfig& cfg);

Smoothness smoothness_from_json(const Json& j);
Json to_json(const Smoothness& s);

// {"scenarios": [{"name", "estimator" | "compare": true, "simulation",
//   "estimator_config", "u0", "replications", "seed", "smoothness", "check"}]}
std::vector<RegistryEntry> registry_from_json(const Json& j);
std::vector<RegistryEntry> load_registry(const std::filesystem::path& path);

Json to_json(const CurveEstimate& curve);
Json to_json(const MCReport& report, bool include_samples = false);
Json to_json(const ComparisonReport& report, bool include_samples = false);

}  // namespace tickvol
