#pragma once

#include <cmath>
#include <string>

#include "uavdnn/scenario.hpp"

namespace uavdnn::test {

inline double rel_err(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Tiny env with one follower able to hold the whole demo model.
inline Scenario roomy_tiny()
{
    auto s = tiny_scenario();
    for (auto& u : s.fleet)
        u.memory_cap_bytes = 2e9;
    return s;
}

inline std::string minimal_scenario_json(const std::string& fleet)
{
    return R"({
  "base": {"x": 0, "y": 0, "z": 0},
  "targets": [{"id": 1, "center": {"x": 100, "y": 0, "z": 0}, "task_size_gb": 10,
               "dnn_type": 1, "max_latency_s": 5}],
  "fleet": )" + fleet + R"(,
  "models": [{"kind": 1, "layers": [
      {"layer_index": 1, "compute_cycles": 1e9, "memory_bytes": 1e6, "output_bits": 1e5}]}]
})";
}

inline const char* kTwoUavs = R"([
  {"id": 0, "role": "leader", "position": {"x": 0, "y": 0, "z": 3000}, "compute_rate_hz": 15e9,
   "memory_cap_bytes": 1e9, "energy_cap_j": 1e6, "tx_power_w": 0.1, "bandwidth_hz": 1e6},
  {"id": 1, "role": "follower", "position": {"x": 100, "y": 0, "z": 3000}, "compute_rate_hz": 15e9,
   "memory_cap_bytes": 1e9, "energy_cap_j": 1e6, "tx_power_w": 0.1, "bandwidth_hz": 1e6}])";

} // namespace uavdnn::test
