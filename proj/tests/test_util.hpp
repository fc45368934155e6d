#pragma once

#include <random>

#include "uavmec/model.hpp"

namespace uavmec::testing {

// Reference physics, one UE at (5,5), three slots.
inline ScenarioConfig tiny_config(double bits = 1000.0) {
  ScenarioConfig cfg = ScenarioConfig::reference();
  cfg.slots = 3;
  cfg.ues = {UeSpec{{5.0, 5.0}, bits, 1e3, 1e-28}};
  return cfg;
}

// Reference physics with UE positions uniform in the 10 m box and task
// sizes uniform in [200, 600] Mbits.
inline ScenarioConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> mbits(200.0, 600.0);
  ScenarioConfig cfg = ScenarioConfig::reference();
  for (UeSpec& ue : cfg.ues) {
    ue.position = {pos(rng), pos(rng)};
    ue.input_bits = mbits(rng) * 1e6;
  }
  return cfg;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace uavmec::testing
