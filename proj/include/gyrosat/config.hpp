#pragma once

// Flat key-value configuration files:
//
//   # comment
//   key = value [value ...]
//
// Keys may repeat only where documented (`collision`). Units are SI.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gyrosat/sim.hpp"
#include "gyrosat/types.hpp"

namespace gyrosat {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, std::string_view source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  /// Every occurrence of `key`, in file order.
  std::vector<std::vector<std::string>> all(std::string_view key) const;

  double get_double(std::string_view key) const;
  Vec3 get_vec3(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  std::string get_string(std::string_view key) const;

  /// Throws ConfigError for any key outside `known`.
  void require_known(std::initializer_list<std::string_view> known) const;

  const std::string& source() const noexcept { return source_; }

 private:
  const std::vector<std::string>& values(std::string_view key, std::size_t count) const;
  std::vector<double> numbers(std::string_view key, std::size_t count) const;

  std::string source_;
  std::multimap<std::string, std::vector<std::string>, std::less<>> entries_;
};

/// Keys: com_to_imu, gyro_sat, gyro_noise_var, estimate_var, jerk_psd,
/// sat_margin (default 2% of min gyro_sat), r_min, accel_rail (0 = off), frozen_axis,
/// bootstrap_axis.
RigConfig rig_config_from(const KeyValueConfig& kv);

/// Scenario keys: generator (tumble | manual), seed, duration, sample_rate,
/// substeps, inertia (diagonal), com_to_imu, gravity, omega0, attitude0 (w x y z),
/// collision (t dwx dwy dwz dvx dvy dvz duration; repeatable), gyro_sat,
/// gyro_noise_var, accel_noise_var, accel_rail. Rig keys are accepted too.
/// With generator = tumble the explicit keys override the generated scenario.
ScenarioConfig scenario_from(const KeyValueConfig& kv, std::optional<std::uint64_t> seed);

/// Rig config matching a simulated scenario, with rig-only keys taken from `kv`.
RigConfig rig_for_scenario(const ScenarioConfig& scenario, const KeyValueConfig& kv);

std::string rig_config_text(const RigConfig& cfg);

}  // namespace gyrosat
