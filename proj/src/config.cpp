#include "gyrosat/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gyrosat/io.hpp"

namespace gyrosat {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view s, std::string_view key, const std::string& source) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(source + ": key '" + std::string(key) + "': cannot parse number '" +
                      std::string(s) + "'");
  }
  return v;
}


void apply_rig_only_keys(const KeyValueConfig& kv, RigConfig& cfg) {
  if (kv.has("estimate_var")) cfg.estimate_var = kv.get_double("estimate_var");
  if (kv.has("jerk_psd")) cfg.jerk_psd = kv.get_double("jerk_psd");
  if (kv.has("r_min")) cfg.r_min = kv.get_double("r_min");
  if (kv.has("frozen_axis")) cfg.frozen_axis = kv.get_bool("frozen_axis");
  if (kv.has("bootstrap_axis")) cfg.bootstrap_axis = kv.get_bool("bootstrap_axis");
  cfg.sat_margin = kv.has("sat_margin") ? kv.get_double("sat_margin") : 0.02 * cfg.gyro_sat.minCoeff();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, std::string_view source) {
  KeyValueConfig kv;
  kv.source_ = std::string(source);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view content = line;
    if (const auto hash = content.find('#'); hash != std::string_view::npos) {
      content = content.substr(0, hash);
    }
    content = trim(content);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(kv.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(content.substr(0, eq)));
    if (key.empty()) throw ConfigError(kv.source_ + ":" + std::to_string(line_no) + ": empty key");
    std::vector<std::string> values;
    std::istringstream tokens{std::string(content.substr(eq + 1))};
    for (std::string tok; tokens >> tok;) values.push_back(tok);
    if (values.empty()) {
      throw ConfigError(kv.source_ + ":" + std::to_string(line_no) + ": key '" + key + "' has no value");
    }
    if (key != "collision" && kv.has(key)) {
      throw ConfigError(kv.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    kv.entries_.emplace(key, std::move(values));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

bool KeyValueConfig::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::vector<std::vector<std::string>> KeyValueConfig::all(std::string_view key) const {
  std::vector<std::vector<std::string>> out;
  auto [lo, hi] = entries_.equal_range(key);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  return out;
}

const std::vector<std::string>& KeyValueConfig::values(std::string_view key, std::size_t count) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing key '" + std::string(key) + "'");
  if (it->second.size() != count) {
    throw ConfigError(source_ + ": key '" + std::string(key) + "' expects " + std::to_string(count) +
                      " value(s)");
  }
  return it->second;
}

std::vector<double> KeyValueConfig::numbers(std::string_view key, std::size_t count) const {
  std::vector<double> out;
  for (const std::string& v : values(key, count)) out.push_back(to_double(v, key, source_));
  return out;
}

double KeyValueConfig::get_double(std::string_view key) const { return numbers(key, 1)[0]; }

Vec3 KeyValueConfig::get_vec3(std::string_view key) const {
  const auto v = numbers(key, 3);
  return Vec3(v[0], v[1], v[2]);
}

bool KeyValueConfig::get_bool(std::string_view key) const {
  const std::string& v = values(key, 1)[0];
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(source_ + ": key '" + std::string(key) + "' expects a boolean");
}

std::uint64_t KeyValueConfig::get_u64(std::string_view key) const {
  const std::string& v = values(key, 1)[0];
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(source_ + ": key '" + std::string(key) + "' expects an unsigned integer");
  }
  return out;
}

std::string KeyValueConfig::get_string(std::string_view key) const { return values(key, 1)[0]; }

void KeyValueConfig::require_known(std::initializer_list<std::string_view> known) const {
  for (const auto& [key, _] : entries_) {
    bool ok = false;
    for (std::string_view k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(source_ + ": unknown key '" + key + "'");
  }
}

RigConfig rig_config_from(const KeyValueConfig& kv) {
  kv.require_known({"com_to_imu", "gyro_sat", "gyro_noise_var", "estimate_var", "jerk_psd",
                    "sat_margin", "r_min", "accel_rail", "frozen_axis", "bootstrap_axis"});
  RigConfig cfg;
  if (kv.has("com_to_imu")) cfg.com_to_imu = kv.get_vec3("com_to_imu");
  if (kv.has("gyro_sat")) cfg.gyro_sat = kv.get_vec3("gyro_sat");
  if (kv.has("gyro_noise_var")) cfg.gyro_noise_var = kv.get_double("gyro_noise_var");
  if (kv.has("accel_rail")) {
    const double rail = kv.get_double("accel_rail");
    cfg.accel_rail = rail > 0.0 ? std::optional<double>(rail) : std::nullopt;
  }
  apply_rig_only_keys(kv, cfg);
  cfg.validate();
  return cfg;
}

ScenarioConfig scenario_from(const KeyValueConfig& kv, std::optional<std::uint64_t> seed) {
  kv.require_known({"generator", "seed", "duration", "sample_rate", "substeps", "inertia",
                    "com_to_imu", "gravity", "omega0", "attitude0", "collision", "gyro_sat",
                    "gyro_noise_var", "accel_noise_var", "accel_rail", "estimate_var", "jerk_psd",
                    "sat_margin", "r_min", "frozen_axis", "bootstrap_axis"});
  const std::uint64_t s = seed ? *seed : (kv.has("seed") ? kv.get_u64("seed") : 0);
  const std::string generator = kv.has("generator") ? kv.get_string("generator") : "tumble";

  ScenarioConfig cfg;
  if (generator == "tumble") {
    cfg = make_tumble(s);
  } else if (generator != "manual") {
    throw ConfigError(kv.source() + ": unknown generator '" + generator + "'");
  }
  cfg.seed = s;

  if (kv.has("duration")) cfg.duration = kv.get_double("duration");
  if (kv.has("sample_rate")) cfg.sensor.sample_rate = kv.get_double("sample_rate");
  if (kv.has("substeps")) cfg.sensor.substeps = static_cast<int>(kv.get_u64("substeps"));
  if (kv.has("inertia")) cfg.body.inertia = kv.get_vec3("inertia").asDiagonal();
  if (kv.has("com_to_imu")) cfg.body.com_to_imu = kv.get_vec3("com_to_imu");
  if (kv.has("gravity")) cfg.body.gravity = kv.get_vec3("gravity");
  if (kv.has("omega0")) cfg.initial.omega = kv.get_vec3("omega0");
  if (kv.has("attitude0")) {
    const auto v = kv.all("attitude0").front();
    if (v.size() != 4) throw ConfigError(kv.source() + ": attitude0 expects w x y z");
    std::array<double, 4> c{};
    for (std::size_t i = 0; i < 4; ++i) c[i] = to_double(v[i], "attitude0", kv.source());
    cfg.initial.q = Quat(c[0], c[1], c[2], c[3]).normalized();
  }
  if (kv.has("collision")) {
    cfg.collisions.clear();
    for (const auto& v : kv.all("collision")) {
      if (v.size() != 8) {
        throw ConfigError(kv.source() +
                          ": collision expects t dwx dwy dwz dvx dvy dvz duration");
      }
      std::array<double, 8> c{};
      for (std::size_t i = 0; i < 8; ++i) c[i] = to_double(v[i], "collision", kv.source());
      CollisionEvent e;
      e.t = c[0];
      e.delta_omega = Vec3(c[1], c[2], c[3]);
      e.delta_v = Vec3(c[4], c[5], c[6]);
      e.duration = c[7];
      cfg.collisions.push_back(e);
    }
  }
  if (kv.has("gyro_sat")) cfg.sensor.gyro_sat = kv.get_vec3("gyro_sat");
  if (kv.has("gyro_noise_var")) cfg.sensor.gyro_noise_var = kv.get_double("gyro_noise_var");
  if (kv.has("accel_noise_var")) cfg.sensor.accel_noise_var = kv.get_double("accel_noise_var");
  if (kv.has("accel_rail")) {
    const double rail = kv.get_double("accel_rail");
    cfg.sensor.accel_rail = rail > 0.0 ? std::optional<double>(rail) : std::nullopt;
  }
  cfg.validate();
  return cfg;
}

RigConfig rig_for_scenario(const ScenarioConfig& scenario, const KeyValueConfig& kv) {
  RigConfig cfg;
  cfg.com_to_imu = scenario.body.com_to_imu;
  cfg.gyro_sat = scenario.sensor.gyro_sat;
  cfg.gyro_noise_var = scenario.sensor.gyro_noise_var > 0.0 ? scenario.sensor.gyro_noise_var
                                                            : RigConfig{}.gyro_noise_var;
  cfg.accel_rail = scenario.sensor.accel_rail;
  apply_rig_only_keys(kv, cfg);
  cfg.validate();
  return cfg;
}

std::string rig_config_text(const RigConfig& cfg) {
  auto vec = [](const Vec3& v) {
    return format_double(v[0]) + ' ' + format_double(v[1]) + ' ' + format_double(v[2]);
  };
  std::string out;
  out += "com_to_imu = " + vec(cfg.com_to_imu) + '\n';
  out += "gyro_sat = " + vec(cfg.gyro_sat) + '\n';
  out += "gyro_noise_var = " + format_double(cfg.gyro_noise_var) + '\n';
  out += "estimate_var = " + format_double(cfg.estimate_var) + '\n';
  out += "jerk_psd = " + format_double(cfg.jerk_psd) + '\n';
  out += "sat_margin = " + format_double(cfg.sat_margin) + '\n';
  out += "r_min = " + format_double(cfg.r_min) + '\n';
  out += "accel_rail = " + format_double(cfg.accel_rail.value_or(0.0)) + '\n';
  out += "frozen_axis = " + std::string(cfg.frozen_axis ? "true" : "false") + '\n';
  out += "bootstrap_axis = " + std::string(cfg.bootstrap_axis ? "true" : "false") + '\n';
  return out;
}

}  // namespace gyrosat
