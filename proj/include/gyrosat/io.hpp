#pragma once

// CSV formats shared by the CLI and the tests.
//
//   measurements  t,gx,gy,gz,ax,ay,az
//   truth         t,wx,wy,wz
//   estimates     t,wx,wy,wz,var_x,var_y,var_z,src_x,src_y,src_z
//   windows       axis,t_start,t_end
//
// A header line is required. Lines starting with '#' and blank lines are
// ignored. Numbers are written in shortest round-trip form.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gyrosat/imu_core.hpp"
#include "gyrosat/sim.hpp"
#include "gyrosat/types.hpp"

namespace gyrosat {

inline constexpr std::string_view kImuHeader = "t,gx,gy,gz,ax,ay,az";
inline constexpr std::string_view kTruthHeader = "t,wx,wy,wz";
inline constexpr std::string_view kEstimatesHeader =
    "t,wx,wy,wz,var_x,var_y,var_z,src_x,src_y,src_z";
inline constexpr std::string_view kWindowsHeader = "axis,t_start,t_end";

std::string format_double(double v);

std::string imu_csv(std::span<const ImuSample> samples);
std::string truth_csv(std::span<const TruthSample> truth);
std::string estimates_csv(std::span<const VelocityEstimate> estimates);
std::string windows_csv(std::span<const SaturationWindow> windows);

// Parsers throw DataError naming `source` and the 1-based line number.
std::vector<ImuSample> parse_imu_csv(std::istream& in, std::string_view source = "<stream>");
std::vector<TruthSample> parse_truth_csv(std::istream& in, std::string_view source = "<stream>");
/// Also accepts the measurement schema, taking the gyro columns as the estimate.
std::vector<VelocityEstimate> parse_estimates_csv(std::istream& in,
                                                  std::string_view source = "<stream>");
/// Windows carry axis and time span only; sample indices are left at zero.
std::vector<SaturationWindow> parse_windows_csv(std::istream& in,
                                                std::string_view source = "<stream>");

std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path);
std::vector<TruthSample> read_truth_csv(const std::filesystem::path& path);
std::vector<VelocityEstimate> read_estimates_csv(const std::filesystem::path& path);
std::vector<SaturationWindow> read_windows_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace gyrosat
