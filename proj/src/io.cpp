#include "gyrosat/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace gyrosat {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::string_view source, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty()) {
    fail(source, line, "cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

// Calls `row(fields, line_no)` for each data line after checking the header.
template <class Row>
std::string parse_table(std::istream& in, std::string_view source,
                        std::initializer_list<std::string_view> headers, Row&& row) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    if (header.empty()) {
      std::string normalized;
      for (std::string_view f : split(content)) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
      }
      for (std::string_view h : headers) {
        if (normalized == h) header = std::string(h);
      }
      if (header.empty()) fail(source, line_no, "unexpected header '" + std::string(content) + "'");
      columns = split(header).size();
      continue;
    }
    const std::vector<std::string_view> fields = split(content);
    if (fields.size() != columns) {
      fail(source, line_no,
           "expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    }
    row(header, fields, line_no);
  }
  if (header.empty()) fail(source, line_no, "missing header");
  return header;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string imu_csv(std::span<const ImuSample> samples) {
  std::string out(kImuHeader);
  out += '\n';
  for (const ImuSample& s : samples) {
    out += format_double(s.t);
    for (int a = 0; a < 3; ++a) out += ',' + format_double(s.gyro[a]);
    for (int a = 0; a < 3; ++a) out += ',' + format_double(s.accel[a]);
    out += '\n';
  }
  return out;
}

std::string truth_csv(std::span<const TruthSample> truth) {
  std::string out(kTruthHeader);
  out += '\n';
  for (const TruthSample& s : truth) {
    out += format_double(s.t);
    for (int a = 0; a < 3; ++a) out += ',' + format_double(s.omega[a]);
    out += '\n';
  }
  return out;
}

std::string estimates_csv(std::span<const VelocityEstimate> estimates) {
  std::string out(kEstimatesHeader);
  out += '\n';
  for (const VelocityEstimate& e : estimates) {
    out += format_double(e.t);
    for (int a = 0; a < 3; ++a) out += ',' + format_double(e.omega[a]);
    for (int a = 0; a < 3; ++a) out += ',' + format_double(e.var[a]);
    for (std::size_t a = 0; a < 3; ++a) out += ',' + std::string(to_string(e.source[a]));
    out += '\n';
  }
  return out;
}

std::string windows_csv(std::span<const SaturationWindow> windows) {
  std::string out(kWindowsHeader);
  out += '\n';
  for (const SaturationWindow& w : windows) {
    out += axis_name(w.axis);
    out += ',' + format_double(w.t_start) + ',' + format_double(w.t_end) + '\n';
  }
  return out;
}

std::vector<ImuSample> parse_imu_csv(std::istream& in, std::string_view source) {
  std::vector<ImuSample> out;
  parse_table(in, source, {kImuHeader}, [&](const std::string&, const auto& f, std::size_t line) {
    ImuSample s;
    s.t = parse_number(f[0], source, line);
    for (int a = 0; a < 3; ++a) s.gyro[a] = parse_number(f[1 + a], source, line);
    for (int a = 0; a < 3; ++a) s.accel[a] = parse_number(f[4 + a], source, line);
    out.push_back(s);
  });
  return out;
}

std::vector<TruthSample> parse_truth_csv(std::istream& in, std::string_view source) {
  std::vector<TruthSample> out;
  parse_table(in, source, {kTruthHeader}, [&](const std::string&, const auto& f, std::size_t line) {
    TruthSample s;
    s.t = parse_number(f[0], source, line);
    for (int a = 0; a < 3; ++a) s.omega[a] = parse_number(f[1 + a], source, line);
    out.push_back(s);
  });
  return out;
}

std::vector<VelocityEstimate> parse_estimates_csv(std::istream& in, std::string_view source) {
  std::vector<VelocityEstimate> out;
  parse_table(in, source, {kEstimatesHeader, kImuHeader},
              [&](const std::string& header, const auto& f, std::size_t line) {
                VelocityEstimate e;
                e.t = parse_number(f[0], source, line);
                for (int a = 0; a < 3; ++a) e.omega[a] = parse_number(f[1 + a], source, line);
                if (header == kImuHeader) {
                  out.push_back(e);
                  return;
                }
                for (int a = 0; a < 3; ++a) e.var[a] = parse_number(f[4 + a], source, line);
                for (std::size_t a = 0; a < 3; ++a) {
                  const auto src = parse_source(f[7 + a]);
                  if (!src) fail(source, line, "unknown source tag '" + std::string(f[7 + a]) + "'");
                  e.source[a] = *src;
                }
                out.push_back(e);
              });
  return out;
}

std::vector<SaturationWindow> parse_windows_csv(std::istream& in, std::string_view source) {
  std::vector<SaturationWindow> out;
  parse_table(in, source, {kWindowsHeader}, [&](const std::string&, const auto& f, std::size_t line) {
    SaturationWindow w;
    const auto axis = parse_axis(f[0]);
    if (!axis) fail(source, line, "unknown axis '" + std::string(f[0]) + "'");
    w.axis = *axis;
    w.t_start = parse_number(f[1], source, line);
    w.t_end = parse_number(f[2], source, line);
    if (!(w.t_start <= w.t_end)) fail(source, line, "window ends before it starts");
    out.push_back(w);
  });
  return out;
}

std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_imu_csv(in, path.string());
}

std::vector<TruthSample> read_truth_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_truth_csv(in, path.string());
}

std::vector<VelocityEstimate> read_estimates_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_estimates_csv(in, path.string());
}

std::vector<SaturationWindow> read_windows_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_windows_csv(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gyrosat
