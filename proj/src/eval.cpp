#include "gyrosat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gyrosat/io.hpp"

namespace gyrosat {

Alignment align_truth(std::span<const TruthSample> truth, const SmoothedTrajectory& traj) {
  Alignment out;
  if (traj.size() == 0) throw DataError("empty trajectory");
  const double lo = traj.times().front();
  const double hi = traj.times().back();
  for (const TruthSample& s : truth) {
    if (s.t < lo || s.t > hi) {
      ++out.dropped;
      continue;
    }
    const QueryResult q = traj.query(s.t);
    out.pairs.push_back({s.t, s.omega, q.omega, q.var});
  }
  if (out.pairs.empty()) throw DataError("truth and estimates do not overlap in time");
  return out;
}

Alignment align_truth(std::span<const TruthSample> truth,
                      std::span<const VelocityEstimate> estimates) {
  if (estimates.empty()) throw DataError("no estimates to align");
  std::vector<double> times(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) times[i] = estimates[i].t;

  double tol = 0.0;
  if (times.size() >= 2) {
    std::vector<double> gaps(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) gaps[i] = times[i + 1] - times[i];
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
    // Half spacing, exclusive; the relative shrink keeps exact midpoints unpaired
    // despite rounding in the timestamps.
    tol = 0.5 * gaps[gaps.size() / 2] * (1.0 - 1e-6);
  }

  Alignment out;
  for (const TruthSample& s : truth) {
    const auto it = std::lower_bound(times.begin(), times.end(), s.t);
    std::size_t best = times.size();
    double best_d = std::numeric_limits<double>::infinity();
    if (it != times.end()) {
      best = static_cast<std::size_t>(it - times.begin());
      best_d = *it - s.t;
    }
    if (it != times.begin()) {
      const auto j = static_cast<std::size_t>(it - times.begin()) - 1;
      if (s.t - times[j] < best_d) {
        best = j;
        best_d = s.t - times[j];
      }
    }
    const bool exact = best_d == 0.0;
    if (best == times.size() || !(exact || best_d < tol)) {
      ++out.dropped;
      continue;
    }
    out.pairs.push_back({s.t, s.omega, estimates[best].omega, estimates[best].var});
  }
  if (out.pairs.empty()) throw DataError("truth and estimates do not overlap in time");
  return out;
}

std::vector<double> saturation_errors(std::span<const PairedSample> pairs,
                                      std::span<const SaturationWindow> windows,
                                      ErrorMetric metric) {
  std::vector<double> errors;
  for (const PairedSample& p : pairs) {
    for (const SaturationWindow& w : windows) {
      if (!w.contains_time(p.t)) continue;
      const auto a = static_cast<Eigen::Index>(index(w.axis));
      const double e = metric == ErrorMetric::AxisSpeed ? std::abs(p.estimate[a] - p.truth[a])
                                                        : (p.estimate - p.truth).norm();
      if (std::isfinite(e)) errors.push_back(e);
    }
  }
  return errors;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw DataError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ErrorStats summarize(std::span<const double> errors) {
  if (errors.empty()) throw DataError("no saturated samples");
  std::vector<double> v(errors.begin(), errors.end());
  std::sort(v.begin(), v.end());
  ErrorStats s;
  s.count = v.size();
  s.median = percentile(v, 50.0);
  s.p90 = percentile(v, 90.0);
  s.p99 = percentile(v, 99.0);
  s.max = v.back();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

double reduction_pct(double raw, double recovered) noexcept {
  if (!(raw > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * (1.0 - recovered / raw);
}

ErrorReport saturation_error_report(const RunErrors& run) {
  if (run.raw.empty() || run.recovered.empty()) throw DataError("no saturated samples");
  ErrorReport r;
  r.run = run.run;
  r.raw = summarize(run.raw);
  r.recovered = summarize(run.recovered);
  r.median_reduction_pct = reduction_pct(r.raw.median, r.recovered.median);
  return r;
}

ErrorReport saturation_error_stats(std::span<const PairedSample> raw,
                                   std::span<const PairedSample> recovered,
                                   std::span<const SaturationWindow> windows, ErrorMetric metric) {
  RunErrors run;
  run.raw = saturation_errors(raw, windows, metric);
  run.recovered = saturation_errors(recovered, windows, metric);
  return saturation_error_report(run);
}

namespace {

ErrorStats median_of(std::span<const ErrorStats> stats) {
  auto field = [&](double ErrorStats::*m) {
    std::vector<double> v;
    v.reserve(stats.size());
    for (const ErrorStats& s : stats) v.push_back(s.*m);
    return percentile(v, 50.0);
  };
  ErrorStats out;
  out.count = stats.size();
  out.median = field(&ErrorStats::median);
  out.mean = field(&ErrorStats::mean);
  out.p90 = field(&ErrorStats::p90);
  out.p99 = field(&ErrorStats::p99);
  out.max = field(&ErrorStats::max);
  return out;
}

}  // namespace

ErrorReport aggregate(std::span<const RunErrors> runs, Pooling pooling) {
  ErrorReport out;
  if (pooling == Pooling::Pooled) {
    RunErrors all;
    all.run = "pooled";
    for (const RunErrors& r : runs) {
      all.raw.insert(all.raw.end(), r.raw.begin(), r.raw.end());
      all.recovered.insert(all.recovered.end(), r.recovered.begin(), r.recovered.end());
    }
    return saturation_error_report(all);
  }
  std::vector<ErrorStats> raw, rec;
  for (const RunErrors& r : runs) {
    if (r.raw.empty() || r.recovered.empty()) continue;
    raw.push_back(summarize(r.raw));
    rec.push_back(summarize(r.recovered));
  }
  if (raw.empty()) throw DataError("no saturated samples");
  out.run = "per_run";
  out.raw = median_of(raw);
  out.recovered = median_of(rec);
  out.median_reduction_pct = reduction_pct(out.raw.median, out.recovered.median);
  return out;
}

std::string report_csv(std::span<const ErrorReport> reports) {
  std::ostringstream os;
  os << "run,stat,raw,recovered,reduction_pct\n";
  for (const ErrorReport& r : reports) {
    auto row = [&](const char* stat, double raw, double rec) {
      os << r.run << ',' << stat << ',' << format_double(raw) << ',' << format_double(rec) << ','
         << format_double(reduction_pct(raw, rec)) << '\n';
    };
    os << r.run << ",count," << r.raw.count << ',' << r.recovered.count << ",\n";
    row("median", r.raw.median, r.recovered.median);
    row("mean", r.raw.mean, r.recovered.mean);
    row("p90", r.raw.p90, r.recovered.p90);
    row("p99", r.raw.p99, r.recovered.p99);
    row("max", r.raw.max, r.recovered.max);
  }
  return os.str();
}

std::string report_text(std::span<const ErrorReport> reports) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "Angular-speed error inside saturation windows [rad/s]\n";
  for (const ErrorReport& r : reports) {
    os << "\n[" << r.run << "] samples: raw " << r.raw.count << ", recovered " << r.recovered.count
       << '\n';
    os << "  stat        raw   recovered\n";
    auto line = [&](const char* name, double a, double b) {
      os << "  " << name;
      for (std::size_t i = std::char_traits<char>::length(name); i < 8; ++i) os << ' ';
      os << ' ' << a << "   " << b << '\n';
    };
    line("median", r.raw.median, r.recovered.median);
    line("mean", r.raw.mean, r.recovered.mean);
    line("p90", r.raw.p90, r.recovered.p90);
    line("p99", r.raw.p99, r.recovered.p99);
    line("max", r.raw.max, r.recovered.max);
    os.precision(1);
    os << "  median reduction: " << r.median_reduction_pct << " %\n";
    os.precision(4);
  }
  return os.str();
}

}  // namespace gyrosat
