#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dmfw {

/// One recorded iteration. fw_gap is nonnegative up to numerical noise since
/// the mean iterate stays feasible; subopt is F(xbar_k) - F* when a reference
/// optimum exists (raw F(xbar_k) otherwise); elapsed_s is wall time since run
/// start, 0 when timing is disabled.
struct TraceRecord {
  long k = 0;
  double fw_gap = 0;
  double subopt = 0;
  double consensus_err = 0;
  double tracking_err = 0;
  double tracking_err_sq = 0;
  double per_agent_dev = 0;
  double elapsed_s = 0;
};

inline constexpr const char* kTraceCsvHeader =
    "k,fw_gap,subopt,consensus_err,tracking_err,tracking_err_sq,per_agent_dev,elapsed_s";

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_trace_csv_file(const std::string& path, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv_file(const std::string& path);

/// Metric recording cadence: every iteration while k <= 100, then every
/// `cadence`-th, plus always the final iteration.
inline bool metrics_due(long k, long total_iters, int cadence) {
  if (k <= 100) return true;
  if (cadence >= 1 && k % cadence == 0) return true;
  return k == total_iters;
}

}  // namespace dmfw
