#include "dmfw/trace.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dmfw {

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceCsvHeader << '\n';
  char line[512];
  for (const auto& r : trace) {
    // %.17g round-trips doubles exactly, keeping reruns byte-identical.
    std::snprintf(line, sizeof(line), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.k,
                  r.fw_gap, r.subopt, r.consensus_err, r.tracking_err, r.tracking_err_sq,
                  r.per_agent_dev, r.elapsed_s);
    out << line;
  }
}

void write_trace_csv_file(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("trace: cannot open " + path + " for writing");
  write_trace_csv(out, trace);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: empty CSV");
  if (line != kTraceCsvHeader)
    throw std::runtime_error("trace: unexpected CSV header: " + line);
  std::vector<TraceRecord> trace;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TraceRecord r;
    const int got = std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg,%lg,%lg,%lg,%lg", &r.k, &r.fw_gap,
                                &r.subopt, &r.consensus_err, &r.tracking_err, &r.tracking_err_sq,
                                &r.per_agent_dev, &r.elapsed_s);
    if (got != 8)
      throw std::runtime_error("trace: malformed CSV row at line " + std::to_string(lineno));
    trace.push_back(r);
  }
  return trace;
}

std::vector<TraceRecord> read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace: cannot open " + path);
  return read_trace_csv(in);
}

}  // namespace dmfw
