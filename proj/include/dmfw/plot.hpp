#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dmfw/trace.hpp"

namespace dmfw {

struct MeanTrace {
  std::string algorithm;
  std::vector<TraceRecord> records;  // seed-averaged
};

/// Static log-log SVG curves of the four headline metrics (fw_gap, subopt,
/// consensus_err, tracking_err), one file per metric, algorithms overlaid.
void write_metric_plots(const std::string& outdir, const std::vector<MeanTrace>& curves,
                        std::ostream& log);

}  // namespace dmfw
