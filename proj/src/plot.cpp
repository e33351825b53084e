#include "dmfw/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace dmfw {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;  // (log10 k, log10 v)
};

void write_svg(const std::string& path, const std::string& title,
               const std::vector<Series>& series) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) return;  // nothing plottable
  if (xmax - xmin < 1e-9) xmax = xmin + 1;
  if (ymax - ymin < 1e-9) ymax = ymin + 1;

  auto sx = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  auto sy = [&](double y) {
    return kHeight - kBottom - (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("plot: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << " (log-log)</text>\n";

  // frame + decade ticks
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
      << "\" height=\"" << kHeight - kTop - kBottom
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  char buf[256];
  for (long e = static_cast<long>(std::ceil(xmin)); e <= static_cast<long>(std::floor(xmax)); ++e) {
    const double x = sx(static_cast<double>(e));
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e%ld</text>\n",
                  x, kTop, x, kHeight - kBottom, x, kHeight - kBottom + 16, e);
    out << buf;
  }
  for (long e = static_cast<long>(std::ceil(ymin)); e <= static_cast<long>(std::floor(ymax)); ++e) {
    const double y = sy(static_cast<double>(e));
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e%ld</text>\n",
                  kLeft, y, kWidth - kRight, y, kLeft - 5, y + 4, e);
    out << buf;
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">k</text>\n";

  int color = 0;
  double legend_y = kTop + 16;
  for (const auto& s : series) {
    const char* c = kPalette[color % 6];
    out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.pts) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", sx(x), sy(y));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                  kWidth - kRight - 90.0, legend_y, c, s.name.c_str());
    out << buf;
    legend_y += 16;
    ++color;
  }
  out << "</svg>\n";
}

}  // namespace

void write_metric_plots(const std::string& outdir, const std::vector<MeanTrace>& curves,
                        std::ostream& log) {
  struct Column {
    const char* name;
    std::function<double(const TraceRecord&)> get;
  };
  const Column columns[] = {
      {"fw_gap", [](const TraceRecord& r) { return r.fw_gap; }},
      {"subopt", [](const TraceRecord& r) { return r.subopt; }},
      {"consensus_err", [](const TraceRecord& r) { return r.consensus_err; }},
      {"tracking_err", [](const TraceRecord& r) { return r.tracking_err; }},
  };
  for (const auto& col : columns) {
    std::vector<Series> series;
    for (const auto& curve : curves) {
      Series s;
      s.name = curve.algorithm;
      for (const auto& r : curve.records) {
        const double v = col.get(r);
        if (r.k > 0 && v > 0) s.pts.emplace_back(std::log10(static_cast<double>(r.k)), std::log10(v));
      }
      if (!s.pts.empty()) series.push_back(std::move(s));
    }
    if (series.empty()) continue;
    const auto path =
        (std::filesystem::path(outdir) / ("plot_" + std::string(col.name) + ".svg")).string();
    write_svg(path, col.name, series);
    log << "wrote " << path << '\n';
  }
}

}  // namespace dmfw
