#include "sbos/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sbos {

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;
constexpr double kFloorPfs = 1e-4;

const char* kPalette[] = {"#000000", "#1f77b4", "#ff7f0e", "#2ca02c",
                          "#d62728", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (std::fabs(v - std::round(v)) < 1e-9 && std::fabs(v) < 1e9)
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  else
    std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_chart(const std::vector<ResultRow>& rows,
                         const ChartOptions& options) {
  if (rows.empty()) throw std::invalid_argument("chart: no rows to plot");

  // Policy -> points sorted by budget; map keeps legend order stable.
  std::map<std::string, std::vector<ResultRow>> series;
  for (const ResultRow& r : rows) series[r.policy].push_back(r);
  for (auto& [name, pts] : series)
    std::sort(pts.begin(), pts.end(),
              [](const ResultRow& a, const ResultRow& b) {
                return a.budget < b.budget;
              });

  const auto y_value = [&](double pcs) {
    if (!options.log_pfs) return pcs;
    return std::log10(std::max(1.0 - pcs, kFloorPfs));
  };

  double x_lo = static_cast<double>(rows.front().budget);
  double x_hi = x_lo;
  double y_lo = 0.0, y_hi = 1.0;
  if (options.log_pfs) {
    y_lo = std::log10(kFloorPfs);
    y_hi = 0.0;
  }
  for (const ResultRow& r : rows) {
    x_lo = std::min(x_lo, static_cast<double>(r.budget));
    x_hi = std::max(x_hi, static_cast<double>(r.budget));
  }
  if (x_hi == x_lo) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }

  const double plot_w = options.width - kMarginLeft - kMarginRight;
  const double plot_h = options.height - kMarginTop - kMarginBottom;
  const auto sx = [&](double t) {
    return kMarginLeft + plot_w * (t - x_lo) / (x_hi - x_lo);
  };
  const auto sy = [&](double v) {
    return kMarginTop + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << options.width << "\" height=\"" << options.height << "\">\n";
  svg << "<rect width=\"" << options.width << "\" height=\"" << options.height
      << "\" fill=\"white\"/>\n";
  if (!options.title.empty())
    svg << "<text x=\"" << num(kMarginLeft) << "\" y=\"24\" font-size=\"16\" "
        << "font-family=\"sans-serif\">" << options.title << "</text>\n";

  // Axes.
  svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(sy(y_lo))
      << "\" x2=\"" << num(sx(x_hi)) << "\" y2=\"" << num(sy(y_lo))
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(sy(y_lo))
      << "\" x2=\"" << num(kMarginLeft) << "\" y2=\"" << num(sy(y_hi))
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xt = x_lo + (x_hi - x_lo) * i / 5.0;
    const double yt = y_lo + (y_hi - y_lo) * i / 5.0;
    svg << "<line x1=\"" << num(sx(xt)) << "\" y1=\"" << num(sy(y_lo))
        << "\" x2=\"" << num(sx(xt)) << "\" y2=\"" << num(sy(y_lo) + 5.0)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(sx(xt)) << "\" y=\"" << num(sy(y_lo) + 20.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\" "
           "text-anchor=\"middle\">"
        << tick_label(xt) << "</text>\n";
    svg << "<line x1=\"" << num(kMarginLeft - 5.0) << "\" y1=\"" << num(sy(yt))
        << "\" x2=\"" << num(kMarginLeft) << "\" y2=\"" << num(sy(yt))
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(kMarginLeft - 9.0) << "\" y=\""
        << num(sy(yt) + 4.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">"
        << tick_label(yt) << "</text>\n";
  }
  svg << "<text x=\"" << num(kMarginLeft + plot_w / 2.0) << "\" y=\""
      << num(options.height - 12.0)
      << "\" font-size=\"13\" font-family=\"sans-serif\" "
         "text-anchor=\"middle\">Total budget T</text>\n";
  svg << "<text x=\"18\" y=\"" << num(kMarginTop + plot_h / 2.0)
      << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18 " << num(kMarginTop + plot_h / 2.0) << ")\">"
      << (options.log_pfs ? "log10 PFS" : "PCS") << "</text>\n";

  int color_index = 0;
  double legend_y = kMarginTop + 10.0;
  for (const auto& [name, pts] : series) {
    const char* color = kPalette[color_index % 8];
    ++color_index;

    std::ostringstream path;
    for (size_t i = 0; i < pts.size(); ++i) {
      path << (i == 0 ? "" : " ") << num(sx(static_cast<double>(pts[i].budget)))
           << ',' << num(sy(y_value(pts[i].pcs)));
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"" << path.str() << "\"/>\n";

    for (const ResultRow& r : pts) {
      const double cx = sx(static_cast<double>(r.budget));
      const double lo = sy(y_value(std::max(0.0, r.pcs - r.stderr_)));
      const double hi = sy(y_value(std::min(1.0, r.pcs + r.stderr_)));
      svg << "<line x1=\"" << num(cx) << "\" y1=\"" << num(lo) << "\" x2=\""
          << num(cx) << "\" y2=\"" << num(hi) << "\" stroke=\"" << color
          << "\"/>\n";
      svg << "<line x1=\"" << num(cx - 3.0) << "\" y1=\"" << num(lo)
          << "\" x2=\"" << num(cx + 3.0) << "\" y2=\"" << num(lo)
          << "\" stroke=\"" << color << "\"/>\n";
      svg << "<line x1=\"" << num(cx - 3.0) << "\" y1=\"" << num(hi)
          << "\" x2=\"" << num(cx + 3.0) << "\" y2=\"" << num(hi)
          << "\" stroke=\"" << color << "\"/>\n";
      svg << "<circle cx=\"" << num(cx) << "\" cy=\""
          << num(sy(y_value(r.pcs))) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>\n";
    }

    const double lx = options.width - kMarginRight + 14.0;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y - 4.0)
        << "\" x2=\"" << num(lx + 22.0) << "\" y2=\"" << num(legend_y - 4.0)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << num(lx + 28.0) << "\" y=\"" << num(legend_y)
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << name
        << "</text>\n";
    legend_y += 18.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sbos
