#include "muvsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace muvsim {

namespace {

constexpr double kPanelW = 320.0;
constexpr double kPanelH = 240.0;
constexpr double kMarginL = 50.0;
constexpr double kMarginR = 15.0;
constexpr double kMarginT = 30.0;
constexpr double kMarginB = 40.0;
constexpr int kColumns = 3;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Metric {
  const char* title;
  metrics::MeanStd ReportRow::*field;
};

const Metric kMetrics[] = {
    {"Detection precision", &ReportRow::det_precision},
    {"Detection recall", &ReportRow::det_recall},
    {"Segmentation precision", &ReportRow::seg_precision},
    {"Segmentation recall", &ReportRow::seg_recall},
    {"Rate of agreement", &ReportRow::roa},
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string snr_label(double db) {
  if (std::isinf(db)) return "noise-free";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g dB", db);
  return buf;
}

}  // namespace

std::string render_report_svg(const ReportTable& table) {
  std::set<int> unit_set;
  std::set<double> snr_set;
  for (const auto& r : table.rows) {
    unit_set.insert(r.n_units);
    snr_set.insert(r.snr_db);
  }
  const std::vector<int> units(unit_set.begin(), unit_set.end());
  const std::vector<double> snrs(snr_set.begin(), snr_set.end());

  const int n_panels = static_cast<int>(std::size(kMetrics));
  const int rows = (n_panels + kColumns - 1) / kColumns;
  const double width = kColumns * kPanelW;
  const double height = rows * kPanelH + 30.0;

  const double x_lo = units.empty() ? 0.0 : units.front();
  const double x_hi = units.empty() ? 1.0 : units.back();
  const double plot_w = kPanelW - kMarginL - kMarginR;
  const double plot_h = kPanelH - kMarginT - kMarginB;
  auto x_of = [&](double n) {
    if (x_hi == x_lo) return kMarginL + plot_w / 2.0;
    return kMarginL + (n - x_lo) / (x_hi - x_lo) * plot_w;
  };
  auto y_of = [&](double v) { return kMarginT + (1.0 - std::clamp(v, 0.0, 1.0)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (int p = 0; p < n_panels; ++p) {
    const Metric& metric = kMetrics[p];
    const double ox = (p % kColumns) * kPanelW;
    const double oy = (p / kColumns) * kPanelH;
    svg << "<g transform=\"translate(" << num(ox) << "," << num(oy) << ")\">\n";
    svg << "<text x=\"" << num(kMarginL + plot_w / 2) << "\" y=\"18\" text-anchor=\"middle\" "
        << "font-size=\"13\">" << metric.title << "</text>\n";
    svg << "<rect x=\"" << num(kMarginL) << "\" y=\"" << num(kMarginT) << "\" width=\""
        << num(plot_w) << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double v = t / 4.0;
      svg << "<line x1=\"" << num(kMarginL - 4) << "\" y1=\"" << num(y_of(v)) << "\" x2=\""
          << num(kMarginL) << "\" y2=\"" << num(y_of(v)) << "\" stroke=\"black\"/>"
          << "<text x=\"" << num(kMarginL - 6) << "\" y=\"" << num(y_of(v) + 4)
          << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    for (const int n : units) {
      const double x = x_of(n);
      svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kMarginT + plot_h) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(kMarginT + plot_h + 4) << "\" stroke=\"black\"/>"
          << "<text x=\"" << num(x) << "\" y=\"" << num(kMarginT + plot_h + 16)
          << "\" text-anchor=\"middle\">" << n << "</text>\n";
    }
    svg << "<text x=\"" << num(kMarginL + plot_w / 2) << "\" y=\"" << num(kPanelH - 6)
        << "\" text-anchor=\"middle\">number of motor units</text>\n";

    for (std::size_t s = 0; s < snrs.size(); ++s) {
      const char* color = kColors[s % std::size(kColors)];
      std::vector<const ReportRow*> series;
      for (const auto& r : table.rows) {
        if (r.snr_db == snrs[s]) series.push_back(&r);
      }
      std::sort(series.begin(), series.end(),
                [](const ReportRow* a, const ReportRow* b) { return a->n_units < b->n_units; });

      // Polyline segments break at missing values.
      std::vector<std::string> run;
      auto flush = [&] {
        if (run.size() >= 2) {
          svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
          for (std::size_t i = 0; i < run.size(); ++i) svg << (i ? " " : "") << run[i];
          svg << "\"/>\n";
        }
        run.clear();
      };
      for (const auto* r : series) {
        const auto& cell = r->*metric.field;
        if (!cell.mean) {
          flush();
          continue;
        }
        run.push_back(num(x_of(r->n_units)) + "," + num(y_of(*cell.mean)));
      }
      flush();

      for (const auto* r : series) {
        const auto& cell = r->*metric.field;
        if (!cell.mean) continue;
        const double x = x_of(r->n_units);
        const double y = y_of(*cell.mean);
        if (cell.std && *cell.std > 0.0) {
          const double y1 = y_of(*cell.mean - *cell.std);
          const double y2 = y_of(*cell.mean + *cell.std);
          svg << "<path d=\"M" << num(x) << " " << num(y1) << "V" << num(y2) << "M" << num(x - 3)
              << " " << num(y1) << "h6M" << num(x - 3) << " " << num(y2) << "h6\" stroke=\"" << color
              << "\"/>\n";
        }
        svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    }
    svg << "</g>\n";
  }

  // Legend in the free slot of the last row, or below the grid.
  const double lx = (n_panels % kColumns) * kPanelW + kMarginL;
  const double ly = (n_panels / kColumns) * kPanelH + kMarginT;
  for (std::size_t s = 0; s < snrs.size(); ++s) {
    const double y = ly + 18.0 * static_cast<double>(s);
    svg << "<rect x=\"" << num(lx) << "\" y=\"" << num(y) << "\" width=\"12\" height=\"12\" fill=\""
        << kColors[s % std::size(kColors)] << "\"/><text x=\"" << num(lx + 18) << "\" y=\""
        << num(y + 10) << "\">" << snr_label(snrs[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace muvsim
