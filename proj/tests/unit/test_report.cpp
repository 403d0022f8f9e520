#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "muvsim/report.hpp"

using namespace muvsim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos + 1)) ++n;
  return n;
}

}  // namespace

// Snapshot: regenerate with `muvsim report --csv report_input.csv --svg report.svg`
// after an intended layout change.
TEST(Report, MatchesGoldenFile) {
  const std::string dir = MUVSIM_GOLDEN_DIR;
  const ReportTable t = report_from_csv(slurp(dir + "/report_input.csv"));
  EXPECT_EQ(render_report_svg(t), slurp(dir + "/report.svg"));
}

TEST(Report, OnePanelPerMetric) {
  const ReportTable t = report_from_csv(slurp(std::string(MUVSIM_GOLDEN_DIR) + "/report_input.csv"));
  const std::string svg = render_report_svg(t);
  for (const char* title : {"Detection precision", "Detection recall", "Segmentation precision",
                            "Segmentation recall", "Rate of agreement"}) {
    EXPECT_EQ(count(svg, std::string(">") + title + "<"), 1u) << title;
  }
  EXPECT_NE(svg.find("noise-free"), std::string::npos);
  // 9 rows x 5 metrics, one cell missing.
  EXPECT_EQ(count(svg, "<circle"), 44u);
}

TEST(Report, SingleRowIsSinglePoint) {
  ReportTable t;
  ReportRow r;
  r.n_units = 5;
  r.snr_db = 20.0;
  r.sequences = 1;
  for (auto* m : {&r.det_precision, &r.det_recall, &r.seg_precision, &r.seg_recall, &r.roa}) {
    *m = {0.5, 0.0, 1};
  }
  t.rows = {r};
  const std::string svg = render_report_svg(t);
  EXPECT_EQ(count(svg, "<circle"), 5u);
  EXPECT_EQ(count(svg, "<polyline"), 0u);
}

TEST(Report, MissingCellsAreNotDrawnAtZero) {
  ReportTable t;
  for (int n : {1, 5, 10}) {
    ReportRow r;
    r.n_units = n;
    r.snr_db = 10.0;
    r.sequences = 1;
    r.det_precision = {0.8, 0.1, 1};
    r.det_recall = {0.8, 0.1, 1};
    r.seg_precision = {0.8, 0.1, 1};
    r.seg_recall = {0.8, 0.1, 1};
    r.roa = n == 5 ? metrics::MeanStd{} : metrics::MeanStd{0.8, 0.1, 1};
    t.rows.push_back(r);
  }
  const std::string svg = render_report_svg(t);
  EXPECT_EQ(count(svg, "<circle"), 14u);
  // The bottom of the plot area (value 0) holds no point.
  EXPECT_EQ(count(svg, "cy=\"200.00\""), 0u);
  // The missing middle point splits the RoA series: no polyline there.
  EXPECT_EQ(count(svg, "<polyline"), 4u);
}
