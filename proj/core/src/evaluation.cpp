#include "muvsim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include "muvsim/errors.hpp"
#include "muvsim/generation.hpp"

namespace muvsim {

namespace {

std::vector<double> widen(const std::vector<float>& s) { return {s.begin(), s.end()}; }

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double sum = 0.0;
  for (const double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

void check_prediction(const PredictionRecord& p, const GridSpec& grid, std::size_t index) {
  for (const auto& u : p.units) {
    if (u.mask.width() != grid.width_px || u.mask.height() != grid.height_px) {
      throw FormatError("prediction " + std::to_string(index) + ": mask not on the dataset grid");
    }
    if (!(u.score >= 0.0f && u.score <= 1.0f)) {
      throw ParameterError("prediction " + std::to_string(index) + ": score outside [0, 1]");
    }
  }
}

std::string list_offenders(const std::vector<std::size_t>& bad) {
  std::ostringstream msg;
  const std::size_t shown = std::min<std::size_t>(bad.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg << (i ? ", " : "") << bad[i];
  if (bad.size() > shown) msg << ", ... (" << bad.size() << " total)";
  return msg.str();
}

}  // namespace

SequenceScores score_sequence(const SequenceRecord& truth, const PredictionRecord& prediction) {
  std::vector<TerritoryMask> truth_masks;
  truth_masks.reserve(truth.truths.size());
  for (const auto& t : truth.truths) truth_masks.push_back(t.mask);
  std::vector<metrics::ScoredMask> preds;
  preds.reserve(prediction.units.size());
  for (const auto& u : prediction.units) preds.push_back({u.id, u.mask, static_cast<double>(u.score)});

  const metrics::DetectionOutcome outcome = metrics::match_detections(preds, truth_masks);
  SequenceScores s;
  s.true_positives = outcome.matches.size();
  s.false_positives = outcome.false_positives.size();
  s.false_negatives = outcome.false_negatives.size();
  const auto det = metrics::precision_recall(outcome);
  s.det_precision = det.precision;
  s.det_recall = det.recall;

  std::vector<double> seg_p, seg_r, roa;
  for (const auto& m : outcome.matches) {
    const auto& pu = prediction.units[m.pred_index];
    const auto& tu = truth.truths[m.truth_index];
    const auto seg = metrics::segmentation_scores(pu.mask, tu.mask);
    if (seg.precision) seg_p.push_back(*seg.precision);
    if (seg.recall) seg_r.push_back(*seg.recall);

    const auto truth_firings = metrics::extract_firings(widen(tu.signal));
    const auto est_firings = metrics::extract_firings(widen(pu.signal));
    if (const auto r = metrics::rate_of_agreement(metrics::match_firings(truth_firings, est_firings))) {
      roa.push_back(*r);
    }
  }
  s.seg_precision = mean_of(seg_p);
  s.seg_recall = mean_of(seg_r);
  s.roa = mean_of(roa);
  return s;
}

ReportTable evaluate(const ContainerReader& dataset, const ContainerReader& predictions,
                     unsigned threads) {
  if (dataset.kind() != ContainerKind::dataset) throw ParameterError("--dataset is not a dataset container");
  if (predictions.kind() != ContainerKind::predictions) {
    throw ParameterError("--predictions is not a predictions container");
  }
  if (!(dataset.grid() == predictions.grid())) {
    throw ParameterError("predictions were made on a different grid than the dataset");
  }
  if (dataset.size() != predictions.size()) {
    throw ParameterError("dataset has " + std::to_string(dataset.size()) +
                         " records but predictions has " + std::to_string(predictions.size()));
  }

  const std::size_t n = dataset.size();
  const unsigned workers = resolve_threads(threads);
  struct Item {
    int n_units = 0;
    double snr_db = 0.0;
    std::uint64_t claimed_index = 0;
    SequenceScores scores;
  };
  std::vector<Item> items(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SequenceRecord truth = dataset.read_labels(i);
      const PredictionRecord pred = predictions.read_prediction(i);
      items[i].n_units = static_cast<int>(truth.truths.size());
      items[i].snr_db = truth.snr_db;
      items[i].claimed_index = pred.sequence_index;
      if (pred.sequence_index != i) continue;  // reported below
      check_prediction(pred, dataset.grid(), i);
      items[i].scores = score_sequence(truth, pred);
    }
  };
  if (workers <= 1 || n < 2) {
    work(0, n);
  } else {
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::future<void>> jobs;
    for (std::size_t b = 0; b < n; b += chunk) {
      jobs.push_back(std::async(std::launch::async, work, b, std::min(n, b + chunk)));
    }
    for (auto& j : jobs) j.get();
  }

  std::vector<std::size_t> misaligned;
  for (std::size_t i = 0; i < n; ++i) {
    if (items[i].claimed_index != i) misaligned.push_back(i);
  }
  if (!misaligned.empty()) {
    throw ParameterError("prediction records do not align with dataset indices at: " +
                         list_offenders(misaligned));
  }

  // Cell -> per-sequence values, in dataset order.
  std::map<std::pair<int, double>, std::vector<const SequenceScores*>> cells;
  for (const auto& it : items) cells[{it.n_units, it.snr_db}].push_back(&it.scores);

  ReportTable table;
  for (const auto& [key, scores] : cells) {
    ReportRow row;
    row.n_units = key.first;
    row.snr_db = key.second;
    row.sequences = scores.size();
    auto column = [&](auto member) {
      std::vector<std::optional<double>> v;
      v.reserve(scores.size());
      for (const auto* s : scores) v.push_back(s->*member);
      return metrics::mean_std(v);
    };
    row.det_precision = column(&SequenceScores::det_precision);
    row.det_recall = column(&SequenceScores::det_recall);
    row.seg_precision = column(&SequenceScores::seg_precision);
    row.seg_recall = column(&SequenceScores::seg_recall);
    row.roa = column(&SequenceScores::roa);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ReportTable evaluate(const std::filesystem::path& dataset, const std::filesystem::path& predictions,
                     unsigned threads) {
  const ContainerReader d(dataset);
  const ContainerReader p(predictions);
  return evaluate(d, p, threads);
}

PredictionRecord truth_as_prediction(const SequenceRecord& truth, std::uint64_t sequence_index) {
  PredictionRecord p;
  p.sequence_index = sequence_index;
  for (const auto& t : truth.truths) p.units.push_back({t.unit_id, t.mask, 1.0f, t.signal});
  return p;
}

void write_truth_predictions(const std::filesystem::path& dataset, const std::filesystem::path& out) {
  const ContainerReader reader(dataset);
  ContainerWriter writer(out, reader.grid(), ContainerKind::predictions, reader.size(),
                         R"({"provenance":"ground truth"})");
  for (std::size_t i = 0; i < reader.size(); ++i) {
    writer.append(truth_as_prediction(reader.read_labels(i), i));
  }
  writer.finalize();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr const char* kCsvHeader =
    "n_units,snr_db,sequences,det_precision_mean,det_precision_std,det_recall_mean,"
    "det_recall_std,seg_precision_mean,seg_precision_std,seg_recall_mean,seg_recall_std,"
    "roa_mean,roa_std";

std::string fmt(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::string fmt_db(double db) {
  if (std::isinf(db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", db);
  return buf;
}

std::optional<double> parse_cell(const std::string& cell, std::size_t line) {
  if (cell == "NA") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
}

}  // namespace

std::string report_to_csv(const ReportTable& table) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.n_units << ',' << fmt_db(r.snr_db) << ',' << r.sequences;
    for (const auto* m : {&r.det_precision, &r.det_recall, &r.seg_precision, &r.seg_recall, &r.roa}) {
      out << ',' << fmt(m->mean) << ',' << fmt(m->std);
    }
    out << '\n';
  }
  return out.str();
}

ReportTable report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty report CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw FormatError("report CSV header not recognized");

  ReportTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 13) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 13 columns, found " +
                        std::to_string(cells.size()));
    }
    ReportRow row;
    const auto units = parse_cell(cells[0], line_no);
    const auto seqs = parse_cell(cells[2], line_no);
    if (!units || !seqs) throw FormatError("line " + std::to_string(line_no) + ": missing key column");
    row.n_units = static_cast<int>(*units);
    row.snr_db = cells[1] == "inf" ? std::numeric_limits<double>::infinity()
                                   : parse_cell(cells[1], line_no).value_or(0.0);
    row.sequences = static_cast<std::size_t>(*seqs);
    metrics::MeanStd* fields[] = {&row.det_precision, &row.det_recall, &row.seg_precision,
                                  &row.seg_recall, &row.roa};
    for (std::size_t f = 0; f < 5; ++f) {
      fields[f]->mean = parse_cell(cells[3 + 2 * f], line_no);
      fields[f]->std = parse_cell(cells[4 + 2 * f], line_no);
      fields[f]->count = fields[f]->mean ? row.sequences : 0;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace muvsim
