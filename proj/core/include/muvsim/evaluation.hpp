#pragma once

// Scoring a predictions container against a dataset container, aggregated
// per (unit count, SNR) category.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "muvsim/dataset_io.hpp"
#include "muvsim/metrics.hpp"

namespace muvsim {

struct SequenceScores {
  std::optional<double> det_precision;
  std::optional<double> det_recall;
  std::optional<double> seg_precision;  // mean over true-positive detections
  std::optional<double> seg_recall;
  std::optional<double> roa;            // mean over matched units with firings
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

/// Detection at IoU > 0.5; segmentation and firing agreement on the
/// true-positive pairs only. Ground truth is list A of the firing match.
SequenceScores score_sequence(const SequenceRecord& truth, const PredictionRecord& prediction);

struct ReportRow {
  int n_units = 0;
  double snr_db = 0.0;
  std::size_t sequences = 0;
  metrics::MeanStd det_precision;
  metrics::MeanStd det_recall;
  metrics::MeanStd seg_precision;
  metrics::MeanStd seg_recall;
  metrics::MeanStd roa;
};

struct ReportTable {
  std::vector<ReportRow> rows;  // ascending unit count, then SNR (inf last)
};

ReportTable evaluate(const ContainerReader& dataset, const ContainerReader& predictions,
                     unsigned threads = 0);
ReportTable evaluate(const std::filesystem::path& dataset, const std::filesystem::path& predictions,
                     unsigned threads = 0);

/// Ground truth re-expressed as a prediction (every score 1).
PredictionRecord truth_as_prediction(const SequenceRecord& truth, std::uint64_t sequence_index);

/// Writes a predictions container holding the dataset's own ground truth.
void write_truth_predictions(const std::filesystem::path& dataset, const std::filesystem::path& out);

std::string report_to_csv(const ReportTable& table);
ReportTable report_from_csv(const std::string& text);

}  // namespace muvsim
