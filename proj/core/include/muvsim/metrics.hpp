#pragma once

// Detection, segmentation and firing-agreement scoring for motor-unit
// decompositions.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "muvsim/sequence_synth.hpp"

namespace muvsim::metrics {

inline constexpr int kSmoothingWindow = 11;     // 27.5 ms at 400 Hz
inline constexpr int kFiringTolerance = 6;      // 15 ms at 400 Hz
inline constexpr double kDetectionIoU = 0.5;    // strict: IoU must exceed this

/// Centered running mean; near the edges the window is truncated to the
/// in-range samples and averaged over those only.
std::vector<double> smooth_signal(std::span<const double> signal, int window = kSmoothingWindow);

/// Local maxima of the smoothed signal with amplitude >= 0. A maximum is a
/// run of equal samples preceded by a strictly lower sample and followed by a
/// strictly lower sample; the run's leftmost index is reported. Runs touching
/// either end of the signal are not maxima.
std::vector<int> extract_firings(std::span<const double> signal, int window = kSmoothingWindow);

struct FiringMatchResult {
  std::size_t matched = 0;  // c
  std::size_t a_only = 0;   // A
  std::size_t b_only = 0;   // B
  friend bool operator==(const FiringMatchResult&, const FiringMatchResult&) = default;
};

/// One-to-one chronological matching of two ascending firing lists; a pair
/// matches when |a - b| <= tol. Each step pairs the earliest unmatched firing
/// with its earliest compatible partner, which maximizes the pair count.
FiringMatchResult match_firings(std::span<const int> a, std::span<const int> b,
                                int tol = kFiringTolerance);

/// c / (c + A + B); nullopt when all three are zero.
std::optional<double> rate_of_agreement(const FiringMatchResult& m);

/// |a and b| / |a or b|, 0 for two empty masks. Throws on grid mismatch.
double iou(const TerritoryMask& a, const TerritoryMask& b);

struct ScoredMask {
  int id = 0;
  TerritoryMask mask;
  double score = 1.0;
};

struct DetectionMatch {
  int pred_id = 0;
  int truth_id = 0;  // position in the truth list
  std::size_t pred_index = 0;
  std::size_t truth_index = 0;
  double iou = 0.0;
};

struct DetectionOutcome {
  std::vector<DetectionMatch> matches;
  std::vector<int> false_positives;  // prediction ids
  std::vector<int> false_negatives;  // truth ids (positions in the truth list)
};

/// Score-ordered matching at IoU > threshold.
///
/// Predictions are visited by descending score (ties: larger mask, then lower
/// id). Each claims the unclaimed truth with the highest IoU (ties: lower truth
/// index). A prediction that finds every eligible truth already claimed tries
/// to free one by moving earlier claimants to other eligible truths along an
/// augmenting path, so an earlier claim is never dropped and the number of
/// matches is the maximum possible.
DetectionOutcome match_detections(std::span<const ScoredMask> preds,
                                  std::span<const TerritoryMask> truths,
                                  double threshold = kDetectionIoU);

struct PrecisionRecall {
  std::optional<double> precision;  // missing without predictions
  std::optional<double> recall;     // missing without truths
};

PrecisionRecall precision_recall(const DetectionOutcome& outcome);

/// Pixel-level precision |p and t| / |p| and recall |p and t| / |t| of a matched pair.
PrecisionRecall segmentation_scores(const TerritoryMask& pred, const TerritoryMask& truth);

struct MeanStd {
  std::optional<double> mean;
  std::optional<double> std;  // sample standard deviation; 0 for a single value
  std::size_t count = 0;
};

/// Aggregates the present values; missing values are skipped.
MeanStd mean_std(std::span<const std::optional<double>> values);

}  // namespace muvsim::metrics
