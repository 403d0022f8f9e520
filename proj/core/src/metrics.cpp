#include "muvsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "muvsim/errors.hpp"

namespace muvsim::metrics {

std::vector<double> smooth_signal(std::span<const double> signal, int window) {
  if (window < 1 || window % 2 == 0) throw ParameterError("smoothing window must be odd");
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<double> out(signal.size(), 0.0);
  // Direct per-window sums: all-zero windows stay exactly zero, which keeps
  // quiet stretches free of rounding-noise maxima.
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, k + half);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += signal[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(k)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<int> extract_firings(std::span<const double> signal, int window) {
  const std::vector<double> s = smooth_signal(signal, window);
  std::vector<int> peaks;
  const std::size_t n = s.size();
  std::size_t k = 1;
  while (k + 1 < n) {
    if (!(s[k - 1] < s[k])) {
      ++k;
      continue;
    }
    std::size_t end = k;  // last index of the plateau starting at k
    while (end + 1 < n && s[end + 1] == s[k]) ++end;
    if (end + 1 < n && s[end + 1] < s[k] && s[k] >= 0.0) peaks.push_back(static_cast<int>(k));
    k = end + 1;
  }
  return peaks;
}

FiringMatchResult match_firings(std::span<const int> a, std::span<const int> b, int tol) {
  FiringMatchResult r;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (b[j] < a[i] - tol) {
      ++r.b_only;
      ++j;
    } else if (a[i] < b[j] - tol) {
      ++r.a_only;
      ++i;
    } else {
      ++r.matched;
      ++i;
      ++j;
    }
  }
  r.a_only += a.size() - i;
  r.b_only += b.size() - j;
  return r;
}

std::optional<double> rate_of_agreement(const FiringMatchResult& m) {
  const std::size_t total = m.matched + m.a_only + m.b_only;
  if (total == 0) return std::nullopt;
  return static_cast<double>(m.matched) / static_cast<double>(total);
}

double iou(const TerritoryMask& a, const TerritoryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ParameterError("IoU of masks on different grids");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto& ca = a.cells();
  const auto& cb = b.cells();
  for (std::size_t p = 0; p < ca.size(); ++p) {
    inter += static_cast<std::size_t>(ca[p] & cb[p]);
    uni += static_cast<std::size_t>(ca[p] | cb[p]);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

class Assignment {
 public:
  Assignment(std::size_t n_preds, std::size_t n_truths)
      : candidates_(n_preds), owner_(n_truths, kNone), claimed_(n_preds, kNone) {}

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<std::vector<std::size_t>> candidates_;  // eligible truths, best first
  std::vector<std::size_t> owner_;                    // truth -> pred
  std::vector<std::size_t> claimed_;                  // pred -> truth

  bool claim(std::size_t p) {
    for (const std::size_t t : candidates_[p]) {
      if (owner_[t] == kNone) {
        bind(p, t);
        return true;
      }
    }
    std::vector<bool> visited(owner_.size(), false);
    return augment(p, visited);
  }

 private:
  void bind(std::size_t p, std::size_t t) {
    owner_[t] = p;
    claimed_[p] = t;
  }

  bool augment(std::size_t p, std::vector<bool>& visited) {
    for (const std::size_t t : candidates_[p]) {
      if (visited[t]) continue;
      visited[t] = true;
      if (owner_[t] == kNone) {
        bind(p, t);
        return true;
      }
    }
    for (const std::size_t t : candidates_[p]) {
      const std::size_t q = owner_[t];
      if (q == kNone || q == p) continue;
      if (reassign(q, t, visited)) {
        bind(p, t);
        return true;
      }
    }
    return false;
  }

  // Moves q off `from` onto another eligible truth, recursively.
  bool reassign(std::size_t q, std::size_t from, std::vector<bool>& visited) {
    for (const std::size_t t : candidates_[q]) {
      if (t == from || visited[t]) continue;
      visited[t] = true;
      if (owner_[t] == kNone || reassign(owner_[t], t, visited)) {
        bind(q, t);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

DetectionOutcome match_detections(std::span<const ScoredMask> preds,
                                  std::span<const TerritoryMask> truths, double threshold) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> sizes(preds.size());
  for (std::size_t p = 0; p < preds.size(); ++p) sizes[p] = preds[p].mask.count();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (preds[x].score != preds[y].score) return preds[x].score > preds[y].score;
    if (sizes[x] != sizes[y]) return sizes[x] > sizes[y];
    return preds[x].id < preds[y].id;
  });

  Assignment assign(preds.size(), truths.size());
  std::vector<std::vector<double>> overlap(preds.size(), std::vector<double>(truths.size(), 0.0));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    auto& cand = assign.candidates_[p];
    for (std::size_t t = 0; t < truths.size(); ++t) {
      overlap[p][t] = iou(preds[p].mask, truths[t]);
      if (overlap[p][t] > threshold) cand.push_back(t);
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [&](std::size_t x, std::size_t y) { return overlap[p][x] > overlap[p][y]; });
  }

  DetectionOutcome out;
  for (const std::size_t p : order) {
    if (!assign.claim(p)) out.false_positives.push_back(preds[p].id);
  }
  for (const std::size_t p : order) {
    const std::size_t t = assign.claimed_[p];
    if (t == Assignment::kNone) continue;
    out.matches.push_back({preds[p].id, static_cast<int>(t), p, t, overlap[p][t]});
  }
  std::vector<bool> taken(truths.size(), false);
  for (const auto& m : out.matches) taken[m.truth_index] = true;
  for (std::size_t t = 0; t < truths.size(); ++t) {
    if (!taken[t]) out.false_negatives.push_back(static_cast<int>(t));
  }
  return out;
}

PrecisionRecall precision_recall(const DetectionOutcome& outcome) {
  const auto tp = static_cast<double>(outcome.matches.size());
  const auto fp = static_cast<double>(outcome.false_positives.size());
  const auto fn = static_cast<double>(outcome.false_negatives.size());
  PrecisionRecall pr;
  if (tp + fp > 0) pr.precision = tp / (tp + fp);
  if (tp + fn > 0) pr.recall = tp / (tp + fn);
  return pr;
}

PrecisionRecall segmentation_scores(const TerritoryMask& pred, const TerritoryMask& truth) {
  if (pred.width() != truth.width() || pred.height() != truth.height()) {
    throw ParameterError("segmentation scores of masks on different grids");
  }
  std::size_t inter = 0;
  const auto& cp = pred.cells();
  const auto& ct = truth.cells();
  for (std::size_t p = 0; p < cp.size(); ++p) inter += static_cast<std::size_t>(cp[p] & ct[p]);
  PrecisionRecall pr;
  const std::size_t np = pred.count();
  const std::size_t nt = truth.count();
  if (np > 0) pr.precision = static_cast<double>(inter) / static_cast<double>(np);
  if (nt > 0) pr.recall = static_cast<double>(inter) / static_cast<double>(nt);
  return pr;
}

MeanStd mean_std(std::span<const std::optional<double>> values) {
  MeanStd r;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++r.count;
  }
  if (r.count == 0) return r;
  const double mean = sum / static_cast<double>(r.count);
  double ss = 0.0;
  for (const auto& v : values) {
    if (v) ss += (*v - mean) * (*v - mean);
  }
  r.mean = mean;
  r.std = r.count > 1 ? std::sqrt(ss / static_cast<double>(r.count - 1)) : 0.0;
  return r;
}

}  // namespace muvsim::metrics
