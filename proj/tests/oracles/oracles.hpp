#pragma once

// Independent reference implementations used only by tests. They are written
// from the definitions, favour clarity over speed and share no code with the
// library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

// Windowed mean, window clipped to the valid range.
inline std::vector<double> naive_smooth(const std::vector<double>& x, int window) {
  const int n = static_cast<int>(x.size());
  const int half = window / 2;
  std::vector<double> out(x.size());
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    int used = 0;
    for (int j = k - half; j <= k + half; ++j) {
      if (j < 0 || j >= n) continue;
      sum += x[j];
      ++used;
    }
    out[k] = sum / used;
  }
  return out;
}

// Peaks of an already smoothed signal: plateau rule, leftmost index, value >= 0,
// plateaus touching an end excluded.
inline std::vector<int> naive_peaks(const std::vector<double>& s) {
  std::vector<int> peaks;
  const int n = static_cast<int>(s.size());
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const bool left = i > 0 && s[i - 1] < s[i];
    const bool right = j < n - 1 && s[j + 1] < s[i];
    if (left && right && s[i] >= 0.0) peaks.push_back(i);
    i = j + 1;
  }
  return peaks;
}

// Maximum number of disjoint pairs (a_i, b_j) with |a_i - b_j| <= tol.
// Memoized search over (position in a, used subset of b); fine for |b| <= 16.
inline std::size_t max_firing_pairs(const std::vector<int>& a, const std::vector<int>& b, int tol) {
  const std::size_t nb = b.size();
  const std::size_t states = std::size_t{1} << nb;
  std::vector<int> memo((a.size() + 1) * states, -1);
  std::function<int(std::size_t, std::uint32_t)> best = [&](std::size_t i, std::uint32_t used) {
    if (i == a.size()) return 0;
    int& slot = memo[i * states + used];
    if (slot >= 0) return slot;
    int r = best(i + 1, used);
    for (std::size_t j = 0; j < nb; ++j) {
      if ((used >> j) & 1u) continue;
      if (std::abs(a[i] - b[j]) <= tol) r = std::max(r, 1 + best(i + 1, used | (1u << j)));
    }
    slot = r;
    return r;
  };
  return static_cast<std::size_t>(best(0, 0));
}

inline double roa(std::size_t c, std::size_t a, std::size_t b) {
  return static_cast<double>(c) / static_cast<double>(c + a + b);
}

// Masks as plain 0/1 vectors of equal length.
using Bits = std::vector<int>;

inline double iou(const Bits& p, const Bits& t) {
  int inter = 0, uni = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    inter += p[k] && t[k];
    uni += p[k] || t[k];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

// Maximum number of one-to-one (prediction, truth) pairs with IoU > thr.
inline std::size_t max_detection_pairs(const std::vector<Bits>& preds, const std::vector<Bits>& truths,
                                       double thr) {
  const std::size_t nt = truths.size();
  const std::size_t states = std::size_t{1} << nt;
  std::vector<std::vector<bool>> ok(preds.size(), std::vector<bool>(nt));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < nt; ++j) ok[i][j] = iou(preds[i], truths[j]) > thr;
  }
  std::vector<int> memo((preds.size() + 1) * states, -1);
  std::function<int(std::size_t, std::uint32_t)> best = [&](std::size_t i, std::uint32_t used) {
    if (i == preds.size()) return 0;
    int& slot = memo[i * states + used];
    if (slot >= 0) return slot;
    int r = best(i + 1, used);
    for (std::size_t j = 0; j < nt; ++j) {
      if (((used >> j) & 1u) == 0 && ok[i][j]) r = std::max(r, 1 + best(i + 1, used | (1u << j)));
    }
    slot = r;
    return r;
  };
  return static_cast<std::size_t>(best(0, 0));
}

// Composite Simpson rule on [a, b] with n (even) panels.
template <typename F>
double simpson(F f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Lattice points (x, y) with x^2 + y^2 <= r^2: the pixel count of a circle of
// radius r pixels centred on a pixel centre.
inline long lattice_disc_count(double r) {
  long n = 0;
  const long lim = static_cast<long>(std::floor(r));
  for (long x = -lim; x <= lim; ++x) {
    for (long y = -lim; y <= lim; ++y) {
      if (static_cast<double>(x * x + y * y) <= r * r) ++n;
    }
  }
  return n;
}

// Unordered cross-unit firing pairs with |dt| <= window.
inline std::size_t coincident_pairs(const std::vector<std::vector<double>>& trains, double window) {
  std::size_t pairs = 0;
  for (std::size_t u = 0; u < trains.size(); ++u) {
    for (std::size_t v = u + 1; v < trains.size(); ++v) {
      for (const double a : trains[u]) {
        for (const double b : trains[v]) pairs += std::abs(a - b) <= window + 1e-12;
      }
    }
  }
  return pairs;
}

// Synchronized fraction in the cross-correlogram sense: coincident pairs in
// excess of the level expected for independent trains with the same counts,
// per firing. Two uniform points on [0, T] lie within w with probability
// 2w/T - (w/T)^2.
inline double synchrony_index(const std::vector<std::vector<double>>& trains, double window,
                              double duration) {
  std::size_t firings = 0;
  for (const auto& t : trains) firings += t.size();
  const double q = 2.0 * window / duration - (window / duration) * (window / duration);
  double chance = 0.0;
  for (std::size_t u = 0; u < trains.size(); ++u) {
    for (std::size_t v = u + 1; v < trains.size(); ++v) {
      chance += static_cast<double>(trains[u].size() * trains[v].size()) * q;
    }
  }
  return (static_cast<double>(coincident_pairs(trains, window)) - chance) / static_cast<double>(firings);
}

// Firing count of a train built from the sampling law with a standard-library
// generator: FR ~ U[lo, hi], first ~ U[0, 1/FR), IPI = 1/FR + N(0, cv/FR)
// resampled below the refractory floor, truncated at the duration.
inline int mc_firing_count(std::mt19937_64& gen, double lo, double hi, double duration, double cv,
                           double refractory) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  const double fr = lo + (hi - lo) * u(gen);
  double t = u(gen) / fr;
  int count = 0;
  while (t < duration) {
    ++count;
    double ipi = 0.0;
    do {
      ipi = 1.0 / fr + z(gen) * cv / fr;
    } while (ipi < refractory);
    t += ipi;
  }
  return count;
}

}  // namespace oracle
