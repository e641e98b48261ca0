#include "signcop/metrics.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "signcop/error.hpp"

namespace signcop {

double auc(std::span<const double> scores, std::span<const int> truth) {
  if (scores.size() != truth.size()) throw DimensionError("auc: length mismatch");
  std::size_t pos = 0;
  for (int y : truth) {
    if (y != 1 && y != -1) throw DomainError("auc: labels must be -1 or +1");
    pos += y == 1;
  }
  const std::size_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0) throw DomainError("auc: both classes must be present");

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of 1-based mid-ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (truth[idx[k]] == 1) rank_sum += mid;
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double q = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double macro_f1(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DimensionError("macro_f1: length mismatch");
  double total = 0.0;
  for (int cls : {-1, 1}) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if ((predicted[i] != 1 && predicted[i] != -1) || (truth[i] != 1 && truth[i] != -1))
        throw DomainError("macro_f1: labels must be -1 or +1");
      const bool p = predicted[i] == cls;
      const bool t = truth[i] == cls;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    const std::size_t den = 2 * tp + fp + fn;
    if (den > 0) total += 2.0 * static_cast<double>(tp) / static_cast<double>(den);
  }
  return total / 2.0;
}

}  // namespace signcop
