#pragma once

#include <span>

namespace signcop {

// Mann–Whitney AUC over labels in {-1, +1}; tied scores earn half credit.
// Throws DomainError if either class is missing or lengths differ.
double auc(std::span<const double> scores, std::span<const int> truth);
// Unweighted mean of the F1 scores of classes -1 and +1. A class absent
// from both predictions and truth scores 0.
double macro_f1(std::span<const int> predicted, std::span<const int> truth);

}  // namespace signcop
