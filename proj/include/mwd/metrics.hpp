#pragma once

#include <span>

namespace mwd {

// Per-class F1 weighted by class prevalence. A class with no true and no
// predicted members contributes 0.
double weighted_f1(std::span<const int> y_true, std::span<const int> y_pred);

// (p0 - pe) / (1 - pe). When pe == 1 the raters are constant and equal, which
// is treated as perfect agreement.
double cohens_kappa(std::span<const int> y_true, std::span<const int> y_pred);

// Mann-Whitney AUC with ties counted as one half. MW (1) is the positive class.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

}  // namespace mwd
