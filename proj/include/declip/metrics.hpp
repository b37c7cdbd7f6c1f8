#pragma once

#include <optional>
#include <vector>

namespace declip {

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& x);

// Pearson correlation; nullopt when either input is constant (undefined
// rather than NaN). Throws Errc::length_mismatch on unequal or short input.
std::optional<double> plcc(const std::vector<double>& x, const std::vector<double>& y);

// Spearman rank correlation with average-rank tie handling.
std::optional<double> srcc(const std::vector<double>& x, const std::vector<double>& y);

// Multinomial logistic-regression probe: full-batch gradient descent, zero
// init, bias column appended; returns accuracy on the test rows. Fully
// deterministic.
double linear_probe_accuracy(const std::vector<std::vector<double>>& train_x,
                             const std::vector<int>& train_y,
                             const std::vector<std::vector<double>>& test_x,
                             const std::vector<int>& test_y, int n_classes, int iterations = 400,
                             double learning_rate = 1.0);

// Four-parameter logistic remap fitted by gradient descent, used by the
// optional PLCC preprocessing step: f(x) = b + (a - b) / (1 + exp(-(x - c) / s)).
std::vector<double> fit_logistic_remap(const std::vector<double>& score,
                                       const std::vector<double>& mos, int iterations = 2000);
double apply_logistic_remap(const std::vector<double>& params, double x);

} // namespace declip
