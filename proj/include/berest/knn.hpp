#pragma once

#include <vector>

#include "berest/dataset.hpp"

namespace berest {

struct KnnEstimate {
  double upper = 0.0;  // kNN-LOO error at the selected k
  double lower = 0.0;  // asymptotic lower-bound transform of upper
  double mid = 0.0;
  int k0 = 1;          // selected k (smallest error; smallest k on ties)
};

/// Default search range from the published configuration: odd k in [1, 199].
std::vector<int> default_k_range();

/// Leave-one-out kNN error: each point is classified by the majority label
/// of its k nearest other points under squared Euclidean distance. Only odd
/// k is accepted so the vote is always decisive; equal distances are ordered
/// by ascending index after a canonical lexicographic sort of the points,
/// which makes the result invariant to presentation order.
double knn_loo_error(const LabeledDataset& dataset, int k);

/// Asymptotic lower bound for the kNN-LOO error at a given k (piecewise in
/// k; the k=1 radicand is clamped at zero).
double knn_lower_bound(double upper, int k);

/// Scan a k range, keep the minimum LOO error, and derive the bound pair.
/// Values of k >= n are silently dropped from the range.
KnnEstimate knn_estimate(const LabeledDataset& dataset,
                         const std::vector<int>& k_range);

}  // namespace berest
