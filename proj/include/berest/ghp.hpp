#pragma once

#include <utility>
#include <vector>

#include "berest/dataset.hpp"

namespace berest {

struct GhpEstimate {
  double lower = 0.0;       // 1/2 - sqrt(u)/2
  double upper = 0.0;       // 1/2 - u/2
  double mid = 0.0;
  int cross_edges = 0;      // Friedman-Rafsky statistic R
  double divergence = 0.0;  // clamped plug-in estimate in [0, 1]
};

/// Minimum spanning tree of the complete Euclidean graph, dense-graph Prim.
/// Equal-weight candidate edges are resolved by ascending vertex index, so
/// the result is deterministic even with repeated distances.
std::vector<std::pair<Eigen::Index, Eigen::Index>> euclidean_mst(
    const Eigen::MatrixXd& points);

/// Number of MST edges joining points with different labels.
int fr_cross_count(const LabeledDataset& dataset);

/// Henze-Penrose divergence plug-in 1 - R*n / (2*n_a*n_b), clamped to [0, 1]
/// (the raw statistic can go negative on heavily mixed small samples).
double hp_divergence(const LabeledDataset& dataset);

/// BER bounds from the divergence with empirical priors:
/// u = 4*p*q*D + (p-q)^2, bounds (1/2 - sqrt(u)/2, 1/2 - u/2).
GhpEstimate ghp_estimate(const LabeledDataset& dataset);

}  // namespace berest
