#include "berest/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace berest {

namespace {

/// Canonical point order: lexicographic by coordinates, label as final key.
/// Neighbor ties are broken by this order, so any permutation of the input
/// produces identical errors.
std::vector<Eigen::Index> canonical_order(const LabeledDataset& ds) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.n()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < ds.dim(); ++c) {
      if (ds.x(a, c) != ds.x(b, c)) return ds.x(a, c) < ds.x(b, c);
    }
    return ds.labels[static_cast<std::size_t>(a)] <
           ds.labels[static_cast<std::size_t>(b)];
  });
  return order;
}

struct NeighborTables {
  // wrong_votes(i, j): for canonical point i and the j-th odd k (k = 2j+1),
  // whether the majority vote misclassifies the point.
  std::vector<std::vector<char>> wrong;
  int max_k;
  Eigen::Index n;
};

/// Sorted-neighbor sweep shared by all k values: the n x n distance matrix
/// is built once and each point's neighbor list is walked once.
NeighborTables build_tables(const LabeledDataset& ds, int max_k) {
  const Eigen::Index n = ds.n();
  const auto order = canonical_order(ds);

  Eigen::MatrixXd pts(n, ds.dim());
  std::vector<ClassLabel> lab(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    pts.row(i) = ds.x.row(order[static_cast<std::size_t>(i)]);
    lab[static_cast<std::size_t>(i)] =
        ds.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  const Eigen::MatrixXd d2 = squared_distance_matrix(pts);

  max_k = std::min<int>(max_k, static_cast<int>(n) - 1);
  NeighborTables t;
  t.max_k = max_k;
  t.n = n;
  t.wrong.assign(static_cast<std::size_t>(n),
                 std::vector<char>(static_cast<std::size_t>((max_k + 1) / 2), 0));

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n) - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    idx.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) idx.push_back(j);
    auto closer = [&](Eigen::Index a, Eigen::Index b) {
      const double da = d2(i, a), db = d2(i, b);
      if (da != db) return da < db;
      return a < b;
    };
    std::partial_sort(idx.begin(), idx.begin() + max_k, idx.end(), closer);

    const bool self_a = lab[static_cast<std::size_t>(i)] == ClassLabel::A;
    int votes_a = 0;
    for (int r = 0; r < max_k; ++r) {
      votes_a += (lab[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])] ==
                  ClassLabel::A);
      const int k = r + 1;
      if (k % 2 == 0) continue;
      const bool predict_a = 2 * votes_a > k;
      t.wrong[static_cast<std::size_t>(i)][static_cast<std::size_t>(k / 2)] =
          (predict_a != self_a);
    }
  }
  return t;
}

double error_for_k(const NeighborTables& t, int k) {
  long wrong = 0;
  for (const auto& row : t.wrong)
    wrong += row[static_cast<std::size_t>(k / 2)];
  return static_cast<double>(wrong) / static_cast<double>(t.n);
}

void check_k(const LabeledDataset& ds, int k) {
  if (k < 1 || k >= ds.n())
    throw std::invalid_argument("knn_loo_error: need 1 <= k <= n-1");
  if (k % 2 == 0)
    throw std::invalid_argument("knn_loo_error: k must be odd");
}

}  // namespace

std::vector<int> default_k_range() {
  std::vector<int> range;
  for (int k = 1; k <= 199; k += 2) range.push_back(k);
  return range;
}

double knn_loo_error(const LabeledDataset& dataset, int k) {
  check_k(dataset, k);
  const auto tables = build_tables(dataset, k);
  return error_for_k(tables, k);
}

double knn_lower_bound(double upper, int k) {
  if (k < 1) throw std::invalid_argument("knn_lower_bound: k must be >= 1");
  if (k > 2) return upper / (1.0 + std::sqrt(1.0 / k));
  if (k == 2) return upper / 2.0;
  return (1.0 - std::sqrt(std::max(0.0, 1.0 - 2.0 * upper))) / 2.0;
}

KnnEstimate knn_estimate(const LabeledDataset& dataset,
                         const std::vector<int>& k_range) {
  std::vector<int> ks;
  for (int k : k_range)
    if (k < dataset.n()) ks.push_back(k);
  if (ks.empty())
    throw std::invalid_argument("knn_estimate: k_range is empty after truncation");
  std::sort(ks.begin(), ks.end());
  for (int k : ks) check_k(dataset, k);

  const auto tables = build_tables(dataset, ks.back());

  KnnEstimate best;
  bool first = true;
  for (int k : ks) {
    const double err = error_for_k(tables, k);
    if (first || err < best.upper) {
      best.upper = err;
      best.k0 = k;
      first = false;
    }
  }
  best.lower = knn_lower_bound(best.upper, best.k0);
  best.mid = 0.5 * (best.upper + best.lower);
  return best;
}

}  // namespace berest
